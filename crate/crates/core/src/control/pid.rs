//! Cartesian PID baseline: a buoy-velocity channel and a UAV-height channel
//! that produce desired accelerations, mapped to thrust and pitch with the
//! usual small-quadrotor relation.

use crate::control::attitude::{AttitudeGains, AttitudeLoop, PitchLimiter};
use crate::control::{ControlCommand, Controller, ControllerKind, Observation, Setpoint};
use crate::dynamics::RigidBodyParams;
use crate::error::{invalid, Result};
use crate::filter::SecondOrderFilter;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains<T> {
    pub kp: T,
    pub ki: T,
    pub kd: T,
}

impl<T: Real> PidGains<T> {
    pub fn new(kp: T, ki: T, kd: T) -> Result<Self> {
        for (name, v) in [("kp", kp), ("ki", ki), ("kd", kd)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { kp, ki, kd })
    }

    pub fn from_array(k: [T; 3]) -> Result<Self> {
        Self::new(k[0], k[1], k[2])
    }
}

/// Parallel-form PID with a first-order filtered derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidChannel<T> {
    gains: PidGains<T>,
    derivative_tau: T,
    integral: T,
    derivative: T,
    prev_error: Option<T>,
}

impl<T: Real> PidChannel<T> {
    pub fn new(gains: PidGains<T>, derivative_tau: T) -> Self {
        debug_assert!(derivative_tau > T::zero());
        Self {
            gains,
            derivative_tau,
            integral: T::zero(),
            derivative: T::zero(),
            prev_error: None,
        }
    }

    pub fn integral(&self) -> T {
        self.integral
    }

    /// Output for `error` at this sample. The derivative state is updated
    /// here; the integral only in [`PidChannel::commit`].
    pub fn output(&mut self, error: T, dt: T) -> T {
        let raw = match self.prev_error {
            Some(prev) => (error - prev) / dt,
            None => T::zero(),
        };
        let blend = T::one() - (-dt / self.derivative_tau).exp();
        self.derivative += (raw - self.derivative) * blend;
        self.prev_error = Some(error);
        self.gains.kp * error + self.gains.ki * self.integral + self.gains.kd * self.derivative
    }

    /// Accumulates the integral unless the actuator is saturated.
    pub fn commit(&mut self, error: T, dt: T, saturated: bool) {
        if !saturated {
            self.integral += error * dt;
        }
    }

    /// `output` followed by `commit`.
    pub fn step(&mut self, error: T, dt: T, saturated: bool) -> T {
        let out = self.output(error, dt);
        self.commit(error, dt, saturated);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidConfig<T> {
    pub velocity: PidGains<T>,
    pub height: PidGains<T>,
    pub attitude: AttitudeGains<T>,
    pub pitch: PitchLimiter<T>,
    pub shaping_tau: T,
    pub derivative_tau: T,
    pub attitude_derivative_tau: T,
    pub max_thrust: T,
}

/// Maps desired accelerations to `(u₁, θ'_uc)` for a UAV of mass `mass`.
pub fn acceleration_to_thrust<T: Real>(mass: T, gravity: T, a_x: T, a_z: T) -> (T, T) {
    let vertical = gravity + a_z;
    (mass * a_x.hypot(vertical), a_x.atan2(vertical))
}

#[derive(Debug, Clone)]
pub struct PidController<T> {
    config: PidConfig<T>,
    body: RigidBodyParams<T>,
    shaper: SecondOrderFilter<T>,
    velocity: PidChannel<T>,
    height: PidChannel<T>,
    attitude: AttitudeLoop<T>,
}

impl<T: Real> PidController<T> {
    pub fn new(config: PidConfig<T>, body: RigidBodyParams<T>) -> Result<Self> {
        if !(config.shaping_tau > T::zero())
            || !(config.derivative_tau > T::zero())
            || !(config.attitude_derivative_tau > T::zero())
        {
            return Err(invalid("filter time constant", "must be > 0"));
        }
        if !(config.max_thrust > T::zero()) {
            return Err(invalid("max thrust", "must be > 0"));
        }
        Ok(Self {
            shaper: SecondOrderFilter::new(config.shaping_tau, T::zero()),
            velocity: PidChannel::new(config.velocity, config.derivative_tau),
            height: PidChannel::new(config.height, config.derivative_tau),
            attitude: AttitudeLoop::new(
                config.pitch,
                config.attitude,
                body.uav_inertia,
                config.attitude_derivative_tau,
            ),
            config,
            body,
        })
    }

    pub fn config(&self) -> &PidConfig<T> {
        &self.config
    }
}

impl<T: Real> Controller<T> for PidController<T> {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Pid
    }

    fn update(&mut self, obs: &Observation<T>, setpoint: &Setpoint<T>, dt: T) -> Result<ControlCommand<T>> {
        let state = &obs.state;
        let velocity_ref = self.shaper.value();
        self.shaper.advance(setpoint.velocity, dt);

        let (_, z_u) = state.uav_position(self.body.cable_length);
        let e_x = velocity_ref - state.x_b_dot;
        let e_z = setpoint.uav_height - z_u;
        let a_x = self.velocity.output(e_x, dt);
        let a_z = self.height.output(e_z, dt);
        let (raw_thrust, pitch_raw) = acceleration_to_thrust(self.body.uav_mass, self.body.gravity, a_x, a_z);
        let saturated = raw_thrust > self.config.max_thrust;
        let thrust = raw_thrust.max(T::zero()).min(self.config.max_thrust);
        self.velocity.commit(e_x, dt, saturated);
        self.height.commit(e_z, dt, saturated);

        let att = self.attitude.update(pitch_raw, state, dt);
        let direction = state.alpha + pitch_raw;
        Ok(ControlCommand {
            thrust,
            torque: att.torque,
            radial: thrust * direction.sin(),
            tangential: thrust * direction.cos(),
            pitch_raw,
            pitch: att.pitch,
            velocity_ref,
            tension_estimate: T::zero(),
            saturated,
            held: false,
        })
    }
}
