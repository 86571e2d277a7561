//! Forward-surge velocity control: an adaptive backstepping outer loop in
//! the polar frame attached to the buoy.
//!
//! The law acts on two channels. The radial thrust `u_T` regulates the buoy
//! surge speed through the cable tension; the tangential thrust `u_α`
//! regulates the cable elevation angle. Each channel carries an integral
//! state that doubles as the adaptive estimate of a lumped constant
//! disturbance: `δ̂_V = γ_V e_V^I` and `δ̂_α = γ_α k_α1 e_α^I`.

use crate::control::attitude::{AttitudeGains, AttitudeLoop, PitchLimiter};
use crate::control::{ControlCommand, Controller, ControllerKind, Observation, Setpoint};
use crate::dynamics::{tension_from_buoy_motion, Accelerations, EnvSample, RigidBodyParams, SystemState};
use crate::error::{invalid, ModelError, Result};
use crate::filter::{DerivativeEstimator, SecondOrderFilter};
use crate::scalar::Real;

/// Which root of the PID-like mapping to use for `(k_α1, k_α2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainRoot {
    /// `k_α1` is the smaller root.
    #[default]
    Small,
    Large,
}

/// Backstepping gains. PID-like gains are always derived from these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsvcGains<T> {
    pub k_alpha1: T,
    pub k_alpha2: T,
    pub k_v: T,
    pub gamma_alpha: T,
    pub gamma_v: T,
}

impl<T: Real> FsvcGains<T> {
    pub fn new(k_alpha1: T, k_alpha2: T, k_v: T, gamma_alpha: T, gamma_v: T) -> Result<Self> {
        for (name, v) in [
            ("k_alpha1", k_alpha1),
            ("k_alpha2", k_alpha2),
            ("k_v", k_v),
            ("gamma_alpha", gamma_alpha),
            ("gamma_v", gamma_v),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(Self {
            k_alpha1,
            k_alpha2,
            k_v,
            gamma_alpha,
            gamma_v,
        })
    }

    /// Inverts the PID-like mapping from `[k_P, k_I, k_D]` triples for the
    /// elevation and radial channels. The radial channel has no D term.
    pub fn from_pid_like(alpha: [T; 3], radial: [T; 3], root: GainRoot) -> Result<Self> {
        let [kp, ki, kd] = alpha;
        let disc = kd * kd - T::lit(4.0) * (kp - T::one());
        if !(disc >= T::zero()) {
            return Err(invalid("k_alpha", "no real backstepping gains reproduce these PID gains"));
        }
        let root_small = (kd - disc.sqrt()) * T::half();
        let root_large = (kd + disc.sqrt()) * T::half();
        let (k1, k2) = match root {
            GainRoot::Small => (root_small, root_large),
            GainRoot::Large => (root_large, root_small),
        };
        if radial[2] != T::zero() {
            return Err(invalid("k_T", "the radial channel has no derivative gain"));
        }
        Self::new(k1, k2, radial[0], ki / k1, radial[1])
    }

    pub fn k_p_alpha(&self) -> T {
        T::one() + self.k_alpha1 * self.k_alpha2
    }

    pub fn k_d_alpha(&self) -> T {
        self.k_alpha1 + self.k_alpha2
    }

    pub fn k_i_alpha(&self) -> T {
        self.gamma_alpha * self.k_alpha1
    }

    pub fn k_p_v(&self) -> T {
        self.k_v
    }

    pub fn k_i_v(&self) -> T {
        self.gamma_v
    }

    /// `[k_P, k_I, k_D]` of the elevation channel.
    pub fn alpha_pid(&self) -> [T; 3] {
        [self.k_p_alpha(), self.k_i_alpha(), self.k_d_alpha()]
    }

    /// `[k_P, k_I, k_D]` of the radial channel.
    pub fn radial_pid(&self) -> [T; 3] {
        [self.k_p_v(), self.k_i_v(), T::zero()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsvcConfig<T> {
    pub gains: FsvcGains<T>,
    pub attitude: AttitudeGains<T>,
    pub pitch: PitchLimiter<T>,
    /// Time constant `τ_f` of the velocity reference shaper.
    pub shaping_tau: T,
    /// Time constant of the elevation reference differentiator.
    pub derivative_tau: T,
    /// Time constant of the pitch command differentiator.
    pub attitude_derivative_tau: T,
    pub max_thrust: T,
    /// The law is suspended when `cos α` drops to this value.
    pub cos_guard: T,
}

/// Everything the outer law needs at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterInputs<T> {
    pub alpha: T,
    pub alpha_dot: T,
    /// `V̇`
    pub surge_accel: T,
    /// `z̈_b`
    pub heave_accel: T,
    pub e_v: T,
    pub e_v_int: T,
    pub e_alpha: T,
    pub e_alpha_dot: T,
    pub e_alpha_int: T,
    /// `dV̄/dt`
    pub velocity_ref_rate: T,
    /// `d²ᾱ/dt²`
    pub alpha_ref_accel: T,
    pub tension_estimate: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterOutput<T> {
    pub radial: T,
    pub tangential: T,
    /// Unclipped `u₁`.
    pub thrust: T,
    pub pitch_raw: T,
}

/// The PID-like backstepping law: radial/tangential thrust, total thrust
/// and the unbounded pitch command.
pub fn outer_law<T: Real>(body: &RigidBodyParams<T>, gains: &FsvcGains<T>, x: &OuterInputs<T>) -> OuterOutput<T> {
    let (s, c) = x.alpha.sin_cos();
    let g = body.gravity;
    let l = body.cable_length;
    let m = body.uav_mass;
    let h_t = (l * x.alpha_dot * x.alpha_dot - x.heave_accel * s - g * s) / c;
    let h_alpha = (x.surge_accel * s - x.heave_accel * c - g * c) / l;
    let radial = x.tension_estimate
        + m * c * (-h_t + x.velocity_ref_rate - gains.k_p_v() * x.e_v - gains.k_i_v() * x.e_v_int);
    let tangential = m
        * l
        * (-h_alpha + x.alpha_ref_accel
            - gains.k_p_alpha() * x.e_alpha
            - gains.k_d_alpha() * x.e_alpha_dot
            - gains.k_i_alpha() * x.e_alpha_int);
    OuterOutput {
        radial,
        tangential,
        thrust: tangential.hypot(radial),
        pitch_raw: T::FRAC_PI_2() - x.alpha - tangential.atan2(radial),
    }
}

/// Elevation angle that keeps the UAV at `uav_height` for the current buoy
/// height: `ᾱ = asin((z̄_u − z_b) / l)`.
pub fn corrected_elevation_angle<T: Real>(uav_height: T, z_b: T, cable_length: T) -> Result<T> {
    let dz = uav_height - z_b;
    if dz.abs() > cable_length {
        return Err(ModelError::ReferenceInfeasible {
            dz: dz.abs().as_f64(),
            length: cable_length.as_f64(),
        });
    }
    Ok((dz / cable_length).asin())
}

/// Model-based tension estimate from the buoy surge balance using the
/// previous sample's accelerations, clamped at zero.
pub fn tension_estimate<T: Real>(state: &SystemState<T>, prev_accel: &Accelerations<T>, env: &EnvSample<T>) -> Result<T> {
    Ok(tension_from_buoy_motion(state.alpha, prev_accel, env)?.max(T::zero()))
}

/// Internal quantities of the last update, for logging and analysis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FsvcDiagnostics<T> {
    pub e_v: T,
    pub e_alpha: T,
    pub e_alpha_dot: T,
    pub alpha_ref: T,
    pub alpha_ref_rate: T,
    pub e_v_int: T,
    pub e_alpha_int: T,
}

#[derive(Debug, Clone)]
pub struct FsvcController<T> {
    config: FsvcConfig<T>,
    body: RigidBodyParams<T>,
    shaper: SecondOrderFilter<T>,
    alpha_ref: DerivativeEstimator<T>,
    attitude: AttitudeLoop<T>,
    e_v_int: T,
    e_alpha_int: T,
    last: Option<ControlCommand<T>>,
    diagnostics: FsvcDiagnostics<T>,
}

impl<T: Real> FsvcController<T> {
    pub fn new(config: FsvcConfig<T>, body: RigidBodyParams<T>) -> Result<Self> {
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
            alpha_ref: DerivativeEstimator::new(config.derivative_tau),
            attitude: AttitudeLoop::new(
                config.pitch,
                config.attitude,
                body.uav_inertia,
                config.attitude_derivative_tau,
            ),
            config,
            body,
            e_v_int: T::zero(),
            e_alpha_int: T::zero(),
            last: None,
            diagnostics: FsvcDiagnostics::default(),
        })
    }

    pub fn config(&self) -> &FsvcConfig<T> {
        &self.config
    }

    pub fn diagnostics(&self) -> &FsvcDiagnostics<T> {
        &self.diagnostics
    }

    /// Adaptive estimate of the lumped surge disturbance, `γ_V e_V^I`.
    pub fn surge_disturbance_estimate(&self) -> T {
        self.config.gains.gamma_v * self.e_v_int
    }

    /// Adaptive estimate of the lumped elevation disturbance, `γ_α k_α1 e_α^I`.
    pub fn elevation_disturbance_estimate(&self) -> T {
        self.config.gains.gamma_alpha * self.config.gains.k_alpha1 * self.e_alpha_int
    }

    /// Composite Lyapunov value `𝒱_V + 𝒱_α2` at the last update, taking the
    /// true disturbances as zero.
    pub fn lyapunov(&self) -> T {
        let g = &self.config.gains;
        let d = &self.diagnostics;
        let dv = g.gamma_v * d.e_v_int;
        let da = g.gamma_alpha * g.k_alpha1 * d.e_alpha_int;
        let e_omega = d.e_alpha_dot + g.k_alpha1 * d.e_alpha;
        T::half()
            * (d.e_v * d.e_v
                + dv * dv / g.gamma_v
                + d.e_alpha * d.e_alpha
                + e_omega * e_omega
                + da * da / g.gamma_alpha)
    }

    fn hold(&self, velocity_ref: T) -> ControlCommand<T> {
        let hover = ControlCommand {
            thrust: self.body.uav_mass * self.body.gravity,
            ..Default::default()
        };
        ControlCommand {
            held: true,
            velocity_ref,
            ..self.last.unwrap_or(hover)
        }
    }
}

impl<T: Real> Controller<T> for FsvcController<T> {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Fsvc
    }

    fn update(&mut self, obs: &Observation<T>, setpoint: &Setpoint<T>, dt: T) -> Result<ControlCommand<T>> {
        let state = &obs.state;
        let l = self.body.cable_length;

        let velocity_ref = self.shaper.value();
        let velocity_ref_rate = self.shaper.rate();
        self.shaper.advance(setpoint.velocity, dt);

        let alpha_ref = corrected_elevation_angle(setpoint.uav_height, state.z_b, l)?;
        let (alpha_ref_rate, alpha_ref_accel) = self.alpha_ref.update(alpha_ref, dt);

        let e_v = state.x_b_dot - velocity_ref;
        let e_alpha = state.alpha - alpha_ref;
        let e_alpha_dot = state.alpha_dot - alpha_ref_rate;
        self.diagnostics = FsvcDiagnostics {
            e_v,
            e_alpha,
            e_alpha_dot,
            alpha_ref,
            alpha_ref_rate,
            e_v_int: self.e_v_int,
            e_alpha_int: self.e_alpha_int,
        };

        if state.alpha.cos() <= self.config.cos_guard {
            let cmd = self.hold(velocity_ref);
            self.last = Some(cmd);
            return Ok(cmd);
        }

        let tension = match obs.tension_override {
            Some(t) => t.max(T::zero()),
            None => tension_estimate(state, &obs.accel, &obs.env)?,
        };
        let out = outer_law(
            &self.body,
            &self.config.gains,
            &OuterInputs {
                alpha: state.alpha,
                alpha_dot: state.alpha_dot,
                surge_accel: obs.accel.x_b_ddot,
                heave_accel: obs.accel.z_b_ddot,
                e_v,
                e_v_int: self.e_v_int,
                e_alpha,
                e_alpha_dot,
                e_alpha_int: self.e_alpha_int,
                velocity_ref_rate,
                alpha_ref_accel,
                tension_estimate: tension,
            },
        );
        let saturated = out.thrust > self.config.max_thrust;
        let thrust = out.thrust.max(T::zero()).min(self.config.max_thrust);
        let att = self.attitude.update(out.pitch_raw, state, dt);

        if !saturated {
            self.e_v_int += e_v * dt;
        }
        self.e_alpha_int += (e_alpha + e_alpha_dot / self.config.gains.k_alpha1) * dt;

        let cmd = ControlCommand {
            thrust,
            torque: att.torque,
            radial: out.radial,
            tangential: out.tangential,
            pitch_raw: out.pitch_raw,
            pitch: att.pitch,
            velocity_ref,
            tension_estimate: tension,
            saturated,
            held: false,
        };
        self.last = Some(cmd);
        Ok(cmd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn body() -> RigidBodyParams<f64> {
        RigidBodyParams {
            uav_mass: 1.8,
            uav_inertia: 0.03,
            cable_mass: 0.5,
            cable_length: 7.0,
            gravity: 9.81,
        }
    }

    fn gains() -> FsvcGains<f64> {
        FsvcGains::new(1.0, 6.0, 60.0, 2.0, 9.6).unwrap()
    }

    fn hover_inputs() -> OuterInputs<f64> {
        OuterInputs {
            alpha: FRAC_PI_4,
            alpha_dot: 0.0,
            surge_accel: 0.0,
            heave_accel: 0.0,
            e_v: 0.0,
            e_v_int: 0.0,
            e_alpha: 0.0,
            e_alpha_dot: 0.0,
            e_alpha_int: 0.0,
            velocity_ref_rate: 0.0,
            alpha_ref_accel: 0.0,
            tension_estimate: 0.0,
        }
    }

    #[test]
    fn gain_mapping_reproduces_published_lists() {
        let g = gains();
        assert_eq!(g.alpha_pid(), [7.0, 2.0, 7.0]);
        assert_eq!(g.radial_pid(), [60.0, 9.6, 0.0]);
        let back = FsvcGains::from_pid_like([7.0, 2.0, 7.0], [60.0, 9.6, 0.0], GainRoot::Small).unwrap();
        assert_eq!(back, g);
        let other = FsvcGains::<f64>::from_pid_like([7.0, 2.0, 7.0], [60.0, 9.6, 0.0], GainRoot::Large).unwrap();
        assert_eq!((other.k_alpha1, other.k_alpha2), (6.0, 1.0));
        assert!((other.gamma_alpha - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(other.alpha_pid(), [7.0, 2.0, 7.0]);
        assert!(FsvcGains::new(0.0, 6.0, 60.0, 2.0, 9.6).is_err());
    }

    #[test]
    fn hover_identity() {
        let out = outer_law(&body(), &gains(), &hover_inputs());
        let w = 1.8 * 9.81;
        assert!((out.radial - w * FRAC_PI_4.sin()).abs() < 1e-12);
        assert!((out.tangential - w * FRAC_PI_4.cos()).abs() < 1e-12);
        assert!((out.radial - 12.49).abs() < 0.01);
        assert!((out.thrust - w).abs() < 1e-12);
        assert!(out.pitch_raw.abs() < 1e-12);
    }

    #[test]
    fn towing_example() {
        let inputs = OuterInputs {
            tension_estimate: 6.364,
            ..hover_inputs()
        };
        let out = outer_law(&body(), &gains(), &inputs);
        assert!((out.radial - 18.85).abs() < 0.01);
        assert!((out.thrust - 22.61).abs() < 0.01);
        assert!((out.pitch_raw - 0.199).abs() < 2e-3);
        assert!((out.pitch_raw - (FRAC_PI_4 - out.tangential.atan2(out.radial))).abs() < 1e-15);
    }

    #[test]
    fn thrust_decomposition_round_trip() {
        let mut rng = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let inputs = OuterInputs {
                alpha: 0.1 + 1.3 * next(),
                alpha_dot: next() - 0.5,
                surge_accel: 4.0 * next() - 2.0,
                heave_accel: 4.0 * next() - 2.0,
                e_v: next() - 0.5,
                e_alpha: 0.2 * next() - 0.1,
                tension_estimate: 30.0 * next(),
                ..hover_inputs()
            };
            let out = outer_law(&body(), &gains(), &inputs);
            let dir = inputs.alpha + out.pitch_raw;
            assert!((out.thrust * dir.sin() - out.radial).abs() < 1e-10);
            assert!((out.thrust * dir.cos() - out.tangential).abs() < 1e-10);
        }
    }

    #[test]
    fn corrected_angle_examples() {
        let l = 7.0;
        assert!((corrected_elevation_angle(l * FRAC_PI_4.sin(), 0.0, l).unwrap() - FRAC_PI_4).abs() < 1e-12);
        let a = corrected_elevation_angle(5.0, 0.0625, l).unwrap();
        assert!((a - (4.9375f64 / 7.0).asin()).abs() < 1e-15);
        assert!((a - 0.7829).abs() < 1e-4);
        assert_eq!(corrected_elevation_angle(1.0, 1.0, l).unwrap(), 0.0);
        assert!(matches!(
            corrected_elevation_angle(9.0, 0.0, l),
            Err(ModelError::ReferenceInfeasible { .. })
        ));
    }

    #[test]
    fn controller_config_validation() {
        let cfg = FsvcConfig {
            gains: gains(),
            attitude: AttitudeGains::from_pd(7.8, 5.4).unwrap(),
            pitch: PitchLimiter::new(FRAC_PI_4, FRAC_PI_4).unwrap(),
            shaping_tau: 0.0,
            derivative_tau: 0.05,
            attitude_derivative_tau: 0.01,
            max_thrust: 4.0 * 1.8 * 9.81,
            cos_guard: 1e-3,
        };
        assert!(FsvcController::new(cfg, body()).is_err());
        let ok = FsvcController::new(FsvcConfig { shaping_tau: 2.0, ..cfg }, body()).unwrap();
        assert_eq!(ok.lyapunov(), 0.0);
    }
}
