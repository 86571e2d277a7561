//! Pitch command smoothing and the pitch tracking inner loop shared by both
//! outer loops.

use crate::dynamics::SystemState;
use crate::error::{invalid, Result};
use crate::filter::DerivativeEstimator;
use crate::scalar::Real;

/// `θ_uc = θ_um · tanh(θ'_uc / θ̄_uc)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchLimiter<T> {
    pub max: T,
    pub scale: T,
}

impl<T: Real> PitchLimiter<T> {
    pub fn new(max: T, scale: T) -> Result<Self> {
        if !(max > T::zero() && max < T::FRAC_PI_2()) {
            return Err(invalid("max pitch", format!("must lie in (0, pi/2), got {max}")));
        }
        if !(scale > T::zero()) {
            return Err(invalid("pitch scale", format!("must be > 0, got {scale}")));
        }
        Ok(Self { max, scale })
    }

    pub fn smooth(&self, raw: T) -> T {
        self.max * (raw / self.scale).tanh()
    }
}

/// Backstepping gains of the pitch loop; the PD form is
/// `k_P = 1 + k₁k₂`, `k_D = k₁ + k₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeGains<T> {
    pub k1: T,
    pub k2: T,
}

impl<T: Real> AttitudeGains<T> {
    pub fn new(k1: T, k2: T) -> Result<Self> {
        if !(k1 > T::zero() && k2 > T::zero()) {
            return Err(invalid("attitude gains", format!("k1, k2 must be > 0, got {k1}, {k2}")));
        }
        Ok(Self { k1, k2 })
    }

    /// Recovers `(k₁, k₂)` from PD gains; `k₁` takes the larger root.
    pub fn from_pd(kp: T, kd: T) -> Result<Self> {
        let disc = kd * kd - T::lit(4.0) * (kp - T::one());
        if !(disc >= T::zero()) || !(kp > T::one()) {
            return Err(invalid(
                "attitude gains",
                format!("no positive (k1, k2) with k1 + k2 = {kd} and 1 + k1 k2 = {kp}"),
            ));
        }
        let root = disc.sqrt();
        Self::new((kd + root) * T::half(), (kd - root) * T::half())
    }

    pub fn proportional(&self) -> T {
        T::one() + self.k1 * self.k2
    }

    pub fn derivative(&self) -> T {
        self.k1 + self.k2
    }
}

/// `u₂ = J_u (−k_P e − k_D ė + θ̈_uc)` with `e = θ_u − θ_uc`.
pub fn attitude_torque<T: Real>(
    inertia: T,
    gains: &AttitudeGains<T>,
    pitch: T,
    pitch_rate: T,
    command: T,
    command_rate: T,
    command_accel: T,
) -> T {
    let e = pitch - command;
    let e_dot = pitch_rate - command_rate;
    inertia * (-gains.proportional() * e - gains.derivative() * e_dot + command_accel)
}

/// Output of one inner-loop update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeOutput<T> {
    pub pitch: T,
    pub pitch_rate: T,
    pub pitch_accel: T,
    pub torque: T,
}

/// Smooths the raw pitch command, estimates its rates and computes `u₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeLoop<T> {
    limiter: PitchLimiter<T>,
    gains: AttitudeGains<T>,
    inertia: T,
    rates: DerivativeEstimator<T>,
}

impl<T: Real> AttitudeLoop<T> {
    pub fn new(limiter: PitchLimiter<T>, gains: AttitudeGains<T>, inertia: T, derivative_tau: T) -> Self {
        Self {
            limiter,
            gains,
            inertia,
            rates: DerivativeEstimator::new(derivative_tau),
        }
    }

    pub fn limiter(&self) -> &PitchLimiter<T> {
        &self.limiter
    }

    pub fn update(&mut self, raw_pitch: T, state: &SystemState<T>, dt: T) -> AttitudeOutput<T> {
        let pitch = self.limiter.smooth(raw_pitch);
        let (pitch_rate, pitch_accel) = self.rates.update(pitch, dt);
        let torque = attitude_torque(
            self.inertia,
            &self.gains,
            state.theta_u,
            state.theta_u_dot,
            pitch,
            pitch_rate,
            pitch_accel,
        );
        AttitudeOutput {
            pitch,
            pitch_rate,
            pitch_accel,
            torque,
        }
    }
}
