//! Outer-loop controllers and the shared pitch inner loop.

pub mod attitude;
pub mod fsvc;
pub mod pid;

use crate::dynamics::{Accelerations, EnvSample, SystemState};
use crate::error::Result;
use crate::scalar::Real;

pub use attitude::{attitude_torque, AttitudeGains, AttitudeLoop, PitchLimiter};
pub use fsvc::{corrected_elevation_angle, tension_estimate, FsvcConfig, FsvcController, FsvcGains, GainRoot};
pub use pid::{PidChannel, PidConfig, PidController, PidGains};

/// Which outer loop drives the UAV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControllerKind {
    Fsvc,
    Pid,
}

impl ControllerKind {
    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Fsvc => "fsvc",
            ControllerKind::Pid => "pid",
        }
    }
}

impl std::str::FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fsvc" => Ok(ControllerKind::Fsvc),
            "pid" => Ok(ControllerKind::Pid),
            other => Err(format!("unknown controller `{other}` (expected fsvc or pid)")),
        }
    }
}

/// Setpoints handed to the outer loop each control period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setpoint<T> {
    /// Raw buoy velocity setpoint `V̄₀` (before shaping).
    pub velocity: T,
    /// UAV height reference `z̄_u`.
    pub uav_height: T,
}

/// Full-state feedback available to a controller at a sample instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<T> {
    pub state: SystemState<T>,
    /// Accelerations solved at the end of the previous integration step.
    pub accel: Accelerations<T>,
    pub env: EnvSample<T>,
    /// Replaces the model-based tension estimate when set.
    pub tension_override: Option<T>,
}

/// Commands and intermediates produced by an outer loop plus the inner loop.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlCommand<T> {
    /// Total thrust `u₁`, in `[0, u1_max]`.
    pub thrust: T,
    /// Pitch torque `u₂`.
    pub torque: T,
    /// Radial thrust component `u_T`.
    pub radial: T,
    /// Tangential thrust component `u_α`.
    pub tangential: T,
    /// Unbounded pitch command `θ'_uc`.
    pub pitch_raw: T,
    /// Bounded pitch command `θ_uc`.
    pub pitch: T,
    /// Shaped velocity reference `V̄` at this sample.
    pub velocity_ref: T,
    /// Tension estimate used by the law (zero for the PID baseline).
    pub tension_estimate: T,
    /// Thrust was clipped at its upper limit.
    pub saturated: bool,
    /// The previous command was reused (near-vertical cable).
    pub held: bool,
}

pub trait Controller<T: Real> {
    fn kind(&self) -> ControllerKind;

    /// Computes the command for this sample and advances internal states by `dt`.
    fn update(&mut self, obs: &Observation<T>, setpoint: &Setpoint<T>, dt: T) -> Result<ControlCommand<T>>;
}

/// Either controller, for code that selects one at run time.
#[derive(Debug, Clone)]
pub enum AnyController<T> {
    Fsvc(FsvcController<T>),
    Pid(PidController<T>),
}

impl<T: Real> Controller<T> for AnyController<T> {
    fn kind(&self) -> ControllerKind {
        match self {
            AnyController::Fsvc(c) => c.kind(),
            AnyController::Pid(c) => c.kind(),
        }
    }

    fn update(&mut self, obs: &Observation<T>, setpoint: &Setpoint<T>, dt: T) -> Result<ControlCommand<T>> {
        match self {
            AnyController::Fsvc(c) => c.update(obs, setpoint, dt),
            AnyController::Pid(c) => c.update(obs, setpoint, dt),
        }
    }
}

impl<T> AnyController<T> {
    pub fn as_fsvc(&self) -> Option<&FsvcController<T>> {
        match self {
            AnyController::Fsvc(c) => Some(c),
            AnyController::Pid(_) => None,
        }
    }
}
