//! Planar simulator of a quadrotor towing a floating buoy on a taut cable
//! through linear deep-water waves, with a polar-coordinate adaptive
//! backstepping surge-velocity controller and a Cartesian PID baseline.
//!
//! The numerical core is generic over the scalar type; `f64` aliases are
//! provided for the common case.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dynamics;
pub mod error;
pub mod filter;
pub mod harness;
pub mod hydro;
pub mod linalg;
pub mod scalar;
pub mod waves;

pub use control::{AnyController, ControlCommand, Controller, ControllerKind, Observation, Setpoint};
pub use dynamics::{Accelerations, Actuation, EnvSample, Plant, PlantParams, RigidBodyParams, SystemState, Tether};
pub use error::{ConfigError, Error, ModelError};
pub use harness::{RunOutput, RunSummary, Scenario, Simulation, StepRecord};
pub use hydro::{BuoyGeometry, HydroCoefficients};
pub use scalar::Real;
pub use waves::{Direction, WaveComponent, WaveField};

pub type WaveField64 = WaveField<f64>;
pub type WaveComponent64 = WaveComponent<f64>;
pub type Plant64 = Plant<f64>;
pub type PlantParams64 = PlantParams<f64>;
pub type SystemState64 = SystemState<f64>;
pub type Simulation64 = Simulation<f64>;
pub type FsvcController64 = control::FsvcController<f64>;
pub type PidController64 = control::PidController<f64>;
pub type Plant32 = Plant<f32>;
pub type Simulation32 = Simulation<f32>;
