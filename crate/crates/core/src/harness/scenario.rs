//! Scenario files: a TOML document with explicit units in key names.
//! Unknown keys are rejected so that a misspelled physical constant is an
//! error rather than a silently ignored line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{
    AnyController, AttitudeGains, ControllerKind, FsvcConfig, FsvcController, FsvcGains, GainRoot, PidConfig,
    PidController, PidGains, PitchLimiter, Setpoint,
};
use crate::dynamics::{Plant, PlantParams, RigidBodyParams, Tether};
use crate::error::{ConfigError, ModelError};
use crate::hydro::{BuoyGeometry, HydroCoefficients};
use crate::scalar::Real;
use crate::waves::{Direction, WaveComponent, WaveField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub waves: WavesSection,
    #[serde(default)]
    pub parameters: ParametersSection,
    #[serde(default)]
    pub controller: ControllerSection,
    #[serde(default)]
    pub reference: ReferenceSection,
    #[serde(default)]
    pub initial: InitialSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub duration_s: f64,
    pub dt_physics_s: f64,
    pub dt_control_s: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            duration_s: 60.0,
            dt_physics_s: 1e-3,
            dt_control_s: 5e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavesSection {
    pub lumped_current_mps: f64,
    pub components: Vec<WaveSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub amplitude_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_radps: Option<f64>,
    #[serde(default = "default_direction")]
    pub direction: i32,
    #[serde(default)]
    pub phase_rad: f64,
}

fn default_direction() -> i32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TetherMode {
    #[default]
    Attached,
    Detached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParametersSection {
    pub buoy_length_m: f64,
    pub buoy_height_m: f64,
    /// Derived from quarter immersion when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buoy_width_m: Option<f64>,
    pub buoy_mass_kg: f64,
    pub added_mass_surge_kg: f64,
    pub added_mass_heave_kg: f64,
    pub damping_surge_nspm: f64,
    pub damping_heave_nspm: f64,
    pub skin_coeff_surge: f64,
    pub skin_coeff_heave: f64,
    pub water_density_kgpm3: f64,
    pub uav_mass_kg: f64,
    pub uav_inertia_kgm2: f64,
    pub cable_mass_kg: f64,
    pub cable_length_m: f64,
    pub gravity_mps2: f64,
    pub max_pitch_rad: f64,
    pub air_density_kgpm3: f64,
    pub rotor_disk_area_m2: f64,
    pub tether: TetherMode,
    /// Unmodelled constant force on the buoy, world frame `[x, z]`.
    pub buoy_force_n: [f64; 2],
    /// Unmodelled constant force on the UAV, world frame `[x, z]`.
    pub uav_force_n: [f64; 2],
}

impl Default for ParametersSection {
    fn default() -> Self {
        Self {
            buoy_length_m: 0.8,
            buoy_height_m: 0.25,
            buoy_width_m: None,
            buoy_mass_kg: 12.5,
            added_mass_surge_kg: 0.625,
            added_mass_heave_kg: 12.5,
            damping_surge_nspm: 0.0,
            damping_heave_nspm: 27.5,
            skin_coeff_surge: 5e-3,
            skin_coeff_heave: 9e-3,
            water_density_kgpm3: 1000.0,
            uav_mass_kg: 1.8,
            uav_inertia_kgm2: 0.03,
            cable_mass_kg: 0.5,
            cable_length_m: 7.0,
            gravity_mps2: 9.81,
            max_pitch_rad: std::f64::consts::FRAC_PI_4,
            air_density_kgpm3: 1.225,
            rotor_disk_area_m2: 0.3,
            tether: TetherMode::Attached,
            buoy_force_n: [0.0; 2],
            uav_force_n: [0.0; 2],
        }
    }
}

impl ParametersSection {
    /// Buoy width, derived from the quarter-immersion rule when not given.
    pub fn buoy_width(&self) -> f64 {
        self.buoy_width_m.unwrap_or_else(|| {
            BuoyGeometry::with_immersed_fraction(
                self.buoy_length_m,
                self.buoy_height_m,
                self.buoy_mass_kg,
                self.water_density_kgpm3,
                0.25,
            )
            .width
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensionFeedback {
    /// Buoy surge balance evaluated with the previous sample's accelerations.
    #[default]
    Delayed,
    /// True tension consistent with the command being issued.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default)]
    pub fsvc: FsvcSection,
    #[serde(default)]
    pub pid: PidSection,
}

fn default_kind() -> String {
    "fsvc".to_string()
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            fsvc: FsvcSection::default(),
            pid: PidSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoice {
    #[default]
    Small,
    Large,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FsvcSection {
    /// `[k_P, k_I, k_D]` of the elevation channel.
    pub k_alpha: [f64; 3],
    /// `[k_P, k_I, k_D]` of the radial channel (D must be zero).
    pub k_t: [f64; 3],
    /// `[k_P, k_I, k_D]` of the pitch loop (I must be zero).
    pub k_theta: [f64; 3],
    pub gain_root: RootChoice,
    pub shaping_tau_s: f64,
    pub derivative_tau_s: f64,
    pub attitude_derivative_tau_s: f64,
    /// Defaults to the pitch limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pitch_scale_rad: Option<f64>,
    /// Defaults to four times the UAV weight.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_thrust_n: Option<f64>,
    pub cos_guard: f64,
    pub tension_feedback: TensionFeedback,
}

impl Default for FsvcSection {
    fn default() -> Self {
        Self {
            k_alpha: [7.0, 2.0, 7.0],
            k_t: [60.0, 9.6, 0.0],
            k_theta: [7.8, 0.0, 5.4],
            gain_root: RootChoice::Small,
            shaping_tau_s: 2.0,
            derivative_tau_s: 0.05,
            attitude_derivative_tau_s: 0.01,
            pitch_scale_rad: None,
            max_thrust_n: None,
            cos_guard: 1e-3,
            tension_feedback: TensionFeedback::Delayed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidSection {
    pub k_xdot: [f64; 3],
    pub k_z: [f64; 3],
    pub k_theta: [f64; 3],
    pub shaping_tau_s: f64,
    pub derivative_tau_s: f64,
    pub attitude_derivative_tau_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pitch_scale_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_thrust_n: Option<f64>,
}

impl Default for PidSection {
    fn default() -> Self {
        Self {
            k_xdot: [7.0, 1.2, 5.0],
            k_z: [3.0, 1.0, 2.0],
            k_theta: [7.8, 0.0, 5.4],
            shaping_tau_s: 2.0,
            derivative_tau_s: 0.05,
            attitude_derivative_tau_s: 0.01,
            pitch_scale_rad: None,
            max_thrust_n: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocitySetpoint {
    pub from_s: f64,
    pub velocity_mps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightSetpoint {
    pub from_s: f64,
    pub height_m: f64,
}

/// Piecewise-constant setpoints. An empty velocity list means 5 m/s for the
/// first half of the run and 3 m/s for the second; an empty height list
/// means 5.0 m throughout.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceSection {
    pub velocity_setpoints: Vec<VelocitySetpoint>,
    pub height_setpoints: Vec<HeightSetpoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialMode {
    /// Buoy moves with the water at `t = 0`.
    #[default]
    WaterVelocity,
    /// Buoy at rest.
    Rest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub mode: InitialMode,
    pub x_b_m: f64,
    pub alpha_deg: f64,
    /// Overrides the static-float buoy height when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_b_m: Option<f64>,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            mode: InitialMode::WaterVelocity,
            x_b_m: 0.0,
            alpha_deg: 45.0,
            z_b_m: None,
        }
    }
}

const DEFAULT_HEIGHT_M: f64 = 5.0;

impl Scenario {
    /// Calm sea with default parameters and setpoints.
    pub fn calm(name: &str) -> Self {
        Self {
            name: name.to_string(),
            simulation: SimulationSection::default(),
            waves: WavesSection::default(),
            parameters: ParametersSection::default(),
            controller: ControllerSection::default(),
            reference: ReferenceSection::default(),
            initial: InitialSection::default(),
        }
    }

    /// Wave-free case: one component of zero amplitude.
    pub fn c1() -> Self {
        let mut s = Self::calm("c1");
        s.waves.components.push(WaveSpec {
            amplitude_m: 0.0,
            period_s: Some(5.7),
            omega_radps: None,
            direction: 1,
            phase_rad: 0.0,
        });
        s
    }

    /// Moderate following seas with two components.
    pub fn c2() -> Self {
        let mut s = Self::calm("c2");
        s.waves.components = vec![
            WaveSpec {
                amplitude_m: 0.75,
                period_s: Some(5.7),
                omega_radps: None,
                direction: 1,
                phase_rad: 0.0,
            },
            WaveSpec {
                amplitude_m: 0.135,
                period_s: Some(3.0),
                omega_radps: None,
                direction: 1,
                phase_rad: std::f64::consts::PI,
            },
        ];
        s
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let scenario: Scenario = toml::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario is always serializable")
    }

    pub fn with_controller(mut self, kind: ControllerKind) -> Self {
        self.controller.kind = kind.name().to_string();
        self
    }

    pub fn controller_kind(&self) -> Result<ControllerKind, ConfigError> {
        self.controller.kind.parse().map_err(ConfigError::Invalid)
    }

    /// Number of control periods and physics substeps per period.
    pub fn step_counts(&self) -> Result<(usize, usize), ConfigError> {
        let sim = &self.simulation;
        let ratio = sim.dt_control_s / sim.dt_physics_s;
        let substeps = ratio.round();
        if (ratio - substeps).abs() > 1e-9 * ratio.max(1.0) || substeps < 1.0 {
            return Err(ConfigError::Invalid(format!(
                "dt_control_s ({}) must be an integer multiple of dt_physics_s ({})",
                sim.dt_control_s, sim.dt_physics_s
            )));
        }
        let periods = (sim.duration_s / sim.dt_control_s).round();
        if periods < 1.0 {
            return Err(ConfigError::Invalid("duration shorter than one control period".into()));
        }
        Ok((periods as usize, substeps as usize))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.name.trim().is_empty() {
            return bad("scenario name is empty".into());
        }
        if self.name.contains(['/', '\\']) {
            return bad(format!("scenario name `{}` must not contain path separators", self.name));
        }
        let sim = &self.simulation;
        if !(sim.duration_s > 0.0 && sim.dt_physics_s > 0.0 && sim.dt_control_s > 0.0) {
            return bad("duration and time steps must be > 0".into());
        }
        if sim.dt_control_s < sim.dt_physics_s {
            return bad("dt_control_s must be >= dt_physics_s".into());
        }
        self.step_counts()?;
        for (i, w) in self.waves.components.iter().enumerate() {
            match (w.period_s, w.omega_radps) {
                (Some(_), Some(_)) => return bad(format!("wave {i}: give period_s or omega_radps, not both")),
                (None, None) => return bad(format!("wave {i}: period_s or omega_radps is required")),
                _ => {}
            }
        }
        self.controller_kind()?;
        check_sorted(self.reference.velocity_setpoints.iter().map(|s| s.from_s), "velocity_setpoints")?;
        check_sorted(self.reference.height_setpoints.iter().map(|s| s.from_s), "height_setpoints")?;
        // building exercises every physical range check
        self.wave_field::<f64>().map_err(model_to_config)?;
        self.plant::<f64>().map_err(model_to_config)?;
        self.build_controller::<f64>(ControllerKind::Fsvc).map_err(model_to_config)?;
        self.build_controller::<f64>(ControllerKind::Pid).map_err(model_to_config)?;
        Ok(())
    }

    pub fn wave_field<T: Real>(&self) -> Result<WaveField<T>, ModelError> {
        let g = T::lit(self.parameters.gravity_mps2);
        let components = self
            .waves
            .components
            .iter()
            .map(|w| {
                let direction = Direction::from_sign(w.direction)?;
                let amplitude = T::lit(w.amplitude_m);
                let phase = T::lit(w.phase_rad);
                match (w.period_s, w.omega_radps) {
                    (Some(p), None) => WaveComponent::from_period(amplitude, T::lit(p), direction, phase, g),
                    (None, Some(o)) => WaveComponent::new(amplitude, T::lit(o), direction, phase, g),
                    _ => Err(crate::error::invalid("wave", "exactly one of period_s, omega_radps")),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WaveField::new(components, T::lit(self.waves.lumped_current_mps), g))
    }

    pub fn body<T: Real>(&self) -> RigidBodyParams<T> {
        let p = &self.parameters;
        RigidBodyParams {
            uav_mass: T::lit(p.uav_mass_kg),
            uav_inertia: T::lit(p.uav_inertia_kgm2),
            cable_mass: T::lit(p.cable_mass_kg),
            cable_length: T::lit(p.cable_length_m),
            gravity: T::lit(p.gravity_mps2),
        }
    }

    pub fn plant_params<T: Real>(&self) -> PlantParams<T> {
        let p = &self.parameters;
        PlantParams {
            body: self.body(),
            buoy: BuoyGeometry::new(
                T::lit(p.buoy_length_m),
                T::lit(p.buoy_height_m),
                T::lit(p.buoy_width()),
                T::lit(p.buoy_mass_kg),
            ),
            hydro: HydroCoefficients {
                added_mass_surge: T::lit(p.added_mass_surge_kg),
                added_mass_heave: T::lit(p.added_mass_heave_kg),
                damping_surge: T::lit(p.damping_surge_nspm),
                damping_heave: T::lit(p.damping_heave_nspm),
                skin_surge: T::lit(p.skin_coeff_surge),
                skin_heave: T::lit(p.skin_coeff_heave),
                water_density: T::lit(p.water_density_kgpm3),
            },
            tether: match p.tether {
                TetherMode::Attached => Tether::Attached,
                TetherMode::Detached => Tether::Detached,
            },
            buoy_force: p.buoy_force_n.map(T::lit),
            uav_force: p.uav_force_n.map(T::lit),
        }
    }

    pub fn plant<T: Real>(&self) -> Result<Plant<T>, ModelError> {
        Plant::new(self.plant_params(), self.wave_field()?)
    }

    fn default_max_thrust(&self) -> f64 {
        4.0 * self.parameters.uav_mass_kg * self.parameters.gravity_mps2
    }

    pub fn fsvc_config<T: Real>(&self) -> Result<FsvcConfig<T>, ModelError> {
        let f = &self.controller.fsvc;
        let root = match f.gain_root {
            RootChoice::Small => GainRoot::Small,
            RootChoice::Large => GainRoot::Large,
        };
        let max_pitch = self.parameters.max_pitch_rad;
        Ok(FsvcConfig {
            gains: FsvcGains::from_pid_like(f.k_alpha.map(T::lit), f.k_t.map(T::lit), root)?,
            attitude: attitude_gains(f.k_theta)?,
            pitch: PitchLimiter::new(T::lit(max_pitch), T::lit(f.pitch_scale_rad.unwrap_or(max_pitch)))?,
            shaping_tau: T::lit(f.shaping_tau_s),
            derivative_tau: T::lit(f.derivative_tau_s),
            attitude_derivative_tau: T::lit(f.attitude_derivative_tau_s),
            max_thrust: T::lit(f.max_thrust_n.unwrap_or_else(|| self.default_max_thrust())),
            cos_guard: T::lit(f.cos_guard),
        })
    }

    pub fn pid_config<T: Real>(&self) -> Result<PidConfig<T>, ModelError> {
        let p = &self.controller.pid;
        let max_pitch = self.parameters.max_pitch_rad;
        Ok(PidConfig {
            velocity: PidGains::from_array(p.k_xdot.map(T::lit))?,
            height: PidGains::from_array(p.k_z.map(T::lit))?,
            attitude: attitude_gains(p.k_theta)?,
            pitch: PitchLimiter::new(T::lit(max_pitch), T::lit(p.pitch_scale_rad.unwrap_or(max_pitch)))?,
            shaping_tau: T::lit(p.shaping_tau_s),
            derivative_tau: T::lit(p.derivative_tau_s),
            attitude_derivative_tau: T::lit(p.attitude_derivative_tau_s),
            max_thrust: T::lit(p.max_thrust_n.unwrap_or_else(|| self.default_max_thrust())),
        })
    }

    pub fn build_controller<T: Real>(&self, kind: ControllerKind) -> Result<AnyController<T>, ModelError> {
        Ok(match kind {
            ControllerKind::Fsvc => AnyController::Fsvc(FsvcController::new(self.fsvc_config()?, self.body())?),
            ControllerKind::Pid => AnyController::Pid(PidController::new(self.pid_config()?, self.body())?),
        })
    }

    /// Raw setpoints at time `t`.
    pub fn reference_at<T: Real>(&self, t: f64) -> Setpoint<T> {
        let r = &self.reference;
        let velocity = if r.velocity_setpoints.is_empty() {
            if t < self.simulation.duration_s / 2.0 {
                5.0
            } else {
                3.0
            }
        } else {
            piecewise(r.velocity_setpoints.iter().map(|s| (s.from_s, s.velocity_mps)), t)
        };
        let height = if r.height_setpoints.is_empty() {
            DEFAULT_HEIGHT_M
        } else {
            piecewise(r.height_setpoints.iter().map(|s| (s.from_s, s.height_m)), t)
        };
        Setpoint {
            velocity: T::lit(velocity),
            uav_height: T::lit(height),
        }
    }
}

/// Value of the last breakpoint at or before `t`; the first value applies
/// before the first breakpoint.
fn piecewise(points: impl Iterator<Item = (f64, f64)>, t: f64) -> f64 {
    let mut value = None;
    for (from, v) in points {
        if value.is_none() || from <= t {
            value = Some(v);
        }
        if from > t {
            break;
        }
    }
    value.unwrap_or(0.0)
}

fn check_sorted(times: impl Iterator<Item = f64>, what: &str) -> Result<(), ConfigError> {
    let mut prev = f64::NEG_INFINITY;
    for t in times {
        if !(t >= prev) {
            return Err(ConfigError::Invalid(format!("{what} must be sorted by from_s")));
        }
        prev = t;
    }
    Ok(())
}

fn attitude_gains<T: Real>(k: [f64; 3]) -> Result<AttitudeGains<T>, ModelError> {
    if k[1] != 0.0 {
        return Err(crate::error::invalid("k_theta", "the pitch loop has no integral term"));
    }
    AttitudeGains::from_pd(T::lit(k[0]), T::lit(k[2]))
}

fn model_to_config(e: ModelError) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}
