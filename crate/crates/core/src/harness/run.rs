//! The fixed-step run loop: sample, control, hold, integrate.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::control::{AnyController, ControlCommand, Controller, ControllerKind, FsvcController, Observation};
use crate::dynamics::{Accelerations, Actuation, Plant, SystemState};
use crate::error::{ConfigError, Error, ModelError};
use crate::harness::metrics::{check_constraints, format_summary_table, EnergyModel, RunSummary};
use crate::harness::record::{write_csv, StepRecord};
use crate::harness::scenario::{InitialMode, RootChoice, Scenario, TensionFeedback};
use crate::scalar::Real;

/// Iteration limit and tolerance when solving for the tension consistent
/// with the command being issued.
const EXACT_TENSION_ITERATIONS: usize = 2000;
const EXACT_TENSION_TOL: f64 = 1e-11;

/// Initial state: buoy floating at quarter draft on the local surface,
/// cable at the configured elevation.
pub fn initialize<T: Real>(scenario: &Scenario, plant: &Plant<T>) -> Result<SystemState<T>, Error> {
    let init = &scenario.initial;
    let params = plant.params();
    let x_b = T::lit(init.x_b_m);
    let surface = plant.field().surface_elevation(x_b, T::zero());
    let z_b = match init.z_b_m {
        Some(z) => T::lit(z),
        None => surface + params.buoy.height / T::lit(4.0),
    };
    let mut state = SystemState {
        t: T::zero(),
        x_b,
        z_b,
        alpha: T::lit(init.alpha_deg.to_radians()),
        ..Default::default()
    };
    let l = params.body.cable_length;
    let height = scenario.reference_at::<T>(0.0).uav_height;
    if (height - z_b).abs() > l {
        return Err(ConfigError::Invalid(
            ModelError::ReferenceInfeasible {
                dz: (height - z_b).abs().as_f64(),
                length: l.as_f64(),
            }
            .to_string(),
        )
        .into());
    }
    if init.mode == InitialMode::WaterVelocity {
        let env = plant.environment(&state)?;
        state.x_b_dot = env.current + env.wave_velocity.0;
        state.z_b_dot = env.wave_velocity.1;
    }
    Ok(state)
}

/// A scenario being stepped one control period at a time.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    scenario: Scenario,
    plant: Plant<T>,
    controller: AnyController<T>,
    state: SystemState<T>,
    prev_accel: Accelerations<T>,
    last_command: ControlCommand<T>,
    feedback: TensionFeedback,
    energy: EnergyModel,
    periods: usize,
    substeps: usize,
    index: usize,
}

impl<T: Real> Simulation<T> {
    pub fn new(scenario: &Scenario) -> Result<Self, Error> {
        scenario.validate()?;
        let kind = scenario.controller_kind()?;
        let (periods, substeps) = scenario.step_counts()?;
        let plant = scenario.plant::<T>()?;
        let state = initialize(scenario, &plant)?;
        let p = &scenario.parameters;
        Ok(Self {
            controller: scenario.build_controller(kind)?,
            scenario: scenario.clone(),
            plant,
            state,
            prev_accel: Accelerations::zero(),
            last_command: ControlCommand::default(),
            feedback: scenario.controller.fsvc.tension_feedback,
            energy: EnergyModel {
                air_density: p.air_density_kgpm3,
                disk_area: p.rotor_disk_area_m2,
            },
            periods,
            substeps,
            index: 0,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn plant(&self) -> &Plant<T> {
        &self.plant
    }

    pub fn state(&self) -> &SystemState<T> {
        &self.state
    }

    pub fn controller(&self) -> &AnyController<T> {
        &self.controller
    }

    pub fn fsvc(&self) -> Option<&FsvcController<T>> {
        self.controller.as_fsvc()
    }

    /// Accelerations at the current state under the last held command.
    pub fn accelerations(&self) -> &Accelerations<T> {
        &self.prev_accel
    }

    pub fn last_command(&self) -> &ControlCommand<T> {
        &self.last_command
    }

    pub fn energy_model(&self) -> &EnergyModel {
        &self.energy
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn is_finished(&self) -> bool {
        self.index >= self.periods
    }

    fn dt_control(&self) -> f64 {
        self.scenario.simulation.dt_control_s
    }

    fn command(&mut self, obs: &Observation<T>, t: f64) -> Result<ControlCommand<T>, ModelError> {
        let setpoint = self.scenario.reference_at::<T>(t);
        let dt = T::lit(self.dt_control());
        let exact = self.feedback == TensionFeedback::Exact && matches!(self.controller, AnyController::Fsvc(_));
        if !exact {
            return self.controller.update(obs, &setpoint, dt);
        }
        // fixed point on the tension: the command depends on the tension
        // estimate and the tension on the resulting accelerations
        let mut guess = crate::dynamics::tension_from_buoy_motion(obs.state.alpha, &obs.accel, &obs.env)?.max(T::zero());
        let mut committed = None;
        for _ in 0..EXACT_TENSION_ITERATIONS {
            let mut trial = self.controller.clone();
            let o = Observation {
                tension_override: Some(guess),
                ..*obs
            };
            let cmd = trial.update(&o, &setpoint, dt)?;
            let act = Actuation {
                thrust: cmd.thrust,
                torque: cmd.torque,
            };
            let acc = self.plant.solve(&obs.state, &obs.env, &act)?;
            let next = self.plant.cable_tension(&obs.state, &acc, &obs.env)?.max(T::zero());
            let converged = (next - guess).abs() <= T::lit(EXACT_TENSION_TOL) * (T::one() + next.abs());
            committed = Some((trial, cmd));
            guess = next;
            if converged {
                break;
            }
        }
        let (trial, cmd) = committed.expect("at least one iteration");
        self.controller = trial;
        Ok(cmd)
    }

    /// Runs one control period and returns its log row, stamped at the start
    /// of the period.
    pub fn advance(&mut self) -> Result<StepRecord, ModelError> {
        let dtc = self.dt_control();
        let t = self.index as f64 * dtc;
        self.state.t = T::lit(t);
        let env = self.plant.environment(&self.state)?;
        let obs = Observation {
            state: self.state,
            accel: self.prev_accel,
            env,
            tension_override: None,
        };
        let cmd = self.command(&obs, t)?;
        let act = Actuation {
            thrust: cmd.thrust,
            torque: cmd.torque,
        };
        let acc = self.plant.solve(&self.state, &env, &act)?;
        let tension = self.plant.cable_tension(&self.state, &acc, &env)?;
        let record = self.record(t, &env, &cmd, tension);

        let dtp = T::lit(self.scenario.simulation.dt_physics_s);
        let mut state = self.state;
        for _ in 0..self.substeps {
            state = self.plant.step(&state, &act, dtp)?;
        }
        self.state = state;
        self.index += 1;
        self.state.t = T::lit(self.index as f64 * dtc);
        self.prev_accel = self.plant.accelerations(&self.state, &act)?.0;
        self.last_command = cmd;
        Ok(record)
    }

    fn record(&self, t: f64, env: &crate::dynamics::EnvSample<T>, cmd: &ControlCommand<T>, tension: T) -> StepRecord {
        let s = &self.state;
        let params = self.plant.params();
        let l = params.body.cable_length;
        let (x_u, z_u) = s.uav_position(l);
        let z_u_ref = self.scenario.reference_at::<f64>(t).uav_height;
        let flags = check_constraints(
            tension.as_f64(),
            s.alpha.as_f64(),
            env.immersed_volume.as_f64(),
            params.buoy.mass.as_f64(),
            params.body.cable_mass.as_f64(),
            params.body.gravity.as_f64(),
        );
        let v_ref = cmd.velocity_ref.as_f64();
        StepRecord {
            t,
            x_b: s.x_b.as_f64(),
            z_b: s.z_b.as_f64(),
            v: s.x_b_dot.as_f64(),
            z_b_dot: s.z_b_dot.as_f64(),
            alpha: s.alpha.as_f64(),
            alpha_dot: s.alpha_dot.as_f64(),
            theta_u: s.theta_u.as_f64(),
            theta_b: env.pitch.as_f64(),
            x_u: x_u.as_f64(),
            z_u: z_u.as_f64(),
            u1: cmd.thrust.as_f64(),
            u2: cmd.torque.as_f64(),
            u_t: cmd.radial.as_f64(),
            u_alpha: cmd.tangential.as_f64(),
            pitch_cmd_raw: cmd.pitch_raw.as_f64(),
            pitch_cmd: cmd.pitch.as_f64(),
            tension: tension.as_f64(),
            tension_est: cmd.tension_estimate.as_f64(),
            immersed_ratio: (env.immersed_volume / params.buoy.volume()).as_f64(),
            surface: env.surface.as_f64(),
            current: env.current.as_f64(),
            wave_vx: env.wave_velocity.0.as_f64(),
            wave_vz: env.wave_velocity.1.as_f64(),
            v_ref,
            z_u_ref,
            e_v: s.x_b_dot.as_f64() - v_ref,
            e_zu: z_u.as_f64() - z_u_ref,
            taut: flags.taut as u8,
            no_hang: flags.no_hang as u8,
            no_flyover: flags.no_flyover as u8,
            saturated: cmd.saturated as u8,
            power: self.energy.power(cmd.thrust.as_f64()),
        }
    }
}

/// Records and summary of one run. `failure` is set when a fatal model
/// error stopped the run; `records` then hold everything logged before it.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: String,
    pub controller: ControllerKind,
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
    pub failure: Option<ModelError>,
}

pub fn run_with<T: Real>(scenario: &Scenario, kind: ControllerKind) -> Result<RunOutput, Error> {
    let scenario = scenario.clone().with_controller(kind);
    let mut sim = Simulation::<T>::new(&scenario)?;
    let mut records = Vec::with_capacity(sim.periods());
    let mut failure = None;
    while !sim.is_finished() {
        match sim.advance() {
            Ok(r) => records.push(r),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let mut summary = RunSummary::from_records(
        &scenario.name,
        kind.name(),
        &records,
        scenario.simulation.dt_control_s,
        sim.energy_model(),
    );
    summary.failure = failure.as_ref().map(|e| e.to_string());
    Ok(RunOutput {
        scenario: scenario.name.clone(),
        controller: kind,
        records,
        summary,
        failure,
    })
}

/// Runs the scenario with its configured controller in double precision.
pub fn run(scenario: &Scenario) -> Result<RunOutput, Error> {
    run_with::<f64>(scenario, scenario.controller_kind()?)
}

/// Runs the PID baseline and then FSVC on the same scenario.
pub fn compare(scenario: &Scenario) -> Result<[RunOutput; 2], Error> {
    Ok([
        run_with::<f64>(scenario, ControllerKind::Pid)?,
        run_with::<f64>(scenario, ControllerKind::Fsvc)?,
    ])
}

/// Modelling choices that affect the numbers, written next to every run.
pub fn assumptions(scenario: &Scenario) -> String {
    let p = &scenario.parameters;
    let f = &scenario.controller.fsvc;
    let field = scenario.wave_field::<f64>().ok();
    let stokes = field.as_ref().map(|w| w.stokes_drift()).unwrap_or(0.0);
    let current = field.as_ref().map(|w| w.surface_current()).unwrap_or(0.0);
    let root = match f.gain_root {
        RootChoice::Small => "k_alpha1 = smaller root of k_alpha1 + k_alpha2 = k_D",
        RootChoice::Large => "k_alpha1 = larger root of k_alpha1 + k_alpha2 = k_D",
    };
    let width_source = if p.buoy_width_m.is_some() {
        "configured"
    } else {
        "derived from quarter immersion of the unloaded buoy"
    };
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", scenario.name);
    let _ = writeln!(s, "buoy width: {:.6} m ({width_source})", p.buoy_width());
    let _ = writeln!(s, "wetted area: 4 * l_b * draft, draft clamped to [0, h_b]");
    let _ = writeln!(s, "stokes drift: sum d_n * omega_n * k_n * A_n^2 = {stokes:.6} m/s");
    let _ = writeln!(s, "surface current (lumped + stokes): {current:.6} m/s");
    let _ = writeln!(s, "wave particle velocity evaluated at depth min(z_b, 0)");
    let _ = writeln!(
        s,
        "energy surrogate: P = u1^1.5 / sqrt(2 * {} kg/m^3 * {} m^2)",
        p.air_density_kgpm3, p.rotor_disk_area_m2
    );
    let _ = writeln!(s, "gain root: {root}");
    let _ = writeln!(
        s,
        "tension feedback: {}",
        match f.tension_feedback {
            TensionFeedback::Delayed => "buoy surge balance with previous-sample accelerations",
            TensionFeedback::Exact => "exact, solved jointly with the command",
        }
    );
    let _ = writeln!(
        s,
        "thrust limit: fsvc {:.3} N, pid {:.3} N",
        f.max_thrust_n.unwrap_or(4.0 * p.uav_mass_kg * p.gravity_mps2),
        scenario
            .controller
            .pid
            .max_thrust_n
            .unwrap_or(4.0 * p.uav_mass_kg * p.gravity_mps2)
    );
    let _ = writeln!(
        s,
        "elevation reference differentiator: 1/(tau s + 1)^2, tau = {} s",
        f.derivative_tau_s
    );
    let _ = writeln!(
        s,
        "pitch command differentiator: 1/(tau s + 1)^2, tau = {} s (fsvc), {} s (pid)",
        f.attitude_derivative_tau_s, scenario.controller.pid.attitude_derivative_tau_s
    );
    let _ = writeln!(
        s,
        "pid derivative: first-order filter, tau = {} s",
        scenario.controller.pid.derivative_tau_s
    );
    let _ = writeln!(
        s,
        "velocity reference shaping: 1/(tau s + 1)^2, tau = {} s, starting from 0",
        f.shaping_tau_s
    );
    let _ = writeln!(
        s,
        "time steps: physics {} s (RK4), control {} s (zero-order hold), duration {} s",
        scenario.simulation.dt_physics_s, scenario.simulation.dt_control_s, scenario.simulation.duration_s
    );
    s
}

/// Writes `<name>_<controller>.csv` for each run, `<name>_summary.txt` and
/// `<name>_assumptions.txt`. Returns the written paths.
pub fn write_outputs(dir: &Path, scenario: &Scenario, runs: &[&RunOutput]) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for r in runs {
        let path = dir.join(format!("{}_{}.csv", scenario.name, r.controller.name()));
        write_csv(fs::File::create(&path)?, &r.records)?;
        paths.push(path);
    }
    let summaries: Vec<&RunSummary> = runs.iter().map(|r| &r.summary).collect();
    let path = dir.join(format!("{}_summary.txt", scenario.name));
    fs::write(&path, format_summary_table(&summaries))?;
    paths.push(path);
    let path = dir.join(format!("{}_assumptions.txt", scenario.name));
    fs::write(&path, assumptions(scenario))?;
    paths.push(path);
    Ok(paths)
}
