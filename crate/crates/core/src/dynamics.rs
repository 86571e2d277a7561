//! Coupled buoy–cable–UAV dynamics under the taut-cable assumption.
//!
//! Generalized coordinates are the buoy position `(x_b, z_b)`, the cable
//! elevation angle `α` measured from the horizontal, and the UAV pitch
//! `θ_u`. The UAV position is always derived from the buoy position and
//! `α`, so the cable length is preserved exactly.
//!
//! The translational/elevation block is a 3×3 symmetric positive-definite
//! system `A · [ẍ_b, z̈_b, α̈]ᵀ = b`; the pitch axis decouples as
//! `J_u θ̈_u = u₂`. States are advanced with fixed-step RK4 with the wave
//! environment re-evaluated at each stage.

use std::fmt;

use crate::error::{invalid, ModelError, Result};
use crate::hydro::{BuoyGeometry, HydroCoefficients};
use crate::linalg::{solve_spd3, Mat2};
use crate::scalar::Real;
use crate::waves::WaveField;

/// Below this `|cos α|` the cable-tension expression is undefined.
pub const TENSION_COS_GUARD: f64 = 1e-6;

/// Masses and inertias of the UAV and the cable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyParams<T> {
    pub uav_mass: T,
    pub uav_inertia: T,
    pub cable_mass: T,
    pub cable_length: T,
    pub gravity: T,
}

impl<T: Real> RigidBodyParams<T> {
    /// `M_a = m_u l + m_c l / 2`
    pub fn lumped_moment(&self) -> T {
        self.uav_mass * self.cable_length + self.cable_mass * self.cable_length * T::half()
    }

    /// `J_a = m_u l² + m_c l² / 3`
    pub fn lumped_inertia(&self) -> T {
        let l2 = self.cable_length * self.cable_length;
        self.uav_mass * l2 + self.cable_mass * l2 / T::lit(3.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("UAV mass", self.uav_mass),
            ("UAV inertia", self.uav_inertia),
            ("cable length", self.cable_length),
            ("gravity", self.gravity),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.cable_mass >= T::zero()) || !self.cable_mass.is_finite() {
            return Err(invalid("cable mass", format!("must be finite and >= 0, got {}", self.cable_mass)));
        }
        Ok(())
    }
}

/// Whether the UAV and cable are connected to the buoy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tether {
    #[default]
    Attached,
    /// Free-floating buoy; `α` and `θ_u` are frozen.
    Detached,
}

/// Everything the plant needs besides the wave field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams<T> {
    pub body: RigidBodyParams<T>,
    pub buoy: BuoyGeometry<T>,
    pub hydro: HydroCoefficients<T>,
    pub tether: Tether,
    /// Constant world-frame force on the buoy, unknown to the controllers.
    pub buoy_force: [T; 2],
    /// Constant world-frame force on the UAV, unknown to the controllers.
    pub uav_force: [T; 2],
}

impl<T: Real> PlantParams<T> {
    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        self.hydro.validate()?;
        self.buoy.validate(self.hydro.water_density)?;
        if !self.buoy_force.iter().chain(self.uav_force.iter()).all(|f| f.is_finite()) {
            return Err(invalid("external force", "must be finite"));
        }
        Ok(())
    }

    /// Total mass carried by the buoyancy force at rest.
    pub fn total_mass(&self) -> T {
        self.buoy.mass + self.body.uav_mass + self.body.cable_mass
    }
}

/// Integrated state of the system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SystemState<T> {
    pub t: T,
    pub x_b: T,
    pub z_b: T,
    pub x_b_dot: T,
    pub z_b_dot: T,
    pub alpha: T,
    pub alpha_dot: T,
    pub theta_u: T,
    pub theta_u_dot: T,
}

impl<T: Real> SystemState<T> {
    /// Buoy surge velocity `V`.
    pub fn surge_velocity(&self) -> T {
        self.x_b_dot
    }

    /// UAV position from taut-cable kinematics.
    pub fn uav_position(&self, cable_length: T) -> (T, T) {
        let (s, c) = self.alpha.sin_cos();
        (self.x_b + cable_length * c, self.z_b + cable_length * s)
    }

    pub fn uav_velocity(&self, cable_length: T) -> (T, T) {
        let (s, c) = self.alpha.sin_cos();
        (
            self.x_b_dot - cable_length * s * self.alpha_dot,
            self.z_b_dot + cable_length * c * self.alpha_dot,
        )
    }

    fn to_array(self) -> [T; 8] {
        [
            self.x_b,
            self.z_b,
            self.alpha,
            self.theta_u,
            self.x_b_dot,
            self.z_b_dot,
            self.alpha_dot,
            self.theta_u_dot,
        ]
    }

    fn from_array(t: T, y: [T; 8]) -> Self {
        Self {
            t,
            x_b: y[0],
            z_b: y[1],
            alpha: y[2],
            theta_u: y[3],
            x_b_dot: y[4],
            z_b_dot: y[5],
            alpha_dot: y[6],
            theta_u_dot: y[7],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.to_array().iter().all(|v| v.is_finite())
    }
}

impl<T: Real> fmt::Display for SystemState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} x_b={} z_b={} V={} z_b_dot={} alpha={} alpha_dot={} theta_u={} theta_u_dot={}",
            self.t,
            self.x_b,
            self.z_b,
            self.x_b_dot,
            self.z_b_dot,
            self.alpha,
            self.alpha_dot,
            self.theta_u,
            self.theta_u_dot
        )
    }
}

/// UAV thrust `u₁` and pitch torque `u₂`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Actuation<T> {
    pub thrust: T,
    pub torque: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Accelerations<T> {
    pub x_b_ddot: T,
    pub z_b_ddot: T,
    pub alpha_ddot: T,
    pub theta_u_ddot: T,
}

impl<T: Real> Accelerations<T> {
    pub fn zero() -> Self {
        Self {
            x_b_ddot: T::zero(),
            z_b_ddot: T::zero(),
            alpha_ddot: T::zero(),
            theta_u_ddot: T::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.x_b_ddot, self.z_b_ddot, self.alpha_ddot, self.theta_u_ddot]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Environment-derived quantities at the buoy for a given state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvSample<T> {
    /// Surface elevation `ζ(x_b, t)`.
    pub surface: T,
    /// Buoy pitch `θ_b` from the local wave slope.
    pub pitch: T,
    /// Surface current `U_cr`, including Stokes drift.
    pub current: T,
    pub wave_velocity: (T, T),
    /// `V_r = V − U_cr − v_x`
    pub relative_surge: T,
    /// `ż_b − v_z`
    pub relative_heave: T,
    pub draft: T,
    pub immersed_volume: T,
    pub wetted_area: T,
    pub skin: (T, T),
    pub inertia: Mat2<T>,
    pub damping: Mat2<T>,
}

/// Cable tension from the buoy surge balance,
/// `T = (M₁₁ẍ_b + M₁₂z̈_b + D₁₁V_r + D₁₂ż̃_b) / cos α`, ignoring any force on
/// the buoy other than hydrodynamics and the cable.
pub fn tension_from_buoy_motion<T: Real>(alpha: T, accel: &Accelerations<T>, env: &EnvSample<T>) -> Result<T> {
    let c = alpha.cos();
    if c.abs() < T::lit(TENSION_COS_GUARD) {
        return Err(ModelError::TensionUndefined { alpha: alpha.as_f64() });
    }
    let m = &env.inertia;
    let d = &env.damping;
    Ok((m.get(0, 0) * accel.x_b_ddot
        + m.get(0, 1) * accel.z_b_ddot
        + d.get(0, 0) * env.relative_surge
        + d.get(0, 1) * env.relative_heave)
        / c)
}

/// The buoy–cable–UAV plant in a given sea.
#[derive(Debug, Clone, PartialEq)]
pub struct Plant<T> {
    params: PlantParams<T>,
    field: WaveField<T>,
}

impl<T: Real> Plant<T> {
    pub fn new(params: PlantParams<T>, field: WaveField<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, field })
    }

    pub fn params(&self) -> &PlantParams<T> {
        &self.params
    }

    pub fn field(&self) -> &WaveField<T> {
        &self.field
    }

    /// Samples waves, current, immersion, friction and the world-frame buoy
    /// matrices. Orbital velocities are taken at `min(z_b, 0)`.
    pub fn environment(&self, state: &SystemState<T>) -> Result<EnvSample<T>> {
        let p = &self.params;
        let surface = self.field.surface_elevation(state.x_b, state.t);
        let pitch = self.field.slope_pitch(state.x_b, state.t);
        let current = self.field.surface_current();
        let depth = state.z_b.min(T::zero());
        let wave_velocity = self.field.particle_velocity(state.x_b, depth, state.t)?;
        let relative_surge = state.x_b_dot - current - wave_velocity.0;
        let relative_heave = state.z_b_dot - wave_velocity.1;
        let draft = p.buoy.draft(state.z_b, surface);
        let immersed_volume = draft * p.buoy.waterplane_area();
        let wetted_area = p.buoy.wetted_area(draft)?;
        let skin = p.hydro.skin_friction(wetted_area, relative_surge, relative_heave);
        let (inertia, damping) = p.hydro.world_frame_matrices(p.buoy.mass, pitch, skin);
        Ok(EnvSample {
            surface,
            pitch,
            current,
            wave_velocity,
            relative_surge,
            relative_heave,
            draft,
            immersed_volume,
            wetted_area,
            skin,
            inertia,
            damping,
        })
    }

    /// Generalized mass matrix of the `(x_b, z_b, α)` block.
    pub fn mass_matrix(&self, state: &SystemState<T>, env: &EnvSample<T>) -> [[T; 3]; 3] {
        let b = &self.params.body;
        let carried = b.uav_mass + b.cable_mass;
        let ma = b.lumped_moment();
        let (s, c) = state.alpha.sin_cos();
        let m = &env.inertia;
        [
            [m.get(0, 0) + carried, m.get(0, 1), -ma * s],
            [m.get(1, 0), m.get(1, 1) + carried, ma * c],
            [-ma * s, ma * c, b.lumped_inertia()],
        ]
    }

    /// Right-hand side of the `(x_b, z_b, α)` block.
    pub fn generalized_forces(&self, state: &SystemState<T>, env: &EnvSample<T>, act: &Actuation<T>) -> [T; 3] {
        let p = &self.params;
        let b = &p.body;
        let ma = b.lumped_moment();
        let l = b.cable_length;
        let g = b.gravity;
        let (s, c) = state.alpha.sin_cos();
        let (st, ct) = state.theta_u.sin_cos();
        let w2 = state.alpha_dot * state.alpha_dot;
        let d = &env.damping;
        let buoyancy = p.hydro.water_density * env.immersed_volume * g;
        let [fbx, fbz] = p.buoy_force;
        let [fux, fuz] = p.uav_force;
        [
            act.thrust * st + ma * c * w2 - d.get(0, 0) * env.relative_surge - d.get(0, 1) * env.relative_heave
                + fbx
                + fux,
            act.thrust * ct + buoyancy - p.total_mass() * g + ma * s * w2
                - d.get(1, 1) * env.relative_heave
                - d.get(1, 0) * env.relative_surge
                + fbz
                + fuz,
            act.thrust * l * (state.alpha + state.theta_u).cos() - ma * g * c + l * (c * fuz - s * fux),
        ]
    }

    /// Solves the equations of motion for the given environment sample.
    pub fn solve(&self, state: &SystemState<T>, env: &EnvSample<T>, act: &Actuation<T>) -> Result<Accelerations<T>> {
        let theta_u_ddot = act.torque / self.params.body.uav_inertia;
        match self.params.tether {
            Tether::Attached => {
                let a = self.mass_matrix(state, env);
                let rhs = self.generalized_forces(state, env, act);
                let x = solve_spd3(&a, &rhs).ok_or_else(|| ModelError::SingularMassMatrix {
                    state: state.to_string(),
                })?;
                Ok(Accelerations {
                    x_b_ddot: x[0],
                    z_b_ddot: x[1],
                    alpha_ddot: x[2],
                    theta_u_ddot,
                })
            }
            Tether::Detached => {
                let p = &self.params;
                let g = p.body.gravity;
                let d = &env.damping;
                let rhs = [
                    -d.get(0, 0) * env.relative_surge - d.get(0, 1) * env.relative_heave + p.buoy_force[0],
                    p.hydro.water_density * env.immersed_volume * g - p.buoy.mass * g
                        - d.get(1, 1) * env.relative_heave
                        - d.get(1, 0) * env.relative_surge
                        + p.buoy_force[1],
                ];
                let x = env.inertia.solve(rhs).ok_or_else(|| ModelError::SingularMassMatrix {
                    state: state.to_string(),
                })?;
                Ok(Accelerations {
                    x_b_ddot: x[0],
                    z_b_ddot: x[1],
                    alpha_ddot: T::zero(),
                    theta_u_ddot: T::zero(),
                })
            }
        }
    }

    /// Samples the environment and solves the equations of motion.
    pub fn accelerations(&self, state: &SystemState<T>, act: &Actuation<T>) -> Result<(Accelerations<T>, EnvSample<T>)> {
        let env = self.environment(state)?;
        let acc = self.solve(state, &env, act)?;
        Ok((acc, env))
    }

    /// Actual cable tension at the buoy end, from the buoy surge balance.
    /// Negative values mean the cable would have to push (slack).
    pub fn cable_tension(&self, state: &SystemState<T>, accel: &Accelerations<T>, env: &EnvSample<T>) -> Result<T> {
        let hydro = tension_from_buoy_motion(state.alpha, accel, env)?;
        Ok(hydro - self.params.buoy_force[0] / state.alpha.cos())
    }

    /// Cable tension from the radial equation of a point-mass UAV on a
    /// massless cable. Agrees with [`Plant::cable_tension`] only when the
    /// cable mass is zero.
    pub fn radial_tension(&self, state: &SystemState<T>, accel: &Accelerations<T>, act: &Actuation<T>) -> T {
        let b = &self.params.body;
        let (s, c) = state.alpha.sin_cos();
        let [fux, fuz] = self.params.uav_force;
        act.thrust * (state.alpha + state.theta_u).sin() - b.uav_mass * b.gravity * s
            - b.uav_mass * (accel.x_b_ddot * c + accel.z_b_ddot * s)
            + b.uav_mass * b.cable_length * state.alpha_dot * state.alpha_dot
            + fux * c
            + fuz * s
    }

    fn derivative(&self, t: T, y: &[T; 8], act: &Actuation<T>) -> Result<[T; 8]> {
        let state = SystemState::from_array(t, *y);
        let (a, _) = self.accelerations(&state, act)?;
        Ok([
            y[4],
            y[5],
            y[6],
            y[7],
            a.x_b_ddot,
            a.z_b_ddot,
            a.alpha_ddot,
            a.theta_u_ddot,
        ])
    }

    /// One classical RK4 step of length `dt` with the actuation held.
    pub fn step(&self, state: &SystemState<T>, act: &Actuation<T>, dt: T) -> Result<SystemState<T>> {
        if !(dt > T::zero()) {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        let y0 = state.to_array();
        let t0 = state.t;
        let half = dt * T::half();
        let offset = |y: &[T; 8], k: &[T; 8], h: T| -> [T; 8] {
            let mut out = *y;
            for (o, ki) in out.iter_mut().zip(k) {
                *o += h * *ki;
            }
            out
        };
        let k1 = self.derivative(t0, &y0, act)?;
        let k2 = self.derivative(t0 + half, &offset(&y0, &k1, half), act)?;
        let k3 = self.derivative(t0 + half, &offset(&y0, &k2, half), act)?;
        let k4 = self.derivative(t0 + dt, &offset(&y0, &k3, dt), act)?;
        let sixth = dt / T::lit(6.0);
        let mut y = y0;
        for i in 0..8 {
            y[i] += sixth * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]);
        }
        let next = SystemState::from_array(t0 + dt, y);
        if !next.is_finite() {
            return Err(ModelError::NonFinite {
                t: (t0 + dt).as_f64(),
                state: next.to_string(),
            });
        }
        Ok(next)
    }
}
