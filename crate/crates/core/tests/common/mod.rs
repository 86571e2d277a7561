//! Helpers shared by the integration tests: an independent hand-assembled
//! version of the equations of motion solved by an explicit 3×3 inverse.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tetherbuoy::{Plant64, Scenario, SystemState64};

pub struct Inputs {
    pub state: SystemState64,
    pub thrust: f64,
    pub torque: f64,
}

/// Adjugate inverse of a 3×3 matrix.
pub fn inverse3(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
    let cof = [
        [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
        [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
        [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
    ];
    let det = a[0][0] * cof[0][0] + a[0][1] * cof[0][1] + a[0][2] * cof[0][2];
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = cof[j][i] / det;
        }
    }
    inv
}

/// Accelerations `[ẍ_b, z̈_b, α̈, θ̈_u]` computed from scratch from the
/// scenario's raw numbers, without touching the library's model code.
pub fn oracle_accelerations(s: &Scenario, x: &Inputs) -> [f64; 4] {
    let p = &s.parameters;
    let g = p.gravity_mps2;
    let st = &x.state;
    let (mut zeta, mut slope, mut vx, mut vz, mut drift) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let depth = st.z_b.min(0.0);
    for w in &s.waves.components {
        let omega = w.omega_radps.unwrap_or_else(|| 2.0 * std::f64::consts::PI / w.period_s.unwrap());
        let k = omega * omega / g;
        let d = w.direction as f64;
        let arg = d * omega * st.t - k * st.x_b + w.phase_rad;
        zeta += w.amplitude_m * arg.sin();
        slope += w.amplitude_m * k * arg.cos();
        let decay = (k * depth).exp();
        vx += d * omega * w.amplitude_m * decay * arg.sin();
        vz += d * omega * w.amplitude_m * decay * arg.cos();
        drift += d * omega * k * w.amplitude_m * w.amplitude_m;
    }
    let theta_b = slope.atan();
    let u_cr = s.waves.lumped_current_mps + drift;
    let v_r = st.x_b_dot - u_cr - vx;
    let z_t = st.z_b_dot - vz;

    let hb = p.buoy_height_m;
    let draft = (zeta - st.z_b + hb / 2.0).clamp(0.0, hb);
    let v_im = p.buoy_length_m * p.buoy_width() * draft;
    let a_wet = 4.0 * p.buoy_length_m * draft;
    let ds1 = p.skin_coeff_surge * a_wet * 0.5 * p.water_density_kgpm3 * v_r.abs();
    let ds2 = p.skin_coeff_heave * a_wet * 0.5 * p.water_density_kgpm3 * z_t.abs();

    let (m1, m2) = (p.buoy_mass_kg + p.added_mass_surge_kg, p.buoy_mass_kg + p.added_mass_heave_kg);
    let (d1, d2) = (p.damping_surge_nspm + ds1, p.damping_heave_nspm + ds2);
    let (sb, cb) = theta_b.sin_cos();
    let rot = |a: f64, b: f64| (a * cb * cb + b * sb * sb, (b - a) * cb * sb, a * sb * sb + b * cb * cb);
    let (m11, m12, m22) = rot(m1, m2);
    let (d11, d12, d22) = rot(d1, d2);

    let (mu, mc, l) = (p.uav_mass_kg, p.cable_mass_kg, p.cable_length_m);
    let ma = mu * l + mc * l / 2.0;
    let ja = mu * l * l + mc * l * l / 3.0;
    let (sa, ca) = st.alpha.sin_cos();
    let w2 = st.alpha_dot * st.alpha_dot;
    let u1 = x.thrust;
    let a = [
        [m11 + mu + mc, m12, -ma * sa],
        [m12, m22 + mu + mc, ma * ca],
        [-ma * sa, ma * ca, ja],
    ];
    let b = [
        u1 * st.theta_u.sin() + ma * ca * w2 - d11 * v_r - d12 * z_t,
        u1 * st.theta_u.cos() + p.water_density_kgpm3 * v_im * g - (p.buoy_mass_kg + mu + mc) * g + ma * sa * w2
            - d22 * z_t
            - d12 * v_r,
        u1 * l * (st.alpha + st.theta_u).cos() - ma * g * ca,
    ];
    let inv = inverse3(&a);
    let mut out = [0.0; 4];
    for i in 0..3 {
        out[i] = inv[i][0] * b[0] + inv[i][1] * b[1] + inv[i][2] * b[2];
    }
    out[3] = x.torque / p.uav_inertia_kgm2;
    out
}

/// Random state with the buoy partly immersed and the cable above the buoy.
pub fn random_inputs(rng: &mut ChaCha8Rng, plant: &Plant64) -> Inputs {
    let t = rng.gen_range(0.0..100.0);
    let x_b = rng.gen_range(-50.0..50.0);
    let surface = plant.field().surface_elevation(x_b, t);
    let h = plant.params().buoy.height;
    let draft = rng.gen_range(0.05 * h..0.95 * h);
    Inputs {
        state: SystemState64 {
            t,
            x_b,
            z_b: surface + h / 2.0 - draft,
            x_b_dot: rng.gen_range(-2.0..8.0),
            z_b_dot: rng.gen_range(-2.0..2.0),
            alpha: rng.gen_range(0.1..1.45),
            alpha_dot: rng.gen_range(-1.0..1.0),
            theta_u: rng.gen_range(-0.7..0.7),
            theta_u_dot: rng.gen_range(-2.0..2.0),
        },
        thrust: rng.gen_range(0.0..70.0),
        torque: rng.gen_range(-1.0..1.0),
    }
}
