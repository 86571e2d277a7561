mod common;

use common::{oracle_accelerations, random_inputs, Inputs};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tetherbuoy::harness::scenario::TetherMode;
use tetherbuoy::linalg::min_eigenvalue_sym3;
use tetherbuoy::{Actuation, Plant64, Scenario, Simulation64, SystemState64};

fn solve(plant: &Plant64, x: &Inputs) -> [f64; 4] {
    let act = Actuation {
        thrust: x.thrust,
        torque: x.torque,
    };
    let (a, _) = plant.accelerations(&x.state, &act).unwrap();
    [a.x_b_ddot, a.z_b_ddot, a.alpha_ddot, a.theta_u_ddot]
}

#[test]
fn solver_matches_explicit_inverse_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for scenario in [Scenario::c1(), Scenario::c2()] {
        let plant = scenario.plant::<f64>().unwrap();
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let x = random_inputs(&mut rng, &plant);
            let got = solve(&plant, &x);
            let want = oracle_accelerations(&scenario, &x);
            for (g, w) in got.iter().zip(&want) {
                worst = worst.max((g - w).abs());
            }
        }
        assert!(worst < 1e-10, "{}: worst difference {worst:e}", scenario.name);
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn mass_matrix_is_positive_definite_over_elevation_grid() {
    let scenario = Scenario::c2();
    let plant = scenario.plant::<f64>().unwrap();
    for i in 1..200 {
        let alpha = i as f64 / 200.0 * std::f64::consts::FRAC_PI_2;
        for x_b in [0.0, 3.0, 11.0, 17.5] {
            let state = SystemState64 {
                alpha,
                x_b,
                ..Default::default()
            };
            let env = plant.environment(&state).unwrap();
            let a = plant.mass_matrix(&state, &env);
            for r in 0..3 {
                for c in 0..3 {
                    assert!((a[r][c] - a[c][r]).abs() <= 1e-12 * a[r][r].abs().max(1.0));
                }
            }
            assert!(min_eigenvalue_sym3(&a) > 0.0, "alpha={alpha}");
        }
    }
}

#[test]
fn reflection_flips_surge_and_keeps_heave() {
    let mut flat = Scenario::c1();
    flat.waves.lumped_current_mps = 0.3;
    let wavy = Scenario::c2();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in [flat, wavy] {
        let pf = s.plant::<f64>().unwrap();
        let pm = Plant64::new(s.plant_params(), pf.field().reflected()).unwrap();
        for _ in 0..200 {
            let x = random_inputs(&mut rng, &pf);
            let st = x.state;
            let m = Inputs {
                state: SystemState64 {
                    x_b: -st.x_b,
                    x_b_dot: -st.x_b_dot,
                    alpha: std::f64::consts::PI - st.alpha,
                    alpha_dot: -st.alpha_dot,
                    theta_u: -st.theta_u,
                    theta_u_dot: -st.theta_u_dot,
                    ..st
                },
                thrust: x.thrust,
                torque: -x.torque,
            };
            let a = solve(&pf, &x);
            let b = solve(&pm, &m);
            let tol = 1e-9 * (1.0 + a.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            assert!((a[0] + b[0]).abs() < tol, "{a:?} {b:?}");
            assert!((a[1] - b[1]).abs() < tol, "{a:?} {b:?}");
            assert!((a[2] + b[2]).abs() < tol, "{a:?} {b:?}");
            assert!((a[3] + b[3]).abs() < tol, "{a:?} {b:?}");
        }
    }
}

#[test]
fn pinned_buoy_swings_as_a_compound_pendulum() {
    let mut s = Scenario::c1();
    s.parameters.added_mass_surge_kg = 1e13;
    s.parameters.added_mass_heave_kg = 1e13;
    let plant = s.plant::<f64>().unwrap();
    let b = plant.params().body;
    let expected = 2.0 * std::f64::consts::PI * (b.lumped_inertia() / (b.lumped_moment() * b.gravity)).sqrt();

    let z_b = plant.params().buoy.equilibrium_height(
        plant.params().buoy.mass + b.uav_mass + b.cable_mass,
        plant.params().hydro.water_density,
        0.0,
    );
    let hanging = -std::f64::consts::FRAC_PI_2;
    let mut state = SystemState64 {
        z_b,
        alpha: hanging + 5f64.to_radians(),
        ..Default::default()
    };
    let dt = 1e-3;
    let act = Actuation::default();
    let mut crossings = Vec::new();
    let mut prev = state.alpha - hanging;
    for _ in 0..20_000 {
        state = plant.step(&state, &act, dt).unwrap();
        let phi = state.alpha - hanging;
        if prev > 0.0 && phi <= 0.0 {
            // linear interpolation of the downward zero crossing
            crossings.push(state.t - dt * phi / (phi - prev));
        }
        prev = phi;
    }
    assert!(crossings.len() >= 3);
    let measured = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    assert!(
        (measured / expected - 1.0).abs() < 0.01,
        "measured {measured}, expected {expected}"
    );
}

#[test]
fn tension_equations_agree_for_a_massless_cable() {
    let mut s = Scenario::c2();
    s.parameters.cable_mass_kg = 0.0;
    s.simulation.duration_s = 20.0;
    let mut sim = Simulation64::new(&s).unwrap();
    let mut worst = 0.0f64;
    while !sim.is_finished() {
        sim.advance().unwrap();
        let cmd = sim.last_command();
        let act = Actuation {
            thrust: cmd.thrust,
            torque: cmd.torque,
        };
        let (acc, env) = sim.plant().accelerations(sim.state(), &act).unwrap();
        let t11 = sim.plant().cable_tension(sim.state(), &acc, &env).unwrap();
        let t10 = sim.plant().radial_tension(sim.state(), &acc, &act);
        worst = worst.max((t11 - t10).abs());
    }
    assert!(worst < 1e-6, "worst tension mismatch {worst:e} N");
}

#[test]
fn detached_buoy_floats_quarter_immersed() {
    let mut s = Scenario::c1();
    s.parameters.tether = TetherMode::Detached;
    let plant = s.plant::<f64>().unwrap();
    let buoy = plant.params().buoy;
    let mut state = SystemState64 {
        z_b: buoy.height / 2.0 - 0.03,
        ..Default::default()
    };
    for _ in 0..30_000 {
        state = plant.step(&state, &Actuation::default(), 1e-3).unwrap();
    }
    let ratio = buoy.immersed_volume(state.z_b, 0.0) / buoy.volume();
    assert!((ratio - 0.25).abs() < 1e-3, "{ratio}");
    assert!(state.z_b_dot.abs() < 1e-4);
}

#[test]
fn static_balance_has_zero_accelerations() {
    let s = Scenario::c1();
    let plant = s.plant::<f64>().unwrap();
    let p = plant.params();
    let u1 = p.body.lumped_moment() * p.body.gravity / p.body.cable_length;
    let g = p.body.gravity;
    let v_im = (p.total_mass() * g - u1) / (p.hydro.water_density * g);
    let draft = v_im / p.buoy.waterplane_area();
    let state = SystemState64 {
        z_b: p.buoy.height / 2.0 - draft,
        alpha: 0.9,
        ..Default::default()
    };
    let act = Actuation { thrust: u1, torque: 0.0 };
    let (a, _) = plant.accelerations(&state, &act).unwrap();
    assert!((u1 - 20.11).abs() < 0.01);
    assert!((v_im - 0.01275).abs() < 1e-5);
    for v in [a.x_b_ddot, a.z_b_ddot, a.alpha_ddot, a.theta_u_ddot] {
        assert!(v.abs() < 1e-9, "{a:?}");
    }
    let next = plant.step(&state, &act, 1e-3).unwrap();
    assert!((next.z_b - state.z_b).abs() < 1e-12 && (next.alpha - state.alpha).abs() < 1e-12);
}

fn terminal_state(dt: f64) -> [f64; 8] {
    let mut s = Scenario::c1();
    s.simulation.duration_s = 5.0;
    s.simulation.dt_physics_s = dt;
    let mut sim = Simulation64::new(&s).unwrap();
    while !sim.is_finished() {
        sim.advance().unwrap();
    }
    let x = sim.state();
    [
        x.x_b,
        x.z_b,
        x.alpha,
        x.theta_u,
        x.x_b_dot,
        x.z_b_dot,
        x.alpha_dot,
        x.theta_u_dot,
    ]
}

#[test]
fn integrator_converges_at_fourth_order() {
    let reference = terminal_state(6.25e-5);
    let coarse = terminal_state(1e-3);
    let fine = terminal_state(5e-4);
    let diff = |a: &[f64; 8], b: &[f64; 8]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let ratio = diff(&coarse, &reference) / diff(&fine, &reference);
    assert!(ratio >= 8.0, "Richardson ratio {ratio}");
}

#[test]
fn cable_length_is_preserved() {
    let mut s = Scenario::c2();
    s.simulation.duration_s = 5.0;
    let mut sim = Simulation64::new(&s).unwrap();
    let l = s.parameters.cable_length_m;
    while !sim.is_finished() {
        let r = sim.advance().unwrap();
        let d = ((r.x_u - r.x_b).powi(2) + (r.z_u - r.z_b).powi(2)).sqrt();
        assert!((d - l).abs() < 1e-12);
    }
}
