use std::path::{Path, PathBuf};

use tetherbuoy::harness::{compare, read_csv, run_with, write_csv, write_outputs, COLUMNS};
use tetherbuoy::{ControllerKind, Scenario};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn short(mut s: Scenario, seconds: f64) -> Scenario {
    s.simulation.duration_s = seconds;
    s
}

fn csv_of(s: &Scenario, kind: ControllerKind) -> Vec<u8> {
    let out = run_with::<f64>(s, kind).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &out.records).unwrap();
    buf
}

#[test]
fn repeated_runs_are_byte_identical() {
    for s in [short(Scenario::c1(), 10.0), short(Scenario::c2(), 10.0)] {
        for kind in [ControllerKind::Fsvc, ControllerKind::Pid] {
            assert!(csv_of(&s, kind) == csv_of(&s, kind), "{} {kind:?}", s.name);
        }
    }
}

/// Regenerate with `UPDATE_GOLDEN=1 cargo test -p tetherbuoy --test harness`.
#[test]
fn short_c1_run_matches_golden_file() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/c1_fsvc_5s.csv");
    let bytes = csv_of(&short(Scenario::c1(), 5.0), ControllerKind::Fsvc);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &bytes).unwrap();
    }
    let golden = std::fs::read(&path).expect("golden file missing; set UPDATE_GOLDEN=1 to create it");
    let header = |b: &[u8]| b.split(|c| *c == b'\n').next().unwrap().to_vec();
    assert_eq!(header(&bytes), header(&golden));
    assert_eq!(String::from_utf8(header(&golden)).unwrap(), COLUMNS.join(","));

    // values are compared with a tolerance so that libm differences across
    // platforms do not break the check
    let now = String::from_utf8(bytes).unwrap();
    let then = String::from_utf8(golden).unwrap();
    assert_eq!(now.lines().count(), then.lines().count());
    for (a, b) in now.lines().zip(then.lines()).skip(1) {
        for (x, y) in a.split(',').zip(b.split(',')) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()), "{a}\n{b}");
        }
    }
}

#[test]
fn scenario_files_match_builtin_cases() {
    for (file, builtin) in [("c1.toml", Scenario::c1()), ("c2.toml", Scenario::c2())] {
        let loaded = Scenario::load(&repo_root().join("scenarios").join(file)).unwrap();
        loaded.validate().unwrap();
        assert_eq!(loaded.name, builtin.name);
        assert_eq!(loaded.plant_params::<f64>(), builtin.plant_params::<f64>());
        assert_eq!(loaded.wave_field::<f64>().unwrap(), builtin.wave_field::<f64>().unwrap());
        for t in [0.0, 29.99, 30.0, 59.0] {
            assert_eq!(loaded.reference_at::<f64>(t), builtin.reference_at::<f64>(t));
        }
        assert_eq!(loaded.fsvc_config::<f64>().unwrap(), builtin.fsvc_config::<f64>().unwrap());
        assert_eq!(loaded.pid_config::<f64>().unwrap(), builtin.pid_config::<f64>().unwrap());
        for kind in [ControllerKind::Fsvc, ControllerKind::Pid] {
            assert!(csv_of(&loaded, kind) == csv_of(&builtin, kind), "{file} {kind:?}");
        }
    }
}

#[test]
fn toml_round_trip_keeps_the_scenario() {
    for s in [Scenario::c1(), Scenario::c2()] {
        let text = s.to_toml_string();
        assert_eq!(Scenario::from_toml_str(&text).unwrap(), s);
    }
}

#[test]
fn outputs_are_written_per_scenario_and_controller() {
    let dir = tempfile::tempdir().unwrap();
    let s = short(Scenario::c2(), 2.0);
    let runs = compare(&s).unwrap();
    let refs: Vec<_> = runs.iter().collect();
    let written = write_outputs(dir.path(), &s, &refs).unwrap();
    for name in ["c2_pid.csv", "c2_fsvc.csv", "c2_summary.txt", "c2_assumptions.txt"] {
        let p = dir.path().join(name);
        assert!(p.exists(), "{name} missing");
        assert!(written.contains(&p));
    }
    let back = read_csv(std::fs::File::open(dir.path().join("c2_fsvc.csv")).unwrap()).unwrap();
    assert_eq!(back, runs[1].records);
    let summary = std::fs::read_to_string(dir.path().join("c2_summary.txt")).unwrap();
    assert!(summary.contains("V mean tracking error (cm/s)"));
    assert!(summary.contains("Total consumed energy (kJ)"));
    assert!(summary.contains("PID") && summary.contains("FSVC"));
}

#[test]
fn pid_goes_slack_early_in_waves() {
    let s = short(Scenario::c2(), 5.0);
    let pid = run_with::<f64>(&s, ControllerKind::Pid).unwrap();
    assert!(pid.summary.violations.taut.iter().any(|iv| iv.intersects(0.0, 3.0)));
}

#[test]
fn immersion_stays_in_band_late_in_the_run() {
    for s in [Scenario::c1(), Scenario::c2()] {
        for run in compare(&s).unwrap() {
            for r in run.records.iter().filter(|r| r.t >= 50.0) {
                assert!((0.15..=0.35).contains(&r.immersed_ratio), "{} t={} {}", s.name, r.t, r.immersed_ratio);
            }
        }
    }
}
