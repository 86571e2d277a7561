//! Constraint predicates, the energy surrogate, and run summaries.

use std::fmt::Write as _;

use crate::harness::record::StepRecord;

/// Outcome of the three feasibility checks; `true` means satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintFlags {
    pub taut: bool,
    pub no_hang: bool,
    pub no_flyover: bool,
}

impl ConstraintFlags {
    pub fn all(&self) -> bool {
        self.taut && self.no_hang && self.no_flyover
    }
}

/// Taut cable `T > 0`, no hanging `T < (m_b + m_c) g / sin α`, and a
/// partially immersed buoy `V_im > 0`.
pub fn check_constraints(
    tension: f64,
    alpha: f64,
    immersed_volume: f64,
    buoy_mass: f64,
    cable_mass: f64,
    gravity: f64,
) -> ConstraintFlags {
    let s = alpha.sin();
    let no_hang = if s > 0.0 {
        tension < (buoy_mass + cable_mass) * gravity / s
    } else {
        true
    };
    ConstraintFlags {
        taut: tension > 0.0,
        no_hang,
        no_flyover: immersed_volume > 0.0,
    }
}

/// Momentum-theory induced power, `P = u₁^{3/2} / √(2 ρ_air A_disk)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub air_density: f64,
    pub disk_area: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            air_density: 1.225,
            disk_area: 0.3,
        }
    }
}

impl EnergyModel {
    pub fn power(&self, thrust: f64) -> f64 {
        thrust.max(0.0).powf(1.5) / (2.0 * self.air_density * self.disk_area).sqrt()
    }

    /// Energy in kJ for a thrust series sampled every `dt` seconds.
    pub fn energy_kj(&self, thrust: impl IntoIterator<Item = f64>, dt: f64) -> f64 {
        thrust.into_iter().map(|u| self.power(u) * dt).sum::<f64>() / 1000.0
    }
}

/// Closed interval `[start, end]` in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn intersects(&self, start: f64, end: f64) -> bool {
        self.start <= end && start <= self.end
    }
}

/// Merges consecutive violated samples into intervals.
pub fn violation_intervals(samples: impl IntoIterator<Item = (f64, bool)>) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut open: Option<Interval> = None;
    for (t, ok) in samples {
        match (&mut open, ok) {
            (Some(iv), false) => iv.end = t,
            (None, false) => open = Some(Interval { start: t, end: t }),
            (Some(_), true) => out.extend(open.take()),
            (None, true) => {}
        }
    }
    out.extend(open);
    out
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Violations {
    pub taut: Vec<Interval>,
    pub no_hang: Vec<Interval>,
    pub no_flyover: Vec<Interval>,
}

impl Violations {
    pub fn from_records(records: &[StepRecord]) -> Self {
        let series = |f: fn(&StepRecord) -> u8| violation_intervals(records.iter().map(|r| (r.t, f(r) == 1)));
        Self {
            taut: series(|r| r.taut),
            no_hang: series(|r| r.no_hang),
            no_flyover: series(|r| r.no_flyover),
        }
    }

    /// Violation intervals of any kind that reach past `t`.
    pub fn any_after(&self, t: f64) -> bool {
        [&self.taut, &self.no_hang, &self.no_flyover]
            .iter()
            .any(|v| v.iter().any(|iv| iv.end > t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scenario: String,
    pub controller: String,
    pub duration: f64,
    pub samples: usize,
    /// Mean |V̄ − V| over the run, cm/s.
    pub mean_abs_e_v_cmps: f64,
    /// Mean |z̄_u − z_u| over the run, cm.
    pub mean_abs_e_zu_cm: f64,
    pub energy_kj: f64,
    pub violations: Violations,
    /// Set when the run stopped early on a fatal model error.
    pub failure: Option<String>,
}

impl RunSummary {
    pub fn from_records(
        scenario: &str,
        controller: &str,
        records: &[StepRecord],
        dt_control: f64,
        energy: &EnergyModel,
    ) -> Self {
        let n = records.len();
        let mean = |f: fn(&StepRecord) -> f64| {
            if n == 0 {
                0.0
            } else {
                records.iter().map(|r| f(r).abs()).sum::<f64>() / n as f64
            }
        };
        Self {
            scenario: scenario.to_string(),
            controller: controller.to_string(),
            duration: n as f64 * dt_control,
            samples: n,
            mean_abs_e_v_cmps: 100.0 * mean(|r| r.e_v),
            mean_abs_e_zu_cm: 100.0 * mean(|r| r.e_zu),
            energy_kj: energy.energy_kj(records.iter().map(|r| r.u1), dt_control),
            violations: Violations::from_records(records),
            failure: None,
        }
    }
}

fn format_intervals(list: &[Interval]) -> String {
    if list.is_empty() {
        return "none".to_string();
    }
    list.iter()
        .map(|iv| format!("[{:.3}, {:.3}]", iv.start, iv.end))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Table of tracking errors and energy, one column group per metric and one
/// column per controller, followed by constraint violation intervals.
pub fn format_summary_table(runs: &[&RunSummary]) -> String {
    let mut s = String::new();
    let Some(first) = runs.first() else {
        return s;
    };
    let names: Vec<String> = runs.iter().map(|r| r.controller.to_uppercase()).collect();
    let _ = writeln!(s, "Comparison of tracking errors and consumed energy");
    let _ = writeln!(s, "scenario: {}  duration: {:.3} s", first.scenario, first.duration);
    let _ = writeln!(s);
    type Column = (&'static str, fn(&RunSummary) -> f64);
    let metrics: [Column; 3] = [
        ("V mean tracking error (cm/s)", |r| r.mean_abs_e_v_cmps),
        ("z_u mean tracking error (cm)", |r| r.mean_abs_e_zu_cm),
        ("Total consumed energy (kJ)", |r| r.energy_kj),
    ];
    let _ = write!(s, "{:<6}", "Case");
    for (label, _) in &metrics {
        let _ = write!(s, " | {:<width$}", label, width = (9 * names.len()).max(28));
    }
    let _ = writeln!(s);
    let _ = write!(s, "{:<6}", "");
    for _ in &metrics {
        let mut h = String::new();
        for n in &names {
            let _ = write!(h, "{n:>9}");
        }
        let _ = write!(s, " | {:<width$}", h, width = (9 * names.len()).max(28));
    }
    let _ = writeln!(s);
    let _ = write!(s, "{:<6}", first.scenario);
    for (_, f) in &metrics {
        let mut h = String::new();
        for r in runs {
            let _ = write!(h, "{:>9.2}", f(r));
        }
        let _ = write!(s, " | {:<width$}", h, width = (9 * names.len()).max(28));
    }
    let _ = writeln!(s);
    if let [a, b] = runs {
        if a.energy_kj > 0.0 {
            let _ = writeln!(s, "\nenergy ratio {}/{}: {:.4}", names[1], names[0], b.energy_kj / a.energy_kj);
        }
    }
    let _ = writeln!(s, "\nConstraint violation intervals (s)");
    for (r, n) in runs.iter().zip(&names) {
        let _ = writeln!(s, "{n}:");
        let _ = writeln!(s, "  taut cable : {}", format_intervals(&r.violations.taut));
        let _ = writeln!(s, "  no hanging : {}", format_intervals(&r.violations.no_hang));
        let _ = writeln!(s, "  no flyover : {}", format_intervals(&r.violations.no_flyover));
        if let Some(f) = &r.failure {
            let _ = writeln!(s, "  run aborted: {f}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_examples() {
        let c = check_constraints(-1.0, 0.7, 0.01, 12.5, 0.5, 9.81);
        assert!(!c.taut && c.no_hang && c.no_flyover);
        let limit = 13.0 * 9.81 / std::f64::consts::FRAC_PI_4.sin();
        assert!((limit - 180.36).abs() < 0.01);
        assert!(!check_constraints(limit, std::f64::consts::FRAC_PI_4, 0.01, 12.5, 0.5, 9.81).no_hang);
        assert!(check_constraints(limit - 1e-6, std::f64::consts::FRAC_PI_4, 0.01, 12.5, 0.5, 9.81).no_hang);
        assert!(!check_constraints(10.0, 0.7, 0.0, 12.5, 0.5, 9.81).no_flyover);
    }

    #[test]
    fn energy_examples() {
        let e = EnergyModel::default();
        assert_eq!(e.energy_kj(std::iter::repeat_n(0.0, 100), 0.1), 0.0);
        let p = e.power(17.66);
        assert!((p - 86.6).abs() < 0.1, "{p}");
        let kj = e.energy_kj(std::iter::repeat_n(17.66, 2000), 0.005);
        assert!((kj - 0.866).abs() < 1e-3, "{kj}");
    }

    #[test]
    fn intervals_merge_runs() {
        let s = [(0.0, true), (0.1, false), (0.2, false), (0.3, true), (0.4, false)];
        let iv = violation_intervals(s);
        assert_eq!(
            iv,
            vec![Interval { start: 0.1, end: 0.2 }, Interval { start: 0.4, end: 0.4 }]
        );
        assert!(iv[0].intersects(0.0, 3.0));
        assert!(!iv[1].intersects(0.0, 0.3));
    }
}
