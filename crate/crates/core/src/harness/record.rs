//! One log row per control period.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Bumped whenever a column is added, removed or reordered.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub x_b: f64,
    pub z_b: f64,
    pub v: f64,
    pub z_b_dot: f64,
    pub alpha: f64,
    pub alpha_dot: f64,
    pub theta_u: f64,
    pub theta_b: f64,
    pub x_u: f64,
    pub z_u: f64,
    pub u1: f64,
    pub u2: f64,
    pub u_t: f64,
    pub u_alpha: f64,
    pub pitch_cmd_raw: f64,
    pub pitch_cmd: f64,
    pub tension: f64,
    pub tension_est: f64,
    pub immersed_ratio: f64,
    pub surface: f64,
    pub current: f64,
    pub wave_vx: f64,
    pub wave_vz: f64,
    pub v_ref: f64,
    pub z_u_ref: f64,
    pub e_v: f64,
    pub e_zu: f64,
    pub taut: u8,
    pub no_hang: u8,
    pub no_flyover: u8,
    pub saturated: u8,
    pub power: f64,
}

/// Column order of the CSV output.
pub const COLUMNS: [&str; 33] = [
    "t", "x_b", "z_b", "v", "z_b_dot", "alpha", "alpha_dot", "theta_u", "theta_b", "x_u", "z_u", "u1", "u2", "u_t",
    "u_alpha", "pitch_cmd_raw", "pitch_cmd", "tension", "tension_est", "immersed_ratio", "surface", "current",
    "wave_vx", "wave_vz", "v_ref", "z_u_ref", "e_v", "e_zu", "taut", "no_hang", "no_flyover", "saturated", "power",
];

/// Writes records as CSV with a header row (also for an empty run).
pub fn write_csv<W: Write>(out: W, records: &[StepRecord]) -> Result<(), Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<StepRecord>, Error> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
