//! JSON summaries and CSV profiles.
//!
//! CSV numbers are written with `{:.16e}` (17 significant digits, `.` decimal
//! point), independent of locale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::maximize::MaximizerResult;
use crate::whitham::{SolitaryWave, WaveDiagnostics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub alpha: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "alphaJ2")]
    pub alpha_j2: f64,
    pub pairing: f64,
    pub peak_ratio: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mu: Option<f64>,
    pub sup_phi: Option<f64>,
    pub l: u32,
    pub n: usize,
    pub constraint_error: f64,
    pub tail_ratio: f64,
    pub half_ratio: f64,
    pub resolved: bool,
    pub j_monotone: bool,
    pub wave: Option<WaveDiagnostics>,
}

impl Summary {
    pub fn new(r: &MaximizerResult, wave: Option<&SolitaryWave>) -> Self {
        let g = r.f.grid();
        Self {
            alpha: r.alpha,
            j: r.j,
            alpha_j2: r.alpha_j2(),
            pairing: r.pairing,
            peak_ratio: r.peak_ratio,
            residual: r.residual,
            iterations: r.iterations,
            converged: r.converged,
            mu: wave.map(|w| w.mu),
            sup_phi: wave.map(|w| w.diagnostics.sup_phi),
            l: g.l(),
            n: g.n(),
            constraint_error: r.constraint_error,
            tail_ratio: r.tail_ratio,
            half_ratio: r.half_ratio,
            resolved: r.resolved,
            j_monotone: r.j_monotone,
            wave: wave.map(|w| w.diagnostics),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with a header row; all columns must have equal length.
pub fn csv_columns(header: &[&str], columns: &[&[f64]]) -> Result<String> {
    if header.len() != columns.len() {
        return Err(Error::InvalidParameter("header and column count differ".into()));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidParameter("columns differ in length".into()));
    }
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| format_number(c[i])).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Two-column profile `x,<name>`.
pub fn profile_csv(f: &GridFunction, name: &str) -> String {
    csv_columns(&["x", name], &[f.grid().nodes(), f.values()]).expect("matching lengths")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.0), "-2.0000000000000000e0");
        let back: f64 = format_number(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_shape() {
        let g = make_grid(0, 16).unwrap();
        let f = GridFunction::constant(&g, 1.0);
        let s = profile_csv(&f, "f");
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "x,f");
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[1], "-1.0000000000000000e0,1.0000000000000000e0");
        assert!(csv_columns(&["a"], &[&[1.0], &[2.0]]).is_err());
    }
}
