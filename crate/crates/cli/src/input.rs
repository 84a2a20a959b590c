//! Reading profiles and summaries written by earlier runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use whitham_core::{make_grid, Grid, GridFunction};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Profile {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn read_profile(path: &Path) -> Result<Profile, CliError> {
    let bad = |m: String| CliError::Usage(format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let width = reader.headers().map_err(|e| bad(e.to_string()))?.len();
    if width < 2 {
        return Err(bad("expected at least two columns (x, value)".into()));
    }
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |k: usize| {
            rec.get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| bad(format!("row {}: column {} is not a number", i + 1, k + 1)))
        };
        xs.push(num(0)?);
        values.push(num(1)?);
    }
    Ok(Profile { xs, values })
}

impl Profile {
    /// The grid whose nodes are `xs`.
    pub fn grid(&self) -> Result<Arc<Grid>, CliError> {
        let first = *self.xs.first().ok_or_else(|| CliError::Usage("empty profile".into()))?;
        let half = -first;
        let l = half.log2().round();
        if half.is_nan() || half <= 0.0 || (2f64.powf(l) - half).abs() > 1e-9 * half || l < 0.0 {
            return Err(CliError::Usage(format!("first node {first} is not -2^l")));
        }
        let grid = make_grid(l as u32, self.xs.len())?;
        self.check_nodes(&grid)?;
        Ok(grid)
    }

    fn check_nodes(&self, grid: &Arc<Grid>) -> Result<(), CliError> {
        if self.xs.len() != grid.n() {
            return Err(CliError::Usage(format!(
                "profile has {} rows, grid has {} nodes",
                self.xs.len(),
                grid.n()
            )));
        }
        let tol = 1e-9 * grid.half_length();
        if self.xs.iter().zip(grid.nodes()).any(|(a, b)| (a - b).abs() > tol) {
            return Err(CliError::Usage("profile nodes do not match the grid".into()));
        }
        Ok(())
    }

    pub fn on(&self, grid: &Arc<Grid>) -> Result<GridFunction, CliError> {
        self.check_nodes(grid)?;
        Ok(GridFunction::new(grid.clone(), self.values.clone())?)
    }
}

/// `alpha` from a summary JSON.
pub fn read_alpha(path: &Path) -> Result<f64, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    v.get("alpha")
        .and_then(serde_json::Value::as_f64)
        .ok_or_else(|| CliError::Usage(format!("{}: no numeric 'alpha'", path.display())))
}

/// Profile and `α` for `wave --from`. A JSON summary is paired with the CSV
/// of the same stem and vice versa; `alpha` overrides the summary.
pub fn maximizer_source(from: &Path, alpha: Option<f64>) -> Result<(Profile, f64), CliError> {
    let is_json = from.extension().and_then(|e| e.to_str()) == Some("json");
    let (csv_path, json_path): (PathBuf, PathBuf) = if is_json {
        (from.with_extension("csv"), from.to_path_buf())
    } else {
        (from.to_path_buf(), from.with_extension("json"))
    };
    let profile = read_profile(&csv_path)?;
    let alpha = match alpha {
        Some(a) => a,
        None if json_path.exists() => read_alpha(&json_path)?,
        None => {
            return Err(CliError::Usage(format!(
                "no alpha given and no summary at {}",
                json_path.display()
            )))
        }
    };
    Ok((profile, alpha))
}
