//! Continuation in `α` and bisection for the threshold `α₀`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{Grid, GridFunction};
use crate::maximize::{Maximizer, MaximizerResult, SolverConfig};
use crate::orlicz::{height_ratio, OrliczParams};
use crate::whitham::to_wave;

/// Relative peak margin in the threshold predicate.
pub const THRESHOLD_DELTA: f64 = 1e-6;

/// Residual below which a non-converged candidate still competes on `J`.
pub const CANDIDATE_RESIDUAL: f64 = 1e-6;

/// `3B̃²/(2 + 3(B̃−1) + 3(B̃−1)³)` with `B̃ = B/α`, an upper bound for `αJ²`.
pub fn alpha_j2_cap() -> f64 {
    let b = height_ratio();
    let d = b - 1.0;
    3.0 * b * b / (2.0 + 3.0 * d + 3.0 * d * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Largest `α` from the initial guess, then each row warm-started from its
    /// upper neighbor and compared with a cold start. Sequential.
    #[default]
    Warm,
    /// Every row from the initial guess. Rows run in parallel.
    Cold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "alphaJ2")]
    pub alpha_j2: f64,
    pub peak_ratio: f64,
    pub mu: Option<f64>,
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
    pub pairing: f64,
    pub resolved: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(alpha: f64, e: &Error) -> Self {
        Self {
            alpha,
            j: f64::NAN,
            alpha_j2: f64::NAN,
            peak_ratio: f64::NAN,
            mu: None,
            converged: false,
            residual: f64::NAN,
            iterations: 0,
            pairing: f64::NAN,
            resolved: false,
            error: Some(e.to_string()),
        }
    }

    fn from_result(r: &MaximizerResult) -> Self {
        let mu = OrliczParams::new(r.alpha)
            .ok()
            .and_then(|p| to_wave(r, &p).ok())
            .map(|w| w.mu);
        Self {
            alpha: r.alpha,
            j: r.j,
            alpha_j2: r.alpha_j2(),
            peak_ratio: r.peak_ratio,
            mu,
            converged: r.converged,
            residual: r.residual,
            iterations: r.iterations,
            pairing: r.pairing,
            resolved: r.resolved,
            error: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub maximizers: Vec<Option<MaximizerResult>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub rows: usize,
    pub converged_rows: usize,
    /// `αJ²` strictly decreasing across converged rows.
    pub strictly_decreasing: bool,
    /// `μ` strictly decreasing across rows where it is defined.
    pub mu_decreasing: bool,
    pub max_alpha_j2: f64,
    pub min_alpha_j2: f64,
    pub below_cap: bool,
    pub cap: f64,
    /// Smallest L² distance between converged profiles at distinct `α`.
    pub min_profile_distance: f64,
}

impl Sweep {
    pub fn summary(&self) -> BranchSummary {
        let conv: Vec<&SweepRow> = self.rows.iter().filter(|r| r.converged).collect();
        let strictly_decreasing = conv.windows(2).all(|w| w[1].alpha_j2 < w[0].alpha_j2);
        let mus: Vec<f64> = self.rows.iter().filter_map(|r| r.mu).collect();
        let mu_decreasing = mus.windows(2).all(|w| w[1] < w[0]);
        let cap = alpha_j2_cap();
        let max_alpha_j2 = conv.iter().map(|r| r.alpha_j2).fold(f64::NEG_INFINITY, f64::max);
        let min_alpha_j2 = conv.iter().map(|r| r.alpha_j2).fold(f64::INFINITY, f64::min);
        let profiles: Vec<&GridFunction> = self
            .maximizers
            .iter()
            .flatten()
            .filter(|m| m.converged)
            .map(|m| &m.f)
            .collect();
        let mut min_profile_distance = f64::INFINITY;
        for i in 0..profiles.len() {
            for j in i + 1..profiles.len() {
                if let Ok(d) = profiles[i].l2_distance(profiles[j]) {
                    min_profile_distance = min_profile_distance.min(d);
                }
            }
        }
        BranchSummary {
            rows: self.rows.len(),
            converged_rows: conv.len(),
            strictly_decreasing,
            mu_decreasing,
            max_alpha_j2,
            min_alpha_j2,
            below_cap: conv.iter().all(|r| r.alpha_j2 < cap),
            cap,
            min_profile_distance,
        }
    }
}

fn solve_at(alpha: f64, grid: &Arc<Grid>, cfg: &SolverConfig, warm: Option<&GridFunction>) -> Result<MaximizerResult> {
    let p = OrliczParams::new(alpha)?;
    Maximizer::new(p, grid)?.solve(cfg, warm)
}

fn better(a: MaximizerResult, b: MaximizerResult) -> MaximizerResult {
    match (a.converged, b.converged) {
        (true, false) => a,
        (false, true) => b,
        _ => {
            if b.j > a.j {
                b
            } else {
                a
            }
        }
    }
}

/// `α` values spaced geometrically between `lo` and `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || steps < 2 {
        return Err(Error::InvalidParameter("need 0 < lo < hi and at least 2 steps".into()));
    }
    let r = (hi / lo).ln() / (steps - 1) as f64;
    let mut v: Vec<f64> = (0..steps).map(|i| lo * (r * i as f64).exp()).collect();
    v[0] = lo;
    v[steps - 1] = hi;
    Ok(v)
}

/// Solve over an ascending list of `α`. Rows that fail carry the error and do
/// not abort the sweep.
pub fn alpha_sweep(alphas: &[f64], grid: &Arc<Grid>, cfg: &SolverConfig, mode: SweepMode) -> Result<Sweep> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("empty alpha list".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameter("all alpha must be positive".into()));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("alpha list must be strictly ascending".into()));
    }
    cfg.validate()?;
    let outcomes: Vec<Result<MaximizerResult>> = match mode {
        SweepMode::Cold => exec::map_slice(alphas, |&a| solve_at(a, grid, cfg, None)),
        SweepMode::Warm => {
            let mut out: Vec<Option<Result<MaximizerResult>>> = (0..alphas.len()).map(|_| None).collect();
            let mut prev: Option<GridFunction> = None;
            for (i, &a) in alphas.iter().enumerate().rev() {
                // constants solve the EL equation on the torus, so a warm
                // start can sit on a non-maximal critical point; the cold
                // start competes on J
                let cold = solve_at(a, grid, cfg, None);
                let res = match &prev {
                    None => cold,
                    Some(w) => match (solve_at(a, grid, cfg, Some(w)), cold) {
                        (Ok(x), Ok(y)) => Ok(better(x, y)),
                        (Ok(x), Err(_)) => Ok(x),
                        (Err(_), y) => y,
                    },
                };
                if let Ok(r) = &res {
                    prev = Some(r.f.clone());
                }
                out[i] = Some(res);
            }
            out.into_iter().map(|r| r.expect("every row visited")).collect()
        }
    };
    let mut rows = Vec::with_capacity(alphas.len());
    let mut maximizers = Vec::with_capacity(alphas.len());
    for (&a, res) in alphas.iter().zip(outcomes) {
        match res {
            Ok(r) => {
                rows.push(SweepRow::from_result(&r));
                maximizers.push(Some(r));
            }
            Err(e) => {
                rows.push(SweepRow::failed(a, &e));
                maximizers.push(None);
            }
        }
    }
    Ok(Sweep { rows, maximizers })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProbe {
    pub alpha: f64,
    pub predicate: bool,
    pub peak_ratio: f64,
    #[serde(rename = "alphaJ2")]
    pub alpha_j2: f64,
    pub residual: f64,
    pub converged: bool,
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub lo: f64,
    pub hi: f64,
    pub delta: f64,
    /// `μ/2 − φ(0)` for the wave at the upper end of the bracket.
    pub crest_gap_at_hi: Option<f64>,
    pub probes: Vec<ThresholdProbe>,
}

struct Evaluated {
    probe: ThresholdProbe,
    best: MaximizerResult,
}

fn evaluate_predicate(alpha: f64, starts: &[Option<&GridFunction>], grid: &Arc<Grid>, cfg: &SolverConfig) -> Result<Evaluated> {
    let results = exec::map_slice(starts, |s| solve_at(alpha, grid, cfg, *s));
    let mut candidates: Vec<MaximizerResult> = Vec::new();
    let mut first_err = None;
    for r in results {
        match r {
            Ok(r) => candidates.push(r),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if candidates.is_empty() {
        return Err(first_err.unwrap_or_else(|| Error::RootFinding("no candidates".into())));
    }
    let n = candidates.len();
    let loose: Vec<MaximizerResult> = candidates
        .iter()
        .filter(|c| c.residual <= CANDIDATE_RESIDUAL.max(cfg.tol))
        .cloned()
        .collect();
    let pool = if loose.is_empty() { candidates } else { loose };
    let best = pool
        .into_iter()
        .reduce(|a, b| if b.j > a.j { b } else { a })
        .expect("non-empty pool");
    let predicate = best.converged && best.peak_ratio < 1.0 - THRESHOLD_DELTA;
    Ok(Evaluated {
        probe: ThresholdProbe {
            alpha,
            predicate,
            peak_ratio: best.peak_ratio,
            alpha_j2: best.alpha_j2(),
            residual: best.residual,
            converged: best.converged,
            candidates: n,
        },
        best,
    })
}

/// Bisect on `P(α) = converged ∧ f_α(0) < α(1 − δ)` until the bracket is
/// narrower than `tol`.
pub fn estimate_alpha0(lo: f64, hi: f64, tol: f64, grid: &Arc<Grid>, cfg: &SolverConfig) -> Result<ThresholdEstimate> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter("need 0 < lo < hi".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    cfg.validate()?;
    let mut probes = Vec::new();
    let el = evaluate_predicate(lo, &[None], grid, cfg)?;
    let eh = evaluate_predicate(hi, &[None], grid, cfg)?;
    probes.push(el.probe.clone());
    probes.push(eh.probe.clone());
    if el.probe.predicate == eh.probe.predicate {
        return Err(Error::BracketNotStraddling {
            lo,
            hi,
            value: el.probe.predicate,
        });
    }
    let lo_value = el.probe.predicate;
    let (mut a, mut b) = (lo, hi);
    let mut best_lo = el.best;
    let mut best_hi = eh.best;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let starts = [None, Some(&best_lo.f), Some(&best_hi.f)];
        let em = evaluate_predicate(mid, &starts, grid, cfg)?;
        probes.push(em.probe.clone());
        if em.probe.predicate == lo_value {
            a = mid;
            best_lo = em.best;
        } else {
            b = mid;
            best_hi = em.best;
        }
    }
    let upper = if lo_value { &best_lo } else { &best_hi };
    let crest_gap_at_hi = OrliczParams::new(upper.alpha)
        .ok()
        .and_then(|p| to_wave(upper, &p).ok())
        .map(|w| w.diagnostics.crest_gap);
    Ok(ThresholdEstimate {
        lo: a,
        hi: b,
        delta: THRESHOLD_DELTA,
        crest_gap_at_hi,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn cap_value() {
        assert!((alpha_j2_cap() - 1.7423).abs() < 1e-4);
    }

    #[test]
    fn log_spacing() {
        let v = log_spaced(3.0, 48.0, 5).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 3.0);
        assert_eq!(v[4], 48.0);
        assert!((v[2] - 12.0).abs() < 1e-12);
        assert!(log_spaced(3.0, 2.0, 5).is_err());
    }

    #[test]
    fn sweep_validation() {
        let g = make_grid(4, 512).unwrap();
        let cfg = SolverConfig::default();
        assert!(alpha_sweep(&[], &g, &cfg, SweepMode::Warm).is_err());
        assert!(alpha_sweep(&[3.0, 2.0], &g, &cfg, SweepMode::Warm).is_err());
        assert!(alpha_sweep(&[-1.0], &g, &cfg, SweepMode::Cold).is_err());
    }

    #[test]
    fn small_sweep_rows() {
        let g = make_grid(4, 1024).unwrap();
        let s = alpha_sweep(&[3.0, 4.0, 6.0], &g, &SolverConfig::default(), SweepMode::Warm).unwrap();
        let sum = s.summary();
        assert_eq!(sum.converged_rows, 3);
        assert!(sum.strictly_decreasing);
        assert!(sum.mu_decreasing);
        assert!(sum.below_cap);
        assert!(sum.min_profile_distance > 1e-8);
    }

    #[test]
    fn threshold_rejects_non_straddling() {
        let g = make_grid(4, 1024).unwrap();
        let err = estimate_alpha0(3.0, 5.0, 0.5, &g, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::BracketNotStraddling { value: true, .. }));
    }
}
