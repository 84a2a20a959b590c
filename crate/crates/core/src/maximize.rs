//! Constrained maximization of `J(f)² = ⟨f, K*f⟩` over bell-shaped `f` with
//! `N_Ψ(f) = 1`, by fixed-point iteration of the Euler–Lagrange equation
//! `λ K*f = Ψ'(f)`, `λ = ⟨f, Ψ'(f)⟩ / J²`.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner_product_raw, Grid, GridFunction};
use crate::kernel::{SymbolTable, WHITHAM_EXPONENT};
use crate::orlicz::{gauge_norm_slice, pairing_slice, psi_prime, psi_prime_inv, OrliczParams};
use crate::rearrange::symmetric_rearrangement_slice;
use crate::special::integrate_breaks;

/// Fixed-point form used by [`solve_max`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `f ← (2α − λ m(ξ))⁻¹ N(f)` with `N(f) = 2αf − Ψ'(f)`.
    #[default]
    Spectral,
    /// `f ← (Ψ')⁻¹(λ K*f)`.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub theta: f64,
    pub theta_min: f64,
    pub rearrange_every: usize,
    pub scheme: Scheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            theta: 1.0,
            theta_min: 0.05,
            rearrange_every: 1,
            scheme: Scheme::Spectral,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad("theta must lie in (0, 1]");
        }
        if !(self.theta_min > 0.0 && self.theta_min <= self.theta) {
            return bad("theta_min must lie in (0, theta]");
        }
        if self.rearrange_every == 0 {
            return bad("rearrange_every must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub j: f64,
    pub residual: f64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct MaximizerResult {
    pub f: GridFunction,
    pub alpha: f64,
    pub j: f64,
    pub pairing: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub peak_ratio: f64,
    /// `|N_Ψ(f) − 1|`.
    pub constraint_error: f64,
    /// `f(L − dx) / f(0)`.
    pub tail_ratio: f64,
    /// `f(L/2) / f(0)`.
    pub half_ratio: f64,
    /// Profile decays inside the domain (`tail_ratio < 1e-6`, `half_ratio ≤ 1e-8`).
    pub resolved: bool,
    /// J never decreased between accepted iterates.
    pub j_monotone: bool,
    pub history: Vec<IterationRecord>,
}

impl MaximizerResult {
    pub fn alpha_j2(&self) -> f64 {
        self.alpha * self.j * self.j
    }

    /// `∫ f³`.
    pub fn l3_cubed(&self) -> f64 {
        self.f.grid().dx() * self.f.values().iter().map(|v| v * v * v).sum::<f64>()
    }
}

/// `q(x) = c exp(−1/(1−x²))` on `|x| < 1`, with `∫ q² − q³/3 = 1`.
pub fn bump(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        bump_constant() * (-1.0 / s).exp()
    }
}

fn raw_bump_moments() -> (f64, f64) {
    let breaks = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let e = |x: f64| {
        let s = 1.0 - x * x;
        if s <= 0.0 {
            0.0
        } else {
            (-1.0 / s).exp()
        }
    };
    let a = integrate_breaks(|x| e(x).powi(2), &breaks, 1e-16);
    let b = integrate_breaks(|x| e(x).powi(3), &breaks, 1e-16);
    (a, b)
}

/// Normalizing constant of [`bump`]: smallest positive root of `c²A − c³B/3 = 1`.
pub fn bump_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let (a, b) = raw_bump_moments();
        let g = |c: f64| c * c * a - c * c * c * b / 3.0 - 1.0;
        let mut lo = 0.0;
        let mut hi = 2.0 * a / b;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// `(‖q‖²_{L²}, ‖q‖³_{L³})`.
pub fn bump_norms() -> (f64, f64) {
    let (a, b) = raw_bump_moments();
    let c = bump_constant();
    (c * c * a, c * c * c * b)
}

/// Starting profile: `α q(α³x)`, or its small-amplitude rescaling when the
/// plain bump is not resolved or does not fit; normalized to `N_Ψ = 1`.
pub fn initial_guess(p: &OrliczParams, grid: &Arc<Grid>) -> Result<GridFunction> {
    let alpha = p.alpha();
    let l = grid.half_length();
    let min_width = 8.0 * grid.dx();
    let plain_width = alpha.powi(-3);
    let (amp, rate) = if plain_width >= min_width && plain_width <= l {
        (alpha, alpha.powi(3))
    } else {
        let mu = 1.0 / (1.0 + alpha * alpha);
        let (q2, q3) = bump_norms();
        let eta = q2 - mu / 3.0 * q3;
        let rate = mu * mu * eta * alpha.powi(3);
        let width = 1.0 / rate;
        if width > l {
            return Err(Error::SupportTooWide(format!(
                "bump half-width {width:.3} exceeds L = {l}; increase the domain exponent l"
            )));
        }
        if width < min_width {
            return Err(Error::SupportTooWide(format!(
                "bump half-width {width:.3e} is below 8 grid cells; increase n"
            )));
        }
        (alpha * mu, rate)
    };
    let f = GridFunction::from_fn(grid, |x| amp * bump(rate * x))?;
    let n = gauge_norm_slice(f.values(), grid.dx(), p)?;
    Ok(f.scale(1.0 / n))
}

struct Evaluation {
    kf: Vec<f64>,
    j2: f64,
    pairing: f64,
    residual: f64,
}

/// Reusable solver state for one `(α, grid)` pair.
#[derive(Debug, Clone)]
pub struct Maximizer {
    params: OrliczParams,
    symbols: SymbolTable,
}

impl Maximizer {
    pub fn new(params: OrliczParams, grid: &Arc<Grid>) -> Result<Self> {
        Ok(Self {
            params,
            symbols: SymbolTable::new(grid, WHITHAM_EXPONENT)?,
        })
    }

    pub fn params(&self) -> &OrliczParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.symbols.grid()
    }

    fn evaluate(&self, f: &[f64]) -> Result<Evaluation> {
        let grid = self.grid();
        let dx = grid.dx();
        let kf = grid.apply_multiplier(f, self.symbols.natural());
        let j2 = inner_product_raw(f, &kf, dx);
        let pairing = pairing_slice(f, dx, &self.params);
        let residual = residual_raw(f, &kf, j2, pairing, dx, &self.params)?;
        Ok(Evaluation {
            kf,
            j2,
            pairing,
            residual,
        })
    }

    /// Clamp, optionally rearrange, and renormalize.
    fn project(&self, mut v: Vec<f64>, rearrange: bool) -> Result<Vec<f64>> {
        for x in v.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        if rearrange {
            v = symmetric_rearrangement_slice(&v);
        }
        let n = gauge_norm_slice(&v, self.grid().dx(), &self.params)?;
        let inv = 1.0 / n;
        for x in v.iter_mut() {
            *x *= inv;
        }
        Ok(v)
    }

    fn direct_raw(&self, kf: &[f64], lambda: f64) -> Vec<f64> {
        kf.iter().map(|&g| psi_prime_inv(lambda * g, &self.params)).collect()
    }

    fn spectral_raw(&self, f: &[f64], lambda: f64) -> Vec<f64> {
        let two_alpha = 2.0 * self.params.alpha();
        let nl: Vec<f64> = f.iter().map(|&v| self.params.nonlinearity(v)).collect();
        let inv: Vec<f64> = self
            .symbols
            .natural()
            .iter()
            .map(|&m| 1.0 / (two_alpha - lambda * m))
            .collect();
        self.grid().apply_multiplier(&nl, &inv)
    }

    fn step(&self, f: &[f64], ev: &Evaluation, theta: f64, scheme: Scheme, rearrange: bool) -> Result<Vec<f64>> {
        if ev.j2 <= 0.0 {
            return Err(Error::Degenerate("quadratic form vanishes".into()));
        }
        let lambda = ev.pairing / ev.j2;
        let raw = match scheme {
            Scheme::Spectral if lambda < 2.0 * self.params.alpha() => self.spectral_raw(f, lambda),
            _ => self.direct_raw(&ev.kf, lambda),
        };
        let mixed = f
            .iter()
            .zip(&raw)
            .map(|(&a, &b)| (1.0 - theta) * a + theta * b)
            .collect();
        self.project(mixed, rearrange)
    }

    /// One step of `f ← (Ψ')⁻¹(λ K*f)` with damping, projection and renormalization.
    pub fn el_step(&self, f: &GridFunction, theta: f64) -> Result<GridFunction> {
        self.one_step(f, theta, Scheme::Direct)
    }

    /// One step of the spectral scheme.
    pub fn spectral_step(&self, f: &GridFunction, theta: f64) -> Result<GridFunction> {
        self.one_step(f, theta, Scheme::Spectral)
    }

    fn one_step(&self, f: &GridFunction, theta: f64, scheme: Scheme) -> Result<GridFunction> {
        self.check_input(f)?;
        let ev = self.evaluate(f.values())?;
        let v = self.step(f.values(), &ev, theta, scheme, true)?;
        Ok(GridFunction::from_raw(self.grid().clone(), v))
    }

    fn check_input(&self, f: &GridFunction) -> Result<()> {
        if **f.grid() != **self.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn el_residual(&self, f: &GridFunction) -> Result<f64> {
        self.check_input(f)?;
        Ok(self.evaluate(f.values())?.residual)
    }

    /// Iterate from `warm` (or the initial guess) until the EL residual drops
    /// below `cfg.tol` or `cfg.max_iter` steps are taken.
    pub fn solve(&self, cfg: &SolverConfig, warm: Option<&GridFunction>) -> Result<MaximizerResult> {
        cfg.validate()?;
        let start = match warm {
            Some(w) => {
                self.check_input(w)?;
                w.clone()
            }
            None => initial_guess(&self.params, self.grid())?,
        };
        let mut f = self.project(start.into_values(), true)?;
        let mut ev = self.evaluate(&f)?;
        let mut theta = cfg.theta;
        let mut streak = 0usize;
        let mut j_monotone = true;
        let mut history = vec![IterationRecord {
            iteration: 0,
            j: ev.j2.sqrt(),
            residual: ev.residual,
            theta,
        }];
        let mut iterations = 0;
        while ev.residual > cfg.tol && iterations < cfg.max_iter {
            iterations += 1;
            let rearrange = iterations % cfg.rearrange_every == 0;
            let next = self.step(&f, &ev, theta, cfg.scheme, rearrange)?;
            let next_ev = self.evaluate(&next)?;
            if next_ev.j2 < ev.j2 {
                j_monotone = false;
            }
            // a rising residual while J also rises is an escape from a
            // saddle, not divergence
            if next_ev.residual > ev.residual && next_ev.j2 <= ev.j2 {
                theta = (0.5 * theta).max(cfg.theta_min);
                streak = 0;
            } else {
                streak += 1;
                if streak >= 5 && theta < cfg.theta {
                    theta = (2.0 * theta).min(cfg.theta);
                    streak = 0;
                }
            }
            f = next;
            ev = next_ev;
            history.push(IterationRecord {
                iteration: iterations,
                j: ev.j2.sqrt(),
                residual: ev.residual,
                theta,
            });
        }
        let grid = self.grid().clone();
        let dx = grid.dx();
        let o = grid.origin();
        let n = grid.n();
        let peak = f[o];
        let tail_ratio = f[n - 1] / peak;
        let half_ratio = f[o + n / 4] / peak;
        let constraint_error = (gauge_norm_slice(&f, dx, &self.params)? - 1.0).abs();
        Ok(MaximizerResult {
            alpha: self.params.alpha(),
            j: ev.j2.sqrt(),
            pairing: ev.pairing,
            residual: ev.residual,
            iterations,
            converged: ev.residual <= cfg.tol,
            peak_ratio: peak / self.params.alpha(),
            constraint_error,
            tail_ratio,
            half_ratio,
            resolved: tail_ratio < 1e-6 && half_ratio <= 1e-8,
            j_monotone,
            history,
            f: GridFunction::from_raw(grid, f),
        })
    }
}

fn residual_raw(f: &[f64], kf: &[f64], j2: f64, pairing: f64, dx: f64, p: &OrliczParams) -> Result<f64> {
    if pairing == 0.0 {
        return Err(Error::Degenerate("pairing vanishes".into()));
    }
    let ratio = j2 / pairing;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&v, &k) in f.iter().zip(kf) {
        let d = k - ratio * psi_prime(v, p);
        num += d * d;
        den += k * k;
    }
    if den == 0.0 {
        return Err(Error::Degenerate("K*f vanishes".into()));
    }
    Ok((num * dx).sqrt() / (den * dx).sqrt())
}

/// `‖K*f − (J²/⟨f,Ψ'(f)⟩) Ψ'(f)‖ / ‖K*f‖`.
pub fn el_residual(f: &GridFunction, p: &OrliczParams) -> Result<f64> {
    Maximizer::new(*p, f.grid())?.el_residual(f)
}

/// One damped step of `f ← (Ψ')⁻¹(λ K*f)`.
pub fn el_step(f: &GridFunction, p: &OrliczParams, theta: f64) -> Result<GridFunction> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter("theta must lie in (0, 1]".into()));
    }
    Maximizer::new(*p, f.grid())?.el_step(f, theta)
}

pub fn solve_max(
    p: &OrliczParams,
    grid: &Arc<Grid>,
    cfg: &SolverConfig,
    warm: Option<&GridFunction>,
) -> Result<MaximizerResult> {
    Maximizer::new(*p, grid)?.solve(cfg, warm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::kernel::quad_form;
    use crate::orlicz::gauge_norm;
    use crate::rearrange::is_rearranged;
    use approx::assert_relative_eq;

    #[test]
    fn bump_normalization() {
        let c = bump_constant();
        assert!((c - 3.446_397_908_387_906).abs() < 1e-10);
        let (q2, q3) = bump_norms();
        assert_relative_eq!(q2 - q3 / 3.0, 1.0, max_relative = 1e-13);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
    }

    #[test]
    fn initial_guess_alpha_one() {
        let g = make_grid(6, 4096).unwrap();
        let p = OrliczParams::new(1.0).unwrap();
        let f = initial_guess(&p, &g).unwrap();
        assert!((gauge_norm(&f, &p).unwrap() - 1.0).abs() < 1e-10);
        for (&x, &v) in g.nodes().iter().zip(f.values()) {
            if x.abs() >= 1.0 {
                assert_eq!(v, 0.0);
            }
        }
        assert!(quad_form(&f).unwrap() * p.alpha() > 1.0);
    }

    #[test]
    fn initial_guess_rejects_tight_domain() {
        let g = make_grid(2, 256).unwrap();
        let p = OrliczParams::new(0.1).unwrap();
        assert!(matches!(initial_guess(&p, &g), Err(Error::SupportTooWide(_))));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            theta: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            max_iter: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn small_grid_solve() {
        let g = make_grid(4, 1024).unwrap();
        let p = OrliczParams::new(3.0).unwrap();
        let r = solve_max(&p, &g, &SolverConfig::default(), None).unwrap();
        assert!(r.converged, "residual {}", r.residual);
        assert!(r.constraint_error < 1e-10);
        assert!(is_rearranged(&r.f));
        assert!(r.alpha_j2() > 1.0 && r.alpha_j2() < 1.5);
        assert!(r.pairing > 1.0 && r.pairing < 2.0);
        assert!(r.peak_ratio < 1.0);
        let step = el_step(&r.f, &p, 1.0).unwrap();
        assert!(step.l2_distance(&r.f).unwrap() <= 10.0 * 1e-10 * r.f.l2_norm().max(1.0));
    }
}
