//! Solitary waves of `−μφ + K*φ + φ² = 0` obtained by rescaling maximizers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{quadrature, GridFunction};
use crate::kernel::{SymbolTable, WHITHAM_EXPONENT};
use crate::maximize::MaximizerResult;
use crate::orlicz::OrliczParams;

/// Relative clamp on the discriminant `μ² − 4K*φ`.
pub const DISCRIMINANT_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveDiagnostics {
    pub steady_residual: f64,
    pub steady_residual_l2: f64,
    pub branch_residual: f64,
    pub mass_identity_gap: f64,
    pub sup_phi: f64,
    pub mu_over_2: f64,
    /// `μ/2 − φ(0)`.
    pub crest_gap: f64,
    /// Discriminant at the crest is within the clamp.
    pub possible_extreme_wave: bool,
    /// `α ‖φ‖∞ / ‖f‖∞`, equal to `μ/2`.
    pub scaling_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SolitaryWave {
    pub phi: GridFunction,
    pub mu: f64,
    pub alpha: f64,
    pub diagnostics: WaveDiagnostics,
}

/// `φ = J² f / (2 − ⅓∫f³)`, `μ = 2αJ² / (2 − ⅓∫f³)`.
pub fn to_wave(r: &MaximizerResult, p: &OrliczParams) -> Result<SolitaryWave> {
    if !r.converged {
        return Err(Error::Degenerate(format!(
            "maximizer did not converge (residual {:.3e})",
            r.residual
        )));
    }
    if r.peak_ratio > 1.0 {
        return Err(Error::NonPhysicalMaximizer(r.peak_ratio));
    }
    let j2 = r.j * r.j;
    let denom = 2.0 - r.l3_cubed() / 3.0;
    let phi = r.f.scale(j2 / denom);
    let mu = 2.0 * p.alpha() * j2 / denom;
    let scaling_ratio = p.alpha() * phi.sup_norm() / r.f.sup_norm();
    from_profile(phi, mu, p.alpha(), scaling_ratio)
}

/// Build a wave from an explicit profile and speed, computing all diagnostics.
pub fn from_profile(phi: GridFunction, mu: f64, alpha: f64, scaling_ratio: f64) -> Result<SolitaryWave> {
    let symbols = SymbolTable::new(phi.grid(), WHITHAM_EXPONENT)?;
    let kphi = symbols.convolve(&phi)?;
    let steady = steady_parts(&phi, &kphi, mu);
    let (branch, crest_disc) = branch_parts(&phi, &kphi, mu)?;
    let sup_phi = phi.sup_norm();
    let diagnostics = WaveDiagnostics {
        steady_residual: steady.0,
        steady_residual_l2: steady.1,
        branch_residual: branch,
        mass_identity_gap: mass_gap(&phi, mu),
        sup_phi,
        mu_over_2: 0.5 * mu,
        crest_gap: 0.5 * mu - phi.at_origin(),
        possible_extreme_wave: crest_disc <= DISCRIMINANT_CLAMP * mu * mu,
        scaling_ratio,
    };
    Ok(SolitaryWave {
        phi,
        mu,
        alpha,
        diagnostics,
    })
}

fn steady_parts(phi: &GridFunction, kphi: &GridFunction, mu: f64) -> (f64, f64) {
    let mut sup = 0.0f64;
    let mut sq = 0.0;
    for (&p, &k) in phi.values().iter().zip(kphi.values()) {
        let r = -mu * p + k + p * p;
        sup = sup.max(r.abs());
        sq += r * r;
    }
    let dx = phi.grid().dx();
    (sup / phi.sup_norm(), (sq * dx).sqrt() / phi.l2_norm())
}

/// Returns the relative branch residual and the discriminant at the crest.
fn branch_parts(phi: &GridFunction, kphi: &GridFunction, mu: f64) -> Result<(f64, f64)> {
    let floor = -DISCRIMINANT_CLAMP * mu * mu;
    let mut sup = 0.0f64;
    for (&p, &k) in phi.values().iter().zip(kphi.values()) {
        let mut d = mu * mu - 4.0 * k;
        if d < floor {
            return Err(Error::NegativeDiscriminant(d));
        }
        if d < 0.0 {
            d = 0.0;
        }
        // (μ − √d)/2 written as 2k/(μ + √d) to avoid cancellation
        let branch = 2.0 * k / (mu + d.sqrt());
        sup = sup.max((p - branch).abs());
    }
    let o = phi.grid().origin();
    let crest = mu * mu - 4.0 * kphi.values()[o];
    Ok((sup / phi.sup_norm(), crest))
}

fn mass_gap(phi: &GridFunction, mu: f64) -> f64 {
    let m1 = quadrature(phi);
    let m2 = phi.l2_norm().powi(2);
    ((mu - 1.0) * m1 - m2).abs() / m2
}

/// `‖−μφ + K*φ + φ²‖∞ / ‖φ‖∞`.
pub fn steady_residual(w: &SolitaryWave) -> Result<f64> {
    if w.phi.sup_norm() == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let kphi = SymbolTable::new(w.phi.grid(), WHITHAM_EXPONENT)?.convolve(&w.phi)?;
    Ok(steady_parts(&w.phi, &kphi, w.mu).0)
}

/// `‖φ − (μ − √(μ² − 4K*φ))/2‖∞ / ‖φ‖∞`.
pub fn branch_identity(w: &SolitaryWave) -> Result<f64> {
    if w.phi.sup_norm() == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let kphi = SymbolTable::new(w.phi.grid(), WHITHAM_EXPONENT)?.convolve(&w.phi)?;
    Ok(branch_parts(&w.phi, &kphi, w.mu)?.0)
}

/// `|(μ−1)∫φ − ∫φ²| / ∫φ²`.
pub fn mass_identity(w: &SolitaryWave) -> f64 {
    mass_gap(&w.phi, w.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::maximize::{solve_max, SolverConfig};

    #[test]
    fn wave_from_alpha_three() {
        let g = make_grid(4, 1024).unwrap();
        let p = OrliczParams::new(3.0).unwrap();
        let r = solve_max(&p, &g, &SolverConfig::default(), None).unwrap();
        let w = to_wave(&r, &p).unwrap();
        assert!(w.mu > 1.0 && w.mu < 2.0);
        assert!(w.diagnostics.steady_residual < 1e-8);
        assert!(w.diagnostics.branch_residual < 1e-7);
        assert!(w.diagnostics.mass_identity_gap < 1e-6);
        assert!((w.diagnostics.scaling_ratio - w.mu / 2.0).abs() < 1e-12);
        assert_eq!(steady_residual(&w).unwrap(), w.diagnostics.steady_residual);

        let doubled = from_profile(w.phi.scale(2.0), w.mu, 3.0, 0.0);
        match doubled {
            Ok(d) => assert!(d.diagnostics.mass_identity_gap > 0.1),
            Err(e) => assert!(matches!(e, Error::NegativeDiscriminant(_))),
        }
    }

    #[test]
    fn rejects_tall_maximizer() {
        let g = make_grid(4, 1024).unwrap();
        let p = OrliczParams::new(3.0).unwrap();
        let mut r = solve_max(&p, &g, &SolverConfig::default(), None).unwrap();
        r.peak_ratio = 1.2;
        assert!(matches!(to_wave(&r, &p), Err(Error::NonPhysicalMaximizer(_))));
    }
}
