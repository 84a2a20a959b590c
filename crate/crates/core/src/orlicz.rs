//! The Young function `Ψ`, its derivative and inverse derivative, the gauge
//! norm `N_Ψ` and the pairing `⟨f, Ψ'(f)⟩`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `B / α`, the positive root of `2Ψ(y) = yΨ'(y)` in units of `α`.
pub fn height_ratio() -> f64 {
    4.0 / 3f64.sqrt() * (5.0 * PI / 18.0).cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrliczParams {
    alpha: f64,
    b: f64,
}

impl OrliczParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive and finite, got {alpha}")));
        }
        Ok(Self {
            alpha,
            b: height_ratio() * alpha,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Height bound `B = (4/√3) cos(5π/18) α`.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn psi(&self, y: f64) -> f64 {
        psi(y, self)
    }

    pub fn psi_prime(&self, y: f64) -> f64 {
        psi_prime(y, self)
    }

    pub fn psi_prime_inv(&self, g: f64) -> f64 {
        psi_prime_inv(g, self)
    }

    /// `N(y) = 2αy - Ψ'(y)`, the part of `Ψ'` beyond its linearization at 0.
    pub fn nonlinearity(&self, y: f64) -> f64 {
        let a = self.alpha;
        let s = y.abs();
        let v = if s < a {
            s * s
        } else {
            let d = s - a;
            2.0 * a * s - a * a - 3.0 * d * d
        };
        if y < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// `Ψ(|y|)`.
pub fn psi(y: f64, p: &OrliczParams) -> f64 {
    let a = p.alpha;
    let y = y.abs();
    if y < a {
        y * y * (a - y / 3.0)
    } else {
        let d = y - a;
        2.0 / 3.0 * a * a * a + a * a * d + d * d * d
    }
}

/// `Ψ'(y)`, extended as an odd function.
pub fn psi_prime(y: f64, p: &OrliczParams) -> f64 {
    let a = p.alpha;
    let s = y.abs();
    let v = if s < a {
        s * (2.0 * a - s)
    } else {
        let d = s - a;
        a * a + 3.0 * d * d
    };
    v.copysign(y)
}

/// Inverse of `Ψ'` on `[0, ∞)`, extended as an odd function.
pub fn psi_prime_inv(g: f64, p: &OrliczParams) -> f64 {
    let a = p.alpha;
    let s = g.abs();
    let a2 = a * a;
    let v = if s <= a2 {
        // α - √(α² - g) without cancellation
        s / (a + (a2 - s).sqrt())
    } else {
        a + ((s - a2) / 3.0).sqrt()
    };
    v.copysign(g)
}

/// `∫ Ψ(|f|/λ)` on raw samples.
fn modular(values: &[f64], dx: f64, lambda: f64, p: &OrliczParams) -> f64 {
    let inv = 1.0 / lambda;
    dx * values.iter().map(|&v| psi(v * inv, p)).sum::<f64>()
}

/// `∫ Ψ(|f|)`.
pub fn modular_integral(f: &GridFunction, p: &OrliczParams) -> f64 {
    modular(f.values(), f.grid().dx(), 1.0, p)
}

/// Gauge norm on raw samples with spacing `dx`.
pub fn gauge_norm_slice(values: &[f64], dx: f64, p: &OrliczParams) -> Result<f64> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let a = p.alpha;
    let l2 = (dx * values.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let l3 = (dx * values.iter().map(|v| v.abs().powi(3)).sum::<f64>()).cbrt();
    let excess = |lam: f64| modular(values, dx, lam, p) - 1.0;

    let mut lo = sup / (10.0 * a);
    let mut hi = 10.0 * (l2 + l3) * (1.0 + 1.0 / a);
    while excess(lo) <= 0.0 {
        lo *= 0.5;
    }
    while excess(hi) >= 0.0 {
        hi *= 2.0;
    }

    // safeguarded Newton on λ ↦ ∫Ψ(f/λ) - 1, decreasing in λ
    let mut lam = (lo * hi).sqrt();
    for _ in 0..200 {
        let inv = 1.0 / lam;
        let mut val = 0.0;
        let mut der = 0.0;
        for &v in values {
            let y = v.abs() * inv;
            val += psi(y, p);
            der += psi_prime(y, p) * y;
        }
        let fval = dx * val - 1.0;
        let dval = -dx * der * inv;
        if fval == 0.0 {
            return Ok(lam);
        }
        if fval > 0.0 {
            lo = lo.max(lam);
        } else {
            hi = hi.min(lam);
        }
        let mut next = lam - fval / dval;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - lam).abs() <= 1e-15 * lam || (hi - lo) <= 1e-15 * lam {
            return Ok(next);
        }
        lam = next;
    }
    Ok(lam)
}

/// `N_Ψ(f)`: the `λ > 0` with `∫ Ψ(|f|/λ) = 1`.
pub fn gauge_norm(f: &GridFunction, p: &OrliczParams) -> Result<f64> {
    gauge_norm_slice(f.values(), f.grid().dx(), p)
}

/// `⟨f, Ψ'(f)⟩` by quadrature.
pub fn pairing(f: &GridFunction, p: &OrliczParams) -> f64 {
    pairing_slice(f.values(), f.grid().dx(), p)
}

pub(crate) fn pairing_slice(values: &[f64], dx: f64, p: &OrliczParams) -> f64 {
    dx * values.iter().map(|&v| v * psi_prime(v, p)).sum::<f64>()
}

/// Closed form of the pairing valid when `N_Ψ(f) = 1` and `f ≥ 0`.
pub fn pairing_closed_form(f: &GridFunction, p: &OrliczParams) -> f64 {
    let a = p.alpha;
    let dx = f.grid().dx();
    let mut low = 0.0;
    let mut high = 0.0;
    for &v in f.values() {
        if v < a {
            low += v * v * v;
        } else {
            let d = v - a;
            high += a * a * (2.0 * a / 3.0 - v) + d * d * d + 3.0 * a * d * d;
        }
    }
    2.0 - dx * low / 3.0 + dx * high
}

/// Directional derivative of `N_Ψ` at a unit-norm `f0` in direction `h`.
pub fn gateaux_derivative(f0: &GridFunction, h: &GridFunction, p: &OrliczParams) -> Result<f64> {
    f0.check_same(h)?;
    let n = gauge_norm(f0, p)?;
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::ConstraintViolated(n));
    }
    let dx = f0.grid().dx();
    let num: f64 = dx * f0
        .values()
        .iter()
        .zip(h.values())
        .map(|(&f, &g)| g * psi_prime(f, p))
        .sum::<f64>();
    Ok(num / pairing(f0, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use approx::assert_relative_eq;

    #[test]
    fn psi_examples() {
        for a in [0.1, 1.0, 2.385, 10.0, 100.0] {
            let p = OrliczParams::new(a).unwrap();
            assert_eq!(psi(0.0, &p), 0.0);
            let below = a * a * a - a * a * a / 3.0;
            assert_relative_eq!(psi(a, &p), 2.0 / 3.0 * a * a * a, max_relative = 1e-15);
            assert_relative_eq!(below, 2.0 / 3.0 * a * a * a, max_relative = 1e-15);
            assert_relative_eq!(psi(a / 2.0, &p), 5.0 / 24.0 * a * a * a, max_relative = 1e-14);
            assert_eq!(psi_prime(0.0, &p), 0.0);
            assert_relative_eq!(psi_prime(a, &p), a * a, max_relative = 1e-15);
            assert_relative_eq!(psi_prime(a + 1.0, &p), a * a + 3.0, max_relative = 1e-14);
            assert_eq!(psi_prime_inv(0.0, &p), 0.0);
            assert_relative_eq!(psi_prime_inv(a * a, &p), a, max_relative = 1e-15);
            assert_relative_eq!(psi_prime_inv(0.75 * a * a, &p), a / 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn b_ratio_and_root() {
        assert!((height_ratio() - 1.484_454_4).abs() < 1e-6);
        let p = OrliczParams::new(7.0).unwrap();
        let b = p.b();
        assert!((2.0 * psi(b, &p) - b * psi_prime(b, &p)).abs() < 1e-10 * 343.0);
    }

    #[test]
    fn odd_and_even_extensions() {
        let p = OrliczParams::new(2.0).unwrap();
        assert_eq!(psi(-1.5, &p), psi(1.5, &p));
        assert_eq!(psi_prime(-3.0, &p), -psi_prime(3.0, &p));
        assert_eq!(psi_prime_inv(-5.0, &p), -psi_prime_inv(5.0, &p));
        assert_eq!(p.nonlinearity(-1.0), -p.nonlinearity(1.0));
        for y in [0.3, 1.9, 2.0, 2.7, 9.0] {
            assert_relative_eq!(2.0 * 2.0 * y - p.nonlinearity(y), psi_prime(y, &p), max_relative = 1e-14);
        }
    }

    #[test]
    fn gauge_norm_indicator() {
        // y χ on |x| ≤ 1/(2Ψ(y)) has unit gauge norm; choose y so the
        // half-width is a whole number of cells
        let g = make_grid(3, 1024).unwrap();
        let p = OrliczParams::new(1.0).unwrap();
        let half = 2.0;
        let target = 1.0 / (2.0 * half);
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if psi(mid, &p) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = 0.5 * (lo + hi);
        // 2·half/dx cells carrying exact measure 2·half
        let dx = g.dx();
        let f = GridFunction::from_fn(&g, |x| if x >= -half && x < half { y } else { 0.0 }).unwrap();
        let count = f.values().iter().filter(|&&v| v > 0.0).count() as f64;
        assert_eq!(count * dx, 2.0 * half);
        assert_relative_eq!(gauge_norm(&f, &p).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn gauge_norm_errors_and_homogeneity() {
        let g = make_grid(2, 64).unwrap();
        let p = OrliczParams::new(3.0).unwrap();
        assert_eq!(gauge_norm(&GridFunction::zeros(&g), &p).unwrap_err(), Error::ZeroFunction);
        let f = GridFunction::from_fn(&g, |x| (-x * x).exp() + 0.1 * x.cos()).unwrap();
        let n1 = gauge_norm(&f, &p).unwrap();
        let n2 = gauge_norm(&f.scale(2.0), &p).unwrap();
        assert_relative_eq!(n2, 2.0 * n1, max_relative = 1e-13);
        let unit = f.scale(1.0 / n1);
        assert_relative_eq!(modular_integral(&unit, &p), 1.0, max_relative = 1e-13);
        assert!(OrliczParams::new(0.0).is_err());
        assert!(OrliczParams::new(f64::NAN).is_err());
    }

    #[test]
    fn pairing_closed_form_agrees() {
        let g = make_grid(3, 512).unwrap();
        for a in [0.4, 1.0, 5.0] {
            let p = OrliczParams::new(a).unwrap();
            let f = GridFunction::from_fn(&g, |x| (-x * x / 2.0).exp()).unwrap();
            let f = f.scale(1.0 / gauge_norm(&f, &p).unwrap());
            assert_relative_eq!(pairing(&f, &p), pairing_closed_form(&f, &p), max_relative = 1e-12);
        }
        assert_eq!(pairing(&GridFunction::zeros(&g), &OrliczParams::new(1.0).unwrap()), 0.0);
    }

    #[test]
    fn gateaux_basic() {
        let g = make_grid(2, 128).unwrap();
        let p = OrliczParams::new(2.0).unwrap();
        let f = GridFunction::from_fn(&g, |x| 1.0 / (1.0 + x * x)).unwrap();
        let f0 = f.scale(1.0 / gauge_norm(&f, &p).unwrap());
        assert_relative_eq!(gateaux_derivative(&f0, &f0, &p).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(gateaux_derivative(&f0, &GridFunction::zeros(&g), &p).unwrap(), 0.0);
        assert!(matches!(
            gateaux_derivative(&f0.scale(2.0), &f0, &p),
            Err(Error::ConstraintViolated(_))
        ));
        let h = GridFunction::from_fn(&g, |x| (x / 2.0).sin() * (-x * x / 8.0).exp()).unwrap();
        let eps = 1e-6;
        let plus = gauge_norm(&f0.zip_with(&h, |a, b| a + eps * b).unwrap(), &p).unwrap();
        let minus = gauge_norm(&f0.zip_with(&h, |a, b| a - eps * b).unwrap(), &p).unwrap();
        let fd = (plus - minus) / (2.0 * eps);
        assert!((fd - gateaux_derivative(&f0, &h, &p).unwrap()).abs() < 1e-5);
    }
}
