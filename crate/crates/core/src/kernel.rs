//! Fourier multipliers `m_a(ξ) = (tanh ξ / ξ)^a`, spectral convolution, the
//! quadratic form `J²`, and pointwise real-space evaluation of the kernel `K_a`.
//!
//! Real-space values are computed two ways. Near the origin the symbol is split
//! as `|ξ|^{-a}` plus a remainder that decays exponentially; the homogeneous part
//! has a closed-form transform `c_a |x|^{a-1}` and the remainder is a cosine
//! integral. Away from the origin the inverse transform is deformed onto the
//! imaginary axis, where the poles of `tanh` turn it into a sum of positive
//! Laplace integrals.

use std::f64::consts::PI;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{inner_product_raw, Grid, GridFunction};
use crate::special::{integrate_breaks, zeta};

/// Exponent of the Whitham kernel.
pub const WHITHAM_EXPONENT: f64 = 0.5;

const SERIES_CUTOFF: f64 = 1e-4;

/// `((tanh|ξ|)/|ξ|)^a`, equal to 1 at the origin.
pub fn symbol(xi: f64, a: f64) -> f64 {
    let x = xi.abs();
    if x == 0.0 {
        return 1.0;
    }
    if x < SERIES_CUTOFF {
        let x2 = x * x;
        return (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0).powf(a);
    }
    (a * (x.tanh().ln() - x.ln())).exp()
}

fn check_exponent(a: f64, allow_one: bool) -> Result<()> {
    let ok = a > 0.0 && (a < 1.0 || (allow_one && a == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("kernel exponent {a} outside the admissible range")))
    }
}

/// Symbol values on the frequency set of a grid.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    a: f64,
    grid: Arc<Grid>,
    values: Vec<f64>,
    natural: Vec<f64>,
}

impl SymbolTable {
    pub fn new(grid: &Arc<Grid>, a: f64) -> Result<Self> {
        check_exponent(a, true)?;
        let values = grid.freqs().iter().map(|&xi| symbol(xi, a)).collect();
        let natural = (0..grid.n()).map(|i| symbol(grid.fft_freq(i), a)).collect();
        Ok(Self {
            a,
            grid: grid.clone(),
            values,
            natural,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.a
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Values in symmetric frequency order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values in natural FFT order.
    pub(crate) fn natural(&self) -> &[f64] {
        &self.natural
    }

    pub fn convolve(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check(f)?;
        let out = self.grid.apply_multiplier(f.values(), &self.natural);
        Ok(GridFunction::from_raw(self.grid.clone(), out))
    }

    /// `(1/2L) Σ m(ξ_k) |f̂_k|²`.
    pub fn quad_form(&self, f: &GridFunction) -> Result<f64> {
        self.check(f)?;
        Ok(self.grid.spectral_energy(f.values(), Some(&self.natural)))
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if **f.grid() == *self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// `K_a * f` by multiplication with the symbol table.
pub fn convolve(f: &GridFunction, a: f64) -> Result<GridFunction> {
    SymbolTable::new(f.grid(), a)?.convolve(f)
}

/// `J(f)² = ⟨f, K * f⟩` with the Whitham kernel.
pub fn quad_form(f: &GridFunction) -> Result<f64> {
    SymbolTable::new(f.grid(), WHITHAM_EXPONENT)?.quad_form(f)
}

/// Pointwise evaluation of `K_a(x)` for `a` in (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct KernelEvaluator {
    a: f64,
    c_a: f64,
    tol: f64,
}

impl KernelEvaluator {
    pub fn new(a: f64) -> Result<Self> {
        check_exponent(a, false)?;
        Ok(Self {
            a,
            c_a: homogeneous_coefficient(a),
            tol: 1e-15,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.a
    }

    /// Coefficient of the singular part `c_a |x|^{a-1}`.
    pub fn c_a(&self) -> f64 {
        self.c_a
    }

    /// `K_a(x)`; infinite at the origin.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if x == 0.0 {
            f64::INFINITY
        } else if x < 1.0 {
            self.c_a * x.powf(self.a - 1.0) + self.remainder(x)
        } else {
            self.laplace(x)
        }
    }

    /// Smooth part `K_a(x) - c_a |x|^{a-1}`, finite at the origin.
    pub fn remainder(&self, x: f64) -> f64 {
        let a = self.a;
        let p = 1.0 / (1.0 - a);
        // ξ = t^p removes the ξ^{-a} singularity; the integrand becomes
        // p ((tanh ξ)^a - 1) cos(x ξ)
        let g = |t: f64| {
            let xi = t.powf(p);
            if xi == 0.0 {
                return -p;
            }
            let lt = (-2.0 / ((2.0 * xi).exp() + 1.0)).ln_1p();
            p * (a * lt).exp_m1() * (x * xi).cos()
        };
        let mut breaks = vec![0.0, 0.125, 0.25, 0.5, 1.0, 1.5];
        breaks.extend((2..=26).map(|k| k as f64));
        let tb: Vec<f64> = breaks.iter().map(|&xi: &f64| xi.powf(1.0 - a)).collect();
        integrate_breaks(g, &tb, self.tol) / PI
    }

    /// Laplace-sum representation, accurate for `x` away from the origin.
    pub fn laplace(&self, x: f64) -> f64 {
        let a = self.a;
        let x = x.abs();
        let q = 1.0 / (1.0 - a);
        let mut total = 0.0;
        for k in 1..10_000 {
            let t0 = (k as f64 - 0.5) * PI;
            let scale = (-x * t0).exp();
            if scale == 0.0 || (total > 0.0 && scale < 1e-18 * total) {
                break;
            }
            // t = t0 + u, |tan t| = 1 / tan u; u = v^q absorbs the u^{-a}
            // endpoint singularity
            let g = |v: f64| {
                let u = v.powf(q);
                let t = t0 + u;
                let ratio = if u == 0.0 { 1.0 } else { u / u.tan() };
                q * (ratio / t).powf(a) * (-x * u).exp()
            };
            let cut = (4.0 / x).min(0.5 * PI);
            let mut breaks = vec![0.0, 0.25 * cut, cut];
            if cut < 0.5 * PI {
                breaks.push(0.5 * PI);
            }
            let breaks: Vec<f64> = breaks.iter().map(|&u: &f64| u.powf(1.0 - a)).collect();
            total += scale * integrate_breaks(g, &breaks, self.tol);
        }
        (PI * a).sin() / PI * total
    }

    /// `‖K_a‖_{L^p}` for `p (1 - a) < 1`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p * (1.0 - self.a) < 1.0) {
            return Err(Error::InvalidParameter(format!("K_{} is not in L^{p}", self.a)));
        }
        let mut breaks = vec![0.0, 1.0 / 64.0, 0.125, 0.5, 1.0];
        breaks.extend((2..=40).map(|k| k as f64));
        let pieces = exec::map_slice(&breaks.windows(2).collect::<Vec<_>>(), |w| {
            quadrature::double_exponential::integrate(|x| self.eval(x).powf(p), w[0], w[1], 1e-14).integral
        });
        Ok((2.0 * pieces.iter().sum::<f64>()).powf(1.0 / p))
    }
}

/// `c_a = Γ(1-a) sin(πa/2) / π`, the inverse transform coefficient of `|ξ|^{-a}`.
pub fn homogeneous_coefficient(a: f64) -> f64 {
    gamma(1.0 - a) * (0.5 * PI * a).sin() / PI
}

/// Real-space samples of `K_a` on grid nodes. The origin is singular and its
/// slot holds 0; [`KernelTable::mass`] accounts for that cell in closed form.
#[derive(Debug, Clone)]
pub struct KernelTable {
    a: f64,
    grid: Arc<Grid>,
    values: Vec<f64>,
    c_a: f64,
    remainder_at_origin: f64,
}

/// Tabulate `K_a` on the nodes of `grid`.
pub fn kernel_table(grid: &Arc<Grid>, a: f64) -> Result<KernelTable> {
    let ev = KernelEvaluator::new(a)?;
    let n = grid.n();
    let o = grid.origin();
    let dx = grid.dx();
    // distinct |x| = j dx for j = 1..=n/2
    let half = exec::map_range(n / 2, |j| ev.eval((j + 1) as f64 * dx));
    let mut values = vec![0.0; n];
    for (j, &v) in half.iter().enumerate() {
        let s = j + 1;
        values[(o + s) % n] = v;
        values[o - s] = v;
    }
    Ok(KernelTable {
        a,
        grid: grid.clone(),
        values,
        c_a: ev.c_a(),
        remainder_at_origin: ev.remainder(0.0),
    })
}

impl KernelTable {
    pub fn exponent(&self) -> f64 {
        self.a
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Samples on grid nodes; the origin slot is 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn singular_index(&self) -> usize {
        self.grid.origin()
    }

    pub fn c_a(&self) -> f64 {
        self.c_a
    }

    pub fn remainder_at_origin(&self) -> f64 {
        self.remainder_at_origin
    }

    /// Rectangle-rule integral of the table with a closed-form correction for
    /// the singular cell: the lattice sum of `c|x|^{a-1}` over nonzero nodes
    /// differs from its integral by `2 c dx^a ζ(1-a)`.
    pub fn mass(&self) -> f64 {
        let dx = self.grid.dx();
        let sum: f64 = self.values.iter().sum();
        dx * sum + dx * self.remainder_at_origin - 2.0 * self.c_a * dx.powf(self.a) * zeta(1.0 - self.a)
    }

    /// Both sides of the Slobodeckij identity
    /// `∬|f(x+h)-f(x)|² K(h) dx dh = 2(‖f‖² - ⟨f, K*f⟩)`.
    pub fn slobodeckij_gap(&self, f: &GridFunction) -> Result<(f64, f64)> {
        if **f.grid() != *self.grid {
            return Err(Error::GridMismatch);
        }
        if self.a != WHITHAM_EXPONENT {
            return Err(Error::InvalidParameter("Slobodeckij identity uses the a = 1/2 table".into()));
        }
        let n = self.grid.n();
        let dx = self.grid.dx();
        let o = self.grid.origin();
        let v = f.values();
        let per_shift = exec::map_range(n - 1, |i| {
            let s = i + 1;
            let mut acc = 0.0;
            for j in 0..n {
                let d = v[(j + s) % n] - v[j];
                acc += d * d;
            }
            self.values[(o + s) % n] * acc
        });
        let lhs = dx * dx * per_shift.iter().sum::<f64>();
        let symbols = SymbolTable::new(&self.grid, WHITHAM_EXPONENT)?;
        let rhs = 2.0 * (inner_product_raw(v, v, dx) - symbols.quad_form(f)?);
        Ok((lhs, rhs))
    }
}

/// Both sides of the Slobodeckij identity, building the `a = 1/2` table.
pub fn slobodeckij_gap(f: &GridFunction) -> Result<(f64, f64)> {
    kernel_table(f.grid(), WHITHAM_EXPONENT)?.slobodeckij_gap(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_product, make_grid, quadrature};
    use approx::assert_relative_eq;

    #[test]
    fn symbol_examples() {
        assert_eq!(symbol(0.0, 0.5), 1.0);
        assert_relative_eq!(symbol(1.0, 0.5), 1f64.tanh().sqrt(), max_relative = 1e-15);
        assert!((symbol(1.0, 0.5) - 0.872_694).abs() < 1e-6);
        assert!((symbol(100.0, 0.5) - 0.1).abs() < 1e-10);
        assert_eq!(symbol(-2.5, 0.25), symbol(2.5, 0.25));
        // series branch joins the direct formula
        let below = symbol(0.999_999e-4, 0.5);
        let above = symbol(1.000_001e-4, 0.5);
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn symbol_table_is_monotone() {
        let g = make_grid(6, 4096).unwrap();
        for a in [0.25, 0.5] {
            let t = SymbolTable::new(&g, a).unwrap();
            let o = g.origin();
            assert_eq!(t.values()[o], 1.0);
            for k in 1..o {
                assert!(t.values()[o + k] < t.values()[o + k - 1]);
                assert_eq!(t.values()[o + k], t.values()[o - k]);
            }
            assert!(t.values().iter().all(|&v| v > 0.0 && v <= 1.0));
        }
    }

    #[test]
    fn convolve_examples() {
        let g = make_grid(2, 64).unwrap();
        let c = convolve(&GridFunction::constant(&g, 2.5), 0.5).unwrap();
        assert!(c.values().iter().all(|v| (v - 2.5).abs() < 1e-14));
        let z = convolve(&GridFunction::zeros(&g), 0.5).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let xi = g.freqs()[g.origin() + 2];
        let f = GridFunction::from_fn(&g, |x| (xi * x).cos()).unwrap();
        let kf = convolve(&f, 0.5).unwrap();
        let m = symbol(xi, 0.5);
        for (a, b) in kf.values().iter().zip(f.values()) {
            assert!((a - m * b).abs() < 1e-14);
        }
        let q = quad_form(&f).unwrap();
        assert_relative_eq!(q, m * inner_product(&f, &f).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn quad_form_matches_inner_product() {
        let g = make_grid(4, 512).unwrap();
        let f = GridFunction::from_fn(&g, |x| (-(x * x) / 3.0).exp() * (1.0 + 0.3 * (2.0 * x).sin())).unwrap();
        let q = quad_form(&f).unwrap();
        let ip = inner_product(&f, &convolve(&f, 0.5).unwrap()).unwrap();
        assert_relative_eq!(q, ip, max_relative = 1e-12);
        assert!(q <= inner_product(&f, &f).unwrap());
        assert_eq!(quad_form(&GridFunction::zeros(&g)).unwrap(), 0.0);
    }

    #[test]
    fn coefficient_half() {
        assert_relative_eq!(homogeneous_coefficient(0.5), 1.0 / (2.0 * PI).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn pointwise_reference_values() {
        let ev = KernelEvaluator::new(0.5).unwrap();
        let refs = [
            (0.3, 0.380_633_271_479_657),
            (0.5, 0.221_718_936_663_8),
            (1.0, 0.077_607_334_915_3),
            (2.0, 0.012_513_012_176_8),
            (4.0, 4.028_098_580_1e-4),
            (8.0, 5.438_262_40e-7),
        ];
        for (x, k) in refs {
            assert_relative_eq!(ev.eval(x), k, max_relative = 1e-9);
        }
    }

    #[test]
    fn routes_agree_near_one() {
        for a in [0.25, 0.5] {
            let ev = KernelEvaluator::new(a).unwrap();
            for x in [0.6f64, 0.9, 1.0, 1.3] {
                let near = ev.c_a() * x.powf(a - 1.0) + ev.remainder(x);
                assert_relative_eq!(near, ev.laplace(x), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(KernelEvaluator::new(1.0).is_err());
        assert!(kernel_table(&make_grid(0, 16).unwrap(), 0.0).is_err());
        assert!(SymbolTable::new(&make_grid(0, 16).unwrap(), 1.0).is_ok());
    }

    #[test]
    fn slobodeckij_trivial_cases() {
        let g = make_grid(2, 64).unwrap();
        let t = kernel_table(&g, 0.5).unwrap();
        let (l, r) = t.slobodeckij_gap(&GridFunction::zeros(&g)).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let (l, r) = t.slobodeckij_gap(&GridFunction::constant(&g, 1.7)).unwrap();
        assert_eq!(l, 0.0);
        assert!(r.abs() < 1e-13);
    }

    #[test]
    fn small_table_mass() {
        let g = make_grid(4, 1024).unwrap();
        let t = kernel_table(&g, 0.5).unwrap();
        assert!((t.mass() - 1.0).abs() < 1e-6);
        let f = GridFunction::constant(&g, 1.0);
        assert!(quadrature(&f) > 0.0);
    }
}
