//! Uniform periodic grid on [-L, L), rectangle-rule quadrature and the
//! discrete Fourier transform in symmetric frequency order.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

/// Default domain exponent (L = 64).
pub const DEFAULT_L: u32 = 6;
/// Default number of grid points.
pub const DEFAULT_N: usize = 4096;

pub struct Grid {
    l: u32,
    n: usize,
    half_length: f64,
    dx: f64,
    nodes: Vec<f64>,
    freqs: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("l", &self.l)
            .field("n", &self.n)
            .field("half_length", &self.half_length)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.l == other.l && self.n == other.n
    }
}

/// Build a grid with half-length `2^l` and `n` points.
pub fn make_grid(l: u32, n: usize) -> Result<Arc<Grid>> {
    Grid::new(l, n).map(Arc::new)
}

impl Grid {
    pub fn new(l: u32, n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if n < MIN_POINTS {
            return Err(Error::GridTooSmall(n));
        }
        if l > 30 {
            return Err(Error::InvalidParameter(format!("domain exponent {l} is too large")));
        }
        let half_length = (1u64 << l) as f64;
        let dx = 2.0 * half_length / n as f64;
        let nodes = (0..n).map(|j| -half_length + j as f64 * dx).collect();
        let h = n as i64 / 2;
        let freqs = (-h..h)
            .map(|k| std::f64::consts::PI * k as f64 / half_length)
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            l,
            n,
            half_length,
            dx,
            nodes,
            freqs,
            forward,
            inverse,
        })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-length L = 2^l.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Frequencies in symmetric order, k = -n/2 .. n/2-1.
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    /// Index of the node at x = 0.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    /// Frequency of FFT bin `i` (natural FFT order).
    pub(crate) fn fft_freq(&self, i: usize) -> f64 {
        let k = if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        };
        std::f64::consts::PI * k as f64 / self.half_length
    }

    /// Unnormalized forward FFT in place (natural order).
    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Unnormalized inverse FFT in place (natural order).
    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }

    pub(crate) fn to_complex(values: &[f64]) -> Vec<Complex64> {
        values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    /// Apply a real even multiplier `m` (natural FFT order) to real data.
    pub(crate) fn apply_multiplier(&self, values: &[f64], m: &[f64]) -> Vec<f64> {
        let mut buf = Self::to_complex(values);
        self.fft_forward(&mut buf);
        for (c, &w) in buf.iter_mut().zip(m) {
            *c *= w;
        }
        self.fft_inverse(&mut buf);
        let s = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * s).collect()
    }

    /// Sum `(1/2L) Σ_k w_k |f̂_k|²` in natural FFT order.
    pub(crate) fn spectral_energy(&self, values: &[f64], m: Option<&[f64]>) -> f64 {
        let mut buf = Self::to_complex(values);
        self.fft_forward(&mut buf);
        let scale = self.dx * self.dx / (2.0 * self.half_length);
        let sum: f64 = match m {
            Some(m) => buf.iter().zip(m).map(|(c, &w)| w * c.norm_sqr()).sum(),
            None => buf.iter().map(|c| c.norm_sqr()).sum(),
        };
        scale * sum
    }
}

/// Real samples bound to a grid.
#[derive(Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("grid", &self.grid)
            .field("values", &self.values.len())
            .finish()
    }
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    /// Skips validation. Callers guarantee length and finiteness.
    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid, values }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::from_raw(grid.clone(), vec![0.0; grid.n()])
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Self::from_raw(grid.clone(), vec![c; grid.n()])
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the origin node.
    pub fn at_origin(&self) -> f64 {
        self.values[self.grid.origin()]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_raw(self.grid.clone(), values))
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete L^p norm, (dx Σ |f|^p)^{1/p}.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (self.grid.dx() * s).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        inner_product_raw(&self.values, &self.values, self.grid.dx()).sqrt()
    }

    /// Relative L2 distance to `other`.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.zip_with(other, |a, b| a - b)?.l2_norm())
    }
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid && self.values == other.values
    }
}

pub(crate) fn inner_product_raw(a: &[f64], b: &[f64], dx: f64) -> f64 {
    dx * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// Rectangle rule `dx Σ f_j`.
pub fn quadrature(f: &GridFunction) -> f64 {
    f.grid.dx() * f.values.iter().sum::<f64>()
}

/// `dx Σ f_j g_j`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.check_same(g)?;
    Ok(inner_product_raw(&f.values, &g.values, f.grid.dx()))
}

/// Fourier coefficients `f̂_k = dx Σ_j f_j e^{-i ξ_k x_j}`, k = -n/2..n/2-1.
pub fn dft(f: &GridFunction) -> Vec<Complex64> {
    let g = &f.grid;
    let n = g.n();
    let mut buf = Grid::to_complex(&f.values);
    g.fft_forward(&mut buf);
    let h = n / 2;
    (0..n)
        .map(|i| {
            // output index i corresponds to k = i - n/2
            let k = i as i64 - h as i64;
            let src = k.rem_euclid(n as i64) as usize;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            buf[src] * (sign * g.dx())
        })
        .collect()
}

/// Inverse of [`dft`]: `f_j = (1/2L) Σ_k f̂_k e^{i ξ_k x_j}`; returns the real part.
pub fn idft(grid: &Arc<Grid>, coeffs: &[Complex64]) -> Result<GridFunction> {
    let n = grid.n();
    if coeffs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: coeffs.len(),
        });
    }
    let h = n / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in coeffs.iter().enumerate() {
        let k = i as i64 - h as i64;
        let dst = k.rem_euclid(n as i64) as usize;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        buf[dst] = c * sign;
    }
    grid.fft_inverse(&mut buf);
    let s = 1.0 / (2.0 * grid.half_length());
    GridFunction::new(grid.clone(), buf.iter().map(|c| c.re * s).collect())
}

/// Frequency-side energy `(1/2L) Σ |f̂_k|²`, equal to `⟨f, f⟩` by Parseval.
pub fn spectral_norm_sq(f: &GridFunction) -> f64 {
    f.grid.spectral_energy(&f.values, None)
}
