//! Seeded random profiles for property checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Grid, GridFunction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_mix(rng: &mut impl Rng, grid: &Arc<Grid>, centered: bool, signed: bool) -> GridFunction {
    let l = grid.half_length();
    let k = rng.random_range(1..=4);
    let bumps: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            let mut amp = rng.random_range(0.2..2.0);
            if signed && rng.random_bool(0.5) {
                amp = -amp;
            }
            let center = if centered {
                0.0
            } else {
                rng.random_range(-0.25 * l..0.25 * l)
            };
            let width = rng.random_range(0.3..3.0f64).min(0.1 * l);
            (amp, center, width)
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp())
            .sum()
    })
    .expect("finite samples")
}

/// Smooth nonnegative profile: a few off-center Gaussians.
pub fn nonnegative(rng: &mut impl Rng, grid: &Arc<Grid>) -> GridFunction {
    gaussian_mix(rng, grid, false, false)
}

/// Smooth signed profile.
pub fn signed(rng: &mut impl Rng, grid: &Arc<Grid>) -> GridFunction {
    gaussian_mix(rng, grid, false, true)
}

/// Even, positive, non-increasing on the half-line: centered Gaussians.
pub fn bell(rng: &mut impl Rng, grid: &Arc<Grid>) -> GridFunction {
    gaussian_mix(rng, grid, true, false)
}

/// Rough nonnegative samples, i.i.d. uniform on a random support.
pub fn rough(rng: &mut impl Rng, grid: &Arc<Grid>) -> GridFunction {
    let l = grid.half_length();
    let half = rng.random_range(0.05 * l..0.5 * l);
    let values = grid
        .nodes()
        .iter()
        .map(|&x| if x.abs() <= half { rng.random_range(0.0..1.0) } else { 0.0 })
        .collect();
    GridFunction::new(grid.clone(), values).expect("finite samples")
}
