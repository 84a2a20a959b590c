use std::sync::{Arc, OnceLock};

use whitham_core::grid::{make_grid, Grid, GridFunction, DEFAULT_L, DEFAULT_N};
use whitham_core::kernel::{kernel_table, quad_form, KernelEvaluator};
use whitham_core::maximize::{el_residual, el_step, initial_guess, solve_max, MaximizerResult, SolverConfig};
use whitham_core::orlicz::{gauge_norm, pairing, OrliczParams};
use whitham_core::rearrange::is_rearranged;
use whitham_core::sweep::{alpha_sweep, SweepMode};
use whitham_core::whitham::{branch_identity, from_profile, steady_residual, to_wave};
use whitham_core::Error;

fn default_grid() -> &'static Arc<Grid> {
    static G: OnceLock<Arc<Grid>> = OnceLock::new();
    G.get_or_init(|| make_grid(DEFAULT_L, DEFAULT_N).unwrap())
}

fn solved(alpha: f64) -> MaximizerResult {
    let p = OrliczParams::new(alpha).unwrap();
    solve_max(&p, default_grid(), &SolverConfig::default(), None).unwrap()
}

#[test]
fn kernel_near_origin_and_decay() {
    let ev = KernelEvaluator::new(0.5).unwrap();
    for i in 1..=200 {
        let x = 0.005 * i as f64;
        let bound = 1.0 / (2.0 * std::f64::consts::PI * x).sqrt();
        assert!(ev.eval(x) < bound, "x = {x}");
    }
    let g = default_grid();
    let t = kernel_table(g, 0.5).unwrap();
    let at = |x: f64| t.values()[g.origin() + (x / g.dx()).round() as usize];
    assert!(at(8.0) / at(4.0) < 16f64.powi(-2));
}

#[test]
fn el_residual_examples() {
    let p = OrliczParams::new(10.0).unwrap();
    let g = default_grid();
    let f0 = initial_guess(&p, g).unwrap();
    assert!(el_residual(&f0, &p).unwrap() > 1e-3);

    let r = solved(10.0);
    assert!(r.converged);
    assert!(el_residual(&r.f, &p).unwrap() <= 1e-10);

    let doubled = r.f.scale(2.0);
    let res = el_residual(&doubled, &p).unwrap();
    assert!(res.is_finite() && res >= 0.0);
    assert!((gauge_norm(&doubled, &p).unwrap() - 1.0).abs() > 1e-10);
}

#[test]
fn el_step_fixed_point() {
    let p = OrliczParams::new(10.0).unwrap();
    let r = solved(10.0);
    let next = el_step(&r.f, &p, 1.0).unwrap();
    let moved = next.l2_distance(&r.f).unwrap();
    assert!(moved <= 10.0 * 1e-10, "moved {moved:.3e}");
    assert!(is_rearranged(&next));
    assert!((gauge_norm(&next, &p).unwrap() - 1.0).abs() <= 1e-10);
}

#[test]
fn initial_guess_examples() {
    let g = default_grid();
    for a in [0.5, 1.0, 3.0, 10.0, 50.0] {
        let p = OrliczParams::new(a).unwrap();
        let f = initial_guess(&p, g).unwrap();
        assert!((gauge_norm(&f, &p).unwrap() - 1.0).abs() <= 1e-10);
    }
    let p = OrliczParams::new(1.0).unwrap();
    let f = initial_guess(&p, g).unwrap();
    let outside = f.values().iter().zip(g.nodes()).any(|(v, x)| x.abs() >= 1.0 && *v != 0.0);
    assert!(!outside);
    assert!(quad_form(&f).unwrap() * 1.0 > 1.0);
}

#[test]
fn two_starts_agree_at_alpha_ten() {
    let p = OrliczParams::new(10.0).unwrap();
    let g = default_grid();
    let a = solved(10.0);
    let gauss = GridFunction::from_fn(g, |x| (-(x / 6.0).powi(2)).exp()).unwrap();
    let b = solve_max(&p, g, &SolverConfig::default(), Some(&gauss)).unwrap();
    assert!(a.converged && b.converged);
    let dj = (a.j - b.j).abs();
    let df = a.f.l2_distance(&b.f).unwrap();
    if dj > 1e-8 || df > 1e-6 {
        eprintln!("alpha = 10: starts disagree, |dJ| = {dj:.3e}, ||df|| = {df:.3e}");
    }
    assert!(dj <= 1e-8);
}

#[test]
fn maximizer_bounds() {
    for a in [5.0, 10.0, 50.0] {
        let r = solved(a);
        assert!(r.converged);
        assert!(r.pairing > 1.0 && r.pairing < 2.0);
        assert!(r.alpha_j2() > 1.0 && r.alpha_j2() < 1.5);
        assert!(r.peak_ratio < 1.0);
        assert!(r.constraint_error <= 1e-10);
        assert!(is_rearranged(&r.f));
    }
    let p = OrliczParams::new(5.0).unwrap();
    let r = solved(5.0);
    assert!((pairing(&r.f, &p) - r.pairing).abs() < 1e-12);
}

#[test]
fn wave_examples() {
    let p = OrliczParams::new(10.0).unwrap();
    let r = solved(10.0);
    let w = to_wave(&r, &p).unwrap();
    assert!(steady_residual(&w).unwrap() <= 1e-8);
    assert!(branch_identity(&w).unwrap() <= 1e-7);

    let g = w.phi.grid().clone();
    let bump = GridFunction::from_fn(&g, |x| 1e-3 * (-x * x).exp()).unwrap();
    let perturbed = from_profile(w.phi.zip_with(&bump, |a, b| a + b).unwrap(), w.mu, 10.0, f64::NAN).unwrap();
    assert!(perturbed.diagnostics.steady_residual > 1e-4);

    let o = g.origin();
    let mut flipped = w.phi.values().to_vec();
    flipped[o] = w.mu - flipped[o];
    let flipped = GridFunction::new(g.clone(), flipped).unwrap();
    match from_profile(flipped, w.mu, 10.0, f64::NAN) {
        Ok(f) => assert!(f.diagnostics.branch_residual > 0.5),
        Err(e) => assert!(matches!(e, Error::NegativeDiscriminant(_))),
    }

    let r50 = solved(50.0);
    let w50 = to_wave(&r50, &OrliczParams::new(50.0).unwrap()).unwrap();
    assert!(w50.mu - 1.0 > 0.0 && w50.mu - 1.0 < 0.1);
    assert!(w50.diagnostics.sup_phi * 50.0 <= 2.0);
}

#[test]
fn wave_without_cubic_mass() {
    let r = solved(3.0);
    let p = OrliczParams::new(3.0).unwrap();
    let w = to_wave(&r, &p).unwrap();
    let denom = 2.0 - r.l3_cubed() / 3.0;
    let j2 = r.j * r.j;
    assert!((w.mu - 2.0 * 3.0 * j2 / denom).abs() < 1e-14);
    // the formula with ∫f³ = 0 reduces to φ = J²f/2 and μ = αJ²
    let phi0 = r.f.scale(j2 / 2.0);
    assert!((phi0.sup_norm() - j2 * r.f.sup_norm() / 2.0).abs() < 1e-15);
}

#[test]
fn branch_examples() {
    let s = alpha_sweep(&[3.0, 5.0, 10.0, 20.0, 50.0], default_grid(), &SolverConfig::default(), SweepMode::Warm).unwrap();
    let sum = s.summary();
    assert_eq!(sum.converged_rows, 5);
    assert!(sum.strictly_decreasing);
    assert!(sum.below_cap);
    let last = s.rows.last().unwrap();
    assert!(last.alpha_j2 > 1.0 && last.alpha_j2 < 1.05);
    let ten = s.rows.iter().find(|r| r.alpha == 10.0).unwrap();
    assert!(ten.peak_ratio < 1.0 - 1e-6);
}

#[test]
fn continuity_proxy() {
    let g = make_grid(5, 2048).unwrap();
    let cfg = SolverConfig::default();
    let gap = |alphas: &[f64]| {
        let s = alpha_sweep(alphas, &g, &cfg, SweepMode::Cold).unwrap();
        s.rows
            .windows(2)
            .map(|w| (w[1].alpha_j2 - w[0].alpha_j2).abs())
            .fold(0.0, f64::max)
    };
    let coarse = gap(&[4.0, 6.0, 8.0]);
    let fine = gap(&[4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0]);
    assert!(fine < coarse);
}
