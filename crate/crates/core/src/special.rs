//! Riemann zeta on (0, 1) and a thin wrapper over double-exponential quadrature.

use statrs::function::gamma::ln_gamma;

/// Riemann zeta for real `s` in (0, 1), via Borwein's alternating-series
/// acceleration of the Dirichlet eta function.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 0.0 && s < 1.0, "zeta is implemented on (0, 1) only");
    const N: usize = 40;
    // d_k = n Σ_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let nf = N as f64;
    let mut d = Vec::with_capacity(N + 1);
    let mut acc = 0.0;
    for i in 0..=N {
        let lt = ln_gamma(nf + i as f64) - ln_gamma(nf - i as f64 + 1.0) - ln_gamma(2.0 * i as f64 + 1.0)
            + i as f64 * 4f64.ln();
        acc += nf * lt.exp();
        d.push(acc);
    }
    let dn = d[N];
    let mut sum = 0.0;
    for (k, dk) in d.iter().take(N).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (dk - dn) / ((k + 1) as f64).powf(s);
    }
    let eta = -sum / dn;
    eta / (1.0 - 2f64.powf(1.0 - s))
}

/// Integrate over an explicit list of breakpoints.
pub(crate) fn integrate_breaks(f: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> f64 {
    breaks
        .windows(2)
        .map(|w| quadrature::double_exponential::integrate(&f, w[0], w[1], tol).integral)
        .sum()
}
