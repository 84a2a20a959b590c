//! Distribution function and discrete rearrangements.
//!
//! On an even grid `f^#` is defined by placing the sorted values of `|f|`
//! on nodes ordered by `|x|` ascending, with the negative node first when two
//! nodes are equidistant from the origin. The last node, `x = -L`, receives
//! the smallest value.

use crate::grid::GridFunction;

/// Node indices ordered by `|x|` ascending, negative first on ties.
pub fn placement_order(n: usize) -> Vec<usize> {
    let o = n / 2;
    let mut order = Vec::with_capacity(n);
    order.push(o);
    for k in 1..=o {
        order.push(o - k);
        if o + k < n {
            order.push(o + k);
        }
    }
    order
}

/// `dx · #{j : |f_j| > s}`.
pub fn dist_fn(f: &GridFunction, s: f64) -> f64 {
    let count = f.values().iter().filter(|v| v.abs() > s).count();
    count as f64 * f.grid().dx()
}

fn sorted_abs_desc(values: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    s.sort_unstable_by(|a, b| b.total_cmp(a));
    s
}

/// Symmetric rearrangement of raw samples.
pub fn symmetric_rearrangement_slice(values: &[f64]) -> Vec<f64> {
    let sorted = sorted_abs_desc(values);
    let mut out = vec![0.0; values.len()];
    for (&idx, v) in placement_order(values.len()).iter().zip(sorted) {
        out[idx] = v;
    }
    out
}

/// `f^#`: the bell-shaped arrangement of `|f|`.
pub fn symmetric_rearrangement(f: &GridFunction) -> GridFunction {
    GridFunction::from_raw(f.grid().clone(), symmetric_rearrangement_slice(f.values()))
}

/// `f^*` sampled at `t_i = i·dx` on `[0, 2L)`.
pub fn decreasing_rearrangement(f: &GridFunction) -> Vec<f64> {
    sorted_abs_desc(f.values())
}

/// True if `f` equals its own symmetric rearrangement exactly.
pub fn is_rearranged(f: &GridFunction) -> bool {
    symmetric_rearrangement_slice(f.values()) == f.values()
}

/// Bell shape up to a relative tolerance: nonnegative, and non-increasing
/// along the placement order. This makes `f` even up to one cell and puts its
/// maximum at the origin.
pub fn is_bell_shaped(f: &GridFunction, tol: f64) -> bool {
    let v = f.values();
    let m = f.sup_norm();
    let slack = tol * m;
    if v.iter().any(|&x| x < -slack) {
        return false;
    }
    let order = placement_order(v.len());
    order.windows(2).all(|w| v[w[1]] <= v[w[0]] + slack)
}

/// Bell shape with exact evenness: `f(x) = f(-x)` within `tol·max` on mirrored
/// nodes, nonnegative, non-increasing on the positive half-line.
pub fn is_even_bell(f: &GridFunction, tol: f64) -> bool {
    let v = f.values();
    let n = v.len();
    let o = n / 2;
    let slack = tol * f.sup_norm();
    if v.iter().any(|&x| x < -slack) {
        return false;
    }
    for k in 1..o {
        if (v[o + k] - v[o - k]).abs() > slack || v[o + k] > v[o + k - 1] + slack {
            return false;
        }
    }
    v[0] <= v[1] + slack
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn five_point_convention() {
        let order = placement_order(5);
        assert_eq!(order, vec![2, 1, 3, 0, 4]);
        let out = symmetric_rearrangement_slice(&[0.0, 1.0, 3.0, 2.0, 1.0]);
        assert_eq!(out, vec![1.0, 2.0, 3.0, 1.0, 0.0]);
    }

    #[test]
    fn even_grid_order_ends_at_minus_l() {
        let order = placement_order(16);
        assert_eq!(order.len(), 16);
        assert_eq!(order[0], 8);
        assert_eq!(*order.last().unwrap(), 0);
        let mut s = order.clone();
        s.sort_unstable();
        assert_eq!(s, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn dist_fn_examples() {
        let g = make_grid(2, 256).unwrap();
        let f = GridFunction::from_fn(&g, |x| if (0.0..=2.0).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        assert!((dist_fn(&f, 0.5) - 2.0).abs() <= g.dx() + 1e-15);
        assert_eq!(dist_fn(&f, 1.0), 0.0);
        assert_eq!(dist_fn(&GridFunction::zeros(&g), 0.1), 0.0);
    }

    #[test]
    fn rearrangement_examples() {
        let g = make_grid(2, 64).unwrap();
        let bell = GridFunction::from_fn(&g, |x| (-x * x).exp()).unwrap();
        let r = symmetric_rearrangement(&bell);
        assert!(is_even_bell(&r, 1e-15));
        assert!(is_rearranged(&r));
        assert_eq!(symmetric_rearrangement(&r), r);
        let z = GridFunction::zeros(&g);
        assert_eq!(symmetric_rearrangement(&z), z);
        let c = GridFunction::constant(&g, 0.7);
        assert!(decreasing_rearrangement(&c).iter().all(|&v| v == 0.7));
    }

    #[test]
    fn decreasing_rearrangement_sorts() {
        let g = make_grid(0, 16).unwrap();
        let mut v = vec![0.0; 16];
        v[3] = 3.0;
        v[9] = -2.0;
        v[12] = 1.0;
        let f = GridFunction::new(g, v).unwrap();
        let d = decreasing_rearrangement(&f);
        assert_eq!(&d[..4], &[3.0, 2.0, 1.0, 0.0]);
        let n2: f64 = d.iter().map(|x| x * x).sum();
        let m2: f64 = f.values().iter().map(|x| x * x).sum();
        assert_eq!(n2, m2);
    }
}
