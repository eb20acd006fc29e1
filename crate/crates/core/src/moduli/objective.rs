//! Pointwise objectives shared by the search engine, the grid oracle and
//! witness re-evaluation, so that all three agree bit-for-bit.

use crate::normcore::{axpy, NormedSpace};
use crate::optim::convex_min;

/// `1 - ||x + y|| / 2`.
pub(crate) fn midpoint_gap(space: &NormedSpace, x: &[f64], y: &[f64]) -> f64 {
    1.0 - 0.5 * space.norm(&axpy(1.0, x, y))
}

/// `(||x + τy|| + ||x - τy||) / 2 - 1`.
pub(crate) fn smoothness(space: &NormedSpace, x: &[f64], y: &[f64], tau: f64) -> f64 {
    0.5 * (space.norm(&axpy(tau, y, x)) + space.norm(&axpy(-tau, y, x))) - 1.0
}

/// `min(||x + y||, ||x - y||) / 2`.
pub(crate) fn squareness(space: &NormedSpace, x: &[f64], y: &[f64]) -> f64 {
    0.5 * space.norm(&axpy(1.0, x, y)).min(space.norm(&axpy(-1.0, y, x)))
}

/// Enclosure `(lo, hi, λ)` of `sup { f(x) : ||f||_* <= 1, f(y) <= 1 - ε }`,
/// computed as `min_{λ >= 0} ||x - λy|| + λ(1 - ε)`.
pub(crate) fn tilde_sup(space: &NormedSpace, x: &[f64], y: &[f64], eps: f64) -> (f64, f64, f64) {
    if eps >= 2.0 {
        let v = space.dir_deriv(y, &x.iter().map(|c| -c).collect::<Vec<_>>());
        return (v, v, f64::INFINITY);
    }
    let cap = 2.0 / (2.0 - eps);
    let (lam, hi, lo) = convex_min(|l| space.norm(&axpy(-l, y, x)) + l * (1.0 - eps), 0.0, cap, 90);
    (lo.min(hi), hi, lam)
}

/// Conservative value of the δ̃ objective `max(1 - ||x+y||/2, 1 - sup f(x))`.
pub(crate) fn tilde_value(space: &NormedSpace, x: &[f64], y: &[f64], eps: f64) -> (f64, f64) {
    let (lo, _, lam) = tilde_sup(space, x, y, eps);
    (midpoint_gap(space, x, y).max(1.0 - lo), lam)
}

/// Largest `t >= 0` with `||x + t d|| <= 1` for unit `x`.
pub(crate) fn chord_reach(space: &NormedSpace, x: &[f64], d: &[f64]) -> f64 {
    let nd = space.norm(d);
    if nd == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 2.0 / nd);
    while space.norm(&axpy(hi, d, x)) <= 1.0 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if space.norm(&axpy(mid, d, x)) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The points `x + t z` of the unit sphere other than `x` itself.
pub(crate) fn chord_partners(space: &NormedSpace, x: &[f64], z: &[f64]) -> Vec<Vec<f64>> {
    let nz: Vec<f64> = z.iter().map(|c| -c).collect();
    let mut out = Vec::with_capacity(2);
    for (t, d) in [(chord_reach(space, x, z), z), (chord_reach(space, x, &nz), &nz[..])] {
        if t > 1e-12 {
            out.push(axpy(t, d, x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid() -> NormedSpace {
        NormedSpace::builder(2, "l2", |v| v[0].hypot(v[1])).dir_deriv(|x, d| (x[0] * d[0] + x[1] * d[1]) / x[0].hypot(x[1])).build()
    }

    #[test]
    fn tilde_sup_in_hilbert_space() {
        // sup{<f,x>: |f|<=1, <f,y> <= 1-ε} for orthogonal unit x, y is 1 when ε <= 1.
        let (lo, hi, _) = tilde_sup(&euclid(), &[1.0, 0.0], &[0.0, 1.0], 0.5);
        assert!(lo <= 1.0 && hi >= 1.0 - 1e-12 && hi - lo < 1e-9);
        // x = y forces f(x) <= 1 - ε.
        let (lo, hi, _) = tilde_sup(&euclid(), &[1.0, 0.0], &[1.0, 0.0], 0.5);
        assert!((hi - 0.5).abs() < 1e-9 && lo <= 0.5 + 1e-15);
        let (lo, _, _) = tilde_sup(&euclid(), &[1.0, 0.0], &[0.0, 1.0], 2.0);
        assert!(lo.abs() < 1e-15);
    }

    #[test]
    fn chord_partner_on_circle() {
        let p = chord_partners(&euclid(), &[0.6, 0.8], &[0.0, 1.0]);
        assert_eq!(p.len(), 1);
        assert!((p[0][0] - 0.6).abs() < 1e-15 && (p[0][1] + 0.8).abs() < 1e-12);
    }

    #[test]
    fn flat_chords_reach_both_ends() {
        let linf = NormedSpace::builder(2, "linf", |v| v[0].abs().max(v[1].abs())).build();
        let p = chord_partners(&linf, &[0.0, 1.0], &[1.0, 0.0]);
        assert_eq!(p.len(), 2);
        assert!((p[0][0] - 1.0).abs() < 1e-12 && (p[1][0] + 1.0).abs() < 1e-12);
    }
}
