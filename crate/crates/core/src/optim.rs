//! One-dimensional searches used throughout.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of a convex function on `[a, b]`.
/// Returns `(argmin, min value, certified lower bound)`.
pub(crate) fn convex_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64, f64) {
    let (mut fa, mut fb) = (f(a), f(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if b - a <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = (a, fa);
    for (t, v) in [(c, fc), (d, fd), (b, fb)] {
        if v < best.1 {
            best = (t, v);
        }
    }
    // Secant lines through the bracket give a convexity lower bound.
    let (m, fm) = if fc <= fd { (c, fc) } else { (d, fd) };
    let mut lower = fm.min(fa).min(fb);
    if b > m && m > a {
        let right_slope = (fb - fm) / (b - m);
        let left_slope = (fa - fm) / (m - a);
        lower = lower.min(fm - right_slope.max(0.0) * (m - a)).min(fm - left_slope.max(0.0) * (b - m));
    }
    (best.0, best.1, lower.min(best.1))
}

/// Maximise a cyclically unimodal function of an angle: coarse scan followed
/// by golden-section refinement around the best sample.
pub(crate) fn circle_max(f: impl Fn(f64) -> f64, coarse: usize, iters: usize) -> (f64, f64) {
    let step = std::f64::consts::TAU / coarse as f64;
    let mut best = (0.0, f(0.0));
    for k in 1..coarse {
        let t = step * k as f64;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let (t, v) = golden_max(&f, best.0 - step, best.0 + step, iters);
    if v > best.1 {
        (t, v)
    } else {
        best
    }
}

pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_min_brackets_the_minimum() {
        let (t, v, lo) = convex_min(|t| (t - 0.3).abs() + 1.0, -5.0, 5.0, 200);
        assert!((t - 0.3).abs() < 1e-12);
        assert!(lo <= 1.0 && v - 1.0 < 1e-12 && 1.0 - lo < 1e-12);
    }

    #[test]
    fn circle_max_finds_cosine_peak() {
        let (t, v) = circle_max(|t| (t - 2.0).cos(), 16, 80);
        assert!((t.rem_euclid(std::f64::consts::TAU) - 2.0).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
    }
}
