//! Concrete norms: ℓp, the truncated sequence-space renormings, planar
//! norms drawn from boundary arcs, and absolute normalised norms.

mod absolute;
mod arc2d;

pub use absolute::{
    build_absolute, build_absolute_custom, AbsoluteFile, AbsoluteKind, AbsoluteNorm, Exponent, MixPart, DEFAULT_CERT_SAMPLES,
};
pub(crate) use absolute::parse_exponent;
pub use arc2d::{build_arc2d, Arc2DSpec, Piece};

use crate::error::{Error, Result};
use crate::normcore::{Equivalence, NormedSpace};

const ACTIVE: f64 = 1e-12;

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|c| c.abs()).sum()
}

fn l2(v: &[f64]) -> f64 {
    if v.len() == 2 {
        v[0].hypot(v[1])
    } else {
        v.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, c| m.max(c.abs()))
}

/// One-sided derivative of the ℓ¹ norm.
fn l1_deriv(x: &[f64], d: &[f64]) -> f64 {
    let scale = l1(x);
    x.iter()
        .zip(d)
        .map(|(&xi, &di)| if xi.abs() <= ACTIVE * scale { di.abs() } else { xi.signum() * di })
        .sum()
}

/// One-sided derivative of the ℓ² norm (the norm of `d` at the origin).
fn l2_deriv(x: &[f64], d: &[f64]) -> f64 {
    let n = l2(x);
    if n == 0.0 {
        l2(d)
    } else {
        x.iter().zip(d).map(|(a, b)| a * b).sum::<f64>() / n
    }
}

fn linf_deriv(x: &[f64], d: &[f64]) -> f64 {
    let n = linf(x);
    if n == 0.0 {
        return linf(d);
    }
    x.iter()
        .zip(d)
        .filter(|(xi, _)| xi.abs() >= n * (1.0 - ACTIVE))
        .map(|(xi, di)| xi.signum() * di)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    let m = linf(v);
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|c| (c.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// ℓp on R^n, `1 <= p <= ∞`.
pub fn build_lp(n: usize, p: f64) -> Result<NormedSpace> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "n", value: 0.0, range: "n >= 1" });
    }
    if !(p >= 1.0) {
        return Err(Error::OutOfRange { name: "p", value: p, range: "[1, inf]" });
    }
    let label = format!("lp({},{})", n, p_label(p));
    let r = (n as f64).powf(if p.is_infinite() { -0.5 } else { 1.0 / p - 0.5 });
    let equiv = Equivalence { lower: r.min(1.0), upper: r.max(1.0), certified: true };
    let q = if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    };
    let dual = move || build_lp(n, q).expect("conjugate exponent is valid").with_label(format!("lp({},{})*", n, p_label(p)));
    let space = if p == 1.0 {
        NormedSpace::builder(n, label, l1).dir_deriv(l1_deriv)
    } else if p == 2.0 {
        NormedSpace::builder(n, label, l2).dir_deriv(l2_deriv).subgrad(|x| {
            let r = l2(x);
            x.iter().map(|c| c / r).collect()
        })
    } else if p.is_infinite() {
        NormedSpace::builder(n, label, linf).dir_deriv(linf_deriv)
    } else {
        let grad = move |x: &[f64]| -> Vec<f64> {
            let r = lp_norm(x, p);
            x.iter().map(|c| c.signum() * (c.abs() / r).powf(p - 1.0)).collect()
        };
        NormedSpace::builder(n, label, move |v| lp_norm(v, p))
            .dir_deriv(move |x, d| {
                if lp_norm(x, p) == 0.0 {
                    return lp_norm(d, p);
                }
                grad(x).iter().zip(d).map(|(a, b)| a * b).sum()
            })
            .subgrad(move |x| {
                let r = lp_norm(x, p);
                x.iter().map(|c| c.signum() * (c.abs() / r).powf(p - 1.0)).collect()
            })
    };
    Ok(space.equivalence(equiv).dual(dual).build())
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        Err(Error::OutOfRange { name: "m", value: m as f64, range: "m >= 2" })
    } else {
        Ok(())
    }
}

/// `|||x|||^2 = ||x||_1^2 + ||x||_2^2` on R^m.
pub fn build_example_62(m: usize) -> Result<NormedSpace> {
    check_m(m)?;
    let eval = |v: &[f64]| l1(v).hypot(l2(v));
    Ok(NormedSpace::builder(m, format!("ex62({m})"), eval)
        .dir_deriv(move |x, d| {
            let n = eval(x);
            if n == 0.0 {
                return eval(d);
            }
            (l1(x) * l1_deriv(x, d) + x.iter().zip(d).map(|(a, b)| a * b).sum::<f64>()) / n
        })
        .subgrad(move |x| {
            let (s1, n) = (l1(x), eval(x));
            x.iter().map(|&c| (s1 * sign0(c) + c) / n).collect()
        })
        .equivalence(Equivalence { lower: 2f64.sqrt(), upper: ((m as f64) + 1.0).sqrt(), certified: true })
        .build())
}

fn sign0(c: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c.signum()
    }
}

/// `|||x|||^2 = max{|x_1|, ||x'||_2}^2 + ||Tx||_2^2` with `Tx = (α_k x_k)`.
pub fn build_example_63(m: usize, alpha: Option<Vec<f64>>) -> Result<NormedSpace> {
    check_m(m)?;
    let alpha = match alpha {
        Some(a) => {
            if a.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: a.len() });
            }
            if a[0] != 1.0 {
                return Err(Error::OutOfRange { name: "alpha_1", value: a[0], range: "exactly 1" });
            }
            for (k, w) in a.windows(2).enumerate() {
                if !(w[1] > 0.0 && w[1] <= 1.0 && w[1] <= w[0]) {
                    return Err(Error::OutOfRange { name: "alpha_k", value: a[k + 1], range: "(0, 1], non-increasing" });
                }
            }
            a
        }
        None => (1..=m).map(|k| 1.0 / k as f64).collect(),
    };
    let a2 = alpha.clone();
    let head = |v: &[f64]| v[0].abs().max(l2(&v[1..]));
    let tx = move |v: &[f64], a: &[f64]| -> f64 { v.iter().zip(a).map(|(x, w)| (x * w) * (x * w)).sum::<f64>().sqrt() };
    let eval = move |v: &[f64]| head(v).hypot(tx(v, &alpha));
    let eval2 = eval.clone();
    let amin = *a2.last().unwrap();
    Ok(NormedSpace::builder(m, format!("ex63({m})"), eval)
        .dir_deriv(move |x, d| {
            let n = eval2(x);
            if n == 0.0 {
                return eval2(d);
            }
            let (h1, h2) = (x[0].abs(), l2(&x[1..]));
            let a1 = if x[0] != 0.0 { x[0].signum() * d[0] } else { d[0].abs() };
            let a2d = l2_deriv(&x[1..], &d[1..]);
            let h = h1.max(h2);
            let mut hd = f64::NEG_INFINITY;
            if h1 >= h * (1.0 - ACTIVE) {
                hd = hd.max(a1);
            }
            if h2 >= h * (1.0 - ACTIVE) {
                hd = hd.max(a2d);
            }
            let t: f64 = x.iter().zip(d).zip(&a2).map(|((xi, di), w)| w * w * xi * di).sum();
            (h * hd + t) / n
        })
        .equivalence(Equivalence { lower: (0.5 + amin * amin).sqrt(), upper: 2f64.sqrt(), certified: true })
        .build())
}

/// `|||x||| = max{|x_1|, ||x'||_1} + ||x||_2`.
pub fn build_example_64(m: usize) -> Result<NormedSpace> {
    check_m(m)?;
    let eval = |v: &[f64]| v[0].abs().max(l1(&v[1..])) + l2(v);
    Ok(NormedSpace::builder(m, format!("ex64({m})"), eval)
        .dir_deriv(|x, d| {
            let (h1, h2) = (x[0].abs(), l1(&x[1..]));
            let h = h1.max(h2);
            let a1 = if x[0] != 0.0 { x[0].signum() * d[0] } else { d[0].abs() };
            let a2 = if h2 > 0.0 { l1_deriv(&x[1..], &d[1..]) } else { l1(&d[1..]) };
            let mut hd = f64::NEG_INFINITY;
            if h1 >= h * (1.0 - ACTIVE) {
                hd = hd.max(a1);
            }
            if h2 >= h * (1.0 - ACTIVE) {
                hd = hd.max(a2);
            }
            hd + l2_deriv(x, d)
        })
        .equivalence(Equivalence { lower: 1.0 + std::f64::consts::FRAC_1_SQRT_2, upper: ((m - 1) as f64).sqrt() + 1.0, certified: true })
        .build())
}

/// `||x||_M^2 = ||x||_1^2 + ||x'||_2^2 + (||x'||_1 + ||x||_2)^2`.
pub fn build_example_65(m: usize) -> Result<NormedSpace> {
    check_m(m)?;
    let eval = |v: &[f64]| {
        let (a, b, c) = (l1(v), l2(&v[1..]), l1(&v[1..]) + l2(v));
        (a * a + b * b + c * c).sqrt()
    };
    Ok(NormedSpace::builder(m, format!("ex65({m})"), eval)
        .dir_deriv(move |x, d| {
            let n = eval(x);
            if n == 0.0 {
                return eval(d);
            }
            let a = l1(x);
            let tail: f64 = x[1..].iter().zip(&d[1..]).map(|(p, q)| p * q).sum();
            let tail_l1 = if l1(&x[1..]) > 0.0 { l1_deriv(&x[1..], &d[1..]) } else { l1(&d[1..]) };
            let c = l1(&x[1..]) + l2(x);
            (a * l1_deriv(x, d) + tail + c * (tail_l1 + l2_deriv(x, d))) / n
        })
        .equivalence(Equivalence {
            lower: 2f64.sqrt(),
            upper: ((m + 1) as f64 + (((m - 1) as f64).sqrt() + 1.0).powi(2)).sqrt(),
            certified: true,
        })
        .build())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_values() {
        assert_eq!(build_lp(3, 2.0).unwrap().norm(&[1.0, 2.0, 2.0]), 3.0);
        assert_eq!(build_lp(2, 1.0).unwrap().norm(&[1.0, -1.0]), 2.0);
        assert_eq!(build_lp(2, f64::INFINITY).unwrap().norm(&[1.0, -1.0]), 1.0);
        assert_eq!(build_lp(2, 1.0).unwrap().norm(&[3.0, -4.0]), 7.0);
        assert_eq!(build_lp(2, 2.0).unwrap().norm(&[3.0, 4.0]), 5.0);
        assert!(build_lp(2, 0.5).is_err());
    }

    #[test]
    fn sequence_norm_values() {
        let e62 = build_example_62(4).unwrap();
        assert!((e62.norm(&[1.0, 0.0, 0.0, 0.0]) - 2f64.sqrt()).abs() < 1e-15);
        let e63 = build_example_63(3, Some(vec![1.0, 0.5, 1.0 / 3.0])).unwrap();
        assert!((e63.norm(&[1.0, 0.0, 0.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert!((e63.norm(&[0.0, 0.0, 1.0]) - (1.0f64 + 1.0 / 9.0).sqrt()).abs() < 1e-15);
        let x = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e63.norm(&[x, 0.0, 0.0]) - 1.0).abs() < 1e-15);
        let e64 = build_example_64(3).unwrap();
        assert_eq!(e64.norm(&[1.0, 0.0, 0.0]), 2.0);
        assert_eq!(e64.norm(&[0.0, 1.0, 0.0]), 2.0);
        assert!((e64.norm(&[1.0, 0.5, 0.5]) - (1.0 + 1.5f64.sqrt())).abs() < 1e-15);
        let e65 = build_example_65(8).unwrap();
        let mut e1 = vec![0.0; 8];
        e1[0] = 1.0;
        assert!((e65.norm(&e1) - 2f64.sqrt()).abs() < 1e-15);
        e1.swap(0, 1);
        assert!((e65.norm(&e1) - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weights_are_validated() {
        assert!(build_example_63(3, Some(vec![1.0, 0.5, 0.7])).is_err());
        assert!(build_example_63(3, Some(vec![0.9, 0.5, 0.2])).is_err());
    }

    #[test]
    fn catalog_spaces_satisfy_axioms() {
        let spaces = vec![
            build_lp(2, 1.0).unwrap(),
            build_lp(3, 3.0).unwrap(),
            build_lp(2, f64::INFINITY).unwrap(),
            build_example_62(5).unwrap(),
            build_example_63(4, None).unwrap(),
            build_example_64(4).unwrap(),
            build_example_65(4).unwrap(),
        ];
        for s in &spaces {
            let bad = s.sample_axioms(300, 7);
            assert!(bad.is_empty(), "{}: {:?}", s.label(), bad);
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let spaces = vec![build_example_62(3).unwrap(), build_example_63(3, None).unwrap(), build_example_64(3).unwrap(), build_example_65(3).unwrap(), build_lp(3, 3.0).unwrap()];
        let x = [0.3, -0.7, 0.45];
        let d = [0.2, 0.1, -0.9];
        for s in &spaces {
            let fd = crate::normcore::fd_dir_deriv(&*s.eval_arc(), &x, &d);
            assert!((s.dir_deriv(&x, &d) - fd).abs() < 1e-7, "{}", s.label());
        }
    }
}
