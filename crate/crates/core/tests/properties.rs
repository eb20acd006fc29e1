use banachlab::catalog::{build_absolute, build_arc2d, build_lp, AbsoluteKind, Arc2DSpec, Exponent};
use banachlab::moduli::{delta_uacs, witness_value};
use banachlab::normcore::{dual_norm, quotient_norm};
use banachlab::sums::build_sum;
use banachlab::{parse_space, Functional, NormedSpace, Resolution, Vector};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.0..8.0f64]
}

fn space2() -> impl Strategy<Value = NormedSpace> {
    prop_oneof![
        exponent().prop_map(|p| build_lp(2, p).unwrap()),
        Just(build_arc2d(&Arc2DSpec::preset("ex61").unwrap()).unwrap()),
        Just(build_arc2d(&Arc2DSpec::preset("fig5").unwrap()).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_homogeneous_and_subadditive(s in space2(), x in prop::array::uniform2(coord()), y in prop::array::uniform2(coord()), t in -5.0..5.0f64) {
        let n = |v: &[f64]| s.norm(v);
        let scale = 1e-12 * (1.0 + n(&x) + n(&y));
        prop_assert!((n(&[t * x[0], t * x[1]]) - t.abs() * n(&x)).abs() <= scale * (1.0 + t.abs()));
        prop_assert!(n(&[x[0] + y[0], x[1] + y[1]]) <= n(&x) + n(&y) + scale);
        prop_assert!(n(&x) >= 0.0);
    }

    #[test]
    fn functionals_are_bounded_by_their_dual_norm(s in space2(), f in prop::array::uniform2(coord()), x in prop::array::uniform2(coord())) {
        let d = dual_norm(&s, &Functional::new(f.to_vec()).unwrap(), &Resolution::default()).unwrap();
        prop_assert!(d.lo <= d.hi);
        let fx = f[0] * x[0] + f[1] * x[1];
        prop_assert!(fx.abs() <= d.hi * s.norm(&x) + 1e-9 * (1.0 + fx.abs()));
    }

    #[test]
    fn quotient_norm_ignores_the_subspace(p in exponent(), x in prop::array::uniform3(coord()), u in prop::array::uniform3(-1.0..1.0f64), t in -3.0..3.0f64) {
        prop_assume!(u.iter().map(|c| c * c).sum::<f64>() > 1e-2);
        let s = build_lp(3, p).unwrap();
        let basis = [Vector::new(u.to_vec()).unwrap()];
        let q = quotient_norm(&s, &basis, &Vector::new(x.to_vec()).unwrap()).unwrap();
        let shifted: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + t * b).collect();
        let q2 = quotient_norm(&s, &basis, &Vector::new(shifted).unwrap()).unwrap();
        prop_assert!(q.lo <= s.norm(&x) + 1e-9);
        let slack = 1e-6 * (1.0 + q.hi);
        prop_assert!(q2.lo <= q.hi + slack && q.lo <= q2.hi + slack);
    }

    #[test]
    fn absolute_sum_composes_component_norms(p in exponent(), q1 in exponent(), q2 in exponent(), v in prop::array::uniform4(coord())) {
        let outer = build_absolute(AbsoluteKind::Lp { p: Exponent(p) }, 2).unwrap();
        let (a, b) = (build_lp(2, q1).unwrap(), build_lp(2, q2).unwrap());
        let expect = outer.eval(&[a.norm(&v[..2]), b.norm(&v[2..])]);
        let sum = build_sum(vec![a, b], outer).unwrap();
        prop_assert!((sum.space().norm(&v) - expect).abs() <= 1e-12 * (1.0 + expect));
    }

    #[test]
    fn labels_parse_back_to_the_same_norm(p in exponent(), v in prop::array::uniform3(coord())) {
        let res = Resolution::default();
        let s = build_lp(3, p).unwrap();
        let again = parse_space(s.label(), &res).unwrap();
        prop_assert!((again.space().norm(&v) - s.norm(&v)).abs() <= 1e-12 * (1.0 + s.norm(&v)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn uacs_witness_reproduces_the_upper_bound(p in exponent(), eps in 0.05..2.0f64) {
        let s = build_lp(2, p).unwrap();
        let est = delta_uacs(&s, eps, &Resolution::default()).unwrap();
        prop_assert!(0.0 <= est.lo && est.lo <= est.hi && est.hi <= 1.0);
        prop_assert_eq!(witness_value(&s, &est).unwrap(), est.hi);
    }
}
