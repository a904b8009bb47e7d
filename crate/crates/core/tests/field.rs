use fibcurv::param::{ParamScalar, Var, P, Q, THETA};
use fibcurv::{Real, Scalar};
use num::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `a + b√2 + c√3 + d√6` with numerators and denominators up to `h`.
fn scalar(h: i64) -> impl Strategy<Value = Scalar> {
    prop::array::uniform4((-h..=h, 1..=h)).prop_map(|c| {
        let [a, b, x, d] = c.map(|(n, d)| rat(n, d));
        Scalar::new(a, b, x, d)
    })
}

fn rel_close(got: f64, want: f64, scale: f64) -> bool {
    (got - want).abs() <= 1e-12 * scale.max(1e-300)
}

/// Rational point on the unit circle from a slope.
fn circle_point(n: i64, d: i64) -> (Scalar, Scalar) {
    let t = Scalar::frac(n, d);
    let one = Scalar::one();
    let den = &one + &(&t * &t);
    ((&one - &(&t * &t)) / den.clone(), (Scalar::from_int(2) * t) / den)
}

/// Random polynomial in cos θ, sin θ, p, q with small coefficients.
fn param_poly() -> impl Strategy<Value = ParamScalar> {
    prop::collection::vec((-5i64..=5, 0u32..3, 0u32..3, 0u32..2, 0u32..2), 1..5).prop_map(|terms| {
        terms.into_iter().fold(ParamScalar::zero(), |acc, (k, ec, es, ep, eq)| {
            let t = ParamScalar::from_int(k)
                .times(&ParamScalar::cos(THETA).pow(ec))
                .times(&ParamScalar::sin(THETA).pow(es))
                .times(&ParamScalar::free(P).pow(ep))
                .times(&ParamScalar::free(Q).pow(eq));
            acc.plus(&t)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(x in scalar(100), y in scalar(100), z in scalar(100)) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn float_embedding(x in scalar(100), y in scalar(100)) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        prop_assert!(rel_close((&x + &y).to_f64(), fx + fy, fx.abs() + fy.abs()));
        prop_assert!(rel_close((&x * &y).to_f64(), fx * fy, fx.abs() * fy.abs()));
        prop_assert!(rel_close((-&x).to_f64(), -fx, fx.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn instantiation_is_a_homomorphism(
        f in param_poly(),
        g in param_poly(),
        slope in (-20i64..=20, 1i64..=20),
        p in -9i64..=9,
        q in (-9i64..=9, 1i64..=9),
    ) {
        let (c, s) = circle_point(slope.0, slope.1);
        let asg = vec![
            (Var::Cos(THETA), c),
            (Var::Sin(THETA), s),
            (Var::Free(P), Scalar::from_int(p)),
            (Var::Free(Q), Scalar::frac(q.0, q.1)),
        ];
        let at = |h: &ParamScalar| h.substitute(&asg).constant().expect("all variables assigned");
        prop_assert_eq!(at(&f.times(&g)), &at(&f) * &at(&g));
        prop_assert_eq!(at(&f.plus(&g)), &at(&f) + &at(&g));
    }
}

#[test]
fn pythagorean_points() {
    for (n, d) in [(0, 1), (1, 2), (3, 7), (-5, 3)] {
        let (c, s) = circle_point(n, d);
        assert!((&(&c * &c) + &(&s * &s)).is_one());
    }
}
