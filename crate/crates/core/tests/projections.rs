mod common;

use common::{coefficient, coefficients, combo, exact_chains};
use fibcurv::chain::{metric_gt, ExactChain, MetricError};
use fibcurv::linalg::{determinant, solve};
use fibcurv::{ExactElem, Scalar};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rayon::prelude::*;

fn for_each_chain(cases: u32, check: impl Fn(&ExactChain, &mut TestRunner) -> Result<(), String> + Sync) {
    let failures: Vec<String> = exact_chains()
        .par_iter()
        .filter_map(|(_, c)| {
            let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
            check(c, &mut runner).err().map(|e| format!("{}: {e}", c.id))
        })
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn splitting_of_random_elements() {
    for_each_chain(200, |c, runner| {
        let g = &c.g.basis;
        runner
            .run(&coefficients(g.len()), |co| {
                let x = combo(&co, g);
                let (h, m, s) = (c.proj_h(&x), c.m_part(&x), c.s_part(&x));
                prop_assert_eq!(&h.plus(&m).plus(&s), &x, "reconstruction");
                prop_assert_eq!(&c.proj_h(&h), &h);
                prop_assert_eq!(&c.m_part(&m), &m);
                prop_assert_eq!(&c.s_part(&s), &s);
                // m ⊥ h and s ⊥ k as subspaces, so the other projections vanish
                prop_assert!(c.h.basis.iter().all(|b| b.inner(&m).is_zero()), "m not orthogonal to h");
                prop_assert!(c.k.basis.iter().all(|b| b.inner(&s).is_zero()), "s not orthogonal to k");
                prop_assert!(c.k.contains(&h) && c.k.contains(&m), "h, m outside k");
                let parts = &(&h.inner(&h) + &m.inner(&m)) + &s.inner(&s);
                prop_assert_eq!(x.inner(&x), parts, "Pythagoras");
                Ok(())
            })
            .map_err(|e| e.to_string())
    });
}

/// Projection onto `span(basis)` for the inner product `scale * g0`,
/// solved from the normal equations.
fn projection(basis: &[ExactElem], scale: &Scalar, x: &ExactElem) -> ExactElem {
    if basis.is_empty() {
        return ExactElem::zero(x.size());
    }
    let ip = |a: &ExactElem, b: &ExactElem| scale * &a.inner(b);
    let gram: Vec<Vec<Scalar>> = basis.iter().map(|a| basis.iter().map(|b| ip(a, b)).collect()).collect();
    let rhs: Vec<Scalar> = basis.iter().map(|a| ip(a, x)).collect();
    combo(&solve(&gram, &rhs).expect("independent basis"), basis)
}

#[test]
fn projections_ignore_the_scale_of_the_metric() {
    let scales = [Scalar::one(), Scalar::from_int(2), Scalar::frac(7, 3)];
    for_each_chain(10, |c, runner| {
        let g = &c.g.basis;
        runner
            .run(&coefficients(g.len()), |co| {
                let x = combo(&co, g);
                for t in &scales {
                    let c2 = c.clone().with_scale(t.clone());
                    let h = projection(&c.h.basis, t, &x);
                    let k = projection(&c.k.basis, t, &x);
                    prop_assert_eq!(&c2.proj_h(&x), &h);
                    prop_assert_eq!(&c2.m_part(&x), &k.minus(&h));
                    prop_assert_eq!(&c2.s_part(&x), &x.minus(&k));
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    });
}

fn ts() -> [Scalar; 4] {
    [Scalar::from_int(-1), Scalar::zero(), Scalar::frac(1, 4), Scalar::frac(1, 2)]
}

#[test]
fn deformed_metric_is_an_inner_product() {
    for_each_chain(6, |c, runner| {
        let p = c.p_basis();
        let d = p.len();
        runner
            .run(&(coefficients(d), coefficients(d), coefficients(d), coefficient(), coefficient()), |(x, y, z, a, b)| {
                let (x, y, z) = (combo(&x, &p), combo(&y, &p), combo(&z, &p));
                for t in &ts() {
                    let g = |u: &ExactElem, v: &ExactElem| metric_gt(c, t, u, v).unwrap();
                    let ax_by = x.scale(&a).plus(&y.scale(&b));
                    prop_assert_eq!(g(&ax_by, &z), &(&a * &g(&x, &z)) + &(&b * &g(&y, &z)));
                    prop_assert_eq!(g(&x, &y), g(&y, &x));
                    if !x.is_zero() {
                        prop_assert_eq!(g(&x, &x).signum(), 1);
                    }
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    });
}

#[test]
fn deformed_metric_gram_is_positive_definite() {
    for_each_chain(1, |c, _| {
        let p = c.p_basis();
        for t in &ts() {
            let gram: Vec<Vec<Scalar>> =
                p.iter().map(|u| p.iter().map(|v| metric_gt(c, t, u, v).unwrap()).collect()).collect();
            for k in 1..=gram.len() {
                let minor: Vec<Vec<Scalar>> = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
                if determinant(&minor).signum() != 1 {
                    return Err(format!("t = {t}: leading minor {k} is not positive"));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn deformed_metric_domain() {
    let (_, c) = &exact_chains()[1];
    let x = c.p_basis()[0].clone();
    assert!(matches!(metric_gt(c, &Scalar::one(), &x, &x), Err(MetricError::OutOfRange(_))));
    assert!(matches!(metric_gt(c, &Scalar::from_int(3), &x, &x), Err(MetricError::OutOfRange(_))));
    if let Some(h) = c.h.basis.first() {
        assert_eq!(metric_gt(c, &Scalar::zero(), h, &x), Err(MetricError::NotInP));
    }
}
