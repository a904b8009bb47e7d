mod common;

use common::{exact_chains, instance};
use fibcurv::catalog::{transfers, witnesses_for, ChainDef};
use fibcurv::chain::{Chain, ExactChain};
use fibcurv::criteria::{
    check_symmetric_subalgebra, m_is_abelian, rank_separation_certificate, transfer_witness, verify_witness,
    TransferError,
};
use fibcurv::linalg::solve;
use fibcurv::param::{Var, P, PHI, Q, THETA};
use fibcurv::verdict::{classify, classify_exact, family_point, witness_pair, ChainVerdict, Classification, Evidence, Tag};
use fibcurv::{ExactElem, Scalar};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

// Raw complex matrices as (re, im) rows, for checks that avoid the library's
// projection code.
type Raw = Vec<Vec<(Scalar, Scalar)>>;

fn raw(x: &ExactElem) -> Raw {
    let n = x.size();
    (0..n).map(|i| (0..n).map(|j| (x.get(i, j).re.clone(), x.get(i, j).im.clone())).collect()).collect()
}

fn raw_mul(a: &Raw, b: &Raw) -> Raw {
    let n = a.len();
    let mut out = vec![vec![(Scalar::zero(), Scalar::zero()); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let ((ar, ai), (br, bi)) = (&a[i][k], &b[k][j]);
                out[i][j].0 += &(&(ar * br) - &(ai * bi));
                out[i][j].1 += &(&(ar * bi) + &(ai * br));
            }
        }
    }
    out
}

fn raw_sub(a: &Raw, b: &Raw) -> Raw {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| (&x.0 - &y.0, &x.1 - &y.1)).collect())
        .collect()
}

fn raw_bracket(a: &Raw, b: &Raw) -> Raw {
    raw_sub(&raw_mul(a, b), &raw_mul(b, a))
}

fn raw_is_zero(a: &Raw) -> bool {
    a.iter().flatten().all(|(r, i)| r.is_zero() && i.is_zero())
}

/// `-Re tr(AB)`.
fn raw_inner(a: &Raw, b: &Raw) -> Scalar {
    let n = a.len();
    let mut acc = Scalar::zero();
    for i in 0..n {
        for k in 0..n {
            let ((ar, ai), (br, bi)) = (&a[i][k], &b[k][i]);
            acc -= &(&(ar * br) - &(ai * bi));
        }
    }
    acc
}

fn raw_combo(c: &[Scalar], basis: &[Raw]) -> Raw {
    let n = basis[0].len();
    let mut out = vec![vec![(Scalar::zero(), Scalar::zero()); n]; n];
    for (k, b) in c.iter().zip(basis) {
        for i in 0..n {
            for j in 0..n {
                out[i][j].0 += &(k * &b[i][j].0);
                out[i][j].1 += &(k * &b[i][j].1);
            }
        }
    }
    out
}

/// Orthogonal projection onto the span of `basis` via the normal equations.
fn raw_proj(basis: &[ExactElem], x: &Raw) -> Raw {
    let n = x.len();
    if basis.is_empty() {
        return vec![vec![(Scalar::zero(), Scalar::zero()); n]; n];
    }
    let b: Vec<Raw> = basis.iter().map(raw).collect();
    let gram: Vec<Vec<Scalar>> = b.iter().map(|u| b.iter().map(|v| raw_inner(u, v)).collect()).collect();
    let rhs: Vec<Scalar> = b.iter().map(|u| raw_inner(u, x)).collect();
    raw_combo(&solve(&gram, &rhs).expect("independent basis"), &b)
}

fn raw_m_part(c: &ExactChain, x: &Raw) -> Raw {
    raw_sub(&raw_proj(&c.k.basis, x), &raw_proj(&c.h.basis, x))
}

/// Re-checks a witness without the library's projections or brackets.
fn independent_check(c: &ExactChain, x: &ExactElem, y: &ExactElem, mm: &ExactElem) -> Result<(), String> {
    let (rx, ry) = (raw(x), raw(y));
    for (name, v) in [("X", &rx), ("Y", &ry)] {
        if !raw_is_zero(&raw_sub(&raw_proj(&c.g.basis, v), v)) {
            return Err(format!("{name} is not in g"));
        }
        if !raw_is_zero(&raw_proj(&c.h.basis, v)) {
            return Err(format!("{name} has an h-component"));
        }
    }
    if !raw_is_zero(&raw_bracket(&rx, &ry)) {
        return Err("[X, Y] is not zero".into());
    }
    let c_mm = raw_m_part(c, &raw_bracket(&raw_m_part(c, &rx), &raw_m_part(c, &ry)));
    if raw_is_zero(&c_mm) {
        return Err("[X^m, Y^m]^m vanishes".into());
    }
    if c_mm != raw(mm) {
        return Err("reported [X^m, Y^m]^m differs".into());
    }
    Ok(())
}

fn verdicts_at_instance() -> Vec<(&'static ChainDef, ExactChain, ChainVerdict)> {
    let p = instance();
    exact_chains()
        .into_iter()
        .map(|(d, c)| {
            let v = classify_exact(&c, family_point(d, &p).unwrap().as_ref());
            (d, c, v)
        })
        .collect()
}

#[test]
fn witnesses_survive_an_independent_check() {
    let mut checked = 0;
    for (_, c, v) in verdicts_at_instance() {
        if let Evidence::Witness { pair, .. } = &v.evidence {
            assert_eq!(v.tag, Tag::FailsWitness);
            independent_check(&c, &pair.x, &pair.y, &pair.mm_component).unwrap_or_else(|e| panic!("{}: {e}", c.id));
            checked += 1;
        } else {
            assert_ne!(v.tag, Tag::FailsWitness, "{}", c.id);
        }
    }
    assert_eq!(checked, 40, "witnessed chains at the instance");
    // exceptional points of the families
    for d in fibcurv::catalog::chains() {
        let Ok(Classification::Family(f)) = classify(d, &Default::default()) else { continue };
        for v in &f.exceptions {
            if let Evidence::Witness { pair, .. } = &v.evidence {
                let pt = v.point.as_ref().unwrap();
                let fibcurv::catalog::BuiltChain::Family(pc) = fibcurv::catalog::build_chain(d, &Default::default()).unwrap()
                else {
                    unreachable!()
                };
                let c = pc.instantiate(pt).unwrap();
                independent_check(&c, &pair.x, &pair.y, &pair.mm_component)
                    .unwrap_or_else(|e| panic!("{} at {pt}: {e}", c.id));
            }
        }
    }
}

fn instance_assignment() -> Vec<(Var, Scalar)> {
    let (c, s) = (Scalar::frac(3, 5), Scalar::frac(4, 5));
    vec![
        (Var::Cos(THETA), c.clone()),
        (Var::Sin(THETA), s.clone()),
        (Var::Cos(PHI), c),
        (Var::Sin(PHI), s),
        (Var::Free(P), Scalar::from_int(1)),
        (Var::Free(Q), Scalar::from_int(2)),
    ]
}

/// Stored witnesses of a chain, parameters set to the instance.
fn stored_pairs(id: &str) -> Vec<(ExactElem, ExactElem)> {
    let asg = instance_assignment();
    witnesses_for(id)
        .into_iter()
        .filter_map(|w| {
            let (x, y) = witness_pair(w).ok()?;
            Some((x.substitute(&asg).to_exact()?, y.substitute(&asg).to_exact()?))
        })
        .collect()
}

#[test]
fn positive_and_negative_evidence_exclude_each_other() {
    for (_, c, v) in verdicts_at_instance() {
        let positive = (!c.m.is_empty() && m_is_abelian(&c))
            || check_symmetric_subalgebra(&c)
            || rank_separation_certificate(&c).is_ok();
        let witnessed = stored_pairs(&c.id).iter().any(|(x, y)| verify_witness(&c, x, y).is_ok());
        assert!(!(positive && witnessed), "{}: certificate and witness", c.id);
        assert_eq!(v.tag.holds(), positive, "{}", c.id);
        if witnessed {
            assert_eq!(v.tag, Tag::FailsWitness, "{}", c.id);
        }
    }
}

fn permuted(c: &ExactChain, perms: &[Vec<usize>; 3]) -> ExactChain {
    let order = |b: &[ExactElem], p: &[usize]| p.iter().map(|&i| b[i].clone()).collect::<Vec<_>>();
    Chain::new(&c.id, order(&c.g.basis, &perms[0]), order(&c.k.basis, &perms[1]), order(&c.h.basis, &perms[2]))
        .unwrap()
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

#[test]
fn verdicts_ignore_scale_and_basis_order() {
    let p = instance();
    let scales = [Scalar::from_int(2), Scalar::frac(7, 3)];
    for (d, c, v) in verdicts_at_instance() {
        let pt = family_point(d, &p).unwrap();
        for s in &scales {
            let scaled = c.clone().with_scale(s.clone());
            assert_eq!(classify_exact(&scaled, pt.as_ref()).tag, v.tag, "{} at scale {s}", c.id);
        }
        let mut runner = TestRunner::new(Config { cases: 2, failure_persistence: None, ..Config::default() });
        let dims = (c.g.dim(), c.k.dim(), c.h.dim());
        runner
            .run(&(shuffled(dims.0), shuffled(dims.1), shuffled(dims.2)), |(a, b, h)| {
                let pc = permuted(&c, &[a, b, h]);
                prop_assert_eq!(classify_exact(&pc, pt.as_ref()).tag, v.tag);
                Ok(())
            })
            .unwrap_or_else(|e| panic!("{}: {e}", c.id));
    }
}

#[test]
fn monotone_transfer_over_all_chain_pairs() {
    let chains = exact_chains();
    let mut moved = 0;
    for (_, src) in &chains {
        let pairs: Vec<_> = stored_pairs(&src.id).into_iter().filter(|(x, y)| verify_witness(src, x, y).is_ok()).collect();
        for (x, y) in &pairs {
            for (_, tgt) in &chains {
                match transfer_witness(src, x, y, tgt) {
                    Ok(w) => {
                        assert!(verify_witness(tgt, &w.x, &w.y).is_ok());
                        moved += 1;
                    }
                    Err(TransferError::Rejected(e)) => panic!("{} -> {}: {e}", src.id, tgt.id),
                    Err(_) => {}
                }
            }
        }
    }
    // every pair transfers at least to its own chain
    assert!(moved > transfers().len(), "{moved}");
}
