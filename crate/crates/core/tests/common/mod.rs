#![allow(dead_code)]

use fibcurv::catalog::{build_chain, chains, pq_value, trig_value, BuiltChain, ChainDef, Params};
use fibcurv::chain::ExactChain;
use fibcurv::{Elem, ExactElem, Scalar};
use num::BigRational;
use proptest::prelude::*;

/// Family parameters used whenever a single instance is needed.
pub fn instance() -> Params {
    let (c, s) = (Scalar::frac(3, 5), Scalar::frac(4, 5));
    Params {
        theta: trig_value(c.clone(), s.clone()).unwrap(),
        phi: trig_value(c, s).unwrap(),
        pq: pq_value(1, 2).unwrap(),
    }
}

pub fn exact(def: &ChainDef, params: &Params) -> Option<ExactChain> {
    match build_chain(def, params).unwrap_or_else(|e| panic!("{}: {e}", def.id())) {
        BuiltChain::Exact(c) => Some(c),
        _ => None,
    }
}

/// Every catalog chain, families at [`instance`].
pub fn exact_chains() -> Vec<(&'static ChainDef, ExactChain)> {
    let p = instance();
    let out: Vec<_> = chains().iter().filter_map(|d| exact(d, &p).map(|c| (d, c))).collect();
    assert!(out.len() + 2 >= chains().len(), "only {} of {} chains are exact", out.len(), chains().len());
    out
}

/// Small rationals, and a quarter of the time `a + b√2 + c√3`.
pub fn coefficient() -> impl Strategy<Value = Scalar> {
    let surd = (-3i64..=3, -2i64..=2, -2i64..=2, 1i64..=3).prop_map(|(a, b, c, d)| {
        let r = |n: i64| BigRational::new(n.into(), d.into());
        Scalar::new(r(a), r(b), r(c), r(0))
    });
    let rational = (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Scalar::frac(n, d));
    prop_oneof![3 => rational, 1 => surd]
}

pub fn coefficients(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(coefficient(), n)
}

pub fn combo(c: &[Scalar], basis: &[ExactElem]) -> ExactElem {
    Elem::lin_comb(c, basis, basis[0].size())
}
