//! Positive and negative certificates for the commuting-pair condition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{Elem, ExactElem, ParamElem};
use crate::chain::{Chain, ChainError, Coefficients, ExactChain, ParamChain};
use crate::param::{laplace_det, ParamScalar};
use crate::ring::Real;
use crate::scalar::{Cx, Scalar};

/// Nonzero `[b_i, b_j]^m` over pairs of the `m` spanning set.
pub fn symmetric_obstructions<R: Coefficients>(chain: &Chain<R>) -> Vec<(usize, usize, Elem<R>)> {
    let mut out = Vec::new();
    for i in 0..chain.m.len() {
        for j in i + 1..chain.m.len() {
            let c = chain.comp_m(&chain.m[i].bracket(&chain.m[j])).num;
            if !c.is_zero() {
                out.push((i, j, c));
            }
        }
    }
    out
}

/// `[m, m] ⊆ h`: every bracket of `m` has zero `m`- and `s`-components.
pub fn check_symmetric_subalgebra<R: Coefficients>(chain: &Chain<R>) -> bool {
    // brackets of m stay in k, so only the m-component can be nonzero
    symmetric_obstructions(chain).is_empty()
}

/// `[m, m]^m = 0`. Since `m ⊂ k`, this is the same condition as
/// [`check_symmetric_subalgebra`]; it is kept separate to mirror the two
/// ways the condition is usually stated.
pub fn check_mm_m_zero<R: Coefficients>(chain: &Chain<R>) -> bool {
    if m_is_abelian(chain) {
        return true;
    }
    symmetric_obstructions(chain).is_empty()
}

/// `[m, m] = 0`.
pub fn m_is_abelian<R: Coefficients>(chain: &Chain<R>) -> bool {
    (0..chain.m.len()).all(|i| (i + 1..chain.m.len()).all(|j| chain.m[i].bracket(&chain.m[j]).is_zero()))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessRejection {
    #[error("{0} is not in g")]
    NotInG(char),
    #[error("{0} has nonzero h-component {1}")]
    HComponent(char, String),
    #[error("[X, Y] is nonzero: {0}")]
    NotCommuting(String),
    #[error("[X^m, Y^m]^m vanishes identically")]
    MmComponentZero,
}

/// An accepted witness: `[X, Y] = 0` and `[X^m, Y^m]^m != 0`.
///
/// Over polynomial coefficients the stored components are numerators; the
/// denominators are Gram determinants and vanish nowhere on the family.
#[derive(Clone, Debug)]
pub struct WitnessPair<R: Real> {
    pub x: Elem<R>,
    pub y: Elem<R>,
    pub xm: Elem<R>,
    pub ym: Elem<R>,
    /// `[X^m, Y^m]`.
    pub mm_bracket: Elem<R>,
    /// `[X^m, Y^m]^m`.
    pub mm_component: Elem<R>,
}

pub type ExactWitness = WitnessPair<Scalar>;
pub type ParamWitness = WitnessPair<ParamScalar>;

pub fn verify_witness<R: Coefficients>(
    chain: &Chain<R>,
    x: &Elem<R>,
    y: &Elem<R>,
) -> Result<WitnessPair<R>, WitnessRejection> {
    for (name, v) in [('X', x), ('Y', y)] {
        if !chain.g.contains(v) {
            return Err(WitnessRejection::NotInG(name));
        }
        let hc = chain.comp_h(v).num;
        if !hc.is_zero() {
            return Err(WitnessRejection::HComponent(name, hc.to_string()));
        }
    }
    let b = x.bracket(y);
    if !b.is_zero() {
        return Err(WitnessRejection::NotCommuting(b.to_string()));
    }
    let xm_s = chain.comp_m(x);
    let ym_s = chain.comp_m(y);
    let mm = xm_s.num.bracket(&ym_s.num);
    let c = chain.comp_m(&mm);
    if c.num.is_zero() {
        return Err(WitnessRejection::MmComponentZero);
    }
    // undo the (unit) denominators where possible so exact values are literal
    let unscale = |e: Elem<R>, d: &R| -> Elem<R> {
        match d.try_inv() {
            Some(inv) => e.scale(&inv),
            None => e,
        }
    };
    let d2 = xm_s.den.times(&ym_s.den);
    let mm_bracket = unscale(mm, &d2);
    let mm_component = unscale(c.num, &d2.times(&c.den));
    Ok(WitnessPair {
        x: x.clone(),
        y: y.clone(),
        xm: unscale(xm_s.num, &xm_s.den),
        ym: unscale(ym_s.num, &ym_s.den),
        mm_bracket,
        mm_component,
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error("target h is not contained in source h")]
    HNotContained,
    #[error("source and target k differ")]
    KDiffers,
    #[error("source g is not contained in target g")]
    GNotContained,
    #[error("source matrices are larger than target matrices")]
    Size,
    #[error("witness rejected in the target chain: {0}")]
    Rejected(#[from] WitnessRejection),
}

/// Moves a witness from `(H, K, G)` to `(H', K, G')` with `H' ⊆ H` and
/// `G ⊆ G'`. Smaller matrices are padded into the upper-left block.
pub fn transfer_witness(
    source: &ExactChain,
    x: &ExactElem,
    y: &ExactElem,
    target: &ExactChain,
) -> Result<ExactWitness, TransferError> {
    let n = target.matrix_size();
    if source.matrix_size() > n {
        return Err(TransferError::Size);
    }
    let emb = |v: &ExactElem| v.embed(n);
    // H' ⊆ H
    let src_h: Vec<ExactElem> = source.h.basis.iter().map(emb).collect();
    if !crate::algebra::span_subset(&target.h.basis, &src_h) {
        return Err(TransferError::HNotContained);
    }
    let src_k: Vec<ExactElem> = source.k.basis.iter().map(emb).collect();
    if !crate::algebra::span_equal(&src_k, &target.k.basis) {
        return Err(TransferError::KDiffers);
    }
    let src_g: Vec<ExactElem> = source.g.basis.iter().map(emb).collect();
    if !src_g.iter().all(|b| target.g.contains(b)) {
        return Err(TransferError::GNotContained);
    }
    Ok(verify_witness(target, &emb(x), &emb(y))?)
}

/// How the "commuting implies dependent" hypothesis on `m` was verified.
#[derive(Clone, Debug, PartialEq)]
pub enum HypothesisRoute {
    /// `M^2 = -q(x) P` identically for `M = Σ x_i b_i`, with `q` a
    /// quadratic form and `P` fixed.
    QuaternionicSquare,
    /// `m` is a three-dimensional simple compact subalgebra.
    RankOneSimple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankCertificate {
    pub route: HypothesisRoute,
    /// Rank of every nonzero bracket of `m`.
    pub min_rank_m: usize,
    /// Largest rank of `[W, Z]^k` for `W, Z` in `s`.
    pub max_rank_s: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Inapplicable {
    #[error("commuting pairs in m need not be dependent: {0}")]
    Hypothesis(String),
    #[error("ranks overlap: brackets in m have rank {min_rank_m}, [W,Z]^k reaches {max_rank_s}")]
    RanksOverlap { min_rank_m: usize, max_rank_s: usize },
}

const M_VAR: u16 = 1000;
const W_VAR: u16 = 2000;
const Z_VAR: u16 = 3000;

fn generic_combination(basis: &[ExactElem], var0: u16) -> ParamElem {
    let n = basis[0].size();
    let coeffs: Vec<ParamScalar> = (0..basis.len()).map(|i| ParamScalar::free(var0 + i as u16)).collect();
    let lifted: Vec<ParamElem> = basis.iter().map(|b| b.lift()).collect();
    Elem::lin_comb(&coeffs, &lifted, n)
}

/// `M^2 = -q(x) P` with `P = -b_1^2`, checked as a polynomial identity.
/// Returns the rank of `P` when the identity holds.
pub fn quaternionic_square(m: &[ExactElem]) -> Option<usize> {
    if m.is_empty() {
        return None;
    }
    let p = m[0].mul(&m[0]).negated();
    let (idx, pv) = p.entries().iter().enumerate().find(|(_, x)| !x.is_zero())?;
    let mm = generic_combination(m, M_VAR);
    let sq = mm.mul(&mm);
    let entry = &sq.entries()[idx];
    // q(x) = -(M^2)_idx / P_idx; P is real for real or complex units alike
    if !pv.im.is_zero() || !entry.im.is_zero() {
        return None;
    }
    let q = entry.re.negated().scale(&pv.re.inv().ok()?);
    let residual = sq.plus(&p.lift().scale(&q));
    residual.is_zero().then(|| p.rank())
}

/// Killing form of a subalgebra given by `basis`, in that basis.
fn killing_form(basis: &[ExactElem]) -> Option<Vec<Vec<Scalar>>> {
    let d = basis.len();
    // ad matrices in basis coordinates
    let mut ads = Vec::with_capacity(d);
    for x in basis {
        let mut cols = Vec::with_capacity(d);
        for y in basis {
            cols.push(crate::algebra::coordinates_in(basis, &x.bracket(y))?);
        }
        // ad_x[r][c] = coordinate r of [x, b_c]
        let adx: Vec<Vec<Scalar>> = (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect();
        ads.push(adx);
    }
    let mut kf = vec![vec![Scalar::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut tr = Scalar::zero();
            for r in 0..d {
                for c in 0..d {
                    if !ads[i][r][c].is_zero() && !ads[j][c][r].is_zero() {
                        tr += &(&ads[i][r][c] * &ads[j][c][r]);
                    }
                }
            }
            kf[i][j] = tr;
        }
    }
    Some(kf)
}

fn negative_definite(a: &[Vec<Scalar>]) -> bool {
    // leading principal minors of -a are positive
    (1..=a.len()).all(|k| {
        let sub: Vec<Vec<Scalar>> = a[..k].iter().map(|r| r[..k].iter().map(|x| -x).collect()).collect();
        crate::linalg::determinant(&sub).signum() > 0
    })
}

/// Three-dimensional, bracket-closed, perfect, with negative definite
/// Killing form: a copy of su(2), on which every nonzero element is
/// conjugate to a multiple of any fixed one.
pub fn is_rank_one_simple(m: &[ExactElem]) -> bool {
    if m.len() != 3 {
        return false;
    }
    let brackets: Vec<ExactElem> = vec![m[0].bracket(&m[1]), m[1].bracket(&m[2]), m[0].bracket(&m[2])];
    if !brackets.iter().all(|b| crate::algebra::span_contains(m, b)) {
        return false;
    }
    if crate::algebra::span_rank(&brackets) != 3 {
        return false;
    }
    killing_form(m).is_some_and(|k| negative_definite(&k))
}

/// Pfaffian of a real skew matrix by expansion along the first row.
fn pfaffian(a: &[Vec<ParamScalar>], idx: &[usize]) -> ParamScalar {
    if idx.is_empty() {
        return ParamScalar::one();
    }
    if idx.len() % 2 == 1 {
        return ParamScalar::zero();
    }
    let i0 = idx[0];
    let mut acc = ParamScalar::zero();
    for (k, &j) in idx.iter().enumerate().skip(1) {
        if a[i0][j].is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != i0 && x != j).collect();
        let t = a[i0][j].times(&pfaffian(a, &rest));
        acc = if k % 2 == 1 { acc.plus(&t) } else { acc.minus(&t) };
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Every principal minor of order `k` vanishes identically (for real skew
/// matrices, every principal Pfaffian of order `k`, `k` even).
fn principal_vanish(b: &ParamElem, k: usize) -> bool {
    let n = b.size();
    if k > n {
        return true;
    }
    if b.is_real() {
        if k % 2 == 1 {
            return principal_vanish(b, k + 1);
        }
        let a: Vec<Vec<ParamScalar>> =
            (0..n).map(|i| (0..n).map(|j| b.get(i, j).re.clone()).collect()).collect();
        return subsets(n, k).iter().all(|s| pfaffian(&a, s).is_zero());
    }
    // anti-Hermitian: use the realification, whose rank is twice as large
    let mut re = vec![vec![ParamScalar::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let x: &Cx<ParamScalar> = b.get(i, j);
            re[2 * i][2 * j] = x.re.clone();
            re[2 * i][2 * j + 1] = x.im.negated();
            re[2 * i + 1][2 * j] = x.im.clone();
            re[2 * i + 1][2 * j + 1] = x.re.clone();
        }
    }
    // a rank bound r for b means rank <= 2r for the realification; check
    // all minors of order 2k - 1 (enough since the realification is normal)
    let order = 2 * k - 1;
    subsets(2 * n, order).iter().all(|rows| {
        subsets(2 * n, order).iter().all(|cols| {
            let sub: Vec<Vec<ParamScalar>> =
                rows.iter().map(|&r| cols.iter().map(|&c| re[r][c].clone()).collect()).collect();
            laplace_det(&sub).is_zero()
        })
    })
}

/// Lower bound on the rank of `[W, Z]^k` for `W, Z` in `s`, from seeded
/// random integer samples.
fn sampled_rank_s(chain: &ExactChain) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = chain.matrix_size();
    let sample = |rng: &mut ChaCha8Rng| -> ExactElem {
        let c: Vec<Scalar> = (0..chain.s.len()).map(|_| Scalar::from_int(rng.gen_range(-9..=9))).collect();
        Elem::lin_comb(&c, &chain.s, n)
    };
    let mut r0 = 0;
    for _ in 0..6 {
        let w = sample(&mut rng);
        let z = sample(&mut rng);
        r0 = r0.max(chain.proj_k(&w.bracket(&z)).rank());
    }
    r0
}

/// Largest rank of `[W, Z]^k` over `W, Z` in `s`: the sampled lower bound,
/// confirmed as an upper bound by identically vanishing minors.
pub fn max_bracket_rank_s(chain: &ExactChain) -> Result<usize, ChainError> {
    let pc = ParamChain::from_exact(chain)?;
    let w = generic_combination(&chain.s, W_VAR);
    let z = generic_combination(&chain.s, Z_VAR);
    let bk = pc.k.proj(&w.bracket(&z));
    let mut r = sampled_rank_s(chain);
    while !principal_vanish(&bk.num, r + 1) {
        r += 1;
    }
    Ok(r)
}

/// Rank separation: if commuting pairs in `m` are dependent, every nonzero
/// bracket of `m` has rank `r_m`, and every `[W, Z]^k` has rank below
/// `r_m`, the condition holds.
pub fn rank_separation_certificate(chain: &ExactChain) -> Result<RankCertificate, Inapplicable> {
    let m = &chain.m;
    let closed = m
        .iter()
        .enumerate()
        .all(|(i, a)| m[i + 1..].iter().all(|b| crate::algebra::span_contains(m, &a.bracket(b))));
    if !closed {
        return Err(Inapplicable::Hypothesis("m is not a subalgebra".into()));
    }
    let (route, min_rank_m) = if let Some(r) = quaternionic_square(m) {
        (HypothesisRoute::QuaternionicSquare, r)
    } else if is_rank_one_simple(m) {
        (HypothesisRoute::RankOneSimple, m[0].rank())
    } else {
        return Err(Inapplicable::Hypothesis(
            "neither a quaternionic square identity nor a copy of su(2)".into(),
        ));
    };
    let lower = sampled_rank_s(chain);
    if lower >= min_rank_m {
        return Err(Inapplicable::RanksOverlap { min_rank_m, max_rank_s: lower });
    }
    let max_rank_s = max_bracket_rank_s(chain).map_err(|e| Inapplicable::Hypothesis(e.to_string()))?;
    if max_rank_s >= min_rank_m {
        return Err(Inapplicable::RanksOverlap { min_rank_m, max_rank_s });
    }
    Ok(RankCertificate { route, min_rank_m, max_rank_s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_chain, find_chain, trig_value, BuiltChain, Params};
    use crate::verdict::exact_witness_pair;

    fn exact(id: &str) -> ExactChain {
        match build_chain(find_chain(id).unwrap(), &Params::default()).unwrap() {
            BuiltChain::Exact(c) => c,
            _ => panic!("{id} is not exact"),
        }
    }

    fn at_theta(id: &str, c: i64, s: i64, d: i64) -> ExactChain {
        let theta = trig_value(Scalar::frac(c, d), Scalar::frac(s, d)).unwrap();
        match build_chain(find_chain(id).unwrap(), &Params { theta, ..Params::default() }).unwrap() {
            BuiltChain::Exact(c) => c,
            _ => panic!(),
        }
    }

    fn stored(id: &str) -> (ExactElem, ExactElem) {
        let w = crate::catalog::witnesses_for(id)[0];
        exact_witness_pair(w).unwrap()
    }

    #[test]
    fn certificate_ranks() {
        let c = rank_separation_certificate(&exact("so5/so4/su2")).unwrap();
        assert_eq!((c.min_rank_m, c.max_rank_s), (4, 2));
        assert_eq!(c.route, HypothesisRoute::QuaternionicSquare);
    }

    #[test]
    fn certificate_inapplicable_on_delta_theta() {
        for id in ["so5/so4/delta_theta", "g2/so4/delta_theta", "so6/so4/delta_theta"] {
            assert!(rank_separation_certificate(&at_theta(id, 3, 4, 5)).is_err(), "{id}");
        }
        let e = rank_separation_certificate(&exact("g2/so4/su2")).unwrap_err();
        assert_eq!(e, Inapplicable::RanksOverlap { min_rank_m: 6, max_rank_s: 6 });
    }

    #[test]
    fn symmetric_checks() {
        assert!(check_symmetric_subalgebra(&exact("so5/so4/so3")));
        assert!(symmetric_obstructions(&exact("so5/so4/so3")).is_empty());
        // the su2 factors of so4 in g2 have different lengths, so the
        // diagonal is not a symmetric subalgebra for the induced metric
        assert!(!symmetric_obstructions(&exact("g2/so4/so3")).is_empty());
        assert!(m_is_abelian(&exact("su3/su21/su2")));
        assert!(check_mm_m_zero(&exact("su3/su21/su2")));
        assert!(!check_mm_m_zero(&exact("g2/so4/su2~")));
    }

    #[test]
    fn witness_values() {
        let c = exact("g2/so4/su2~");
        let (x, y) = stored("g2/so4/su2~");
        let w = verify_witness(&c, &x, &y).unwrap();
        let a = crate::catalog::ambient("g2").unwrap();
        let z2 = a.parse("-2 Z2").unwrap().to_exact().unwrap();
        assert_eq!(w.mm_bracket, z2);
        assert_eq!(w.mm_component, z2);

        let c = at_theta("so5/so4/delta_theta", 3, 4, 5);
        let theta = crate::locus::Point::Trig { id: crate::param::THETA, c: Scalar::frac(3, 5), s: Scalar::frac(4, 5) };
        let (x, y) = crate::verdict::witness_pair(crate::catalog::witnesses_for("so5/so4/delta_theta")[0]).unwrap();
        let asg = theta.assignment();
        let (x, y) = (x.substitute(&asg).to_exact().unwrap(), y.substitute(&asg).to_exact().unwrap());
        assert!(verify_witness(&c, &x, &y).is_ok());
    }

    #[test]
    fn witness_rejections() {
        let c = exact("g2/so4/su2~");
        let (x, y) = stored("g2/so4/su2~");
        let a = crate::catalog::ambient("g2").unwrap();
        let el = |s: &str| a.parse(s).unwrap().to_exact().unwrap();
        assert!(matches!(verify_witness(&c, &x, &x.plus(&el("X4"))), Err(WitnessRejection::NotCommuting(_))));
        assert!(matches!(verify_witness(&c, &x.plus(&el("Y1")), &y), Err(WitnessRejection::HComponent('X', _))));
        assert_eq!(verify_witness(&c, &x, &x).unwrap_err(), WitnessRejection::MmComponentZero);
        let symmetric = exact("so5/so4/so3");
        let e = |i, j| crate::algebra::e(5, i, j);
        assert!(verify_witness(&symmetric, &e(1, 5), &e(2, 5)).is_err());
    }

    #[test]
    fn transfers() {
        let src = exact("g2/su3/su2");
        let (x, y) = stored("g2/su3/su2");
        let w = transfer_witness(&src, &x, &y, &exact("g2/su3/so2")).unwrap();
        assert!(verify_witness(&exact("g2/su3/so2"), &w.x, &w.y).is_ok());
        assert_eq!(transfer_witness(&src, &x, &y, &exact("g2/so4/su2~")).unwrap_err(), TransferError::HNotContained);
        assert_eq!(transfer_witness(&src, &x, &y, &exact("g2/u2/su2")).unwrap_err(), TransferError::KDiffers);
    }
}
