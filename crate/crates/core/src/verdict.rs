//! Classification of catalog chains: positive certificates first, then
//! stored and transferred witnesses, otherwise undetermined.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{ExactElem, ParamElem};
use crate::catalog::{
    self, build_chain, cited, exceptions_for, find_chain, parse_point, transfers_for, witnesses, BuiltChain, CatalogError,
    ChainDef, ParamValue, Params, WitnessDef,
};
use crate::param::{PHI, THETA};
use crate::chain::{exact_basis, ChainError, Coefficients, ExactChain, ParamChain};
use crate::criteria::{
    check_symmetric_subalgebra, m_is_abelian, rank_separation_certificate, transfer_witness, verify_witness,
    ExactWitness, ParamWitness, RankCertificate,
};
use crate::locus::{Family, Locus, Point};
use crate::chain::Chain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    HoldsSymmetric,
    HoldsMMZero,
    HoldsCertificate,
    FailsWitness,
    Undetermined,
}

impl Tag {
    pub const ALL: [Tag; 5] =
        [Tag::HoldsSymmetric, Tag::HoldsMMZero, Tag::HoldsCertificate, Tag::FailsWitness, Tag::Undetermined];

    pub fn name(self) -> &'static str {
        match self {
            Tag::HoldsSymmetric => "HoldsSymmetric",
            Tag::HoldsMMZero => "HoldsMMZero",
            Tag::HoldsCertificate => "HoldsCertificate",
            Tag::FailsWitness => "FailsWitness",
            Tag::Undetermined => "Undetermined",
        }
    }

    pub fn parse(s: &str) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn holds(self) -> bool {
        matches!(self, Tag::HoldsSymmetric | Tag::HoldsMMZero | Tag::HoldsCertificate)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a witness came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    /// Index into [`catalog::witnesses`].
    Stored(usize),
    /// A stored witness of another chain, moved along a smaller `h`.
    Transfer { source: String, index: usize },
}

#[derive(Clone, Debug)]
pub enum Evidence {
    /// `[m, m] ⊆ h`; `m_dim` is zero when `h = k`.
    Symmetric { m_dim: usize },
    /// `m` is abelian.
    Abelian { m_dim: usize },
    Certificate(RankCertificate),
    Witness { origin: Origin, pair: ExactWitness },
    /// No certificate. `cited` is set when an external argument covers the chain.
    Open { reason: String, cited: Option<&'static str> },
}

#[derive(Clone, Debug)]
pub struct ChainVerdict {
    pub chain: String,
    pub point: Option<Point>,
    pub tag: Tag,
    pub evidence: Evidence,
}

/// A stored witness accepted for a whole family, with the parameter values
/// where its `m`-component vanishes.
#[derive(Clone, Debug)]
pub struct FamilyWitness {
    pub index: usize,
    pub pair: ParamWitness,
    pub locus: Locus,
}

#[derive(Clone, Debug)]
pub struct FamilyVerdict {
    pub chain: String,
    pub family: Family,
    /// Verdict off the exceptional locus.
    pub tag: Tag,
    pub witnesses: Vec<FamilyWitness>,
    /// Where no family witness applies.
    pub exceptional: Locus,
    /// Exact verdicts at each exceptional point.
    pub exceptions: Vec<ChainVerdict>,
    /// Every parameter value has a verdict other than `Undetermined`.
    pub covers_all: bool,
}

#[derive(Clone, Debug)]
pub enum Classification {
    Single(ChainVerdict),
    Family(FamilyVerdict),
}

impl Classification {
    pub fn chain(&self) -> &str {
        match self {
            Classification::Single(v) => &v.chain,
            Classification::Family(f) => &f.chain,
        }
    }

    pub fn tag(&self) -> Tag {
        match self {
            Classification::Single(v) => v.tag,
            Classification::Family(f) => f.tag,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerdictError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("{0}: exceptional points listed in the catalog do not match the computed locus {1}")]
    ExceptionMismatch(String, String),
}

/// The pair `(X, Y)` of a stored witness, unparsed parameters left symbolic.
pub fn witness_pair(def: &WitnessDef) -> Result<(ParamElem, ParamElem), CatalogError> {
    let g = def.chain.split('/').next().unwrap_or_default();
    let a = catalog::ambient(g)?;
    let x = a.parse(def.xm)?.plus(&a.parse(def.xs)?);
    let y = a.parse(def.ym)?.plus(&a.parse(def.ys)?);
    Ok((x, y))
}

pub fn exact_witness_pair(def: &WitnessDef) -> Result<(ExactElem, ExactElem), CatalogError> {
    let (x, y) = witness_pair(def)?;
    let ex = exact_basis(&[x, y]).map_err(CatalogError::Chain)?;
    Ok((ex[0].clone(), ex[1].clone()))
}

fn stored_indices(id: &str) -> Vec<usize> {
    witnesses().iter().enumerate().filter(|(_, w)| w.chain == id).map(|(i, _)| i).collect()
}

fn positive<R: Coefficients>(chain: &Chain<R>) -> Option<(Tag, Evidence)> {
    let m_dim = chain.m.len();
    if m_dim > 0 && m_is_abelian(chain) {
        return Some((Tag::HoldsMMZero, Evidence::Abelian { m_dim }));
    }
    // for non-abelian m the two conditions coincide, see `check_mm_m_zero`
    if check_symmetric_subalgebra(chain) {
        return Some((Tag::HoldsSymmetric, Evidence::Symmetric { m_dim }));
    }
    None
}

/// Verdict for a non-parametric chain. Stored evidence is looked up by the
/// chain ID; `point` selects transfers recorded for particular parameters.
pub fn classify_exact(chain: &ExactChain, point: Option<&Point>) -> ChainVerdict {
    let id = chain.id.clone();
    let verdict = |tag, evidence| ChainVerdict { chain: id.clone(), point: point.cloned(), tag, evidence };
    if let Some((tag, ev)) = positive(chain) {
        return verdict(tag, ev);
    }
    let inapplicable = match rank_separation_certificate(chain) {
        Ok(cert) => return verdict(Tag::HoldsCertificate, Evidence::Certificate(cert)),
        Err(e) => e,
    };
    for i in stored_indices(&id) {
        let Some((x, y)) = witness_at(&witnesses()[i], point) else { continue };
        if let Ok(pair) = verify_witness(chain, &x, &y) {
            return verdict(Tag::FailsWitness, Evidence::Witness { origin: Origin::Stored(i), pair });
        }
    }
    for t in transfers_for(&id) {
        if !transfer_applies(t, chain, point) {
            continue;
        }
        if let Some((index, pair)) = try_transfer(t.source, chain) {
            let origin = Origin::Transfer { source: t.source.into(), index };
            return verdict(Tag::FailsWitness, Evidence::Witness { origin, pair });
        }
    }
    verdict(
        Tag::Undetermined,
        Evidence::Open { reason: inapplicable.to_string(), cited: cited(&id).map(|c| c.note) },
    )
}

/// A stored witness, with family parameters set to `point` when given.
fn witness_at(def: &WitnessDef, point: Option<&Point>) -> Option<(ExactElem, ExactElem)> {
    let Some(pt) = point else { return exact_witness_pair(def).ok() };
    let (x, y) = witness_pair(def).ok()?;
    let asg = pt.assignment();
    Some((x.substitute(&asg).to_exact()?, y.substitute(&asg).to_exact()?))
}

fn transfer_applies(t: &catalog::TransferDef, chain: &ExactChain, point: Option<&Point>) -> bool {
    if t.at.is_empty() {
        return point.is_none();
    }
    let Some(pt) = point else { return false };
    let fam = match pt {
        Point::Trig { id, .. } => Family::Trig(*id),
        Point::Projective { p_var, q_var, .. } => Family::Projective(*p_var, *q_var),
        Point::Affine { var, .. } => Family::Affine(*var),
    };
    let _ = chain;
    t.at.iter().any(|s| parse_point(fam, s).map(|p| &p == pt).unwrap_or(false))
}

/// First stored witness of `source` that verifies there and transfers to `target`.
pub fn try_transfer(source: &str, target: &ExactChain) -> Option<(usize, ExactWitness)> {
    let def = find_chain(source).ok()?;
    let BuiltChain::Exact(src) = build_chain(def, &Params::default()).ok()? else {
        return None;
    };
    for i in stored_indices(source) {
        let Ok((x, y)) = exact_witness_pair(&witnesses()[i]) else { continue };
        if verify_witness(&src, &x, &y).is_err() {
            continue;
        }
        if let Ok(pair) = transfer_witness(&src, &x, &y, target) {
            return Some((i, pair));
        }
    }
    None
}

/// Verdict for a one-parameter family, with every exceptional point
/// classified exactly.
pub fn classify_family(chain: &ParamChain) -> Result<FamilyVerdict, VerdictError> {
    let family = chain.family()?;
    let id = chain.id.clone();
    if let Some((tag, _)) = positive(chain) {
        return Ok(FamilyVerdict {
            chain: id,
            family,
            tag,
            witnesses: vec![],
            exceptional: Locus::empty(family),
            exceptions: vec![],
            covers_all: true,
        });
    }
    let mut accepted = Vec::new();
    for i in stored_indices(&id) {
        let (x, y) = witness_pair(&witnesses()[i])?;
        let Ok(pair) = verify_witness(chain, &x, &y) else { continue };
        let polys: Vec<_> =
            pair.mm_component.entries().iter().flat_map(|e| [e.re.clone(), e.im.clone()]).collect();
        let locus = Locus::of(family, &polys).map_err(ChainError::from)?;
        accepted.push(FamilyWitness { index: i, pair, locus });
    }
    if accepted.is_empty() {
        return Ok(FamilyVerdict {
            chain: id,
            family,
            tag: Tag::Undetermined,
            witnesses: vec![],
            exceptional: Locus::of(family, &[]).map_err(ChainError::from)?,
            exceptions: vec![],
            covers_all: false,
        });
    }
    let exceptional = accepted[1..].iter().fold(accepted[0].locus.clone(), |acc, w| acc.intersect(&w.locus));
    let listed: Vec<Point> = match exceptions_for(&id) {
        Some(e) => e.points.iter().map(|s| parse_point(family, s)).collect::<Result<_, _>>()?,
        None => vec![],
    };
    let complete = exceptional.point_count() == Some(listed.len()) && listed.iter().all(|p| exceptional.contains(p));
    if !complete {
        return Err(VerdictError::ExceptionMismatch(id, exceptional.to_string()));
    }
    let mut exceptions = Vec::new();
    for pt in &listed {
        let inst = chain.instantiate(pt)?;
        exceptions.push(classify_exact(&inst, Some(pt)));
    }
    let covers_all = exceptions.iter().all(|v| v.tag != Tag::Undetermined);
    Ok(FamilyVerdict { chain: id, family, tag: Tag::FailsWitness, witnesses: accepted, exceptional, exceptions, covers_all })
}

/// Verdict for a constant chain whose coefficients leave the exact field;
/// only the symmetric tests are available.
pub fn classify_numeric(chain: &ParamChain) -> ChainVerdict {
    let (tag, evidence) = positive(chain).unwrap_or((
        Tag::Undetermined,
        Evidence::Open { reason: "coefficients outside Q(√2, √3)".into(), cited: None },
    ));
    ChainVerdict { chain: chain.id.clone(), point: None, tag, evidence }
}

/// The family point fixed by `params`, when they instantiate a family chain.
pub fn family_point(def: &ChainDef, params: &Params) -> Result<Option<Point>, VerdictError> {
    let BuiltChain::Family(pc) = build_chain(def, &Params::default())? else { return Ok(None) };
    let pt = match (pc.family()?, &params.theta, &params.phi, &params.pq) {
        (Family::Trig(id), ParamValue::Trig(c, s), _, _) if id == THETA => Point::Trig { id, c: c.clone(), s: s.clone() },
        (Family::Trig(id), _, ParamValue::Trig(c, s), _) if id == PHI => Point::Trig { id, c: c.clone(), s: s.clone() },
        (Family::Projective(p_var, q_var), _, _, ParamValue::Pair(p, q)) => {
            Point::Projective { p_var, q_var, p: p.clone(), q: q.clone() }
        }
        _ => return Ok(None),
    };
    Ok(Some(pt))
}

pub fn classify(def: &ChainDef, params: &Params) -> Result<Classification, VerdictError> {
    Ok(match build_chain(def, params)? {
        BuiltChain::Exact(c) => Classification::Single(classify_exact(&c, family_point(def, params)?.as_ref())),
        BuiltChain::Family(c) => Classification::Family(classify_family(&c)?),
        BuiltChain::Numeric(c) => Classification::Single(classify_numeric(&c)),
    })
}

/// Every catalog chain with default parameters, in catalog order.
pub fn classify_all() -> Vec<Result<Classification, VerdictError>> {
    catalog::chains().par_iter().map(|d| classify(d, &Params::default())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    fn verdict(id: &str) -> Classification {
        classify(find_chain(id).unwrap(), &Params::default()).unwrap()
    }

    #[test]
    fn so5_su2_certificate() {
        let Classification::Single(v) = verdict("so5/so4/su2") else { panic!() };
        assert_eq!(v.tag, Tag::HoldsCertificate);
        let Evidence::Certificate(c) = v.evidence else { panic!() };
        assert_eq!((c.min_rank_m, c.max_rank_s), (4, 2));
    }

    #[test]
    fn tilde_su2_fails() {
        let Classification::Single(v) = verdict("g2/so4/su2~") else { panic!() };
        assert_eq!(v.tag, Tag::FailsWitness);
    }

    #[test]
    fn symmetric_and_abelian() {
        assert_eq!(verdict("so5/so4/so3").tag(), Tag::HoldsSymmetric);
        assert_eq!(verdict("su3/su21/su2").tag(), Tag::HoldsMMZero);
    }

    #[test]
    fn pq_family_split() {
        let Classification::Family(f) = verdict("su3/su21/delta_pq") else { panic!() };
        assert_eq!(f.tag, Tag::FailsWitness);
        assert_eq!(f.exceptions.len(), 1);
        assert_eq!(f.exceptions[0].tag, Tag::HoldsSymmetric);
        assert!(f.covers_all);
    }

    #[test]
    fn family_instances() {
        let def = find_chain("so5/so4/delta_theta").unwrap();
        let theta = catalog::trig_value(Scalar::frac(3, 5), Scalar::frac(4, 5)).unwrap();
        let v = classify(def, &Params { theta, ..Params::default() }).unwrap();
        assert_eq!(v.tag(), Tag::FailsWitness);

        let def = find_chain("su3/su21/delta_pq").unwrap();
        let at = |p, q| classify(def, &Params { pq: catalog::pq_value(p, q).unwrap(), ..Params::default() }).unwrap().tag();
        assert_eq!(at(1, 2), Tag::FailsWitness);
        assert_eq!(at(-1, 1), Tag::HoldsSymmetric);

        // the transfer is recorded only for sin theta = 0
        let def = find_chain("so6/so3so3/delta_theta").unwrap();
        let theta = catalog::trig_value(Scalar::from_int(-1), Scalar::zero()).unwrap();
        let Classification::Single(v) = classify(def, &Params { theta, ..Params::default() }).unwrap() else { panic!() };
        assert!(matches!(v.evidence, Evidence::Witness { origin: Origin::Transfer { .. }, .. }));
    }

    #[test]
    fn transfer_to_smaller_h() {
        let Classification::Single(v) = verdict("g2/su3/so2") else { panic!() };
        let Evidence::Witness { origin, .. } = v.evidence else { panic!() };
        assert!(matches!(origin, Origin::Transfer { .. }));
    }
}
