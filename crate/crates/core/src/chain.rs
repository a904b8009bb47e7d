//! Chains `h ⊂ k ⊂ g` with their orthogonal splittings `k = h + m` and
//! `g = k + s`, and exact projections onto each summand.
//!
//! Projections never normalise a basis. A subspace stores the adjugate and
//! determinant of its Gram matrix, so over polynomial coefficients the
//! projection of `X` is a numerator with a known denominator.

use thiserror::Error;

use crate::algebra::{gram, AlgebraError, Elem, ExactElem, ParamElem};
use crate::linalg;
use crate::locus::{Family, Locus, LocusError, Point};
use crate::param::ParamScalar;
use crate::ring::Real;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("{0} is not a subalgebra: [{1}, {2}] leaves the span")]
    NotSubalgebra(String, usize, usize),
    #[error("{0} is not contained in {1}")]
    NotContained(String, String),
    #[error("basis of {0} is linearly dependent")]
    Dependent(String),
    #[error("basis of {0} is not skew-Hermitian")]
    NotCompact(String),
    #[error("k must be a proper subalgebra of g")]
    NotProper,
    #[error("matrix sizes differ")]
    SizeMismatch,
    #[error("parameters left after substitution")]
    StillParametric,
    #[error("parameter value {0} is not a valid point")]
    InvalidPoint(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Locus(#[from] LocusError),
}

/// Value `num / den`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaled<R: Real> {
    pub num: Elem<R>,
    pub den: R,
}

impl Scaled<Scalar> {
    pub fn value(&self) -> ExactElem {
        if self.den.is_one() {
            self.num.clone()
        } else {
            self.num.scale(&self.den.inv().expect("nonzero denominator"))
        }
    }
}

/// Which coefficients admit a greedy choice of independent vectors.
pub trait Coefficients: Real {
    /// Indices of vectors forming a spanning subset; independent whenever
    /// that can be decided.
    fn spanning_subset(vs: &[Elem<Self>]) -> Vec<usize>;
}

impl Coefficients for Scalar {
    fn spanning_subset(vs: &[Elem<Self>]) -> Vec<usize> {
        linalg::independent_subset(&vs.iter().map(|v| v.coords()).collect::<Vec<_>>())
    }
}

impl Coefficients for ParamScalar {
    fn spanning_subset(vs: &[Elem<Self>]) -> Vec<usize> {
        let exact: Option<Vec<ExactElem>> = vs.iter().map(|v| v.to_exact()).collect();
        match exact {
            Some(e) => Scalar::spanning_subset(&e),
            None => (0..vs.len()).filter(|&i| !vs[i].is_zero()).collect(),
        }
    }
}

/// A subspace with precomputed projection data.
#[derive(Clone, Debug)]
pub struct Subspace<R: Real> {
    pub name: String,
    pub basis: Vec<Elem<R>>,
    adj: Vec<Vec<R>>,
    den: R,
}

impl<R: Coefficients> Subspace<R> {
    pub fn new(name: &str, basis: Vec<Elem<R>>) -> Result<Self, ChainError> {
        if basis.iter().any(|b| !b.is_skew_hermitian()) {
            return Err(ChainError::NotCompact(name.into()));
        }
        if basis.is_empty() {
            return Ok(Subspace { name: name.into(), basis, adj: vec![], den: R::one() });
        }
        // the inner product is definite on skew-Hermitian matrices, so the
        // Gram matrix is singular exactly when the basis is dependent
        let (adj, den) = R::gram_solve(&gram(&basis)).ok_or_else(|| ChainError::Dependent(name.into()))?;
        Ok(Subspace { name: name.into(), basis, adj, den })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Gram determinant (or one when it is a unit).
    pub fn denominator(&self) -> &R {
        &self.den
    }

    /// Coordinates of the projection, scaled by the denominator.
    pub fn proj_coords(&self, x: &Elem<R>) -> Vec<R> {
        let b: Vec<R> = self.basis.iter().map(|v| v.inner(x)).collect();
        self.adj
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&b)
                    .filter(|(a, y)| !a.is_zero() && !y.is_zero())
                    .fold(R::zero(), |acc, (a, y)| acc.plus(&a.times(y)))
            })
            .collect()
    }

    pub fn proj(&self, x: &Elem<R>) -> Scaled<R> {
        let n = x.size();
        let c = self.proj_coords(x);
        Scaled { num: Elem::lin_comb(&c, &self.basis, n), den: self.den.clone() }
    }

    /// `den * x - num(proj x)`, zero iff `x` lies in the span.
    pub fn residual(&self, x: &Elem<R>) -> Elem<R> {
        let p = self.proj(x);
        x.scale(&p.den).minus(&p.num)
    }

    pub fn contains(&self, x: &Elem<R>) -> bool {
        self.residual(x).is_zero()
    }

    pub fn contains_all(&self, o: &Subspace<R>) -> bool {
        o.basis.iter().all(|b| self.contains(b))
    }

    pub fn closure_failure(&self) -> Option<(usize, usize)> {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                if !self.contains(&self.basis[i].bracket(&self.basis[j])) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// A chain `h ⊂ k ⊂ g` of compact matrix Lie algebras.
#[derive(Clone, Debug)]
pub struct Chain<R: Real> {
    pub id: String,
    pub g: Subspace<R>,
    pub k: Subspace<R>,
    pub h: Subspace<R>,
    /// Spanning set of `m = k ⊖ h` (a basis for exact chains).
    pub m: Vec<Elem<R>>,
    /// Spanning set of `s = g ⊖ k` (a basis for exact chains).
    pub s: Vec<Elem<R>>,
    /// Positive multiple applied to `-Re tr(XY)`.
    pub scale: Scalar,
    n: usize,
}

pub type ExactChain = Chain<Scalar>;
pub type ParamChain = Chain<ParamScalar>;

impl<R: Coefficients> Chain<R> {
    pub fn new(id: &str, g: Vec<Elem<R>>, k: Vec<Elem<R>>, h: Vec<Elem<R>>) -> Result<Self, ChainError> {
        let n = g.first().map_or(0, |b| b.size());
        if g.iter().chain(&k).chain(&h).any(|b| b.size() != n) {
            return Err(ChainError::SizeMismatch);
        }
        let g = Subspace::new("g", g)?;
        let k = Subspace::new("k", k)?;
        let h = Subspace::new("h", h)?;
        for sub in [&g, &k, &h] {
            if let Some((i, j)) = sub.closure_failure() {
                return Err(ChainError::NotSubalgebra(sub.name.clone(), i, j));
            }
        }
        if !k.contains_all(&h) {
            return Err(ChainError::NotContained("h".into(), "k".into()));
        }
        if !g.contains_all(&k) {
            return Err(ChainError::NotContained("k".into(), "g".into()));
        }
        if k.dim() >= g.dim() {
            return Err(ChainError::NotProper);
        }
        let m_all: Vec<Elem<R>> = k.basis.iter().map(|b| h.residual(b)).collect();
        let s_all: Vec<Elem<R>> = g.basis.iter().map(|b| k.residual(b)).collect();
        let pick = |vs: Vec<Elem<R>>| -> Vec<Elem<R>> {
            R::spanning_subset(&vs).into_iter().map(|i| vs[i].clone()).collect()
        };
        let m = pick(m_all);
        let s = pick(s_all);
        Ok(Chain { id: id.into(), g, k, h, m, s, scale: Scalar::one(), n })
    }

    pub fn with_scale(mut self, scale: Scalar) -> Self {
        assert!(scale.signum() > 0, "inner product scale must be positive");
        self.scale = scale;
        self
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }

    /// `X^m = X^k - X^h`.
    pub fn comp_m(&self, x: &Elem<R>) -> Scaled<R> {
        let pk = self.k.proj(x);
        let ph = self.h.proj(x);
        Scaled {
            num: pk.num.scale(&ph.den).minus(&ph.num.scale(&pk.den)),
            den: pk.den.times(&ph.den),
        }
    }

    /// `X^s = X - X^k`.
    pub fn comp_s(&self, x: &Elem<R>) -> Scaled<R> {
        let pk = self.k.proj(x);
        Scaled { num: x.scale(&pk.den).minus(&pk.num), den: pk.den }
    }

    pub fn comp_h(&self, x: &Elem<R>) -> Scaled<R> {
        self.h.proj(x)
    }

    /// Membership in `p = m + s`: inside `g` with zero `h`-component.
    pub fn in_p(&self, x: &Elem<R>) -> bool {
        self.g.contains(x) && self.comp_h(x).num.is_zero()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.g.dim(), self.k.dim(), self.h.dim())
    }
}

impl ExactChain {
    pub fn proj_g(&self, x: &ExactElem) -> ExactElem {
        self.g.proj(x).value()
    }
    pub fn proj_k(&self, x: &ExactElem) -> ExactElem {
        self.k.proj(x).value()
    }
    pub fn proj_h(&self, x: &ExactElem) -> ExactElem {
        self.h.proj(x).value()
    }
    pub fn m_part(&self, x: &ExactElem) -> ExactElem {
        self.comp_m(x).value()
    }
    pub fn s_part(&self, x: &ExactElem) -> ExactElem {
        self.comp_s(x).value()
    }

    /// Basis of `p = m + s`, `m` first.
    pub fn p_basis(&self) -> Vec<ExactElem> {
        self.m.iter().chain(&self.s).cloned().collect()
    }

    /// Scaled inner product on `g`.
    pub fn inner(&self, x: &ExactElem, y: &ExactElem) -> Scalar {
        &self.scale * &x.inner(y)
    }

    /// Conjugates every summand by `g` (inverse `g_inv`).
    pub fn conjugate(&self, g: &ExactElem, g_inv: &ExactElem) -> Result<ExactChain, ChainError> {
        let c = |s: &Subspace<Scalar>| s.basis.iter().map(|b| b.conjugate(g, g_inv)).collect();
        Ok(Chain::new(&self.id, c(&self.g), c(&self.k), c(&self.h))?.with_scale(self.scale.clone()))
    }
}

/// Error for the deformed metric.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("deformation parameter must be < 1, got {0}")]
    OutOfRange(String),
    #[error("argument is not in the complement of h")]
    NotInP,
}

/// The deformed metric `g_t(X, Y) = g0(X_m, Y_m)/(1 - t) + g0(X_s, Y_s)`.
pub fn metric_gt(chain: &ExactChain, t: &Scalar, x: &ExactElem, y: &ExactElem) -> Result<Scalar, MetricError> {
    if (t - &Scalar::one()).signum() >= 0 {
        return Err(MetricError::OutOfRange(t.to_string()));
    }
    if !chain.in_p(x) || !chain.in_p(y) {
        return Err(MetricError::NotInP);
    }
    let f = (Scalar::one() - t).inv().expect("t < 1");
    let mm = chain.inner(&chain.m_part(x), &chain.m_part(y));
    let ss = chain.inner(&chain.s_part(x), &chain.s_part(y));
    Ok(&f * &mm + ss)
}

impl ParamChain {
    /// Lifts an exact chain.
    pub fn from_exact(c: &ExactChain) -> Result<ParamChain, ChainError> {
        let l = |s: &Subspace<Scalar>| s.basis.iter().map(|b| b.lift()).collect();
        Chain::new(&c.id, l(&c.g), l(&c.k), l(&c.h))
    }

    /// The one-parameter family the chain depends on.
    pub fn family(&self) -> Result<Family, ChainError> {
        let mut entries: Vec<ParamScalar> = Vec::new();
        for sub in [&self.g, &self.k, &self.h] {
            for b in &sub.basis {
                for x in b.entries() {
                    entries.push(x.re.clone());
                    entries.push(x.im.clone());
                }
            }
        }
        let refs: Vec<&ParamScalar> = entries.iter().collect();
        Ok(Family::infer(&refs)?)
    }

    /// Parameter values where a basis degenerates (Gram determinant zero).
    pub fn degenerate_locus(&self) -> Result<Locus, ChainError> {
        let fam = self.family()?;
        let dens: Vec<ParamScalar> = [&self.g, &self.k, &self.h]
            .iter()
            .map(|s| s.denominator().clone())
            .collect();
        // product vanishes iff some factor does
        let prod = dens.iter().fold(ParamScalar::one(), |acc, d| acc.times(d));
        Ok(Locus::of(fam, &[prod])?)
    }

    pub fn instantiate(&self, pt: &Point) -> Result<ExactChain, ChainError> {
        if !pt.is_valid() {
            return Err(ChainError::InvalidPoint(pt.to_string()));
        }
        let asg = pt.assignment();
        let sub = |s: &Subspace<ParamScalar>| -> Result<Vec<ExactElem>, ChainError> {
            s.basis
                .iter()
                .map(|b| b.substitute(&asg).to_exact().ok_or(ChainError::StillParametric))
                .collect()
        };
        Chain::new(&self.id, sub(&self.g)?, sub(&self.k)?, sub(&self.h)?)
    }
}

/// Converts a list of parsed elements to exact ones.
pub fn exact_basis(v: &[ParamElem]) -> Result<Vec<ExactElem>, ChainError> {
    v.iter().map(|b| b.to_exact().ok_or(ChainError::StillParametric)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::e;
    use crate::expr::parse_elem;

    fn so(n: usize) -> Vec<ExactElem> {
        let mut v = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                v.push(e(n, i, j));
            }
        }
        v
    }

    fn ex(s: &str, n: usize) -> ExactElem {
        parse_elem(s, n, &()).unwrap().to_exact().unwrap()
    }

    fn so5_so4_su2() -> ExactChain {
        let k: Vec<ExactElem> = ["E23", "E24", "E25", "E34", "E35", "E45"].iter().map(|s| ex(s, 5)).collect();
        let h = vec![ex("E23+E45", 5), ex("E24-E35", 5), ex("E25+E34", 5)];
        Chain::new("so5/so4/su2", so(5), k, h).unwrap()
    }

    #[test]
    fn dimensions() {
        let c = so5_so4_su2();
        assert_eq!(c.dims(), (10, 6, 3));
        assert_eq!(c.m.len(), 3);
        assert_eq!(c.s.len(), 4);
    }

    #[test]
    fn projections_split() {
        let c = so5_so4_su2();
        let x = ex("E12 + 2E23 - E45 + 3E34", 5);
        let sum = c.proj_h(&x).plus(&c.m_part(&x)).plus(&c.s_part(&x));
        assert_eq!(sum, x);
        assert_eq!(c.m_part(&ex("E23", 5)), ex("1/2(E23 - E45)", 5));
    }

    #[test]
    fn rejects_bad_chains() {
        let k = vec![ex("E12", 5), ex("E23", 5)];
        assert!(matches!(Chain::new("x", so(5), k, vec![]), Err(ChainError::NotSubalgebra(..))));
        let k: Vec<ExactElem> = so(5);
        assert!(matches!(Chain::new("x", so(5), k, vec![]), Err(ChainError::NotProper)));
        let k = vec![ex("E12", 5)];
        let h = vec![ex("E34", 5)];
        assert!(matches!(Chain::new("x", so(5), k, h), Err(ChainError::NotContained(..))));
    }

    #[test]
    fn metric_domain() {
        let c = so5_so4_su2();
        let x = ex("E12", 5);
        assert!(metric_gt(&c, &Scalar::one(), &x, &x).is_err());
        assert_eq!(metric_gt(&c, &Scalar::frac(1, 2), &x, &x).unwrap(), Scalar::from_int(2));
        let y = ex("E23 - E45", 5);
        assert_eq!(metric_gt(&c, &Scalar::frac(1, 2), &y, &y).unwrap(), Scalar::from_int(8));
    }

    #[test]
    fn parametric_projection() {
        let n = 5;
        let g: Vec<ParamElem> = so(5).iter().map(|b| b.lift()).collect();
        let k: Vec<ParamElem> = ["E23", "E24", "E25", "E34", "E35", "E45"]
            .iter()
            .map(|s| parse_elem(s, n, &()).unwrap())
            .collect();
        let h = vec![parse_elem("c E23 + s E45", n, &()).unwrap()];
        let c = Chain::new("so5/so4/dt", g, k, h).unwrap();
        let x = parse_elem("E23", n, &()).unwrap();
        let ph = c.comp_h(&x);
        // |h|^2 = 2 reduces to a constant, so no denominator remains
        assert!(ph.den.constant().is_some());
        assert!(ph.num.minus(&parse_elem("c(c E23 + s E45)", n, &()).unwrap()).is_zero());
        assert!(c.degenerate_locus().unwrap().is_empty());
    }
}
