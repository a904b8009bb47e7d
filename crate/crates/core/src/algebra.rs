//! Matrix Lie algebras: elements, bracket, invariant inner product, spans.

use std::fmt;

use thiserror::Error;

use crate::linalg;
use crate::param::ParamScalar;
use crate::ring::Real;
use crate::scalar::{Cx, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("matrix sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("basis is linearly dependent")]
    Dependent,
    #[error("subspace is not closed under the bracket: [{0}, {1}] leaves it")]
    NotClosed(usize, usize),
    #[error("element is not contained in {0}")]
    NotContained(String),
    #[error("Gram matrix of {0} is singular")]
    SingularGram(String),
    #[error("{0}")]
    Parse(String),
}

/// Square complex matrix with entries over `R`.
#[derive(Clone, PartialEq)]
pub struct Elem<R> {
    n: usize,
    e: Vec<Cx<R>>,
}

pub type ExactElem = Elem<Scalar>;
pub type ParamElem = Elem<ParamScalar>;

impl<R: Real> Elem<R> {
    pub fn zero(n: usize) -> Self {
        Elem { n, e: vec![Cx::zero(); n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Cx<R> {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cx<R>) {
        self.e[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Cx<R>] {
        &self.e
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.e.iter().all(|x| x.is_real())
    }

    fn zip(&self, o: &Self, f: impl Fn(&Cx<R>, &Cx<R>) -> Cx<R>) -> Self {
        assert_eq!(self.n, o.n, "matrix sizes differ");
        Elem { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn plus(&self, o: &Self) -> Self {
        self.zip(o, |a, b| if b.is_zero() { a.clone() } else { a.plus(b) })
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.zip(o, |a, b| if b.is_zero() { a.clone() } else { a.minus(b) })
    }

    pub fn negated(&self) -> Self {
        Elem { n: self.n, e: self.e.iter().map(|x| x.negated()).collect() }
    }

    pub fn scale(&self, k: &R) -> Self {
        Elem { n: self.n, e: self.e.iter().map(|x| x.scale(k)).collect() }
    }

    pub fn scale_cx(&self, k: &Cx<R>) -> Self {
        Elem { n: self.n, e: self.e.iter().map(|x| x.times(k)).collect() }
    }

    /// Matrix product.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "matrix sizes differ");
        let n = self.n;
        let mut out = Elem::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.e[idx] = out.e[idx].plus(&a.times(b));
                }
            }
        }
        out
    }

    pub fn bracket(&self, o: &Self) -> Self {
        self.mul(o).minus(&o.mul(self))
    }

    pub fn trace(&self) -> Cx<R> {
        (0..self.n).fold(Cx::zero(), |acc, i| acc.plus(self.get(i, i)))
    }

    /// `-Re tr(XY)`, positive definite on skew-Hermitian matrices.
    pub fn inner(&self, o: &Self) -> R {
        assert_eq!(self.n, o.n, "matrix sizes differ");
        let n = self.n;
        let mut acc = R::zero();
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                let b = o.get(j, i);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.minus(&a.re.times(&b.re).minus(&a.im.times(&b.im)));
            }
        }
        acc
    }

    pub fn norm2(&self) -> R {
        self.inner(self)
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut out = Elem::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn is_skew_hermitian(&self) -> bool {
        self.plus(&self.conj_transpose()).is_zero()
    }

    /// `g X g^{-1}` given both factors.
    pub fn conjugate(&self, g: &Self, g_inv: &Self) -> Self {
        g.mul(self).mul(g_inv)
    }

    /// Real coordinates: real parts then imaginary parts.
    pub fn coords(&self) -> Vec<R> {
        let mut v: Vec<R> = self.e.iter().map(|x| x.re.clone()).collect();
        v.extend(self.e.iter().map(|x| x.im.clone()));
        v
    }

    pub fn map<S: Real>(&self, f: impl Fn(&R) -> S) -> Elem<S> {
        Elem { n: self.n, e: self.e.iter().map(|x| x.map(&f)).collect() }
    }

    /// Pads with zeros to a larger matrix (upper-left block).
    pub fn embed(&self, n: usize) -> Self {
        assert!(n >= self.n);
        let mut out = Elem::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn lin_comb(coeffs: &[R], basis: &[Self], n: usize) -> Self {
        let mut acc = Elem::zero(n);
        for (c, b) in coeffs.iter().zip(basis) {
            if c.is_zero() {
                continue;
            }
            // basis elements are sparse; touch only their nonzero entries
            for (a, x) in acc.e.iter_mut().zip(&b.e) {
                if !x.is_zero() {
                    *a = a.plus(&x.scale(c));
                }
            }
        }
        acc
    }
}

impl Elem<Scalar> {
    pub fn lift(&self) -> ParamElem {
        self.map(|x| ParamScalar::constant_of(x.clone()))
    }

    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.e.iter().map(|x| (x.re.to_f64(), x.im.to_f64())).collect()
    }

    /// Complex rank, computed from the realification.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut a = Vec::with_capacity(2 * n);
            let mut b = Vec::with_capacity(2 * n);
            for j in 0..n {
                let x = self.get(i, j);
                a.push(x.re.clone());
                a.push(-&x.im);
                b.push(x.im.clone());
                b.push(x.re.clone());
            }
            rows.push(a);
            rows.push(b);
        }
        linalg::rank(&rows) / 2
    }
}

impl Elem<ParamScalar> {
    /// The value without parameters, if there are none.
    pub fn to_exact(&self) -> Option<ExactElem> {
        let e = self
            .e
            .iter()
            .map(|x| Some(Cx::new(x.re.constant()?, x.im.constant()?)))
            .collect::<Option<Vec<_>>>()?;
        Some(Elem { n: self.n, e })
    }

    pub fn substitute(&self, assign: &[(crate::param::Var, Scalar)]) -> ParamElem {
        self.map(|x| x.substitute(assign))
    }
}

/// Antisymmetric unit `E_ij` (1-based): `+1` at `(i, j)`, `-1` at `(j, i)`.
pub fn e<R: Real>(n: usize, i: usize, j: usize) -> Elem<R> {
    let mut m = Elem::zero(n);
    m.set(i - 1, j - 1, Cx::real(R::one()));
    m.set(j - 1, i - 1, Cx::real(R::from_int(-1)));
    m
}

/// Symmetric unit `F_ij` (1-based); `F_jj` has a single one on the diagonal.
pub fn f<R: Real>(n: usize, i: usize, j: usize) -> Elem<R> {
    let mut m = Elem::zero(n);
    m.set(i - 1, j - 1, Cx::real(R::one()));
    m.set(j - 1, i - 1, Cx::real(R::one()));
    m
}

/// `i F_ij`, skew-Hermitian.
pub fn if_<R: Real>(n: usize, i: usize, j: usize) -> Elem<R> {
    f::<R>(n, i, j).scale_cx(&Cx::i())
}

impl<R: Real> fmt::Display for Elem<R> {
    /// Expansion in the units `E_ij`, `F_ij` (real parts) and `iF_ij`.
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        let mut parts: Vec<String> = Vec::new();
        let mut push = |coef: &R, unit: String| {
            if coef.is_zero() {
                return;
            }
            let c = coef.to_string();
            let s = if c == "1" {
                unit
            } else if c == "-1" {
                format!("-{unit}")
            } else if c.contains(' ') {
                format!("({c})*{unit}")
            } else {
                format!("{c}*{unit}")
            };
            parts.push(s);
        };
        for i in 0..n {
            for j in i..n {
                let a = self.get(i, j);
                let b = self.get(j, i);
                if i == j {
                    push(&a.re, format!("F{}{}", i + 1, j + 1));
                    push(&a.im, format!("iF{}{}", i + 1, j + 1));
                    continue;
                }
                let half = R::from_scalar(Scalar::frac(1, 2));
                // a = x + y, b = -x + y for x E_ij + y F_ij
                let xr = a.re.minus(&b.re).times(&half);
                let yr = a.re.plus(&b.re).times(&half);
                let xi = a.im.minus(&b.im).times(&half);
                let yi = a.im.plus(&b.im).times(&half);
                push(&xr, format!("E{}{}", i + 1, j + 1));
                push(&yr, format!("F{}{}", i + 1, j + 1));
                push(&xi, format!("iE{}{}", i + 1, j + 1));
                push(&yi, format!("iF{}{}", i + 1, j + 1));
            }
        }
        if parts.is_empty() {
            return write!(fm, "0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => out.push_str(&format!(" - {rest}")),
                None => out.push_str(&format!(" + {p}")),
            }
        }
        write!(fm, "{out}")
    }
}

impl<R: Real> fmt::Debug for Elem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Exact rank of a list of elements as real vectors.
pub fn span_rank(vs: &[ExactElem]) -> usize {
    linalg::rank(&vs.iter().map(|v| v.coords()).collect::<Vec<_>>())
}

/// Maximal independent subset, chosen greedily.
pub fn independent(vs: &[ExactElem]) -> Vec<ExactElem> {
    let coords: Vec<_> = vs.iter().map(|v| v.coords()).collect();
    linalg::independent_subset(&coords)
        .into_iter()
        .map(|i| vs[i].clone())
        .collect()
}

/// Coefficients of `x` in `basis`, if `x` lies in the span.
pub fn coordinates_in(basis: &[ExactElem], x: &ExactElem) -> Option<Vec<Scalar>> {
    let dim = x.coords().len();
    let cols: Vec<Vec<Scalar>> = basis.iter().map(|b| b.coords()).collect();
    let a: Vec<Vec<Scalar>> = (0..dim)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    linalg::solve(&a, &x.coords())
}

pub fn span_contains(basis: &[ExactElem], x: &ExactElem) -> bool {
    if x.is_zero() {
        return true;
    }
    let mut vs = basis.to_vec();
    let r = span_rank(&vs);
    vs.push(x.clone());
    span_rank(&vs) == r
}

pub fn span_subset(a: &[ExactElem], b: &[ExactElem]) -> bool {
    let r = span_rank(b);
    let mut vs = b.to_vec();
    vs.extend(a.iter().cloned());
    span_rank(&vs) == r
}

pub fn span_equal(a: &[ExactElem], b: &[ExactElem]) -> bool {
    span_subset(a, b) && span_subset(b, a)
}

/// A matrix Lie algebra given by an exact basis.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub name: String,
    pub basis: Vec<ExactElem>,
}

impl LieAlgebra {
    /// Checks independence and closure under the bracket.
    pub fn new(name: &str, basis: Vec<ExactElem>) -> Result<Self, AlgebraError> {
        let alg = LieAlgebra { name: name.to_string(), basis };
        if span_rank(&alg.basis) != alg.basis.len() {
            return Err(AlgebraError::Dependent);
        }
        if let Some((i, j)) = alg.closure_failure() {
            return Err(AlgebraError::NotClosed(i, j));
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.basis.first().map_or(0, |b| b.size())
    }

    pub fn closure_failure(&self) -> Option<(usize, usize)> {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                if !span_contains(&self.basis, &self.basis[i].bracket(&self.basis[j])) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn contains(&self, x: &ExactElem) -> bool {
        span_contains(&self.basis, x)
    }

    pub fn contains_algebra(&self, o: &LieAlgebra) -> bool {
        span_subset(&o.basis, &self.basis)
    }

    pub fn conjugate(&self, g: &ExactElem, g_inv: &ExactElem, name: &str) -> LieAlgebra {
        LieAlgebra {
            name: name.to_string(),
            basis: self.basis.iter().map(|b| b.conjugate(g, g_inv)).collect(),
        }
    }

    /// Gram matrix of the invariant inner product on the basis.
    pub fn gram(&self) -> Vec<Vec<Scalar>> {
        gram(&self.basis)
    }

    /// Jacobi identity on all basis triples.
    pub fn jacobi_holds(&self) -> bool {
        let b = &self.basis;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                let bij = b[i].bracket(&b[j]);
                for k in j + 1..b.len() {
                    let t = b[i]
                        .bracket(&b[j].bracket(&b[k]))
                        .plus(&b[j].bracket(&b[k].bracket(&b[i])))
                        .plus(&b[k].bracket(&bij));
                    if !t.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

pub fn gram<R: Real>(vs: &[Elem<R>]) -> Vec<Vec<R>> {
    vs.iter()
        .map(|a| vs.iter().map(|b| a.inner(b)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e5(i: usize, j: usize) -> ExactElem {
        e(5, i, j)
    }

    #[test]
    fn unit_brackets() {
        // [E_ij, E_jk] = E_ik
        assert_eq!(e5(1, 2).bracket(&e5(2, 3)), e5(1, 3));
        assert!(e5(1, 2).bracket(&e5(3, 4)).is_zero());
        assert_eq!(e5(1, 2).inner(&e5(1, 2)), Scalar::from_int(2));
        assert!(e5(1, 2).inner(&e5(1, 3)).is_zero());
    }

    #[test]
    fn su2_closes() {
        let n = 2;
        let basis = vec![e(n, 1, 2), if_(n, 1, 2), if_::<Scalar>(n, 1, 1).minus(&if_(n, 2, 2))];
        let su2 = LieAlgebra::new("su2", basis).unwrap();
        assert!(su2.jacobi_holds());
        assert!(su2.basis.iter().all(|b| b.is_skew_hermitian()));
    }

    #[test]
    fn not_closed_is_reported() {
        let r = LieAlgebra::new("bad", vec![e5(1, 2), e5(2, 3)]);
        assert!(matches!(r, Err(AlgebraError::NotClosed(0, 1))));
    }

    #[test]
    fn complex_rank() {
        let x: ExactElem = e(3, 1, 2);
        assert_eq!(x.rank(), 2);
        let y: ExactElem = if_(3, 3, 3);
        assert_eq!(y.rank(), 1);
    }

    #[test]
    fn display_units() {
        let x: ExactElem = e5(1, 2).plus(&e5(3, 4).scale(&Scalar::from_int(-2)));
        assert_eq!(x.to_string(), "E12 - 2*E34");
        let y: ExactElem = if_(3, 1, 2);
        assert_eq!(y.to_string(), "iF12");
    }
}
