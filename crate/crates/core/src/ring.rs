//! Coefficient rings shared by exact and parametric computations.

use std::fmt;

use crate::linalg;
use crate::scalar::{Cx, Scalar};

/// Real coefficient ring: either the exact field or polynomials over it.
pub trait Real: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_scalar(s: Scalar) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse when the element is a unit of the ring.
    fn try_inv(&self) -> Option<Self>;
    /// The value as a field element, when it carries no parameters.
    fn constant(&self) -> Option<Scalar>;

    /// Solves `G A = d I` for a symmetric Gram matrix, returning `(A, d)`.
    /// Over a field `d` is one; over a polynomial ring `A` is the adjugate.
    fn gram_solve(g: &[Vec<Self>]) -> Option<(Vec<Vec<Self>>, Self)>;

    fn from_int(n: i64) -> Self {
        Self::from_scalar(Scalar::from_int(n))
    }
}

impl Real for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn from_scalar(s: Scalar) -> Self {
        s
    }
    fn plus(&self, o: &Self) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn constant(&self) -> Option<Scalar> {
        Some(self.clone())
    }
    fn gram_solve(g: &[Vec<Self>]) -> Option<(Vec<Vec<Self>>, Self)> {
        linalg::inverse(g).map(|a| (a, Scalar::one()))
    }
}

impl<R: Real> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }
    pub fn zero() -> Self {
        Cx::new(R::zero(), R::zero())
    }
    pub fn real(re: R) -> Self {
        Cx::new(re, R::zero())
    }
    pub fn i() -> Self {
        Cx::new(R::zero(), R::one())
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn plus(&self, o: &Self) -> Self {
        Cx::new(self.re.plus(&o.re), self.im.plus(&o.im))
    }
    pub fn minus(&self, o: &Self) -> Self {
        Cx::new(self.re.minus(&o.re), self.im.minus(&o.im))
    }
    pub fn negated(&self) -> Self {
        Cx::new(self.re.negated(), self.im.negated())
    }
    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), self.im.negated())
    }
    pub fn times(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Cx::zero();
        }
        if self.im.is_zero() && o.im.is_zero() {
            return Cx::real(self.re.times(&o.re));
        }
        let re = self.re.times(&o.re).minus(&self.im.times(&o.im));
        let im = self.re.times(&o.im).plus(&self.im.times(&o.re));
        Cx::new(re, im)
    }
    pub fn scale(&self, k: &R) -> Self {
        if k.is_zero() {
            return Cx::zero();
        }
        Cx::new(self.re.times(k), self.im.times(k))
    }
    pub fn map<S: Real>(&self, f: impl Fn(&R) -> S) -> Cx<S> {
        Cx::new(f(&self.re), f(&self.im))
    }
}

impl<R: Real> fmt::Display for Cx<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i({})", self.im),
            _ => write!(f, "({}) + i({})", self.re, self.im),
        }
    }
}
