//! Zero sets of one-parameter polynomials.
//!
//! A polynomial in a trigonometric pair is pulled back along the rational
//! parametrisation `c = (1-u^2)/(1+u^2)`, `s = 2u/(1+u^2)`; the point
//! `(c, s) = (-1, 0)` is checked separately. Homogeneous polynomials in a
//! projective pair `(p, q)` are dehomogenised with `r = q/p`, with `p = 0`
//! checked separately. Common zeros are then the real roots of a gcd.

use std::fmt;

use thiserror::Error;

use crate::param::{ParamScalar, TrigId, Var};
use crate::ring::Real;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocusError {
    #[error("variable {0} does not belong to the parameter family")]
    ForeignVariable(String),
    #[error("polynomial is not homogeneous in the projective pair")]
    NotHomogeneous,
    #[error("cannot infer a single parameter family")]
    NoFamily,
}

/// Univariate polynomial, coefficients from low to high degree.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UPoly(Vec<Scalar>);

impl UPoly {
    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn constant(c: Scalar) -> Self {
        UPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Scalar {
        self.0.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let z = Scalar::zero();
        UPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Scalar) -> UPoly {
        UPoly::new(self.0.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::default();
        }
        let mut c = vec![Scalar::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += &(a * b);
                }
            }
        }
        UPoly::new(c)
    }

    pub fn pow(&self, e: u32) -> UPoly {
        (0..e).fold(UPoly::constant(Scalar::one()), |acc, _| acc.mul(self))
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().inv().expect("nonzero lead");
        let mut r = self.0.clone();
        let mut quo = vec![Scalar::zero(); self.0.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = &r[r.len() - 1] * &inv;
            for (i, x) in d.0.iter().enumerate() {
                if !x.is_zero() {
                    r[k + i] -= &(&f * x);
                }
            }
            quo[k] = f;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (UPoly::new(quo), UPoly::new(r))
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv().unwrap())
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * &Scalar::from_int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.0
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Number of distinct real roots, by a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].divrem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&Scalar::from_int(-1)));
        }
        let changes = |signs: Vec<i32>| {
            let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_pos = seq.iter().map(|p| p.lead().signum()).collect();
        let at_neg = seq
            .iter()
            .map(|p| {
                let s = p.lead().signum();
                if p.degree().unwrap_or(0) % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        changes(at_neg) - changes(at_pos)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = ParamScalar::zero();
        for (i, c) in self.0.iter().enumerate() {
            p = p.plus(&ParamScalar::free(u16::MAX).pow(i as u32).scale(c));
        }
        let s = p.to_string().replace(&Var::free_name(u16::MAX), "u");
        write!(f, "{s}")
    }
}

/// A one-parameter family of parameter values.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Family {
    /// A circle `(cos t, sin t)`.
    Trig(TrigId),
    /// A projective line `[p : q]`.
    Projective(u16, u16),
    /// An affine line.
    Affine(u16),
}

impl Family {
    /// The family of the variables occurring in `x`, if there is exactly one.
    pub fn infer(xs: &[&ParamScalar]) -> Result<Family, LocusError> {
        let mut vars: Vec<Var> = xs.iter().flat_map(|x| x.vars()).collect();
        vars.sort();
        vars.dedup();
        let trig: Vec<TrigId> = vars
            .iter()
            .filter_map(|v| match v {
                Var::Cos(t) | Var::Sin(t) => Some(*t),
                _ => None,
            })
            .collect();
        let free: Vec<u16> = vars
            .iter()
            .filter_map(|v| match v {
                Var::Free(n) => Some(*n),
                _ => None,
            })
            .collect();
        match (trig.first(), free.as_slice()) {
            (Some(&t), []) if trig.iter().all(|&x| x == t) => Ok(Family::Trig(t)),
            (None, [a]) => Ok(Family::Affine(*a)),
            (None, [a, b]) => Ok(Family::Projective(*a, *b)),
            _ => Err(LocusError::NoFamily),
        }
    }

    fn owns(&self, v: &Var) -> bool {
        match (self, v) {
            (Family::Trig(t), Var::Cos(x) | Var::Sin(x)) => t == x,
            (Family::Projective(a, b), Var::Free(x)) => a == x || b == x,
            (Family::Affine(a), Var::Free(x)) => a == x,
            _ => false,
        }
    }

    /// Pulls `f` back to a univariate polynomial; also returns the value
    /// at the point not covered by the chart, if the family has one.
    pub fn univariate(&self, f: &ParamScalar) -> Result<(UPoly, Option<Scalar>), LocusError> {
        if let Some(v) = f.vars().into_iter().find(|v| !self.owns(v)) {
            return Err(LocusError::ForeignVariable(v.to_string()));
        }
        match *self {
            Family::Trig(t) => {
                let deg = f.total_degree();
                let cnum = UPoly::new(vec![Scalar::one(), Scalar::zero(), Scalar::from_int(-1)]);
                let snum = UPoly::new(vec![Scalar::zero(), Scalar::from_int(2)]);
                let den = UPoly::new(vec![Scalar::one(), Scalar::zero(), Scalar::one()]);
                let mut acc = UPoly::default();
                let mut at_inf = Scalar::zero();
                for (m, coef) in f.terms() {
                    let (mut a, mut b) = (0, 0);
                    for (v, e) in m {
                        match v {
                            Var::Cos(x) if *x == t => a = *e,
                            _ => b = *e,
                        }
                    }
                    let term = cnum.pow(a).mul(&snum.pow(b)).mul(&den.pow(deg - a - b));
                    acc = acc.add(&term.scale(coef));
                    if b == 0 {
                        let sign = if a % 2 == 0 { 1 } else { -1 };
                        at_inf += &(coef * &Scalar::from_int(sign));
                    }
                }
                Ok((acc, Some(at_inf)))
            }
            Family::Projective(_, q) => {
                let deg = f.total_degree();
                let mut coeffs = vec![Scalar::zero(); deg as usize + 1];
                for (m, coef) in f.terms() {
                    let total: u32 = m.iter().map(|(_, e)| e).sum();
                    if total != deg {
                        return Err(LocusError::NotHomogeneous);
                    }
                    let b = m
                        .iter()
                        .find(|(v, _)| *v == Var::Free(q))
                        .map_or(0, |(_, e)| *e);
                    coeffs[b as usize] += coef;
                }
                let at_inf = coeffs[deg as usize].clone();
                Ok((UPoly::new(coeffs), Some(at_inf)))
            }
            Family::Affine(_) => {
                let deg = f.total_degree();
                let mut coeffs = vec![Scalar::zero(); deg as usize + 1];
                for (m, coef) in f.terms() {
                    let b: u32 = m.iter().map(|(_, e)| e).sum();
                    coeffs[b as usize] += coef;
                }
                Ok((UPoly::new(coeffs), None))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Family::Trig(t) => format!("u = tan({}/2)", Var::trig_name(*t)),
            Family::Projective(p, q) => {
                format!("u = {}/{}", Var::free_name(*q), Var::free_name(*p))
            }
            Family::Affine(a) => format!("u = {}", Var::free_name(*a)),
        }
    }
}

/// A concrete parameter value.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Point {
    Trig { id: TrigId, c: Scalar, s: Scalar },
    Projective { p_var: u16, q_var: u16, p: Scalar, q: Scalar },
    Affine { var: u16, x: Scalar },
}

impl Point {
    pub fn assignment(&self) -> Vec<(Var, Scalar)> {
        match self {
            Point::Trig { id, c, s } => vec![(Var::Cos(*id), c.clone()), (Var::Sin(*id), s.clone())],
            Point::Projective { p_var, q_var, p, q } => {
                vec![(Var::Free(*p_var), p.clone()), (Var::Free(*q_var), q.clone())]
            }
            Point::Affine { var, x } => vec![(Var::Free(*var), x.clone())],
        }
    }

    /// Chart coordinate, or `None` for the point at infinity.
    fn chart(&self) -> Option<Scalar> {
        match self {
            Point::Trig { c, s, .. } => {
                let d = c + &Scalar::one();
                (!d.is_zero()).then(|| s / &d)
            }
            Point::Projective { p, q, .. } => (!p.is_zero()).then(|| q / p),
            Point::Affine { x, .. } => Some(x.clone()),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            Point::Trig { c, s, .. } => (c * c + s * s).is_one(),
            Point::Projective { p, q, .. } => !(p.is_zero() && q.is_zero()),
            Point::Affine { .. } => true,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Trig { id, c, s } => {
                let n = Var::trig_name(*id);
                write!(f, "(cos {n}, sin {n}) = ({c}, {s})")
            }
            Point::Projective { p_var, q_var, p, q } => write!(
                f,
                "({}, {}) = ({p}, {q})",
                Var::free_name(*p_var),
                Var::free_name(*q_var)
            ),
            Point::Affine { var, x } => write!(f, "{} = {x}", Var::free_name(*var)),
        }
    }
}

/// Common real zeros of a set of polynomials in one family.
#[derive(Clone, PartialEq, Debug)]
pub struct Locus {
    pub family: Family,
    /// Monic gcd of the pulled-back polynomials; zero when all vanish.
    pub poly: UPoly,
    pub at_infinity: bool,
}

impl Locus {
    pub fn of(family: Family, polys: &[ParamScalar]) -> Result<Locus, LocusError> {
        let mut g = UPoly::default();
        let mut inf = true;
        for f in polys {
            let (u, at) = family.univariate(f)?;
            g = g.gcd(&u);
            if let Some(v) = at {
                inf &= v.is_zero();
            } else {
                inf = false;
            }
        }
        if polys.is_empty() {
            inf = !matches!(family, Family::Affine(_));
        }
        Ok(Locus { family, poly: g, at_infinity: inf })
    }

    pub fn empty(family: Family) -> Locus {
        Locus { family, poly: UPoly::constant(Scalar::one()), at_infinity: false }
    }

    pub fn is_everything(&self) -> bool {
        self.poly.is_zero()
    }

    /// Number of real points, `None` when the locus is the whole family.
    pub fn point_count(&self) -> Option<usize> {
        if self.poly.is_zero() {
            return None;
        }
        Some(self.poly.count_real_roots() + usize::from(self.at_infinity))
    }

    pub fn is_empty(&self) -> bool {
        self.point_count() == Some(0)
    }

    pub fn contains(&self, pt: &Point) -> bool {
        match pt.chart() {
            Some(u) => self.poly.eval(&u).is_zero(),
            None => self.at_infinity,
        }
    }

    pub fn intersect(&self, o: &Locus) -> Locus {
        Locus {
            family: self.family,
            poly: self.poly.gcd(&o.poly),
            at_infinity: self.at_infinity && o.at_infinity,
        }
    }

    /// Same set of real points.
    pub fn same_points(&self, o: &Locus) -> bool {
        if self.family != o.family || self.at_infinity != o.at_infinity {
            return false;
        }
        match (self.point_count(), o.point_count()) {
            (None, None) => true,
            (Some(a), Some(b)) => a == b && self.intersect(o).point_count() == Some(a),
            _ => false,
        }
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.point_count() {
            None => write!(f, "everywhere"),
            Some(0) => write!(f, "nowhere"),
            Some(n) => {
                let inf = match self.family {
                    Family::Trig(t) => format!("{} = pi", Var::trig_name(t)),
                    Family::Projective(p, _) => format!("{} = 0", Var::free_name(p)),
                    Family::Affine(_) => String::new(),
                };
                let mut parts = Vec::new();
                if self.poly.degree().unwrap_or(0) > 0 {
                    let radical = self.poly.divrem(&self.poly.gcd(&self.poly.derivative())).0.monic();
                    parts.push(format!("{} = 0 with {}", radical, self.family.describe()));
                }
                if self.at_infinity {
                    parts.push(inf);
                }
                write!(f, "{n} point(s): {}", parts.join(", or "))
            }
        }
    }
}

/// Outcome of an exact zero test on a parametric value.
#[derive(Clone, PartialEq, Debug)]
pub enum ZeroTest {
    IdenticallyZero,
    /// Vanishes only on the given proper locus (unknown for several families).
    NonzeroGenerically(Option<Locus>),
    NonzeroEverywhere,
}

pub fn param_is_zero(x: &ParamScalar) -> ZeroTest {
    if x.is_zero() {
        return ZeroTest::IdenticallyZero;
    }
    if x.is_numeric() {
        return ZeroTest::NonzeroEverywhere;
    }
    let locus = Family::infer(&[x]).and_then(|fam| Locus::of(fam, std::slice::from_ref(x)));
    match locus {
        Ok(l) if l.is_empty() => ZeroTest::NonzeroEverywhere,
        Ok(l) => ZeroTest::NonzeroGenerically(Some(l)),
        Err(_) => ZeroTest::NonzeroGenerically(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::{P, Q, THETA};

    fn c() -> ParamScalar {
        ParamScalar::cos(THETA)
    }
    fn s() -> ParamScalar {
        ParamScalar::sin(THETA)
    }
    fn trig(c: Scalar, s: Scalar) -> Point {
        Point::Trig { id: THETA, c, s }
    }

    #[test]
    fn identically_zero_after_reduction() {
        let x = s().times(&c().pow(2).plus(&s().pow(2)).minus(&ParamScalar::one()));
        assert_eq!(param_is_zero(&x), ZeroTest::IdenticallyZero);
    }

    #[test]
    fn sine_vanishes_at_two_points() {
        let ZeroTest::NonzeroGenerically(Some(l)) = param_is_zero(&s()) else {
            panic!()
        };
        assert_eq!(l.point_count(), Some(2));
        assert!(l.contains(&trig(Scalar::one(), Scalar::zero())));
        assert!(l.contains(&trig(Scalar::from_int(-1), Scalar::zero())));
        assert!(!l.contains(&trig(Scalar::zero(), Scalar::one())));
    }

    #[test]
    fn projective_line() {
        let x = ParamScalar::free(P).plus(&ParamScalar::free(Q));
        let ZeroTest::NonzeroGenerically(Some(l)) = param_is_zero(&x) else {
            panic!()
        };
        assert_eq!(l.point_count(), Some(1));
        let pt = Point::Projective { p_var: P, q_var: Q, p: Scalar::one(), q: Scalar::from_int(-1) };
        assert!(l.contains(&pt));
        let x2 = ParamScalar::free(P).pow(2).plus(&ParamScalar::free(Q).pow(2));
        assert_eq!(param_is_zero(&x2), ZeroTest::NonzeroEverywhere);
    }

    #[test]
    fn loci_compare_by_points() {
        let fam = Family::Trig(THETA);
        let a = Locus::of(fam, &[s().times(&c()).scale(&Scalar::from_int(3))]).unwrap();
        let b = Locus::of(fam, &[s().pow(3).times(&c()), s().times(&c().pow(2))]).unwrap();
        assert!(a.same_points(&b));
        assert_eq!(a.point_count(), Some(4));
        let tan = Locus::of(fam, &[s().minus(&c().scale(&Scalar::sqrt3()))]).unwrap();
        assert_eq!(tan.point_count(), Some(2));
        assert!(tan.contains(&trig(Scalar::frac(1, 2), Scalar::sqrt3() * Scalar::frac(1, 2))));
        let nowhere = Locus::of(fam, &[c().plus(&ParamScalar::from_int(2))]).unwrap();
        assert!(nowhere.is_empty());
    }

    #[test]
    fn sturm_counts() {
        let p = UPoly::new(vec![Scalar::from_int(-2), Scalar::zero(), Scalar::one()]);
        assert_eq!(p.count_real_roots(), 2);
        let p = UPoly::new(vec![Scalar::from_int(2), Scalar::zero(), Scalar::one()]);
        assert_eq!(p.count_real_roots(), 0);
        // (u - 1)^2 (u + √2)
        let a = UPoly::new(vec![Scalar::from_int(-1), Scalar::one()]);
        let b = UPoly::new(vec![Scalar::sqrt2(), Scalar::one()]);
        assert_eq!(a.mul(&a).mul(&b).count_real_roots(), 2);
    }
}
