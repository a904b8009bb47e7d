//! Exact arithmetic in the real field Q(√2, √3).
//!
//! Elements are stored as `a + b√2 + c√3 + d√6` with rational coefficients.
//! Inversion goes through the tower Q(√2)(√3), and the sign of an element is
//! decided exactly by comparing squares.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// Element of Q(√2, √3) in the basis (1, √2, √3, √6).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    c: [BigRational; 4],
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn q_sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

// a + b√2 with rational a, b
#[derive(Clone)]
struct Q2(BigRational, BigRational);

impl Q2 {
    fn mul(&self, o: &Q2) -> Q2 {
        Q2(
            &self.0 * &o.0 + q(2) * &self.1 * &o.1,
            &self.0 * &o.1 + &self.1 * &o.0,
        )
    }
    fn sub(&self, o: &Q2) -> Q2 {
        Q2(&self.0 - &o.0, &self.1 - &o.1)
    }
    fn scale(&self, k: i64) -> Q2 {
        Q2(&self.0 * q(k), &self.1 * q(k))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }
    fn sign(&self) -> i32 {
        let (sa, sb) = (q_sign(&self.0), q_sign(&self.1));
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        // opposite signs: compare a^2 with 2 b^2
        let d = &self.0 * &self.0 - q(2) * &self.1 * &self.1;
        match q_sign(&d) {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }
    fn inv(&self) -> Q2 {
        let n = &self.0 * &self.0 - q(2) * &self.1 * &self.1;
        Q2(&self.0 / &n, -(&self.1 / &n))
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default_zero()
    }

    fn default_zero() -> Self {
        Scalar {
            c: [
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
            ],
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(r: BigRational) -> Self {
        let mut s = Self::default_zero();
        s.c[0] = r;
        s
    }

    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Scalar { c: [a, b, c, d] }
    }

    pub fn sqrt2() -> Self {
        let mut s = Self::zero();
        s.c[1] = BigRational::one();
        s
    }

    pub fn sqrt3() -> Self {
        let mut s = Self::zero();
        s.c[2] = BigRational::one();
        s
    }

    pub fn sqrt6() -> Self {
        let mut s = Self::zero();
        s.c[3] = BigRational::one();
        s
    }

    /// Coefficients in the basis (1, √2, √3, √6).
    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.is_rational()
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|x| x.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then(|| &self.c[0])
    }

    fn split(&self) -> (Q2, Q2) {
        (
            Q2(self.c[0].clone(), self.c[1].clone()),
            Q2(self.c[2].clone(), self.c[3].clone()),
        )
    }

    fn join(a: Q2, b: Q2) -> Self {
        Scalar {
            c: [a.0, a.1, b.0, b.1],
        }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let (a, b) = self.split();
        let (sa, sb) = (a.sign(), b.sign());
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        let d = a.mul(&a).sub(&b.mul(&b).scale(3));
        match d.sign() {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Scalar::rational(self.c[0].recip()));
        }
        let (a, b) = self.split();
        if b.is_zero() {
            return Ok(Scalar::join(a.inv(), Q2(BigRational::zero(), BigRational::zero())));
        }
        // (a + b√3)^-1 = (a - b√3) / (a^2 - 3 b^2)
        let n = a.mul(&a).sub(&b.mul(&b).scale(3));
        let ni = n.inv();
        let na = a.mul(&ni);
        let nb = b.mul(&ni);
        Ok(Scalar::join(na, Q2(-nb.0, -nb.1)))
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Self, ScalarError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Scalar::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn to_f64(&self) -> f64 {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        f(&self.c[0])
            + f(&self.c[1]) * 2f64.sqrt()
            + f(&self.c[2]) * 3f64.sqrt()
            + f(&self.c[3]) * 6f64.sqrt()
    }

    /// Least common denominator of the four coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        use num::Integer;
        self.c
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    fn mul_impl(&self, o: &Scalar) -> Scalar {
        if self.is_rational() {
            let a = &self.c[0];
            if a.is_zero() {
                return Scalar::zero();
            }
            return Scalar {
                c: [a * &o.c[0], a * &o.c[1], a * &o.c[2], a * &o.c[3]],
            };
        }
        if o.is_rational() {
            return o.mul_impl(self);
        }
        let mut c: [BigRational; 4] = Default::default();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (k, f) = UNIT_PRODUCTS[i][j];
                let t = a * b;
                c[k] += if f == 1 { t } else { t * q(f) };
            }
        }
        Scalar { c }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}

fn add_q(a: &BigRational, b: &BigRational) -> BigRational {
    if b.is_zero() {
        a.clone()
    } else if a.is_zero() {
        b.clone()
    } else {
        a + b
    }
}

/// `u_i u_j = f u_k` for the basis `u = (1, √2, √3, √6)`, as `(k, f)`.
const UNIT_PRODUCTS: [[(usize, i64); 4]; 4] = [
    [(0, 1), (1, 1), (2, 1), (3, 1)],
    [(1, 1), (0, 2), (3, 1), (2, 2)],
    [(2, 1), (3, 1), (0, 3), (1, 3)],
    [(3, 1), (2, 2), (1, 3), (0, 6)],
];

binop!(Add, add, |a, b| Scalar {
    c: [add_q(&a.c[0], &b.c[0]), add_q(&a.c[1], &b.c[1]), add_q(&a.c[2], &b.c[2]), add_q(&a.c[3], &b.c[3])]
});
binop!(Sub, sub, |a, b| Scalar {
    c: [
        &a.c[0] - &b.c[0],
        &a.c[1] - &b.c[1],
        &a.c[2] - &b.c[2],
        &a.c[3] - &b.c[3]
    ]
});
binop!(Mul, mul, |a, b| a.mul_impl(b));

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::checked_div`] otherwise.
    fn div(self, o: &'a Scalar) -> Scalar {
        self.checked_div(o).expect("division by zero")
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, o: Scalar) -> Scalar {
        &self / &o
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            c: [-&self.c[0], -&self.c[1], -&self.c[2], -&self.c[3]],
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        for i in 0..4 {
            if !o.c[i].is_zero() {
                self.c[i] += &o.c[i];
            }
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        for i in 0..4 {
            if !o.c[i].is_zero() {
                self.c[i] -= &o.c[i];
            }
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::rational(r)
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["", "√2", "√3", "√6"];
        let mut out = String::new();
        for (k, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let neg = x.is_negative();
            let a = x.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if k == 0 {
                out.push_str(&fmt_rat(&a));
            } else if a.is_one() {
                out.push_str(names[k]);
            } else if a.is_integer() {
                out.push_str(&format!("{}{}", a.numer(), names[k]));
            } else {
                out.push_str(&format!("({}){}", fmt_rat(&a), names[k]));
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses a rational literal: `3`, `-2/5`, `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let t = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let ipv: BigInt = if ip.is_empty() {
            BigInt::zero()
        } else {
            ip.parse().map_err(|_| err())?
        };
        let fpv: BigInt = fp.parse().map_err(|_| err())?;
        let den = num::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(ipv * &den + fpv, den);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

impl FromStr for Scalar {
    type Err = ScalarError;
    /// Accepts a rational literal, optionally followed by `*sqrt2`, `*sqrt3`
    /// or `*sqrt6` (also `√2` etc.); terms may be joined by `+`/`-`.
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ScalarError::Parse(s.to_string()));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('/') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut acc = Scalar::zero();
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-1, b.to_string()),
                None => (1, t.trim_start_matches('+').to_string()),
            };
            let body = body.replace('√', "sqrt");
            let (coef, root) = match body.find("sqrt") {
                Some(k) => {
                    let c = body[..k].trim_end_matches('*');
                    let c = c.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(c);
                    let r = &body[k + 4..];
                    (if c.is_empty() { "1" } else { c }.to_string(), r.to_string())
                }
                None => (body.clone(), String::new()),
            };
            let mut v = Scalar::rational(parse_rational(&coef)?);
            v = match root.as_str() {
                "" => v,
                "2" => v * Scalar::sqrt2(),
                "3" => v * Scalar::sqrt3(),
                "6" => v * Scalar::sqrt6(),
                _ => return Err(ScalarError::Parse(s.to_string())),
            };
            if sign < 0 {
                v = -v;
            }
            acc += &v;
        }
        Ok(acc)
    }
}

/// Complex number over a real coefficient type.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

/// Complex number with coefficients in Q(√2, √3).
pub type CScalar = Cx<Scalar>;
