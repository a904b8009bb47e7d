//! A small expression language for algebra elements.
//!
//! ```text
//! E12 + E45            antisymmetric units (1-based, one digit per index)
//! i(F11 - F22)         i times symmetric units; `iF12` also works
//! 1/2 (E25 + E34)      rational coefficients, implicit multiplication
//! sqrt2 X4 - 3/2 Z1    named basis elements supplied by the caller
//! c E23 + s E45        c, s = cos/sin theta; cphi, sphi; p, q
//! sqrt(3/5) X5         square roots of rationals
//! ```

use crate::algebra::{e, f, AlgebraError, ParamElem};
use crate::param::{ParamScalar, P, PHI, Q, THETA};
use crate::ring::Real;
use crate::scalar::{parse_rational, Cx, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, AlgebraError> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let ch = cs[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if ch.is_alphabetic() || ch == '_' || ch == '~' || ch == '√' {
            let st = i;
            i += 1;
            if ch == '√' {
                out.push(Tok::Ident("sqrt".into()));
                continue;
            }
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '~') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(AlgebraError::Parse(format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

#[derive(Clone)]
enum Val {
    S(Cx<ParamScalar>),
    M(ParamElem),
}

/// Resolves basis names like `X4` or `Z1` for a particular algebra.
pub trait Names {
    fn lookup(&self, name: &str) -> Option<ParamElem>;
}

impl Names for () {
    fn lookup(&self, _: &str) -> Option<ParamElem> {
        None
    }
}

impl<F: Fn(&str) -> Option<ParamElem>> Names for F {
    fn lookup(&self, name: &str) -> Option<ParamElem> {
        self(name)
    }
}

struct Parser<'a, N: Names> {
    toks: Vec<Tok>,
    pos: usize,
    n: usize,
    names: &'a N,
}

fn perr<T>(msg: impl Into<String>) -> Result<T, AlgebraError> {
    Err(AlgebraError::Parse(msg.into()))
}

fn real(x: ParamScalar) -> Val {
    Val::S(Cx::real(x))
}

/// `sqrt(a/b)` inside the field when possible, else as an adjoined root.
fn sqrt_rational(r: &Scalar) -> Result<ParamScalar, AlgebraError> {
    let Some(q) = r.as_rational() else {
        return perr("sqrt of an irrational value");
    };
    if q.numer() < &num::BigInt::from(0) {
        return perr("sqrt of a negative value");
    }
    use num::ToPrimitive;
    let (a, b) = (q.numer().to_u64(), q.denom().to_u64());
    let (Some(a), Some(b)) = (a, b) else {
        return perr("sqrt argument too large");
    };
    // sqrt(a/b) = sqrt(ab)/b = k sqrt(m) / b with m squarefree
    let ab = a * b;
    let mut m = ab;
    let mut k = 1u64;
    let mut d = 2u64;
    while d * d <= m {
        while m % (d * d) == 0 {
            m /= d * d;
            k *= d;
        }
        d += 1;
    }
    let coef = Scalar::frac(k as i64, b as i64);
    let root = match m {
        0 => return Ok(ParamScalar::zero()),
        1 => Scalar::one(),
        2 => Scalar::sqrt2(),
        3 => Scalar::sqrt3(),
        6 => Scalar::sqrt6(),
        _ => {
            let g = num::integer::gcd(a, b);
            return Ok(ParamScalar::surd((a / g) as u32, (b / g) as u32));
        }
    };
    Ok(ParamScalar::constant_of(coef * root))
}

impl<'a, N: Names> Parser<'a, N> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<(), AlgebraError> {
        match self.next() {
            Some(Tok::Op(x)) if x == c => Ok(()),
            other => perr(format!("expected `{c}`, found {other:?}")),
        }
    }

    fn expr(&mut self) -> Result<Val, AlgebraError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c)) = self.peek() {
            let c = *c;
            if c != '+' && c != '-' {
                break;
            }
            self.pos += 1;
            let rhs = self.term()?;
            acc = self.add(acc, rhs, c == '-')?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Val, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.mul(acc, rhs)?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.div(acc, rhs)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let rhs = self.unary()?;
                    acc = self.mul(acc, rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val, AlgebraError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                let v = self.unary()?;
                Ok(match v {
                    Val::S(x) => Val::S(x.negated()),
                    Val::M(m) => Val::M(m.negated()),
                })
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Val, AlgebraError> {
        match self.next() {
            Some(Tok::Num(s)) => {
                let r = parse_rational(&s).map_err(|e| AlgebraError::Parse(e.to_string()))?;
                // a/b literal binds tighter than implicit products
                if let (Some(Tok::Op('/')), Some(Tok::Num(d))) =
                    (self.toks.get(self.pos), self.toks.get(self.pos + 1))
                {
                    let d = parse_rational(d).map_err(|e| AlgebraError::Parse(e.to_string()))?;
                    if num::Zero::is_zero(&d) {
                        return perr("division by zero");
                    }
                    self.pos += 2;
                    return Ok(real(ParamScalar::constant_of(Scalar::rational(r / d))));
                }
                Ok(real(ParamScalar::constant_of(Scalar::rational(r))))
            }
            Some(Tok::Op('(')) => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Tok::Ident(id)) => self.ident(&id),
            other => perr(format!("unexpected token {other:?}")),
        }
    }

    fn ident(&mut self, id: &str) -> Result<Val, AlgebraError> {
        let n = self.n;
        let unit = |kind: char, rest: &str| -> Option<ParamElem> {
            let d: Vec<usize> = rest.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect::<Option<_>>()?;
            if d.len() != 2 || d[0] == 0 || d[1] == 0 || d[0] > n || d[1] > n {
                return None;
            }
            match kind {
                'E' if d[0] != d[1] => Some(e(n, d[0], d[1])),
                'F' => Some(f(n, d[0], d[1])),
                _ => None,
            }
        };
        if let Some(m) = self.names.lookup(id) {
            return Ok(Val::M(m));
        }
        let mut chars = id.chars();
        let head = chars.next().unwrap_or(' ');
        let rest: String = chars.collect();
        if let Some(m) = unit(head, &rest) {
            return Ok(Val::M(m));
        }
        if head == 'i' && rest.len() == 3 {
            let mut rc = rest.chars();
            let k = rc.next().unwrap();
            if let Some(m) = unit(k, rc.as_str()) {
                return Ok(Val::M(m.scale_cx(&Cx::i())));
            }
        }
        let sym = match id {
            "i" => return Ok(Val::S(Cx::i())),
            "sqrt2" => ParamScalar::constant_of(Scalar::sqrt2()),
            "sqrt3" => ParamScalar::constant_of(Scalar::sqrt3()),
            "sqrt6" => ParamScalar::constant_of(Scalar::sqrt6()),
            "c" => ParamScalar::cos(THETA),
            "s" => ParamScalar::sin(THETA),
            "cphi" => ParamScalar::cos(PHI),
            "sphi" => ParamScalar::sin(PHI),
            "p" => ParamScalar::free(P),
            "q" => ParamScalar::free(Q),
            "sqrt" => {
                self.expect('(')?;
                let v = self.expr()?;
                self.expect(')')?;
                let Val::S(x) = v else { return perr("sqrt of a matrix") };
                let Some(r) = x.re.constant().filter(|_| x.im.is_zero()) else {
                    return perr("sqrt of a non-constant value");
                };
                sqrt_rational(&r)?
            }
            _ => return perr(format!("unknown symbol `{id}`")),
        };
        Ok(real(sym))
    }

    fn add(&self, a: Val, b: Val, sub: bool) -> Result<Val, AlgebraError> {
        match (a, b) {
            (Val::S(x), Val::S(y)) => Ok(Val::S(if sub { x.minus(&y) } else { x.plus(&y) })),
            (Val::M(x), Val::M(y)) => Ok(Val::M(if sub { x.minus(&y) } else { x.plus(&y) })),
            _ => perr("cannot add a number and a matrix"),
        }
    }

    fn mul(&self, a: Val, b: Val) -> Result<Val, AlgebraError> {
        match (a, b) {
            (Val::S(x), Val::S(y)) => Ok(Val::S(x.times(&y))),
            (Val::S(x), Val::M(m)) | (Val::M(m), Val::S(x)) => Ok(Val::M(m.scale_cx(&x))),
            (Val::M(_), Val::M(_)) => perr("matrix products are not elements; use brackets explicitly"),
        }
    }

    fn div(&self, a: Val, b: Val) -> Result<Val, AlgebraError> {
        let Val::S(d) = b else { return perr("division by a matrix") };
        // 1/(x + iy) = (x - iy)/(x^2 + y^2)
        let norm = d.re.times(&d.re).plus(&d.im.times(&d.im));
        let Some(ni) = norm.try_inv() else { return perr("division by a non-invertible value") };
        let inv = d.conj().scale(&ni);
        self.mul(a, Val::S(inv))
    }
}

/// Parses an element of `gl(n)` with the given named basis elements.
pub fn parse_elem<N: Names>(src: &str, n: usize, names: &N) -> Result<ParamElem, AlgebraError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, n, names };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return perr(format!("trailing input in `{src}`"));
    }
    match v {
        Val::M(m) => Ok(m),
        Val::S(x) if x.is_zero() => Ok(ParamElem::zero(n)),
        Val::S(_) => perr(format!("`{src}` is a number, not a matrix")),
    }
}

/// Parses a scalar expression such as `3/5`, `-sqrt2/2` or `1/2 sqrt3`.
pub fn parse_scalar(src: &str) -> Result<Scalar, AlgebraError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, n: 1, names: &() };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return perr(format!("trailing input in `{src}`"));
    }
    match v {
        Val::S(x) if x.im.is_zero() => x
            .re
            .constant()
            .ok_or_else(|| AlgebraError::Parse(format!("`{src}` is not a constant"))),
        _ => perr(format!("`{src}` is not a real number")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExactElem;

    fn ex(s: &str, n: usize) -> ExactElem {
        parse_elem(s, n, &()).unwrap().to_exact().unwrap()
    }

    #[test]
    fn units_and_coefficients() {
        let x = ex("1/2(E25 + E34) - sqrt2 E12", 5);
        let y = e::<Scalar>(5, 2, 5)
            .plus(&e(5, 3, 4))
            .scale(&Scalar::frac(1, 2))
            .minus(&e(5, 1, 2).scale(&Scalar::sqrt2()));
        assert_eq!(x, y);
        let z = ex("i(F11 - F22)", 3);
        assert_eq!(z, ex("iF11 - iF22", 3));
    }

    #[test]
    fn parameters() {
        let x = parse_elem("c E23 + s E45", 5, &()).unwrap();
        assert!(x.to_exact().is_none());
        let x = parse_elem("sqrt(3/5) E12", 3, &()).unwrap();
        assert!(x.to_exact().is_none());
        assert_eq!(parse_scalar("sqrt(8)").unwrap(), Scalar::sqrt2() * Scalar::from_int(2));
        assert_eq!(parse_scalar("-3/5").unwrap(), Scalar::frac(-3, 5));
        assert_eq!(parse_scalar("1/sqrt3").unwrap(), Scalar::sqrt3() * Scalar::frac(1, 3));
    }

    #[test]
    fn errors() {
        assert!(parse_elem("E12 E23", 3, &()).is_err());
        assert!(parse_elem("E19", 3, &()).is_err());
        assert!(parse_elem("2", 3, &()).is_err());
        assert!(parse_elem("E12 +", 3, &()).is_err());
    }
}
