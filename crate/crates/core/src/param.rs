//! Polynomials over Q(√2, √3) in trigonometric pairs, free indeterminates
//! and adjoined square roots, kept in a normal form.
//!
//! Normal form: every `sin` exponent is at most one (using `s^2 = 1 - c^2`)
//! and every adjoined root appears to the first power at most.

use std::collections::BTreeMap;
use std::fmt;

use crate::ring::Real;
use crate::scalar::Scalar;

/// Identifier of a trigonometric parameter pair `(cos t, sin t)`.
pub type TrigId = u8;
pub const THETA: TrigId = 0;
pub const PHI: TrigId = 1;

pub const P: u16 = 0;
pub const Q: u16 = 1;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Cos(TrigId),
    Sin(TrigId),
    Free(u16),
    /// A fixed square root of the positive rational `num / den`.
    Surd(u32, u32),
}

impl Var {
    pub fn trig_name(id: TrigId) -> String {
        match id {
            THETA => "theta".into(),
            PHI => "phi".into(),
            n => format!("t{n}"),
        }
    }

    pub fn free_name(id: u16) -> String {
        match id {
            P => "p".into(),
            Q => "q".into(),
            n => format!("x{n}"),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Cos(THETA) => write!(f, "c"),
            Var::Sin(THETA) => write!(f, "s"),
            Var::Cos(t) => write!(f, "cos({})", Var::trig_name(*t)),
            Var::Sin(t) => write!(f, "sin({})", Var::trig_name(*t)),
            Var::Free(n) => write!(f, "{}", Var::free_name(*n)),
            Var::Surd(n, 1) => write!(f, "√{n}"),
            Var::Surd(n, d) => write!(f, "√({n}/{d})"),
        }
    }
}

/// Sorted list of (variable, positive exponent).
pub type Mono = Vec<(Var, u32)>;

fn merge(a: &Mono, b: &Mono) -> Mono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn needs_reduction(m: &Mono) -> bool {
    m.iter()
        .any(|(v, e)| *e >= 2 && matches!(v, Var::Sin(_) | Var::Surd(..)))
}

/// Polynomial in normal form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamScalar {
    terms: BTreeMap<Mono, Scalar>,
}

impl ParamScalar {
    pub fn constant_of(s: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(Vec::new(), s);
        }
        ParamScalar { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut p = ParamScalar::default();
        p.terms.insert(vec![(v, 1)], Scalar::one());
        p
    }

    pub fn cos(t: TrigId) -> Self {
        Self::var(Var::Cos(t))
    }

    pub fn sin(t: TrigId) -> Self {
        Self::var(Var::Sin(t))
    }

    pub fn free(n: u16) -> Self {
        Self::var(Var::Free(n))
    }

    /// `√(num/den)` as an adjoined root.
    pub fn surd(num: u32, den: u32) -> Self {
        Self::var(Var::Surd(num, den))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| *v))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    /// Only adjoined roots occur, so the value is a number.
    pub fn is_numeric(&self) -> bool {
        self.vars().iter().all(|v| matches!(v, Var::Surd(..)))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn reduce_into(&mut self, m: Mono, c: Scalar) {
        if !needs_reduction(&m) {
            self.add_term(m, c);
            return;
        }
        // expand factor by factor; only cos and first powers are introduced
        let mut acc: Vec<(Mono, Scalar)> = vec![(Vec::new(), c)];
        for (v, e) in m {
            let factor: Vec<(Mono, Scalar)> = match v {
                Var::Sin(t) if e >= 2 => {
                    let half = e / 2;
                    let mut f = Vec::new();
                    // (1 - c^2)^half
                    for k in 0..=half {
                        let coef = Scalar::from_int(binom(half, k) as i64 * if k % 2 == 0 { 1 } else { -1 });
                        let mut mono = Vec::new();
                        if k > 0 {
                            mono.push((Var::Cos(t), 2 * k));
                        }
                        if e % 2 == 1 {
                            mono.push((Var::Sin(t), 1));
                        }
                        f.push((mono, coef));
                    }
                    f
                }
                Var::Surd(n, d) if e >= 2 => {
                    let r = Scalar::frac(n as i64, d as i64).pow(e / 2);
                    let mono = if e % 2 == 1 { vec![(v, 1)] } else { Vec::new() };
                    vec![(mono, r)]
                }
                _ => vec![(vec![(v, e)], Scalar::one())],
            };
            let mut next = Vec::with_capacity(acc.len() * factor.len());
            for (am, ac) in &acc {
                for (fm, fc) in &factor {
                    next.push((merge(am, fm), ac * fc));
                }
            }
            acc = next;
        }
        for (m, c) in acc {
            self.add_term(m, c);
        }
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return ParamScalar::default();
        }
        ParamScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = ParamScalar::one();
        for _ in 0..e {
            r = r.times(self);
        }
        r
    }

    /// Replaces the listed variables by values. Trig pairs must be given
    /// consistent values (`c^2 + s^2 = 1`).
    pub fn substitute(&self, assign: &[(Var, Scalar)]) -> ParamScalar {
        let mut out = ParamScalar::default();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for (v, e) in m {
                match assign.iter().find(|(w, _)| w == v) {
                    Some((_, val)) => coef = &coef * &val.pow(*e),
                    None => rest.push((*v, *e)),
                }
            }
            out.reduce_into(rest, coef);
        }
        out
    }

    /// Splits `x = a + b t` for an adjoined root `t`.
    fn split_surd(&self, t: Var) -> (ParamScalar, ParamScalar) {
        let mut a = ParamScalar::default();
        let mut b = ParamScalar::default();
        for (m, c) in &self.terms {
            match m.iter().position(|(v, _)| *v == t) {
                Some(k) => {
                    let mut rest = m.clone();
                    rest.remove(k);
                    b.add_term(rest, c.clone());
                }
                None => a.add_term(m.clone(), c.clone()),
            }
        }
        (a, b)
    }

    /// Evaluates numerically with the given values for non-root variables.
    pub fn eval_f64(&self, assign: &[(Var, f64)]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter().fold(c.to_f64(), |acc, (v, e)| {
                    let x = match v {
                        Var::Surd(n, d) => (*n as f64 / *d as f64).sqrt(),
                        _ => assign
                            .iter()
                            .find(|(w, _)| w == v)
                            .map(|(_, x)| *x)
                            .unwrap_or(f64::NAN),
                    };
                    acc * x.powi(*e as i32)
                })
            })
            .sum()
    }
}

fn binom(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

impl Real for ParamScalar {
    fn zero() -> Self {
        ParamScalar::default()
    }
    fn one() -> Self {
        ParamScalar::constant_of(Scalar::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_scalar(s: Scalar) -> Self {
        ParamScalar::constant_of(s)
    }
    fn plus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }
    fn minus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }
    fn times(&self, o: &Self) -> Self {
        let mut r = ParamScalar::default();
        if self.is_zero() || o.is_zero() {
            return r;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.reduce_into(merge(ma, mb), ca * cb);
            }
        }
        r
    }
    fn negated(&self) -> Self {
        ParamScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(c) = self.constant() {
            return c.inv().ok().map(ParamScalar::constant_of);
        }
        let vars = self.vars();
        if !vars.iter().all(|v| matches!(v, Var::Surd(..))) {
            return None;
        }
        // (a + b t)^-1 = (a - b t) / (a^2 - r b^2)
        let t = vars[0];
        let Var::Surd(n, d) = t else { unreachable!() };
        let (a, b) = self.split_surd(t);
        let r = Scalar::frac(n as i64, d as i64);
        let norm = a.times(&a).minus(&b.times(&b).scale(&r));
        let ninv = norm.try_inv()?;
        Some(a.minus(&b.times(&ParamScalar::var(t))).times(&ninv))
    }
    fn constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }
    fn gram_solve(g: &[Vec<Self>]) -> Option<(Vec<Vec<Self>>, Self)> {
        if g.iter().flatten().all(|x| x.is_constant()) {
            let c: Vec<Vec<Scalar>> = g
                .iter()
                .map(|r| r.iter().map(|x| x.constant().unwrap()).collect())
                .collect();
            let inv = crate::linalg::inverse(&c)?;
            let lift = inv
                .into_iter()
                .map(|r| r.into_iter().map(ParamScalar::constant_of).collect())
                .collect();
            return Some((lift, ParamScalar::one()));
        }
        if let Some(inv) = gauss_inverse(g) {
            return Some((inv, ParamScalar::one()));
        }
        let det = laplace_det(g);
        if det.is_zero() {
            return None;
        }
        Some((adjugate(g), det))
    }
}

/// Gauss-Jordan inverse that only divides by units of the ring.
fn gauss_inverse<R: Real>(a: &[Vec<R>]) -> Option<Vec<Vec<R>>> {
    let n = a.len();
    let mut m: Vec<Vec<R>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { R::one() } else { R::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].try_inv()?;
        m[col] = m[col].iter().map(|x| x.times(&inv)).collect();
        let prow = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                *x = x.minus(&f.times(p));
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant by cofactor expansion over column subsets.
pub fn laplace_det<R: Real>(a: &[Vec<R>]) -> R {
    let n = a.len();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    minor_det(a, &rows, &cols, &mut std::collections::HashMap::new())
}

fn minor_det<R: Real>(
    a: &[Vec<R>],
    rows: &[usize],
    cols: &[usize],
    memo: &mut std::collections::HashMap<(Vec<usize>, Vec<usize>), R>,
) -> R {
    if rows.is_empty() {
        return R::one();
    }
    if rows.len() == 1 {
        return a[rows[0]][cols[0]].clone();
    }
    let key = (rows.to_vec(), cols.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let r0 = rows[0];
    let mut acc = R::zero();
    for (k, &c) in cols.iter().enumerate() {
        if a[r0][c].is_zero() {
            continue;
        }
        let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let t = a[r0][c].times(&minor_det(a, &rows[1..], &sub, memo));
        acc = if k % 2 == 0 { acc.plus(&t) } else { acc.minus(&t) };
    }
    memo.insert(key, acc.clone());
    acc
}

/// Classical adjugate: `a * adj(a) = det(a) I`.
pub fn adjugate<R: Real>(a: &[Vec<R>]) -> Vec<Vec<R>> {
    let n = a.len();
    let mut memo = std::collections::HashMap::new();
    let mut adj = vec![vec![R::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let m = minor_det(a, &rows, &cols, &mut memo);
            adj[j][i] = if (i + j) % 2 == 0 { m } else { m.negated() };
        }
    }
    adj
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .iter()
                .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            let cs = c.to_string();
            let neg = c.signum() < 0 && c.is_rational();
            let body_c = if neg { (-c).to_string() } else { cs.clone() };
            let compound = !c.is_rational() && c.coeffs().iter().filter(|x| !num::Zero::is_zero(*x)).count() > 1;
            let coef = if compound { format!("({body_c})") } else { body_c };
            let term = if mono.is_empty() {
                coef
            } else if coef == "1" {
                mono.join("*")
            } else {
                format!("{coef}*{}", mono.join("*"))
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                write!(f, "{term}")?;
            } else {
                write!(f, " {} {term}", if neg { "-" } else { "+" })?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
