//! The ambient algebras su(2), su(3), so(5), g2 and so(6), one fixed
//! representative for each named subalgebra, the inclusion lattices, and the
//! table of chains with their stored evidence.
//!
//! Subalgebra keys may carry an `@context` suffix when a class needs a
//! second representative adapted to a particular `k`; chain IDs drop it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{e, f, AlgebraError, Elem, ExactElem, ParamElem};
use crate::chain::{Chain, ChainError, ExactChain, ParamChain, Subspace};
use crate::expr::{parse_elem, parse_scalar};
use crate::locus::{Family, Point};
use crate::param::{ParamScalar, Var, P, PHI, Q, THETA};
use crate::scalar::{Cx, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown algebra `{0}`")]
    UnknownAmbient(String),
    #[error("unknown subalgebra `{1}` of {0}")]
    UnknownSub(String, String),
    #[error("unknown chain `{0}`")]
    UnknownChain(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("{0}: {1}")]
    Expr(String, AlgebraError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

pub enum Basis {
    /// Every element of the ambient algebra.
    All,
    Span(&'static [&'static str]),
    /// Image of another subalgebra under a named conjugator.
    Conj(&'static str, &'static str),
}

pub struct SubDef {
    pub key: &'static str,
    pub basis: Basis,
}

/// A signed permutation matrix: basis vector `j` maps to `sign * e_target`.
pub struct ConjDef {
    pub key: &'static str,
    /// `(target, sign)` for each source index, 1-based.
    pub images: &'static [(usize, i8)],
}

/// `child ⊆ parent`, after applying `conj` to the child when given.
pub struct EdgeDef {
    pub child: &'static str,
    pub parent: &'static str,
    pub conj: Option<&'static str>,
}

pub struct AmbientDef {
    pub id: &'static str,
    pub n: usize,
    pub subs: &'static [SubDef],
    pub conjugators: &'static [ConjDef],
    pub edges: &'static [EdgeDef],
}

macro_rules! span {
    ($key:expr, [$($b:expr),* $(,)?]) => {
        SubDef { key: $key, basis: Basis::Span(&[$($b),*]) }
    };
}

const fn edge(child: &'static str, parent: &'static str) -> EdgeDef {
    EdgeDef { child, parent, conj: None }
}

const fn edge_via(child: &'static str, parent: &'static str, conj: &'static str) -> EdgeDef {
    EdgeDef { child, parent, conj: Some(conj) }
}

static SU2: AmbientDef = AmbientDef {
    id: "su2",
    n: 2,
    subs: &[SubDef { key: "su2", basis: Basis::All }, span!("u1", ["i(F11 - F22)"]), span!("1", [])],
    conjugators: &[],
    edges: &[],
};

static SU3: AmbientDef = AmbientDef {
    id: "su3",
    n: 3,
    subs: &[
        SubDef { key: "su3", basis: Basis::All },
        span!("su21", ["E12", "iF12", "i(F11 - F22)", "i(F11 + F22 - 2F33)"]),
        span!("su2", ["E12", "iF12", "i(F11 - F22)"]),
        span!("so3", ["E12", "E13", "E23"]),
        span!("so2", ["E12"]),
        span!("t2", ["i(F11 - F22)", "i(F11 + F22 - 2F33)"]),
        span!("u1", ["i(F11 - F22)"]),
        span!("delta_pq", ["i(p F11 + q F22 - (p + q) F33)"]),
    ],
    conjugators: &[],
    edges: &[],
};

static SO5: AmbientDef = AmbientDef {
    id: "so5",
    n: 5,
    subs: &[
        SubDef { key: "so5", basis: Basis::All },
        span!("so4", ["E23", "E24", "E25", "E34", "E35", "E45"]),
        span!("so3so2", ["E12", "E13", "E23", "E45"]),
        span!("u2", ["E23 + E45", "E25 + E34", "E24", "E35"]),
        span!("su2", ["E23 + E45", "E24 - E35", "E25 + E34"]),
        span!("so3", ["E12", "E13", "E23"]),
        SubDef { key: "so3@so4", basis: Basis::Conj("so3", "swap14") },
        span!("so3_princ", ["sqrt3 E14 - E24 + E35", "sqrt3 E15 + E25 + E34", "2E23 - E45"]),
        span!("t2", ["E23", "E45"]),
        span!("delta_theta", ["c E23 + s E45"]),
        span!("so2so2", ["E12", "E45"]),
        span!("so2", ["E12"]),
        span!("delta_theta@so3so2", ["c E12 + s E45"]),
        span!("t2@u2", ["E24", "E35"]),
        span!("delta_pq", ["p E24 + q E35"]),
        span!("u1", ["E23 + E45"]),
        span!("so2@so3_princ", ["2E23 - E45"]),
    ],
    conjugators: &[ConjDef { key: "swap14", images: &[(4, 1), (2, 1), (3, 1), (1, -1), (5, 1)] }],
    edges: &[
        edge("su2", "u2"),
        edge("u2", "so4"),
        edge("so4", "so5"),
        edge("so3", "so3so2"),
        edge("so3so2", "so5"),
        edge_via("so3", "so4", "swap14"),
        edge("so3_princ", "so5"),
    ],
};

/// Named elements of g2 inside so(7).
pub const G2_NAMES: &[(&str, &str)] = &[
    ("X1", "E46 - E57"),
    ("X2", "E45 + E67"),
    ("X4", "E16 + E25"),
    ("X5", "E17 - E24"),
    ("X6", "E14 + E27"),
    ("X7", "E15 - E26"),
    ("Y1", "2E13 + E46 + E57"),
    ("Y2", "2E23 - E45 + E67"),
    ("Y4", "2E34 - E25 + E16"),
    ("Y5", "2E35 + E24 + E17"),
    ("Y6", "2E36 + E27 - E14"),
    ("Y7", "2E37 - E26 - E15"),
    ("Z1", "2E12 - E47 + E56"),
    ("Z2", "E47 + E56"),
];

static G2: AmbientDef = AmbientDef {
    id: "g2",
    n: 7,
    subs: &[
        SubDef { key: "g2", basis: Basis::All },
        span!("su3", ["Z1", "Z2", "X1", "X2", "X4", "X5", "X6", "X7"]),
        span!("so4", ["X1", "X2", "Z2", "Y1", "Y2", "Z1"]),
        span!("su2", ["X1", "X2", "Z2"]),
        span!("su2~", ["Y1", "Y2", "Z1"]),
        span!("u2", ["X1", "X2", "Z1", "Z2"]),
        span!("u2~", ["Y1", "Y2", "Z1", "Z2"]),
        span!("t2", ["Z1", "Z2"]),
        span!("so3", ["X1", "X4", "X6"]),
        SubDef { key: "so3@so4", basis: Basis::Conj("so3", "g2_so3") },
        span!("so3_princ", ["Z1 + 2Z2", "X5 + sqrt(3/5) Y4", "X6 + sqrt(3/5) Y7"]),
        span!("delta_theta", ["1/3 sqrt3 c Z1 + s Z2"]),
        span!("so2", ["Z2"]),
        span!("u1", ["Z2"]),
        span!("u1~", ["Z1"]),
        span!("so2@so3", ["X1"]),
        span!("so2@so3_princ", ["Z1 + 2Z2"]),
    ],
    conjugators: &[ConjDef {
        key: "g2_so3",
        images: &[(7, -1), (2, 1), (5, -1), (4, 1), (3, 1), (6, 1), (1, 1)],
    }],
    edges: &[
        edge("su2", "u2"),
        edge("u2", "su3"),
        edge("su3", "g2"),
        edge_via("so3", "so4", "g2_so3"),
        edge("so3", "su3"),
        edge("so4", "g2"),
        edge("u2", "so4"),
        edge("su2~", "u2~"),
        edge("u2~", "so4"),
        edge("so3_princ", "g2"),
    ],
};

static SO6: AmbientDef = AmbientDef {
    id: "so6",
    n: 6,
    subs: &[
        SubDef { key: "so6", basis: Basis::All },
        // complex structure pairs coordinate a with a + 3
        span!("u3", ["E12 + E45", "E13 + E46", "E23 + E56", "E15 + E24", "E16 + E34", "E26 + E35", "E14", "E25", "E36"]),
        span!("su3", ["E12 + E45", "E13 + E46", "E23 + E56", "E15 + E24", "E16 + E34", "E26 + E35", "E14 - E25", "E25 - E36"]),
        span!("so3u1", ["E12 + E45", "E13 + E46", "E23 + E56", "E14 + E25 + E36"]),
        span!("su21", ["E12 + E45", "E15 + E24", "E14 - E25", "E14 + E25 - 2E36"]),
        span!("u2u1@u3", ["E12 + E45", "E15 + E24", "E14 - E25", "E14 + E25", "E36"]),
        span!("u2@u3", ["E12 + E45", "E15 + E24", "E14 - E25", "E14 + E25"]),
        span!("su2@u3", ["E12 + E45", "E15 + E24", "E14 - E25"]),
        span!("su2_delta_phi@u3", ["E12 + E45", "E15 + E24", "E14 - E25", "1/2 sqrt2 cphi (E14 + E25) + sphi E36"]),
        span!("delta_so3", ["E12 + E45", "E13 + E46", "E23 + E56"]),
        span!("t3@u3", ["E14", "E25", "E36"]),
        span!("t2@u3", ["E14", "E25"]),
        span!("u1@u3", ["E14 + E25 + E36"]),
        span!("so5", ["E12", "E13", "E14", "E15", "E23", "E24", "E25", "E34", "E35", "E45"]),
        span!("so4so2", ["E12", "E13", "E14", "E23", "E24", "E34", "E56"]),
        span!("so3so3", ["E12", "E13", "E23", "E45", "E46", "E56"]),
        span!("so4", ["E12", "E13", "E14", "E23", "E24", "E34"]),
        span!("so3so2", ["E12", "E13", "E23", "E45"]),
        SubDef { key: "so3so2@so4so2", basis: Basis::Conj("so3so2", "cycle456") },
        span!("so3", ["E12", "E13", "E23"]),
        span!("so3_princ", ["sqrt3 E14 - E24 + E35", "sqrt3 E15 + E25 + E34", "2E23 - E45"]),
        SubDef { key: "u2u1", basis: Basis::Conj("u2u1@u3", "pi") },
        SubDef { key: "u2", basis: Basis::Conj("u2@u3", "pi") },
        SubDef { key: "su2", basis: Basis::Conj("su2@u3", "pi") },
        span!("su2_delta_phi", ["E12 + E34", "E14 + E23", "E13 - E24", "1/2 sqrt2 cphi (E13 + E24) + sphi E56"]),
        span!("t2@so5", ["E13", "E24"]),
        span!("t3", ["E12", "E34", "E56"]),
        span!("t2@so4so2", ["E12", "E34"]),
        span!("su2so2", ["E12 + E34", "E14 + E23", "E13 - E24", "E56"]),
        span!("delta_theta_so2", ["c (E12 + E34) + s (E13 + E24)", "E56"]),
        span!("so2so2@so3so3", ["E12", "E45"]),
        span!("delta_theta@so3so3", ["c E12 + s E45"]),
        span!("t2so2", ["E13 - E24", "E13 + E24", "E56"]),
        span!("so2so2@u2u1", ["E12 + E34", "E56"]),
        span!("u1so2", ["E13 + E24", "E56"]),
        span!("u1@u2u1", ["E13 + E24"]),
        span!("so2@u2u1", ["E56"]),
        span!("t2@su3", ["E14 - E25", "E25 - E36"]),
        span!("so2u1", ["E23 + E56", "E14 + E25 + E36"]),
        span!("delta_theta@so3u1", ["c (E23 + E56) + s (E14 + E25 + E36)"]),
        span!("so2so2@so4", ["E12", "E34"]),
        span!("delta_theta@so4", ["c E12 + s E34"]),
        span!("so2so2@so3so2", ["E23", "E45"]),
        span!("delta_theta@so3so2", ["c E23 + s E45"]),
        span!("so2_delta_phi_so2", ["E13 - E24", "1/2 sqrt2 cphi (E13 + E24) + sphi E56"]),
        span!("delta_theta@su2_delta_phi", ["c (E13 - E24) + s (1/2 sqrt2 cphi (E13 + E24) + sphi E56)"]),
        span!("t2@su21", ["E14 - E25", "E14 + E25 - 2E36"]),
        span!("delta_theta@su21", ["c (E14 - E25) + s (E14 + E25 - 2E36)"]),
        span!("delta_theta@u2", ["c (E14 - E25) + s (E14 + E25)"]),
        span!("u1@su2", ["E14 - E25"]),
        span!("so2@delta_so3", ["E23 + E56"]),
        span!("so2@so3", ["E12"]),
        span!("so2@so3_princ", ["2E23 - E45"]),
    ],
    conjugators: &[
        // u3 coordinates to the block coordinates of so4so2
        ConjDef { key: "pi", images: &[(1, 1), (2, 1), (5, 1), (3, 1), (4, 1), (6, 1)] },
        ConjDef { key: "cycle456", images: &[(1, 1), (2, 1), (3, 1), (5, 1), (6, 1), (4, 1)] },
    ],
    edges: &[
        edge("u3", "so6"),
        edge("so5", "so6"),
        edge("so4so2", "so6"),
        edge("so3so3", "so6"),
        edge("su3", "u3"),
        edge("so3u1", "u3"),
        edge("u2u1@u3", "u3"),
        edge("so4", "so5"),
        edge("so3so2", "so5"),
        edge("so4", "so4so2"),
        edge("so3so2@so4so2", "so4so2"),
        edge("u2u1", "so4so2"),
        edge("so3so2", "so3so3"),
        edge("delta_so3", "so3so3"),
        edge("su21", "su3"),
        edge("delta_so3", "su3"),
        edge("su21", "u2u1@u3"),
        edge("su2_delta_phi", "u2u1"),
        edge("u2@u3", "u2u1@u3"),
        edge("delta_so3", "so3u1"),
        edge_via("u2@u3", "so4", "pi"),
        edge("so3", "so4"),
        edge("so3", "so3so2"),
        edge("su2@u3", "su21"),
        edge("su2", "su2_delta_phi"),
        edge("su2@u3", "u2@u3"),
        edge("so3_princ", "so5"),
    ],
};

static AMBIENTS: [&AmbientDef; 5] = [&SU2, &SU3, &SO5, &G2, &SO6];

pub fn ambients() -> &'static [&'static AmbientDef] {
    &AMBIENTS
}

pub fn ambient(id: &str) -> Result<&'static AmbientDef, CatalogError> {
    AMBIENTS
        .iter()
        .copied()
        .find(|a| a.id == id)
        .ok_or_else(|| CatalogError::UnknownAmbient(id.into()))
}

/// Class name of a subalgebra key.
pub fn class_of(key: &str) -> &str {
    key.split('@').next().unwrap_or(key)
}

fn full_basis(a: &AmbientDef) -> Vec<ParamElem> {
    let n = a.n;
    if a.id == "g2" {
        return G2_NAMES.iter().map(|(_, s)| parse_elem(s, n, &()).expect("g2 basis")).collect();
    }
    let mut v = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            v.push(e(n, i, j));
        }
    }
    if a.id.starts_with("su") {
        let i_unit: Cx<ParamScalar> = Cx::i();
        for i in 1..=n {
            for j in i + 1..=n {
                v.push(f::<ParamScalar>(n, i, j).scale_cx(&i_unit));
            }
        }
        for k in 1..n {
            v.push(f::<ParamScalar>(n, k, k).minus(&f(n, k + 1, k + 1)).scale_cx(&i_unit));
        }
    }
    v
}

impl AmbientDef {
    /// Parses an element, resolving g2 basis names.
    pub fn parse(&self, src: &str) -> Result<ParamElem, CatalogError> {
        let n = self.n;
        let names = |name: &str| -> Option<ParamElem> {
            G2_NAMES
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, s)| parse_elem(s, n, &()).expect("g2 basis"))
        };
        let r = if self.id == "g2" { parse_elem(src, n, &names) } else { parse_elem(src, n, &()) };
        r.map_err(|e| CatalogError::Expr(src.into(), e))
    }

    /// Renders an element; g2 elements are written in the X, Y, Z basis.
    pub fn describe(&self, x: &ExactElem) -> String {
        if self.id != "g2" {
            return x.to_string();
        }
        let Ok(basis) = crate::chain::exact_basis(&self.full()) else { return x.to_string() };
        let Some(co) = crate::algebra::coordinates_in(&basis, x) else { return x.to_string() };
        let mut out = String::new();
        for (c, (name, _)) in co.iter().zip(G2_NAMES) {
            if c.is_zero() {
                continue;
            }
            // sign of the leading term, so `-√2 X1` reads as a subtraction
            let neg = c.coeffs().iter().find(|v| !num::Zero::is_zero(*v)).is_some_and(num::Signed::is_negative);
            let a = if neg { -c.clone() } else { c.clone() };
            let coef = match a.to_string().as_str() {
                "1" => String::new(),
                t if t.contains(' ') => format!("({t}) "),
                t => format!("{t} "),
            };
            let sign = match (out.is_empty(), neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            out.push_str(&format!("{sign}{coef}{name}"));
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    pub fn sub(&self, key: &str) -> Result<&'static SubDef, CatalogError>
    where
        Self: 'static,
    {
        self.subs
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| CatalogError::UnknownSub(self.id.into(), key.into()))
    }

    pub fn has_sub(&self, key: &str) -> bool {
        self.subs.iter().any(|s| s.key == key)
    }

    pub fn full(&self) -> Vec<ParamElem> {
        full_basis(self)
    }

    pub fn conjugator(&self, key: &str) -> Result<ExactElem, CatalogError> {
        let c = self
            .conjugators
            .iter()
            .find(|c| c.key == key)
            .ok_or_else(|| CatalogError::UnknownSub(self.id.into(), key.into()))?;
        let mut g = Elem::zero(self.n);
        for (j, &(t, sign)) in c.images.iter().enumerate() {
            g.set(t - 1, j, Cx::real(Scalar::from_int(sign as i64)));
        }
        Ok(g)
    }

    /// Basis of a subalgebra, with parameters left symbolic.
    pub fn basis(&'static self, key: &str) -> Result<Vec<ParamElem>, CatalogError> {
        match &self.sub(key)?.basis {
            Basis::All => Ok(self.full()),
            Basis::Span(v) => v.iter().map(|s| self.parse(s)).collect(),
            Basis::Conj(inner, conj) => {
                let g = self.conjugator(conj)?.lift();
                let gt = g.conj_transpose();
                Ok(self.basis(inner)?.iter().map(|b| b.conjugate(&g, &gt)).collect())
            }
        }
    }
}

/// A chain `h ⊂ k ⊂ g` by subalgebra keys.
pub struct ChainDef {
    pub g: &'static str,
    pub k: &'static str,
    pub h: &'static str,
}

impl ChainDef {
    pub fn id(&self) -> String {
        format!("{}/{}/{}", self.g, class_of(self.k), class_of(self.h))
    }

    pub fn ambient(&self) -> &'static AmbientDef {
        ambient(self.g).expect("catalog chain with known ambient")
    }
}

const fn ch(g: &'static str, k: &'static str, h: &'static str) -> ChainDef {
    ChainDef { g, k, h }
}

static CHAINS: &[ChainDef] = &[
    ch("su2", "u1", "1"),
    ch("su3", "su21", "su2"),
    ch("su3", "su21", "so2"),
    ch("su3", "su21", "t2"),
    ch("su3", "su21", "delta_pq"),
    ch("su3", "su2", "u1"),
    ch("su3", "so3", "so2"),
    ch("so5", "so4", "su2"),
    ch("so5", "so4", "so3@so4"),
    ch("so5", "so4", "u2"),
    ch("so5", "so4", "t2"),
    ch("so5", "so4", "delta_theta"),
    ch("so5", "so3so2", "so3"),
    ch("so5", "so3so2", "so2so2"),
    ch("so5", "so3so2", "so2"),
    ch("so5", "so3so2", "delta_theta@so3so2"),
    ch("so5", "u2", "su2"),
    ch("so5", "u2", "t2@u2"),
    ch("so5", "u2", "delta_pq"),
    ch("so5", "su2", "u1"),
    ch("so5", "so3", "so2"),
    ch("so5", "so3_princ", "so2@so3_princ"),
    ch("g2", "su3", "u2"),
    ch("g2", "su3", "su2"),
    ch("g2", "su3", "t2"),
    ch("g2", "su3", "so3"),
    ch("g2", "su3", "so2"),
    ch("g2", "so4", "so3@so4"),
    ch("g2", "so4", "su2"),
    ch("g2", "so4", "su2~"),
    ch("g2", "so4", "delta_theta"),
    ch("g2", "so4", "t2"),
    ch("g2", "so4", "u2"),
    ch("g2", "so4", "u2~"),
    ch("g2", "u2", "t2"),
    ch("g2", "u2", "su2"),
    ch("g2", "u2", "delta_theta"),
    ch("g2", "u2~", "t2"),
    ch("g2", "u2~", "su2~"),
    ch("g2", "u2~", "delta_theta"),
    ch("g2", "su2", "u1"),
    ch("g2", "su2~", "u1~"),
    ch("g2", "so3", "so2@so3"),
    ch("g2", "so3_princ", "so2@so3_princ"),
    ch("so6", "u3", "u2u1@u3"),
    ch("so6", "u3", "su3"),
    ch("so6", "u3", "so3u1"),
    ch("so6", "u3", "su21"),
    ch("so6", "u3", "delta_so3"),
    ch("so6", "u3", "t3@u3"),
    ch("so6", "u3", "u2@u3"),
    ch("so6", "u3", "su2@u3"),
    ch("so6", "u3", "t2@u3"),
    ch("so6", "u3", "u1@u3"),
    ch("so6", "u3", "su2_delta_phi@u3"),
    ch("so6", "so5", "so3so2"),
    ch("so6", "so5", "so4"),
    ch("so6", "so5", "u2"),
    ch("so6", "so5", "su2"),
    ch("so6", "so5", "t2@so5"),
    ch("so6", "so5", "so3"),
    ch("so6", "so5", "so3_princ"),
    ch("so6", "so4so2", "so4"),
    ch("so6", "so4so2", "so3so2@so4so2"),
    ch("so6", "so4so2", "so3"),
    ch("so6", "so4so2", "u2u1"),
    ch("so6", "so4so2", "u2"),
    ch("so6", "so4so2", "t3"),
    ch("so6", "so4so2", "t2@so4so2"),
    ch("so6", "so4so2", "su2so2"),
    ch("so6", "so4so2", "su2_delta_phi"),
    ch("so6", "so4so2", "delta_theta_so2"),
    ch("so6", "so3so3", "so3so2"),
    ch("so6", "so3so3", "delta_so3"),
    ch("so6", "so3so3", "so2so2@so3so3"),
    ch("so6", "so3so3", "so3"),
    ch("so6", "so3so3", "delta_theta@so3so3"),
    ch("so6", "u2u1", "u2"),
    ch("so6", "u2u1", "t2so2"),
    ch("so6", "u2u1", "su2_delta_phi"),
    ch("so6", "u2u1", "su2so2"),
    ch("so6", "u2u1", "su2"),
    ch("so6", "u2u1", "so2so2@u2u1"),
    ch("so6", "u2u1", "u1so2"),
    ch("so6", "u2u1", "u1@u2u1"),
    ch("so6", "u2u1", "so2@u2u1"),
    ch("so6", "su3", "su21"),
    ch("so6", "su3", "delta_so3"),
    ch("so6", "su3", "t2@su3"),
    ch("so6", "su3", "su2@u3"),
    ch("so6", "so3u1", "so2u1"),
    ch("so6", "so3u1", "delta_so3"),
    ch("so6", "so3u1", "delta_theta@so3u1"),
    ch("so6", "so4", "so2so2@so4"),
    ch("so6", "so4", "so3"),
    ch("so6", "so4", "su2"),
    ch("so6", "so4", "delta_theta@so4"),
    ch("so6", "so3so2", "so2so2@so3so2"),
    ch("so6", "so3so2", "so3"),
    ch("so6", "so3so2", "delta_theta@so3so2"),
    ch("so6", "su2_delta_phi", "su2"),
    ch("so6", "su2_delta_phi", "so2_delta_phi_so2"),
    ch("so6", "su2_delta_phi", "delta_theta@su2_delta_phi"),
    ch("so6", "su21", "t2@su21"),
    ch("so6", "su21", "su2@u3"),
    ch("so6", "su21", "delta_theta@su21"),
    ch("so6", "u2@u3", "t2@u3"),
    ch("so6", "u2@u3", "su2@u3"),
    ch("so6", "u2@u3", "delta_theta@u2"),
    ch("so6", "su2@u3", "u1@su2"),
    ch("so6", "delta_so3", "so2@delta_so3"),
    ch("so6", "so3", "so2@so3"),
    ch("so6", "so3_princ", "so2@so3_princ"),
];

pub fn chains() -> &'static [ChainDef] {
    CHAINS
}

pub fn find_chain(id: &str) -> Result<&'static ChainDef, CatalogError> {
    CHAINS.iter().find(|c| c.id() == id).ok_or_else(|| CatalogError::UnknownChain(id.into()))
}

/// A stored commuting pair `X = xm + xs`, `Y = ym + ys`.
pub struct WitnessDef {
    pub chain: &'static str,
    pub xm: &'static str,
    pub ym: &'static str,
    pub xs: &'static str,
    pub ys: &'static str,
    /// `[X^m, Y^m]` as quoted with the pair, when a value is given.
    pub bracket: Option<&'static str>,
    /// `[X^m, Y^m]^m` as quoted, when given.
    pub mm: Option<&'static str>,
    /// Parameter values where the m-component vanishes.
    pub fails_at: &'static [&'static str],
    pub note: &'static str,
    /// Found here by search rather than taken from the classification.
    pub derived: bool,
}

const W0: WitnessDef = WitnessDef {
    chain: "",
    xm: "",
    ym: "",
    xs: "",
    ys: "",
    bracket: None,
    mm: None,
    fails_at: &[],
    note: "",
    derived: false,
};

const S0: &[&str] = &["1,0", "-1,0"];
const C0: &[&str] = &["0,1", "0,-1"];

static WITNESSES: &[WitnessDef] = &[
    WitnessDef {
        chain: "su3/su21/delta_pq",
        xm: "E12",
        ym: "iF12",
        xs: "E13 + E23",
        ys: "i(F23 - F13)",
        bracket: Some("2i(F11 - F22)"),
        fails_at: &["1,-1"],
        ..W0
    },
    WitnessDef {
        chain: "so5/so4/delta_theta",
        xm: "E34",
        ym: "E24",
        xs: "E13",
        ys: "-E12",
        bracket: Some("E23"),
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so5/so4/delta_theta",
        xm: "E25",
        ym: "E24",
        xs: "E14",
        ys: "E15",
        bracket: Some("E45"),
        fails_at: C0,
        ..W0
    },
    WitnessDef {
        chain: "so5/so3so2/delta_theta",
        xm: "E13",
        ym: "E23",
        xs: "-E14",
        ys: "E24",
        bracket: Some("-E12"),
        fails_at: S0,
        note: "family spanned by cos E12 + sin E45",
        ..W0
    },
    WitnessDef {
        chain: "so5/u2/delta_pq",
        xm: "1/2 (E25 + E34)",
        ym: "1/2 (E23 + E45)",
        xs: "E14 + 1/2 (E23 - E45)",
        ys: "E12 + 1/2 (E25 - E34)",
        bracket: Some("-1/2 (E24 - E35)"),
        fails_at: &["1,-1"],
        ..W0
    },
    WitnessDef {
        chain: "g2/su3/su2",
        xm: "sqrt2 X4 + X5",
        ym: "sqrt2 X7 + X6",
        xs: "-Y6",
        ys: "Y5",
        bracket: Some("Z1 + 3Z2"),
        ..W0
    },
    WitnessDef {
        chain: "g2/su3/t2",
        xm: "(sqrt2 - 3) X4 + X6",
        ym: "(2 sqrt2 - 1) X5 + (sqrt2 - 1) X7",
        xs: "(1 - sqrt2) Y5 + Y7",
        ys: "(1 - sqrt2) Y6 + Y4",
        mm: Some("6 (sqrt2 - 1) X2"),
        note: "m-component is six times the quoted value",
        ..W0
    },
    WitnessDef {
        chain: "g2/so4/su2~",
        xm: "X2",
        ym: "X1",
        xs: "X4 + X5",
        ys: "X6 + X7",
        bracket: Some("-2Z2"),
        ..W0
    },
    WitnessDef {
        chain: "g2/so4/so3",
        xm: "1/3 sqrt2 (3X2 - Y2) + 4/9 sqrt(6) (Z1 + 3Z2)",
        ym: "-1/6 sqrt2 (Z1 + 3Z2)",
        xs: "X4 - 1/3 sqrt2 X5 + 1/3 sqrt(6) X7 + Y4 - 8/9 sqrt2 Y5 - 1/9 sqrt(6) Y7",
        ys: "X6 - 1/6 sqrt2 X7 + 1/9 sqrt(6) Y5 - 1/6 sqrt2 Y7",
        bracket: Some("-2X1 - 2/9 Y1"),
        mm: Some("-4/3 X1 + 4/9 Y1"),
        note: "the diagonal so(3) is not symmetric for the induced metric",
        derived: true,
        ..W0
    },
    WitnessDef {
        chain: "g2/so4/delta_theta",
        xm: "X2 + Y2",
        ym: "-3X1 + Y1",
        xs: "X4 + Y4",
        ys: "-3X7 + Y7",
        bracket: Some("2 (Z1 + 3Z2)"),
        fails_at: &["1/2,1/2 sqrt3", "-1/2,-1/2 sqrt3"],
        ..W0
    },
    WitnessDef {
        chain: "g2/so4/delta_theta",
        xm: "1/2 sqrt2 (X1 + Y1)",
        ym: "1/2 sqrt2 (-X2 + Y2)",
        xs: "X4",
        ys: "X7",
        bracket: Some("-Z1 - Z2"),
        fails_at: &["1/2 sqrt3,1/2", "-1/2 sqrt3,-1/2"],
        ..W0
    },
    WitnessDef {
        chain: "g2/u2/delta_theta",
        xm: "X2",
        ym: "X1",
        xs: "-1/2 sqrt2 (X7 - Y7)",
        ys: "1/2 sqrt2 (X4 + Y4)",
        bracket: Some("-2Z2"),
        fails_at: C0,
        ..W0
    },
    WitnessDef {
        chain: "g2/u2~/delta_theta",
        xm: "-Y2",
        ym: "Y1",
        xs: "X1 + sqrt2 X6",
        ys: "X2 + sqrt2 X5",
        bracket: Some("-2Z1"),
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so6/u3/t3",
        xm: "E12 + E45",
        ym: "E23 + E56",
        xs: "E12 - E45",
        ys: "-E23 + E56",
        bracket: Some("E13 + E46"),
        ..W0
    },
    WitnessDef {
        chain: "so6/u3/u2",
        xm: "E13 + E46",
        ym: "E36",
        xs: "E26 - E35",
        ys: "E12 - E45",
        bracket: Some("E16 + E34"),
        ..W0
    },
    WitnessDef {
        chain: "so6/u3/su2_delta_phi",
        xm: "E23 + E56",
        ym: "E26 + E35",
        xs: "E12 + E13 - E45 - E46",
        ys: "E15 - E16 - E24 + E34",
        bracket: Some("2 (E25 - E36)"),
        fails_at: &["1/3 sqrt3,-1/3 sqrt6", "-1/3 sqrt3,1/3 sqrt6"],
        ..W0
    },
    WitnessDef {
        chain: "so6/so5/u2",
        xm: "E25 + E35",
        ym: "E15 + E45",
        xs: "E26 + E36",
        ys: "-E16 - E46",
        bracket: Some("E12 + E13 - E24 - E34"),
        ..W0
    },
    WitnessDef {
        chain: "so6/so5/so3",
        xm: "E15",
        ym: "E14",
        xs: "E46",
        ys: "E56",
        bracket: Some("E45"),
        note: "bracket sign differs from the quoted value",
        ..W0
    },
    WitnessDef {
        chain: "so6/so5/so3_princ",
        xm: "E12",
        ym: "E13",
        xs: "E26",
        ys: "-E36",
        bracket: Some("-E23"),
        ..W0
    },
    WitnessDef {
        chain: "so6/so4so2/su2so2",
        xm: "E12 - E34",
        ym: "E14 - E23",
        xs: "sqrt2 (E36 + E45)",
        ys: "sqrt2 (E16 + E25)",
        ..W0
    },
    WitnessDef {
        chain: "so6/so4so2/su2_delta_phi",
        xm: "E12 - E34",
        ym: "E14 - E23",
        xs: "sqrt2 (E36 + E45)",
        ys: "sqrt2 (E16 + E25)",
        bracket: Some("-2 (E13 + E24)"),
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so6/so4so2/delta_theta_so2",
        xm: "E13 - E24",
        ym: "E23 + E14",
        xs: "sqrt2 (E25 + E36)",
        ys: "sqrt2 (E15 - E46)",
        bracket: Some("-2 (E12 + E34)"),
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so6/so4so2/delta_theta_so2",
        xm: "E12 - E34",
        ym: "E14 - E23",
        xs: "sqrt2 (E36 + E45)",
        ys: "sqrt2 (E16 + E25)",
        bracket: Some("-2 (E13 + E24)"),
        fails_at: C0,
        note: "the pair for su2so2, covering the circle inside the second su2 factor",
        ..W0
    },
    WitnessDef {
        chain: "so6/so3so3/so3",
        xm: "E45",
        ym: "E46",
        xs: "E25",
        ys: "-E26",
        bracket: Some("-E56"),
        ..W0
    },
    WitnessDef {
        chain: "so6/so3so3/delta_theta",
        xm: "E23",
        ym: "E13",
        xs: "E14",
        ys: "E24",
        bracket: Some("E12"),
        fails_at: S0,
        note: "Y^s = E24; the quoted -E15 does not commute",
        ..W0
    },
    WitnessDef {
        chain: "so6/u2u1/u1so2",
        xm: "E12 + E34",
        ym: "E14 + E23",
        xs: "sqrt2 (E15 + E26)",
        ys: "sqrt2 (E35 - E46)",
        bracket: Some("2 (E13 - E24)"),
        ..W0
    },
    WitnessDef {
        chain: "so6/su3/t2",
        xm: "E12 + E45",
        ym: "E13 + E46",
        xs: "E13 - E46",
        ys: "E12 - E45",
        ..W0
    },
    WitnessDef {
        chain: "so6/su3/su2",
        xm: "E23 + E56",
        ym: "E26 + E35",
        xs: "E12 + E13 - E45 - E46",
        ys: "E15 - E16 - E24 + E34",
        bracket: Some("2 (E25 - E36)"),
        ..W0
    },
    WitnessDef {
        chain: "so6/so3u1/delta_theta",
        xm: "E12 + E45",
        ym: "E13 + E46",
        xs: "E12 - E45",
        ys: "-E13 + E46",
        bracket: Some("-(E23 + E56)"),
        fails_at: S0,
        note: "Y^s = -E13 + E46; family spanned by cos (E23 + E56) + sin (E14 + E25 + E36)",
        ..W0
    },
    WitnessDef {
        chain: "so6/so4/su2",
        xm: "E12 - E34",
        ym: "E13 + E24",
        xs: "sqrt2 (E35 + E16)",
        ys: "sqrt2 (E25 + E46)",
        bracket: Some("2 (E14 - E23)"),
        ..W0
    },
    WitnessDef {
        chain: "so6/so4/delta_theta",
        xm: "E23",
        ym: "E13",
        xs: "E25",
        ys: "-E15",
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so6/so4/delta_theta",
        xm: "E14",
        ym: "E13",
        xs: "E45",
        ys: "-E35",
        bracket: Some("E34"),
        fails_at: C0,
        ..W0
    },
    WitnessDef {
        chain: "so6/so3so2/delta_theta",
        xm: "E12",
        ym: "E13",
        xs: "E24",
        ys: "-E34",
        bracket: Some("-E23"),
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so6/su2_delta_phi/delta_theta",
        xm: "E12 + E34",
        ym: "E14 + E23",
        xs: "sqrt2 (E15 + E26)",
        ys: "sqrt2 (E35 - E46)",
        bracket: Some("2 (E13 - E24)"),
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so6/su21/delta_theta",
        xm: "E12 + E45",
        ym: "E15 + E24",
        xs: "sqrt2 (E16 + E35)",
        ys: "sqrt2 (E46 - E23)",
        bracket: Some("2 (E14 - E25)"),
        fails_at: S0,
        ..W0
    },
    WitnessDef {
        chain: "so6/u2/delta_theta",
        xm: "E12 + E45",
        ym: "E15 + E24",
        xs: "sqrt2 (E16 + E35)",
        ys: "sqrt2 (E46 - E23)",
        bracket: Some("2 (E14 - E25)"),
        fails_at: S0,
        ..W0
    },
];

pub fn witnesses() -> &'static [WitnessDef] {
    WITNESSES
}

pub fn witnesses_for(id: &str) -> Vec<&'static WitnessDef> {
    WITNESSES.iter().filter(|w| w.chain == id).collect()
}

/// A witness moved from `source` to `target` (smaller `h`, same `k`).
pub struct TransferDef {
    pub target: &'static str,
    pub source: &'static str,
    /// For a family target, the parameter values this transfer covers.
    pub at: &'static [&'static str],
}

static TRANSFERS: &[TransferDef] = &[
    TransferDef { target: "g2/su3/so2", source: "g2/su3/su2", at: &[] },
    TransferDef { target: "so6/u3/su2", source: "so6/u3/u2", at: &[] },
    TransferDef { target: "so6/u3/t2", source: "so6/u3/t3", at: &[] },
    TransferDef { target: "so6/u3/u1", source: "so6/u3/t3", at: &[] },
    TransferDef { target: "so6/so5/su2", source: "so6/so5/u2", at: &[] },
    TransferDef { target: "so6/so5/t2", source: "so6/so5/u2", at: &[] },
    TransferDef { target: "so6/u2u1/u1", source: "so6/u2u1/u1so2", at: &[] },
    TransferDef { target: "so6/u2u1/so2", source: "so6/u2u1/u1so2", at: &[] },
    TransferDef { target: "so6/so3so3/delta_theta", source: "so6/so3so3/so3", at: S0 },
];

pub fn transfers() -> &'static [TransferDef] {
    TRANSFERS
}

pub fn transfers_for(id: &str) -> Vec<&'static TransferDef> {
    TRANSFERS.iter().filter(|t| t.target == id).collect()
}

/// Positive answers resting on an external result rather than on a
/// certificate computed here.
pub struct CitedDef {
    pub chain: &'static str,
    pub note: &'static str,
}

static CITED: &[CitedDef] = &[CitedDef {
    chain: "g2/so4/su2",
    note: "positive by an external bracket-rank argument; \
           the mechanical rank separation is inapplicable here (ranks 6 and 6)",
}];

pub fn cited(id: &str) -> Option<&'static CitedDef> {
    CITED.iter().find(|c| c.chain == id)
}

/// Parameter values of a family where no stored symbolic witness applies.
pub struct ExceptionDef {
    pub chain: &'static str,
    pub points: &'static [&'static str],
}

static EXCEPTIONS: &[ExceptionDef] = &[
    ExceptionDef { chain: "su3/su21/delta_pq", points: &["1,-1"] },
    ExceptionDef { chain: "so5/so4/delta_theta", points: &[] },
    ExceptionDef { chain: "so5/so3so2/delta_theta", points: S0 },
    ExceptionDef { chain: "so5/u2/delta_pq", points: &["1,-1"] },
    ExceptionDef { chain: "g2/so4/delta_theta", points: &[] },
    ExceptionDef { chain: "g2/u2/delta_theta", points: C0 },
    ExceptionDef { chain: "g2/u2~/delta_theta", points: S0 },
    ExceptionDef { chain: "so6/u3/su2_delta_phi", points: &["1/3 sqrt3,-1/3 sqrt6", "-1/3 sqrt3,1/3 sqrt6"] },
    ExceptionDef { chain: "so6/so4so2/su2_delta_phi", points: S0 },
    ExceptionDef { chain: "so6/so4so2/delta_theta_so2", points: &[] },
    ExceptionDef { chain: "so6/so3so3/delta_theta", points: S0 },
    ExceptionDef { chain: "so6/so3u1/delta_theta", points: S0 },
    ExceptionDef { chain: "so6/so4/delta_theta", points: &[] },
    ExceptionDef { chain: "so6/so3so2/delta_theta", points: S0 },
    ExceptionDef { chain: "so6/su2_delta_phi/delta_theta", points: S0 },
    ExceptionDef { chain: "so6/su21/delta_theta", points: S0 },
    ExceptionDef { chain: "so6/u2/delta_theta", points: S0 },
];

pub fn exceptions() -> &'static [ExceptionDef] {
    EXCEPTIONS
}

pub fn exceptions_for(id: &str) -> Option<&'static ExceptionDef> {
    EXCEPTIONS.iter().find(|e| e.chain == id)
}

/// How one parameter is fixed when a chain is built.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum ParamValue {
    #[default]
    Symbolic,
    Trig(Scalar, Scalar),
    Pair(Scalar, Scalar),
}

/// Parameter choices for building a chain.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Params {
    pub theta: ParamValue,
    pub phi: ParamValue,
    pub pq: ParamValue,
}

/// φ used for the circle in `su2_delta_phi` when it is not the family
/// parameter.
pub fn default_phi() -> (Scalar, Scalar) {
    (Scalar::frac(3, 5), Scalar::frac(4, 5))
}

pub fn trig_value(c: Scalar, s: Scalar) -> Result<ParamValue, CatalogError> {
    if !(&c * &c + &s * &s).is_one() {
        return Err(CatalogError::BadParameter(format!("({c}, {s}) is not on the unit circle")));
    }
    Ok(ParamValue::Trig(c, s))
}

/// `(p, q)` as coprime integers with `p >= 0`.
pub fn pq_value(p: i64, q: i64) -> Result<ParamValue, CatalogError> {
    let g = num::integer::gcd(p, q);
    if g == 0 {
        return Err(CatalogError::BadParameter("(p, q) = (0, 0)".into()));
    }
    let (mut p, mut q) = (p / g, q / g);
    if p < 0 || (p == 0 && q < 0) {
        p = -p;
        q = -q;
    }
    Ok(ParamValue::Pair(Scalar::from_int(p), Scalar::from_int(q)))
}

/// Parses `"c,s"` (or `"p,q"`) into two scalars.
pub fn parse_pair(src: &str) -> Result<(Scalar, Scalar), CatalogError> {
    let parts: Vec<&str> = src.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(CatalogError::BadParameter(format!("expected two values in `{src}`")));
    };
    let p = |x: &str| parse_scalar(x.trim()).map_err(|e| CatalogError::Expr(x.into(), e));
    Ok((p(a)?, p(b)?))
}

/// Point of `family` described by `"x,y"`.
pub fn parse_point(family: Family, src: &str) -> Result<Point, CatalogError> {
    let (a, b) = parse_pair(src)?;
    let pt = match family {
        Family::Trig(id) => Point::Trig { id, c: a, s: b },
        Family::Projective(p_var, q_var) => Point::Projective { p_var, q_var, p: a, q: b },
        Family::Affine(var) => Point::Affine { var, x: a },
    };
    if !pt.is_valid() {
        return Err(CatalogError::BadParameter(format!("{src} is not a valid point")));
    }
    Ok(pt)
}

/// A chain built from the catalog.
#[derive(Clone, Debug)]
pub enum BuiltChain {
    Exact(ExactChain),
    /// Depends on one family parameter.
    Family(ParamChain),
    /// Constant, but with coefficients outside Q(√2, √3).
    Numeric(ParamChain),
}

impl BuiltChain {
    pub fn id(&self) -> &str {
        match self {
            BuiltChain::Exact(c) => &c.id,
            BuiltChain::Family(c) | BuiltChain::Numeric(c) => &c.id,
        }
    }
}

fn vars_of(v: &[ParamElem]) -> Vec<Var> {
    let mut out: Vec<Var> = v
        .iter()
        .flat_map(|b| b.entries().iter().flat_map(|x| x.re.vars().into_iter().chain(x.im.vars())))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn assignment(params: &Params, vars: &[Var]) -> Vec<(Var, Scalar)> {
    let uses = |v: Var| vars.contains(&v);
    let mut asg = Vec::new();
    let theta = uses(Var::Cos(THETA)) || uses(Var::Sin(THETA));
    let phi = uses(Var::Cos(PHI)) || uses(Var::Sin(PHI));
    if let ParamValue::Trig(c, s) = &params.theta {
        asg.push((Var::Cos(THETA), c.clone()));
        asg.push((Var::Sin(THETA), s.clone()));
    }
    match &params.phi {
        ParamValue::Trig(c, s) => {
            asg.push((Var::Cos(PHI), c.clone()));
            asg.push((Var::Sin(PHI), s.clone()));
        }
        _ if phi && theta => {
            let (c, s) = default_phi();
            asg.push((Var::Cos(PHI), c));
            asg.push((Var::Sin(PHI), s));
        }
        _ => {}
    }
    if let ParamValue::Pair(p, q) = &params.pq {
        asg.push((Var::Free(P), p.clone()));
        asg.push((Var::Free(Q), q.clone()));
    }
    asg
}

/// Which family parameters a chain depends on (before substitution).
pub fn chain_vars(def: &ChainDef) -> Result<Vec<Var>, CatalogError> {
    let a = def.ambient();
    let mut v = a.basis(def.k)?;
    v.extend(a.basis(def.h)?);
    Ok(vars_of(&v).into_iter().filter(|x| !matches!(x, Var::Surd(..))).collect())
}

/// Family parameters one subalgebra of `a` depends on.
pub fn sub_vars(a: &'static AmbientDef, key: &str) -> Result<Vec<Var>, CatalogError> {
    Ok(vars_of(&a.basis(key)?).into_iter().filter(|x| !matches!(x, Var::Surd(..))).collect())
}

pub fn build_chain(def: &ChainDef, params: &Params) -> Result<BuiltChain, CatalogError> {
    let a = def.ambient();
    let g = a.full();
    let k = a.basis(def.k)?;
    let h = a.basis(def.h)?;
    let mut all = k.clone();
    all.extend(h.iter().cloned());
    let asg = assignment(params, &vars_of(&all));
    let sub = |v: &[ParamElem]| -> Vec<ParamElem> { v.iter().map(|b| b.substitute(&asg)).collect() };
    let (k, h) = (sub(&k), sub(&h));
    let id = def.id();
    let left: Vec<Var> = {
        let mut x = k.clone();
        x.extend(h.iter().cloned());
        vars_of(&x)
    };
    if left.is_empty() {
        let ex = |v: &[ParamElem]| crate::chain::exact_basis(v);
        return Ok(BuiltChain::Exact(Chain::new(&id, ex(&g)?, ex(&k)?, ex(&h)?)?));
    }
    let pc = Chain::new(&id, g, k, h)?;
    if left.iter().all(|v| matches!(v, Var::Surd(..))) {
        Ok(BuiltChain::Numeric(pc))
    } else {
        pc.family()?;
        Ok(BuiltChain::Family(pc))
    }
}

/// Outcome of checking one lattice edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeReport {
    pub child: String,
    pub parent: String,
    pub conj: Option<String>,
    pub contained: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("{0}: {1}")]
    NotSubalgebra(String, String),
    #[error("edge {0} ⊂ {1} fails")]
    Edge(String, String),
    #[error("conjugator {0} does not preserve the ambient algebra")]
    Conjugator(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

fn subspace(a: &'static AmbientDef, key: &str) -> Result<Subspace<ParamScalar>, LatticeError> {
    let b = a.basis(key)?;
    let s = Subspace::new(key, b).map_err(|e| LatticeError::NotSubalgebra(key.into(), e.to_string()))?;
    if let Some((i, j)) = s.closure_failure() {
        return Err(LatticeError::NotSubalgebra(key.into(), format!("[b{i}, b{j}] leaves the span")));
    }
    Ok(s)
}

/// Checks every subalgebra of an ambient for independence and closure, every
/// conjugator for preserving the ambient, and every edge for containment.
pub fn verify_inclusion_lattice(id: &str) -> Result<Vec<EdgeReport>, LatticeError> {
    let a = ambient(id)?;
    let full = subspace(a, a.id)?;
    for s in a.subs {
        subspace(a, s.key)?;
    }
    for c in a.conjugators {
        let g = a.conjugator(c.key)?.lift();
        let gt = g.conj_transpose();
        if !full.basis.iter().all(|b| full.contains(&b.conjugate(&g, &gt))) {
            return Err(LatticeError::Conjugator(c.key.into()));
        }
    }
    let mut out = Vec::new();
    for e in a.edges {
        let mut child = a.basis(e.child)?;
        if let Some(c) = e.conj {
            let g = a.conjugator(c)?.lift();
            let gt = g.conj_transpose();
            child = child.iter().map(|b| b.conjugate(&g, &gt)).collect();
        }
        let parent = subspace(a, e.parent)?;
        if !child.iter().all(|b| parent.contains(b)) {
            return Err(LatticeError::Edge(e.child.into(), e.parent.into()));
        }
        out.push(EdgeReport {
            child: class_of(e.child).into(),
            parent: class_of(e.parent).into(),
            conj: e.conj.map(String::from),
            contained: true,
        });
    }
    Ok(out)
}

/// Exact containment of one catalog subalgebra in another.
pub fn sub_contained(id: &str, child: &str, parent: &str) -> Result<bool, LatticeError> {
    let a = ambient(id)?;
    let p = subspace(a, parent)?;
    Ok(a.basis(child)?.iter().all(|b| p.contains(b)))
}

/// Dimensions of all subalgebras, for listings.
pub fn dimensions(id: &str) -> Result<BTreeMap<String, usize>, CatalogError> {
    let a = ambient(id)?;
    let mut m = BTreeMap::new();
    for s in a.subs {
        m.insert(s.key.to_string(), a.basis(s.key)?.len());
    }
    Ok(m)
}
