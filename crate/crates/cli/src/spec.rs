//! Chain specification documents.
//!
//! ```text
//! G: so6
//! K: su2_delta_phi phi=3/5,4/5
//! H: delta_theta theta=symbolic
//! ```
//!
//! Each subgroup line names a catalog subgroup, optionally followed by
//! `theta=`, `phi=` or `pq=` settings for the parameters that subgroup
//! carries. A setting is either `symbolic` or two comma-separated values.
//! Parameters left out take the catalog default.

use std::fmt;

use fibcurv::catalog::{
    find_chain, parse_pair, pq_value, sub_vars, trig_value, CatalogError, ChainDef, ParamValue, Params,
};
use fibcurv::param::{Var, PHI, THETA};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("no catalog chain `{0}`")]
    UnknownChain(String),
    #[error("{0}: subgroup `{1}` has no parameter `{2}`")]
    NoSuchParameter(String, String, String),
    #[error("parameter `{0}` set twice")]
    Repeated(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParamKind {
    Theta,
    Phi,
    Pq,
}

impl ParamKind {
    pub const ALL: [ParamKind; 3] = [ParamKind::Theta, ParamKind::Phi, ParamKind::Pq];

    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Theta => "theta",
            ParamKind::Phi => "phi",
            ParamKind::Pq => "pq",
        }
    }

    fn parse(s: &str) -> Option<ParamKind> {
        ParamKind::ALL.into_iter().find(|k| k.name() == s)
    }

    fn of(v: Var) -> Option<ParamKind> {
        match v {
            Var::Cos(THETA) | Var::Sin(THETA) => Some(ParamKind::Theta),
            Var::Cos(PHI) | Var::Sin(PHI) => Some(ParamKind::Phi),
            Var::Free(_) => Some(ParamKind::Pq),
            _ => None,
        }
    }
}

/// Value given for one parameter. Values keep their source text so that
/// rendering reproduces the document exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Setting {
    Symbolic,
    Values(String),
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Symbolic => f.write_str("symbolic"),
            Setting::Values(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubSpec {
    pub id: String,
    pub params: Vec<(ParamKind, Setting)>,
}

impl SubSpec {
    pub fn plain(id: &str) -> Self {
        SubSpec { id: id.into(), params: vec![] }
    }
}

impl fmt::Display for SubSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)?;
        for (k, v) in &self.params {
            write!(f, " {}={v}", k.name())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpecDocument {
    pub g: String,
    pub k: SubSpec,
    pub h: SubSpec,
}

impl ChainSpecDocument {
    pub fn from_def(def: &ChainDef) -> Self {
        let id = def.id();
        let mut parts = id.split('/');
        let mut next = || parts.next().unwrap_or_default().to_string();
        let (g, k, h) = (next(), next(), next());
        ChainSpecDocument { g, k: SubSpec::plain(&k), h: SubSpec::plain(&h) }
    }

    pub fn chain_id(&self) -> String {
        format!("{}/{}/{}", self.g, self.k.id, self.h.id)
    }

    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut g = None;
        let mut k = None;
        let mut h = None;
        for (no, line) in text.lines().enumerate() {
            let no = no + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| SpecError::Syntax(no, format!("expected `KEY: value`, got `{line}`")))?;
            let mut words = rest.split_whitespace();
            let id = words.next().ok_or_else(|| SpecError::Syntax(no, "missing subgroup".into()))?.to_string();
            let slot = match key.trim() {
                "G" => {
                    if words.next().is_some() {
                        return Err(SpecError::Syntax(no, "G takes no parameters".into()));
                    }
                    &mut g
                }
                "K" => &mut k,
                "H" => &mut h,
                other => return Err(SpecError::Syntax(no, format!("unknown key `{other}`"))),
            };
            if slot.is_some() {
                return Err(SpecError::Syntax(no, format!("key `{}` repeated", key.trim())));
            }
            let mut params = Vec::new();
            for w in words {
                let (name, value) =
                    w.split_once('=').ok_or_else(|| SpecError::Syntax(no, format!("expected NAME=VALUE, got `{w}`")))?;
                let kind = ParamKind::parse(name)
                    .ok_or_else(|| SpecError::Syntax(no, format!("unknown parameter `{name}`")))?;
                let setting = if value == "symbolic" { Setting::Symbolic } else { Setting::Values(value.into()) };
                params.push((kind, setting));
            }
            *slot = Some(SubSpec { id, params });
        }
        let missing = |k: &str| SpecError::Syntax(0, format!("missing key `{k}`"));
        let g = g.ok_or_else(|| missing("G"))?;
        Ok(ChainSpecDocument { g: g.id, k: k.ok_or_else(|| missing("K"))?, h: h.ok_or_else(|| missing("H"))? })
    }

    /// Looks the chain up and checks every setting against the subgroup it
    /// is attached to.
    pub fn resolve(&self) -> Result<(&'static ChainDef, Params), SpecError> {
        let id = self.chain_id();
        let def = find_chain(&id).map_err(|_| SpecError::UnknownChain(id.clone()))?;
        let mut params = Params::default();
        let mut seen = Vec::new();
        for (sub, key) in [(&self.k, def.k), (&self.h, def.h)] {
            let carried: Vec<ParamKind> =
                sub_vars(def.ambient(), key)?.into_iter().filter_map(ParamKind::of).collect();
            for (kind, setting) in &sub.params {
                if !carried.contains(kind) {
                    return Err(SpecError::NoSuchParameter(id, sub.id.clone(), kind.name().into()));
                }
                if seen.contains(kind) {
                    return Err(SpecError::Repeated(kind.name().into()));
                }
                seen.push(*kind);
                let value = match setting {
                    Setting::Symbolic => ParamValue::Symbolic,
                    Setting::Values(v) => value_of(*kind, v)?,
                };
                match kind {
                    ParamKind::Theta => params.theta = value,
                    ParamKind::Phi => params.phi = value,
                    ParamKind::Pq => params.pq = value,
                }
            }
        }
        Ok((def, params))
    }
}

/// Parses `c,s` or `p,q` for a parameter of the given kind.
pub fn value_of(kind: ParamKind, text: &str) -> Result<ParamValue, CatalogError> {
    let (a, b) = parse_pair(text)?;
    match kind {
        ParamKind::Theta | ParamKind::Phi => trig_value(a, b),
        ParamKind::Pq => {
            let int = |x: &fibcurv::Scalar| -> Result<i64, CatalogError> {
                x.as_rational()
                    .filter(|r| r.is_integer())
                    .and_then(|r| num::ToPrimitive::to_i64(r.numer()))
                    .ok_or_else(|| CatalogError::BadParameter(format!("`{text}`: p and q must be integers")))
            };
            pq_value(int(&a)?, int(&b)?)
        }
    }
}

impl fmt::Display for ChainSpecDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "G: {}", self.g)?;
        writeln!(f, "K: {}", self.k)?;
        writeln!(f, "H: {}", self.h)
    }
}
