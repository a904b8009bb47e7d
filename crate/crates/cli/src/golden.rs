//! The expected-verdict table and comparison against computed rows.
//!
//! One line per catalog chain: `chain | tag | at=tag; at=tag`, where the
//! last field lists the exceptional points of a family. `HoldsCited`
//! stands for a positive answer that rests on an external argument; it is
//! met by a computed certificate or by an open verdict carrying the
//! citation.

use std::collections::BTreeMap;
use std::fmt;

use fibcurv::catalog::{parse_point, ChainDef, Params};
use fibcurv::locus::{Family, Point};
use fibcurv::verdict::{family_point, Tag, VerdictError};
use thiserror::Error;

use crate::report::Row;

pub const EXPECTED: &str = include_str!("../expected_verdicts.txt");

#[derive(Debug, Error, PartialEq)]
#[error("expected-verdict table, line {0}: {1}")]
pub struct GoldenError(pub usize, pub String);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Tag(Tag),
    HoldsCited,
}

impl Expected {
    fn parse(s: &str) -> Option<Expected> {
        match s {
            "HoldsCited" => Some(Expected::HoldsCited),
            t => Tag::parse(t).map(Expected::Tag),
        }
    }

    pub fn accepts(self, tag: &str, cited: bool) -> bool {
        match self {
            Expected::Tag(t) => t.name() == tag,
            Expected::HoldsCited => tag == Tag::HoldsCertificate.name() || (tag == Tag::Undetermined.name() && cited),
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Tag(t) => write!(f, "{t}"),
            Expected::HoldsCited => f.write_str("HoldsCited"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub tag: Expected,
    pub exceptions: Vec<(String, Expected)>,
}

#[derive(Clone, Debug)]
pub struct Golden {
    pub entries: BTreeMap<String, Entry>,
}

/// One disagreement, rendered as a two-line diff.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub chain: String,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "- {} | {}", self.chain, self.expected)?;
        writeln!(f, "+ {} | {}", self.chain, self.got)
    }
}

fn summary<T: fmt::Display, U: fmt::Display>(tag: T, ex: &[(String, U)]) -> String {
    let mut s = tag.to_string();
    if !ex.is_empty() {
        s.push_str(" | ");
        s.push_str(&ex.iter().map(|(a, t)| format!("{a}={t}")).collect::<Vec<_>>().join("; "));
    }
    s
}

impl Golden {
    pub fn parse(text: &str) -> Result<Golden, GoldenError> {
        let mut entries = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let no = no + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            let [chain, tag, ex] = fields.as_slice() else {
                return Err(GoldenError(no, "expected three `|`-separated fields".into()));
            };
            let tag = Expected::parse(tag).ok_or_else(|| GoldenError(no, format!("unknown tag `{tag}`")))?;
            let mut exceptions = Vec::new();
            for item in ex.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let (at, t) = item.rsplit_once('=').ok_or_else(|| GoldenError(no, format!("bad exception `{item}`")))?;
                let t = Expected::parse(t.trim()).ok_or_else(|| GoldenError(no, format!("unknown tag `{t}`")))?;
                exceptions.push((at.trim().to_string(), t));
            }
            if entries.insert(chain.to_string(), Entry { tag, exceptions }).is_some() {
                return Err(GoldenError(no, format!("`{chain}` listed twice")));
            }
        }
        Ok(Golden { entries })
    }

    pub fn load() -> Golden {
        Golden::parse(EXPECTED).expect("bundled expected-verdict table parses")
    }

    /// Compares catalog rows (default parameters) against the table.
    pub fn compare(&self, rows: &[Row]) -> Vec<Mismatch> {
        let mut out = Vec::new();
        for r in rows {
            let got = summary(&r.tag, &ex_pairs(r));
            let Some(e) = self.entries.get(&r.chain) else {
                out.push(Mismatch { chain: r.chain.clone(), expected: "(not listed)".into(), got });
                continue;
            };
            let cited = r.cited.is_some();
            let ok = e.tag.accepts(&r.tag, cited)
                && e.exceptions.len() == r.exceptions.len()
                && e.exceptions.iter().zip(&r.exceptions).all(|((at, t), x)| *at == x.at && t.accepts(&x.tag, false));
            if !ok {
                let expected = summary(e.tag, &e.exceptions);
                out.push(Mismatch { chain: r.chain.clone(), expected, got });
            }
        }
        for chain in self.entries.keys() {
            if !rows.iter().any(|r| &r.chain == chain) {
                out.push(Mismatch { chain: chain.clone(), expected: "listed".into(), got: "(no row)".into() });
            }
        }
        out
    }

    /// Expected verdict for one chain under `params`: a family instance at
    /// a listed exceptional point takes that point's verdict.
    pub fn expected_for(&self, def: &ChainDef, params: &Params) -> Result<Option<Expected>, VerdictError> {
        let Some(e) = self.entries.get(&def.id()) else { return Ok(None) };
        let Some(pt) = family_point(def, params)? else { return Ok(Some(e.tag)) };
        let fam = family_of(&pt);
        for (at, t) in &e.exceptions {
            if parse_point(fam, at).is_ok_and(|p| p == pt) {
                return Ok(Some(*t));
            }
        }
        Ok(Some(e.tag))
    }
}

fn ex_pairs(r: &Row) -> Vec<(String, String)> {
    r.exceptions.iter().map(|x| (x.at.clone(), x.tag.clone())).collect()
}

fn family_of(pt: &Point) -> Family {
    match pt {
        Point::Trig { id, .. } => Family::Trig(*id),
        Point::Projective { p_var, q_var, .. } => Family::Projective(*p_var, *q_var),
        Point::Affine { var, .. } => Family::Affine(*var),
    }
}
