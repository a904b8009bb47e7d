//! Report rows and their two renderings.

use std::collections::BTreeMap;

use fibcurv::catalog::{exceptions_for, find_chain, witnesses, AmbientDef, ChainDef, Params};
use fibcurv::criteria::HypothesisRoute;
use fibcurv::locus::Family;
use fibcurv::param::THETA;
use fibcurv::verdict::{classify, ChainVerdict, Classification, Evidence, FamilyVerdict, Origin, Tag, VerdictError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "fibcurv.report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionRow {
    pub at: String,
    pub tag: String,
    pub evidence: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub schema: String,
    pub chain: String,
    /// `-` for a chain without parameters, `theta=symbolic` for a family,
    /// `theta=3/5,4/5` for an instance.
    pub params: String,
    pub tag: String,
    pub verdict: String,
    pub evidence: String,
    /// Set when a positive answer rests on an argument not computed here.
    pub cited: Option<String>,
    pub exceptions: Vec<ExceptionRow>,
    pub xref: String,
}

impl Row {
    fn sort_key(&self) -> (Vec<String>, String) {
        (self.chain.split('/').map(String::from).collect(), self.params.clone())
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Trig(THETA) => "theta",
        Family::Trig(_) => "phi",
        Family::Projective(..) | Family::Affine(_) => "pq",
    }
}

fn route_name(r: &HypothesisRoute) -> &'static str {
    match r {
        HypothesisRoute::QuaternionicSquare => "quaternionic square",
        HypothesisRoute::RankOneSimple => "three-dimensional simple m",
    }
}

fn origin_text(o: &Origin) -> String {
    match o {
        Origin::Stored(i) => format!("stored witness {i}"),
        Origin::Transfer { source, index } => format!("witness {index} of {source}, moved to the smaller subgroup"),
    }
}

pub fn evidence_text(amb: &AmbientDef, ev: &Evidence) -> String {
    match ev {
        Evidence::Symmetric { m_dim: 0 } => "h = k".into(),
        Evidence::Symmetric { m_dim } => format!("[m,m] lies in h (dim m = {m_dim})"),
        Evidence::Abelian { m_dim } => format!("m is abelian (dim m = {m_dim})"),
        Evidence::Certificate(c) => format!(
            "rank separation via {}: nonzero brackets in m have rank {}, [s,s]^k has rank at most {}",
            route_name(&c.route),
            c.min_rank_m,
            c.max_rank_s
        ),
        Evidence::Witness { origin, pair } => format!(
            "{}: X = {}; Y = {}; [X^m,Y^m]^m = {}",
            origin_text(origin),
            amb.describe(&pair.x),
            amb.describe(&pair.y),
            amb.describe(&pair.mm_component)
        ),
        Evidence::Open { reason, .. } => format!("open: {reason}"),
    }
}

fn cited_of(ev: &Evidence) -> Option<String> {
    match ev {
        Evidence::Open { cited: Some(c), .. } => Some(c.to_string()),
        _ => None,
    }
}

fn xref(id: &str) -> String {
    let parts: Vec<&str> = id.split('/').collect();
    format!("{} lattice: {} < {}", parts[0], parts[2], parts[1])
}

fn single_row(def: &ChainDef, params: &str, v: &ChainVerdict) -> Row {
    Row {
        schema: SCHEMA.into(),
        chain: v.chain.clone(),
        params: params.into(),
        tag: v.tag.name().into(),
        verdict: v.tag.name().into(),
        evidence: evidence_text(def.ambient(), &v.evidence),
        cited: cited_of(&v.evidence),
        exceptions: vec![],
        xref: xref(&v.chain),
    }
}

fn family_row(def: &ChainDef, f: &FamilyVerdict) -> Row {
    let name = family_name(f.family);
    let points: Vec<&str> = exceptions_for(&f.chain).map(|e| e.points.to_vec()).unwrap_or_default();
    let exceptions: Vec<ExceptionRow> = points
        .iter()
        .zip(&f.exceptions)
        .map(|(at, v)| ExceptionRow {
            at: at.to_string(),
            tag: v.tag.name().into(),
            evidence: evidence_text(def.ambient(), &v.evidence),
        })
        .collect();
    let verdict = if exceptions.is_empty() {
        format!("{} for all {name}", f.tag)
    } else {
        format!("{} except at {name} = {}", f.tag, points.join("; "))
    };
    let evidence = if f.witnesses.is_empty() {
        match f.tag {
            Tag::HoldsSymmetric => "[m,m] lies in h identically".into(),
            Tag::HoldsMMZero => "m is abelian identically".into(),
            _ => "no family witness".into(),
        }
    } else {
        f.witnesses
            .iter()
            .map(|w| {
                let def = &witnesses()[w.index];
                format!(
                    "stored witness {}: X^m = {}; Y^m = {}; X^s = {}; Y^s = {}; m-component vanishes on {}",
                    w.index, def.xm, def.ym, def.xs, def.ys, w.locus
                )
            })
            .collect::<Vec<_>>()
            .join(" | ")
    };
    Row {
        schema: SCHEMA.into(),
        chain: f.chain.clone(),
        params: format!("{name}=symbolic"),
        tag: f.tag.name().into(),
        verdict,
        evidence,
        cited: None,
        exceptions,
        xref: xref(&f.chain),
    }
}

/// One row for `def` under `params`; `params_text` describes the instance.
pub fn row(def: &ChainDef, params: &Params, params_text: &str) -> Result<Row, VerdictError> {
    Ok(match classify(def, params)? {
        Classification::Single(v) => single_row(def, params_text, &v),
        Classification::Family(f) => family_row(def, &f),
    })
}

/// Rows for every catalog chain at default parameters, in report order.
pub fn catalog_rows() -> Result<Vec<Row>, VerdictError> {
    let defs = fibcurv::catalog::chains();
    let mut rows: Vec<Row> =
        defs.par_iter().map(|d| row(d, &Params::default(), "-")).collect::<Result<_, _>>()?;
    sort_rows(&mut rows);
    Ok(rows)
}

pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by_key(|r| r.sort_key());
}

pub fn render_machine(rows: &[Row]) -> String {
    rows.iter().map(|r| serde_json::to_string(r).expect("rows serialise") + "\n").collect()
}

pub fn parse_machine(text: &str) -> Result<Vec<Row>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

pub fn render_table(rows: &[Row]) -> String {
    let mut groups: BTreeMap<&str, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.chain.split('/').next().unwrap_or_default()).or_default().push(r);
    }
    let mut out = String::new();
    for (g, rs) in groups {
        out.push_str(&format!("== {g} ==\n"));
        for r in rs {
            out.push_str(&format!("{}  [{}]  {}\n", r.chain, r.params, r.verdict));
            out.push_str(&format!("    tag: {}\n", r.tag));
            out.push_str(&format!("    evidence: {}\n", r.evidence));
            if let Some(c) = &r.cited {
                out.push_str(&format!("    cited: {c}\n"));
            }
            for e in &r.exceptions {
                out.push_str(&format!("    at {}: {}; {}\n", e.at, e.tag, e.evidence));
            }
            out.push_str(&format!("    xref: {}\n", r.xref));
        }
        out.push('\n');
    }
    out
}

/// Keeps rows whose chain ID starts with `prefix`.
pub fn filter_rows(rows: Vec<Row>, prefix: Option<&str>) -> Vec<Row> {
    match prefix {
        None | Some("") => rows,
        Some(p) => rows.into_iter().filter(|r| r.chain.starts_with(p)).collect(),
    }
}

pub fn lookup(id: &str) -> Option<&'static ChainDef> {
    find_chain(id).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn some_rows() -> Vec<Row> {
        ["so5/so4/su2", "su3/su21/delta_pq", "g2/so4/su2", "so5/so4/delta_theta", "g2/so4/su2~"]
            .iter()
            .map(|id| row(lookup(id).unwrap(), &Params::default(), "-").unwrap())
            .collect()
    }

    #[test]
    fn machine_round_trip() {
        let rows = some_rows();
        assert_eq!(parse_machine(&render_machine(&rows)).unwrap(), rows);
    }

    #[test]
    fn table_carries_every_field() {
        let rows = some_rows();
        let table = render_table(&rows);
        for r in &rows {
            for field in [&r.chain, &r.params, &r.tag, &r.verdict, &r.evidence, &r.xref] {
                assert!(table.contains(field.as_str()), "{field}");
            }
            for e in &r.exceptions {
                assert!(table.contains(&format!("at {}: {}; {}", e.at, e.tag, e.evidence)));
            }
            if let Some(c) = &r.cited {
                assert!(table.contains(c.as_str()));
            }
        }
    }

    #[test]
    fn family_rows() {
        let rows = some_rows();
        let pq = rows.iter().find(|r| r.chain == "su3/su21/delta_pq").unwrap();
        assert_eq!(pq.verdict, "FailsWitness except at pq = 1,-1");
        assert_eq!(pq.exceptions[0].tag, "HoldsSymmetric");
        let th = rows.iter().find(|r| r.chain == "so5/so4/delta_theta").unwrap();
        assert_eq!(th.verdict, "FailsWitness for all theta");
    }

    #[test]
    fn tilde_witness_in_g2_names() {
        let rows = some_rows();
        let r = rows.iter().find(|r| r.chain == "g2/so4/su2~").unwrap();
        assert!(r.evidence.contains("[X^m,Y^m]^m = -2 Z2"), "{}", r.evidence);
    }
}
