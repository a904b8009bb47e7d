//! The three subcommands as functions returning exit code and output, so
//! the binary stays a thin argument parser.

use std::path::{Path, PathBuf};

use fibcurv::catalog::{build_chain, find_chain, BuiltChain, CatalogError, ChainDef, Params};
use fibcurv::search::{search, Mode, SearchConfig, SearchProblem, SearchResult, SearchStatus};
use fibcurv::verdict::VerdictError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::golden::{Golden, Mismatch};
use crate::report::{catalog_rows, filter_rows, render_machine, render_table, row, Row};
use crate::spec::{value_of, ChainSpecDocument, ParamKind, SpecError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Verdict(#[from] VerdictError),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Machine,
}

#[derive(Clone, Debug, Default)]
pub struct ParamFlags {
    pub theta: Option<String>,
    pub phi: Option<String>,
    pub pq: Option<String>,
}

#[derive(Debug, Default, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn error(e: &CliError) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

/// A chain plus parameter choices, from a chain ID or a spec document.
pub struct Target {
    pub def: &'static ChainDef,
    pub params: Params,
    pub params_text: String,
}

pub fn resolve_target(arg: &str, flags: &ParamFlags) -> Result<Target, CliError> {
    let (def, mut params, mut text): (&'static ChainDef, Params, Vec<String>) = if Path::new(arg).is_file() {
        let src = std::fs::read_to_string(arg).map_err(|e| CliError::Io(arg.into(), e))?;
        let doc = ChainSpecDocument::parse(&src)?;
        let (def, params) = doc.resolve()?;
        let text = [&doc.k, &doc.h].iter().flat_map(|s| s.params.iter().map(|(k, v)| format!("{}={v}", k.name()))).collect();
        (def, params, text)
    } else {
        let def = find_chain(arg).map_err(|_| SpecError::UnknownChain(arg.into()))?;
        (def, Params::default(), vec![])
    };
    for (kind, v) in [(ParamKind::Theta, &flags.theta), (ParamKind::Phi, &flags.phi), (ParamKind::Pq, &flags.pq)] {
        let Some(v) = v else { continue };
        let value = value_of(kind, v)?;
        match kind {
            ParamKind::Theta => params.theta = value,
            ParamKind::Phi => params.phi = value,
            ParamKind::Pq => params.pq = value,
        }
        text.retain(|t| !t.starts_with(&format!("{}=", kind.name())));
        text.push(format!("{}={v}", kind.name()));
    }
    let params_text = if text.is_empty() { "-".into() } else { text.join(" ") };
    Ok(Target { def, params, params_text })
}

fn render(rows: &[Row], format: Format) -> String {
    match format {
        Format::Table => render_table(rows),
        Format::Machine => render_machine(rows),
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn finish(rows: &[Row], mismatches: &[Mismatch], format: Format, out: Option<&Path>) -> Result<Outcome, CliError> {
    let text = render(rows, format);
    let mut o = Outcome::default();
    match out {
        Some(p) => write_out(p, &text)?,
        None => o.stdout = text,
    }
    if !mismatches.is_empty() {
        o.code = EXIT_MISMATCH;
        o.stderr = format!("{} verdict(s) differ from the expected table:\n", mismatches.len());
        for m in mismatches {
            o.stderr.push_str(&m.to_string());
        }
    }
    Ok(o)
}

pub fn verify(
    targets: &[String],
    all: bool,
    flags: &ParamFlags,
    format: Format,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let golden = Golden::load();
    if all {
        if !targets.is_empty() {
            return Err(CliError::Usage("--all takes no chain arguments".into()));
        }
        let rows = catalog_rows()?;
        let mismatches = golden.compare(&rows);
        return finish(&rows, &mismatches, format, out);
    }
    if targets.is_empty() {
        return Err(CliError::Usage("give chain IDs, spec files, or --all".into()));
    }
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for t in targets {
        let target = resolve_target(t, flags)?;
        let r = row(target.def, &target.params, &target.params_text)?;
        if r.params.ends_with("=symbolic") {
            // a whole family: compare with its exceptions
            mismatches.extend(golden.compare(std::slice::from_ref(&r)).into_iter().filter(|m| m.chain == r.chain));
        } else if let Some(e) = golden.expected_for(target.def, &target.params)? {
            if !e.accepts(&r.tag, r.cited.is_some()) {
                mismatches.push(Mismatch {
                    chain: format!("{} [{}]", r.chain, r.params),
                    expected: e.to_string(),
                    got: r.tag.clone(),
                });
            }
        }
        rows.push(r);
    }
    finish(&rows, &mismatches, format, out)
}

pub fn report(format: Format, filter: Option<&str>, out: Option<&Path>) -> Result<Outcome, CliError> {
    let rows = filter_rows(catalog_rows()?, filter);
    finish(&rows, &[], format, out)
}

pub const SEARCH_SCHEMA: &str = "fibcurv.search/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub x: String,
    pub y: String,
    pub mm: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub schema: String,
    pub chain: String,
    pub params: String,
    pub mode: String,
    pub restarts: usize,
    pub seed: u64,
    pub budget: usize,
    /// `verified`, `unrounded`, `not_found` or `infeasible`.
    pub status: String,
    pub detail: Option<String>,
    pub best_objective: Option<f64>,
    pub margin: Option<f64>,
    pub accepted_restarts: usize,
    pub trace: Vec<f64>,
    pub witness: Option<WitnessRecord>,
}

pub fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Star => "star",
        Mode::DoubleStar => "double-star",
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn search_record(target: &Target, cfg: &SearchConfig, r: &SearchResult) -> SearchRecord {
    let amb = target.def.ambient();
    let (status, detail) = match &r.status {
        SearchStatus::Verified(_) => ("verified", None),
        SearchStatus::Unrounded(e) => ("unrounded", Some(e.clone())),
        SearchStatus::NotFound => ("not_found", None),
        SearchStatus::Infeasible(why) => ("infeasible", Some(why.clone())),
    };
    SearchRecord {
        schema: SEARCH_SCHEMA.into(),
        chain: r.chain.clone(),
        params: target.params_text.clone(),
        mode: mode_name(r.mode).into(),
        restarts: cfg.restarts,
        seed: cfg.seed,
        budget: cfg.budget,
        status: status.into(),
        detail,
        best_objective: finite(r.best_objective),
        margin: finite(r.margin),
        accepted_restarts: r.restarts.iter().filter(|s| s.objective < cfg.accept).count(),
        trace: r.trace.clone(),
        witness: r.witness().map(|w| WitnessRecord {
            x: amb.describe(&w.x),
            y: amb.describe(&w.y),
            mm: amb.describe(&w.mm_component),
        }),
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.3e}"))
}

pub fn render_search(rec: &SearchRecord) -> String {
    let mut s = String::new();
    s.push_str(&format!("chain: {}  [{}]\n", rec.chain, rec.params));
    s.push_str(&format!("mode: {}  restarts: {}  seed: {}  budget: {}\n", rec.mode, rec.restarts, rec.seed, rec.budget));
    if rec.status == "infeasible" {
        s.push_str(&format!("infeasible: {}\n", rec.detail.as_deref().unwrap_or_default()));
        return s;
    }
    let first = rec.trace.first().copied();
    s.push_str(&format!(
        "objective: first restart {}, best {} ({} of {} restarts accepted)\n",
        fmt_opt(first),
        fmt_opt(rec.best_objective),
        rec.accepted_restarts,
        rec.restarts
    ));
    s.push_str(&format!("margin: {}\n", fmt_opt(rec.margin)));
    match (&rec.witness, rec.status.as_str()) {
        (Some(w), _) => {
            s.push_str("witness: exactly verified\n");
            s.push_str(&format!("  X = {}\n  Y = {}\n  [X^m,Y^m]^m = {}\n", w.x, w.y, w.mm));
        }
        (None, "unrounded") => {
            s.push_str(&format!("witness: candidate not rounded ({})\n", rec.detail.as_deref().unwrap_or_default()))
        }
        _ => s.push_str("witness: none found\n"),
    }
    s
}

pub fn search_cmd(
    arg: &str,
    flags: &ParamFlags,
    mode: Mode,
    cfg: &SearchConfig,
    format: Format,
    out: Option<&PathBuf>,
) -> Result<Outcome, CliError> {
    let target = resolve_target(arg, flags)?;
    let chain = match build_chain(target.def, &target.params)? {
        BuiltChain::Exact(c) => c,
        BuiltChain::Family(_) => {
            return Err(CliError::Usage(format!(
                "{} is a family; give its parameter with --theta, --phi or --pq",
                target.def.id()
            )))
        }
        BuiltChain::Numeric(_) => {
            return Err(CliError::Usage(format!("{} has coefficients outside the exact field", target.def.id())))
        }
    };
    let result = search(&SearchProblem::new(&chain, mode), cfg);
    let rec = search_record(&target, cfg, &result);
    let machine = serde_json::to_string(&rec).expect("record serialises") + "\n";
    if let Some(p) = out {
        write_out(p, &machine)?;
    }
    let stdout = match format {
        Format::Table => render_search(&rec),
        Format::Machine => machine,
    };
    Ok(Outcome { code: EXIT_OK, stdout, stderr: String::new() })
}
