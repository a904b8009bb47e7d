//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails at the end if any criterion failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use fibcurv::algebra::{span_contains, span_equal, span_rank};
use fibcurv::catalog::{
    ambient, ambients, build_chain, chains, find_chain, parse_point, pq_value, transfers, trig_value, witnesses,
    verify_inclusion_lattice, BuiltChain, ChainDef, Params,
};
use fibcurv::chain::{ExactChain, ParamChain};
use fibcurv::criteria::{rank_separation_certificate, verify_witness, Inapplicable};
use fibcurv::locus::{Family, Point};
use fibcurv::param::THETA;
use fibcurv::search::{gradient_check, search, Mode, SearchConfig, SearchProblem};
use fibcurv::verdict::{classify, classify_exact, family_point, try_transfer, witness_pair, Classification, Evidence, Origin, Tag};
use fibcurv::{ExactElem, ParamElem, ParamScalar, Real, Scalar};
use fibcurv_cli::report::catalog_rows;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// pinned tolerances and sample sizes
const GRADIENT_TOL: f64 = 1e-6;
const GRADIENT_SAMPLES: usize = 3;
const MIN_SEARCH_SUCCESS: f64 = 0.9;
const SEARCH_RESTARTS: usize = 100;
const SEARCH_SEED: u64 = 1;
const AD_SAMPLES: usize = 500;
const SPLIT_SAMPLES: usize = 200;
const RNG_SEED: u64 = 20;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn instance() -> Params {
    let (c, s) = (Scalar::frac(3, 5), Scalar::frac(4, 5));
    Params {
        theta: trig_value(c.clone(), s.clone()).unwrap(),
        phi: trig_value(c, s).unwrap(),
        pq: pq_value(1, 2).unwrap(),
    }
}

fn exact_at(def: &ChainDef, params: &Params) -> Option<ExactChain> {
    match build_chain(def, params).ok()? {
        BuiltChain::Exact(c) => Some(c),
        _ => None,
    }
}

fn exact_chains() -> Vec<(&'static ChainDef, ExactChain)> {
    let p = instance();
    chains().iter().filter_map(|d| exact_at(d, &p).map(|c| (d, c))).collect()
}

fn symbolic(def: &ChainDef) -> ParamChain {
    match build_chain(def, &Params::default()).unwrap() {
        BuiltChain::Exact(c) => ParamChain::from_exact(&c).unwrap(),
        BuiltChain::Family(c) | BuiltChain::Numeric(c) => c,
    }
}

fn exact_basis(a: &str, key: &str) -> Vec<ExactElem> {
    ambient(a).unwrap().basis(key).unwrap().iter().map(|b| b.to_exact().unwrap()).collect()
}

fn closed(basis: &[ExactElem]) -> bool {
    basis.iter().enumerate().all(|(i, a)| basis[i + 1..].iter().all(|b| span_contains(basis, &a.bracket(b))))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_g2_basis() -> Outcome {
    let g2: Vec<ExactElem> = ambient("g2").unwrap().full().iter().map(|b| b.to_exact().unwrap()).collect();
    ensure(g2.len() == 14 && span_rank(&g2) == 14, || format!("{} elements of rank {}", g2.len(), span_rank(&g2)))?;
    ensure(g2.iter().all(|b| b.is_skew_hermitian() && b.is_real()), || "basis leaves so(7)".into())?;
    let mut brackets = 0;
    for i in 0..14 {
        for j in i + 1..14 {
            ensure(span_contains(&g2, &g2[i].bracket(&g2[j])), || format!("[b{i}, b{j}] leaves the span"))?;
            brackets += 1;
        }
    }
    let su3 = exact_basis("g2", "su3");
    let so4 = exact_basis("g2", "so4");
    ensure(span_rank(&su3) == 8 && closed(&su3), || "su3 is not an 8-dimensional subalgebra".into())?;
    ensure(span_rank(&so4) == 6 && closed(&so4), || "so4 is not a 6-dimensional subalgebra".into())?;
    Ok(format!("rank 14, {brackets} brackets in span, su3 and so4 closed"))
}

/// `got == quoted`, allowing the non-unit Gram factor `d^power` that
/// symbolic verification leaves in place.
fn matches_quoted(got: &ParamElem, quoted: &ParamElem, d: &ParamScalar, power: u32) -> bool {
    if d.try_inv().is_some() {
        return got == quoted;
    }
    let mut f = ParamScalar::one();
    for _ in 0..power {
        f = f.times(d);
    }
    *got == quoted.scale(&f)
}

// brackets [X^m, Y^m] of the first stored witness, written out independently
const PINNED_BRACKETS: &[(&str, &str)] = &[
    ("su3/su21/delta_pq", "2i(F11 - F22)"),
    ("g2/su3/su2", "Z1 + 3Z2"),
    ("g2/so4/su2~", "-2Z2"),
    ("so6/u3/su2_delta_phi", "2(E25 - E36)"),
];

fn c2_witnesses() -> Outcome {
    let mut verified = 0;
    let mut quoted = 0;
    let mut pinned = 0;
    for (i, w) in witnesses().iter().enumerate().filter(|(_, w)| !w.derived) {
        let def = find_chain(w.chain).unwrap();
        let a = def.ambient();
        let pc = symbolic(def);
        let (x, y) = witness_pair(w).map_err(|e| format!("witness {i}: {e}"))?;
        let pair = verify_witness(&pc, &x, &y).map_err(|e| format!("witness {i} on {}: {e}", w.chain))?;
        verified += 1;
        let d = pc.comp_m(&x).den;
        if let Some(b) = w.bracket {
            let q = a.parse(b).unwrap();
            ensure(matches_quoted(&pair.mm_bracket, &q, &d, 2), || {
                format!("witness {i}: [X^m, Y^m] = {}, quoted {b}", pair.mm_bracket)
            })?;
            quoted += 1;
        }
        if let Some(m) = w.mm {
            let q = a.parse(m).unwrap();
            ensure(matches_quoted(&pair.mm_component, &q, &d, 3), || {
                format!("witness {i}: [X^m, Y^m]^m = {}, quoted {m}", pair.mm_component)
            })?;
            quoted += 1;
        }
        if let Some((_, v)) = PINNED_BRACKETS.iter().find(|(c, _)| *c == w.chain) {
            if witnesses().iter().position(|o| o.chain == w.chain) == Some(i) {
                let q = a.parse(v).unwrap();
                ensure(matches_quoted(&pair.mm_bracket, &q, &d, 2), || format!("{}: expected {v}", w.chain))?;
                pinned += 1;
            }
        }
    }
    ensure(pinned == PINNED_BRACKETS.len(), || format!("only {pinned} pinned brackets checked"))?;
    Ok(format!("{verified} stored witnesses verified, {quoted} quoted values and {pinned} pinned brackets match"))
}

const SIN_ZERO: &[&str] = &["1,0", "-1,0"];

// exceptional parameter values, written out independently of the catalog
const PINNED_LOCI: &[(&str, &[&str])] = &[
    ("su3/su21/delta_pq", &["1,-1"]),
    ("so5/u2/delta_pq", &["1,-1"]),
    ("so5/so4/delta_theta", &[]),
    ("so5/so3so2/delta_theta", SIN_ZERO),
    ("g2/so4/delta_theta", &[]),
    ("g2/u2/delta_theta", &["0,1", "0,-1"]),
    ("g2/u2~/delta_theta", SIN_ZERO),
    ("so6/so3so3/delta_theta", SIN_ZERO),
    ("so6/so3u1/delta_theta", SIN_ZERO),
    ("so6/su21/delta_theta", SIN_ZERO),
    ("so6/u2/delta_theta", SIN_ZERO),
];

fn family_verdict(id: &str) -> Result<fibcurv::verdict::FamilyVerdict, String> {
    match classify(find_chain(id).unwrap(), &Params::default()).map_err(|e| format!("{id}: {e}"))? {
        Classification::Family(f) => Ok(f),
        Classification::Single(_) => Err(format!("{id} is not a family")),
    }
}

fn c3_family_loci() -> Outcome {
    let mut families = 0;
    for d in chains() {
        if let Classification::Family(f) = classify(d, &Params::default()).map_err(|e| format!("{}: {e}", d.id()))? {
            ensure(f.covers_all, || format!("{}: exceptional points left undetermined", f.chain))?;
            families += 1;
        }
    }
    for (id, pts) in PINNED_LOCI {
        let f = family_verdict(id)?;
        let listed: Vec<Point> = pts.iter().map(|s| parse_point(f.family, s).unwrap()).collect();
        ensure(f.exceptional.point_count() == Some(listed.len()), || {
            format!("{id}: exceptional set {} instead of {pts:?}", f.exceptional)
        })?;
        ensure(listed.iter().all(|p| f.exceptional.contains(p)), || format!("{id}: {} misses {pts:?}", f.exceptional))?;
    }
    // tan θ = √3 and tan θ = 1/√3 are covered by different witnesses
    let f = family_verdict("g2/so4/delta_theta")?;
    let fam = Family::Trig(THETA);
    let tan_sqrt3 = parse_point(fam, "1/2,1/2 sqrt3").unwrap();
    let tan_inv = parse_point(fam, "1/2 sqrt3,1/2").unwrap();
    ensure(f.witnesses.len() == 2, || format!("{} witnesses on g2/so4/delta_theta", f.witnesses.len()))?;
    let loci: Vec<_> = f.witnesses.iter().map(|w| &w.locus).collect();
    ensure(loci.iter().all(|l| l.point_count() == Some(2)), || "each witness should fail at two points".into())?;
    ensure(loci[0].contains(&tan_sqrt3) != loci[1].contains(&tan_sqrt3), || "tan = sqrt3 not split".into())?;
    ensure(loci[0].contains(&tan_inv) != loci[1].contains(&tan_inv), || "tan = 1/sqrt3 not split".into())?;
    ensure(f.exceptional.is_empty(), || "union of the two witnesses leaves a gap".into())?;
    Ok(format!("{families} families fully covered, {} pinned loci match", PINNED_LOCI.len()))
}

fn c4_rank_certificate() -> Outcome {
    let p = instance();
    let c = exact_at(find_chain("so5/so4/su2").unwrap(), &p).unwrap();
    let cert = rank_separation_certificate(&c).map_err(|e| format!("so5/so4/su2: {e}"))?;
    ensure((cert.min_rank_m, cert.max_rank_s) == (4, 2), || {
        format!("ranks ({}, {}) instead of (4, 2)", cert.min_rank_m, cert.max_rank_s)
    })?;
    let mut inapplicable = 0;
    for (d, c) in exact_chains().iter().filter(|(d, _)| d.id().contains("delta_theta")) {
        match rank_separation_certificate(c) {
            Err(Inapplicable::Hypothesis(_)) | Err(Inapplicable::RanksOverlap { .. }) => inapplicable += 1,
            Ok(_) => return Err(format!("{}: certificate issued at the instance", d.id())),
        }
        let v = classify_exact(c, family_point(d, &p).unwrap().as_ref());
        ensure(v.tag == Tag::FailsWitness, || format!("{}: {} at the instance", d.id(), v.tag))?;
    }
    ensure(inapplicable > 0, || "no delta_theta chains".into())?;
    Ok(format!("so5/so4/su2 ranks (4, 2); inapplicable on {inapplicable} delta_theta chains"))
}

fn c5_catalog() -> Outcome {
    let rows = catalog_rows().map_err(|e| e.to_string())?;
    let mut positive: Vec<&str> = rows
        .iter()
        .filter(|r| r.tag == Tag::HoldsCertificate.name() || r.cited.is_some())
        .map(|r| r.chain.as_str())
        .collect();
    positive.sort();
    ensure(positive == ["g2/so4/su2", "so5/so4/su2"], || format!("non-symmetric positive chains {positive:?}"))?;
    let out = Command::new(env!("CARGO_BIN_EXE_fibcurv")).args(["verify", "--all"]).output().expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let diff: Vec<String> = String::from_utf8_lossy(&out.stderr)
        .lines()
        .filter(|l| l.starts_with("- ") || l.starts_with("+ "))
        .map(String::from)
        .collect();
    ensure(code == 0, || format!("verify --all exited {code}: {}", diff.join(" / ")))?;
    Ok(format!("{} rows match the expected verdicts", rows.len()))
}

fn c6_lattices() -> Outcome {
    let mut edges = 0;
    for a in ambients() {
        let r = verify_inclusion_lattice(a.id).map_err(|e| format!("{}: {e}", a.id))?;
        ensure(r.iter().all(|e| e.contained), || format!("{}: failed edge", a.id))?;
        edges += r.len();
    }
    let (su2, su2t) = (exact_basis("g2", "su2"), exact_basis("g2", "su2~"));
    ensure(!span_equal(&su2, &su2t), || "su2 and su2~ coincide in g2".into())?;
    Ok(format!("{} ambients, {edges} edges contained, su2 != su2~ in g2", ambients().len()))
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let d = rng.gen_range(1..=3);
    let a = Scalar::frac(rng.gen_range(-4..=4), d);
    if rng.gen_bool(0.75) {
        return a;
    }
    let b = Scalar::frac(rng.gen_range(-2..=2), d);
    let c = Scalar::frac(rng.gen_range(-2..=2), d);
    &(&a + &(&b * &Scalar::sqrt2())) + &(&c * &Scalar::sqrt3())
}

fn random_elem(rng: &mut ChaCha8Rng, basis: &[ExactElem]) -> ExactElem {
    let c: Vec<Scalar> = (0..basis.len()).map(|_| random_scalar(rng)).collect();
    ExactElem::lin_comb(&c, basis, basis[0].size())
}

fn c7_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let mut triples = 0;
    for a in ambients() {
        let g: Vec<ExactElem> = a.full().iter().map(|b| b.to_exact().unwrap()).collect();
        for x in &g {
            for y in &g {
                for z in &g {
                    let j = x.bracket(&y.bracket(z)).plus(&y.bracket(&z.bracket(x))).plus(&z.bracket(&x.bracket(y)));
                    ensure(j.is_zero(), || format!("{}: Jacobi fails", a.id))?;
                    triples += 1;
                }
            }
        }
        for _ in 0..AD_SAMPLES {
            let (x, y, z) = (random_elem(&mut rng, &g), random_elem(&mut rng, &g), random_elem(&mut rng, &g));
            let lhs = x.bracket(&y).inner(&z);
            let rhs = &Scalar::zero() - &y.inner(&x.bracket(&z));
            ensure(lhs == rhs, || format!("{}: inner product not ad-invariant", a.id))?;
        }
    }
    let chains = exact_chains();
    let scales = [Scalar::from_int(2), Scalar::frac(7, 3)];
    let p = instance();
    for (d, c) in &chains {
        let g = &c.g.basis;
        for _ in 0..SPLIT_SAMPLES {
            let x = random_elem(&mut rng, g);
            let (h, m, s) = (c.proj_h(&x), c.m_part(&x), c.s_part(&x));
            ensure(h.plus(&m).plus(&s) == x, || format!("{}: h + m + s != X", c.id))?;
            ensure(c.proj_h(&h) == h && c.m_part(&m) == m && c.s_part(&s) == s, || format!("{}: not idempotent", c.id))?;
            let parts = &(&h.inner(&h) + &m.inner(&m)) + &s.inner(&s);
            ensure(x.inner(&x) == parts, || format!("{}: Pythagoras fails", c.id))?;
        }
        let pt = family_point(d, &p).unwrap();
        let tag = classify_exact(c, pt.as_ref()).tag;
        for t in &scales {
            let scaled = classify_exact(&c.clone().with_scale(t.clone()), pt.as_ref()).tag;
            ensure(scaled == tag, || format!("{}: {tag} becomes {scaled} at scale {t}", c.id))?;
        }
    }
    Ok(format!(
        "Jacobi on {triples} basis triples, ad-invariance x{AD_SAMPLES} per ambient, splitting x{SPLIT_SAMPLES} on {} chains, scale invariance",
        chains.len()
    ))
}

fn c8_search() -> Outcome {
    let p = instance();
    let cfg = SearchConfig { restarts: SEARCH_RESTARTS, seed: SEARCH_SEED, ..SearchConfig::default() };
    let mut worst: f64 = 0.0;
    let (mut failing, mut found) = (0, 0);
    let mut missed = Vec::new();
    for (d, c) in exact_chains() {
        for mode in [Mode::Star, Mode::DoubleStar] {
            let problem = SearchProblem::new(&c, mode);
            if problem.infeasible().is_none() {
                worst = worst.max(gradient_check(&problem, GRADIENT_SAMPLES, SEARCH_SEED));
            }
        }
        let tag = classify_exact(&c, family_point(d, &p).unwrap().as_ref()).tag;
        let cited = c.id == "g2/so4/su2";
        if tag == Tag::FailsWitness {
            failing += 1;
            let r = search(&SearchProblem::new(&c, Mode::Star), &cfg);
            match r.witness() {
                Some(w) if verify_witness(&c, &w.x, &w.y).is_ok() => found += 1,
                _ => missed.push(c.id.clone()),
            }
        } else if tag == Tag::HoldsCertificate || cited {
            let r = search(&SearchProblem::new(&c, Mode::Star), &cfg);
            ensure(r.witness().is_none(), || format!("{}: witness found on a positive chain", c.id))?;
            ensure(r.margin > 0.0 && r.margin.is_finite(), || format!("{}: margin {}", c.id, r.margin))?;
        }
    }
    ensure(worst < GRADIENT_TOL, || format!("gradient relative error {worst:e}"))?;
    let rate = found as f64 / failing as f64;
    ensure(rate >= MIN_SEARCH_SUCCESS, || format!("{found}/{failing} witnesses recovered, missed {missed:?}"))?;
    Ok(format!("gradient error {worst:.1e}; {found}/{failing} witnesses recovered; positive chains keep a margin"))
}

fn c9_transfers() -> Outcome {
    let mut moved = 0;
    for t in transfers() {
        let def = find_chain(t.target).unwrap();
        let targets: Vec<(ExactChain, Option<Point>)> = if t.at.is_empty() {
            vec![(exact_at(def, &Params::default()).ok_or_else(|| format!("{} is not exact", t.target))?, None)]
        } else {
            let pc = symbolic(def);
            let fam = pc.family().map_err(|e| e.to_string())?;
            t.at.iter()
                .map(|s| {
                    let pt = parse_point(fam, s).unwrap();
                    (pc.instantiate(&pt).unwrap(), Some(pt))
                })
                .collect()
        };
        for (c, pt) in targets {
            let (_, w) = try_transfer(t.source, &c).ok_or_else(|| format!("{} -> {}: no transfer", t.source, t.target))?;
            verify_witness(&c, &w.x, &w.y).map_err(|e| format!("{}: transferred pair rejected: {e}", t.target))?;
            let v = classify_exact(&c, pt.as_ref());
            let via_transfer = matches!(&v.evidence, Evidence::Witness { origin: Origin::Transfer { .. }, .. });
            ensure(via_transfer, || format!("{}: verdict does not use the transfer", t.target))?;
            moved += 1;
        }
    }
    Ok(format!("{} transfers, {moved} target instances re-verified", transfers().len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("g2 basis integrity", c1_g2_basis),
        ("stored witnesses", c2_witnesses),
        ("family exceptional loci", c3_family_loci),
        ("rank separation certificate", c4_rank_certificate),
        ("catalog verdicts", c5_catalog),
        ("inclusion lattices", c6_lattices),
        ("property suites", c7_properties),
        ("numerical search", c8_search),
        ("monotone transfer", c9_transfers),
    ];
    let mut failed = Vec::new();
    println!();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
