//! Floating-point search for witness pairs, and rounding of candidates back
//! into Q(√2, √3).
//!
//! Complex matrices are realified, `a + ib -> [[a, -b], [b, a]]`, which keeps
//! brackets and makes the Frobenius product a positive multiple of the
//! invariant form.

use std::cell::Cell;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Elem, ExactElem};
use crate::chain::ExactChain;
use crate::criteria::{check_symmetric_subalgebra, m_is_abelian, verify_witness, ExactWitness};
use crate::scalar::Scalar;

/// Dense real square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut r = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    r.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        r
    }

    pub fn bracket(&self, o: &Mat) -> Mat {
        let mut r = self.mul(o);
        r.axpy(-1.0, &o.mul(self));
        r
    }

    pub fn t(&self) -> Mat {
        let n = self.n;
        let mut r = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                r.a[j * n + i] = self.a[i * n + j];
            }
        }
        r
    }

    pub fn dot(&self, o: &Mat) -> f64 {
        self.a.iter().zip(&o.a).map(|(x, y)| x * y).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn axpy(&mut self, k: f64, o: &Mat) {
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x += k * y;
        }
    }

    pub fn scaled(&self, k: f64) -> Mat {
        Mat { n: self.n, a: self.a.iter().map(|x| k * x).collect() }
    }

    fn combo(coeffs: &[f64], basis: &[Mat], n: usize) -> Mat {
        let mut r = Mat::zeros(n);
        for (c, b) in coeffs.iter().zip(basis) {
            if *c != 0.0 {
                r.axpy(*c, b);
            }
        }
        r
    }
}

/// `C Yᵀ − Yᵀ C`, the adjoint of `X ↦ [X, Y]` applied to `C`.
fn adj_left(c: &Mat, y: &Mat) -> Mat {
    let yt = y.t();
    let mut r = c.mul(&yt);
    r.axpy(-1.0, &yt.mul(c));
    r
}

/// `Xᵀ C − C Xᵀ`, the adjoint of `Y ↦ [X, Y]` applied to `C`.
fn adj_right(c: &Mat, x: &Mat) -> Mat {
    let xt = x.t();
    let mut r = xt.mul(c);
    r.axpy(-1.0, &c.mul(&xt));
    r
}

pub fn realify(e: &ExactElem, complex: bool) -> Mat {
    let n = e.size();
    let v = e.to_f64();
    if !complex {
        return Mat { n, a: v.iter().map(|x| x.0).collect() };
    }
    let mut r = Mat::zeros(2 * n);
    let m = 2 * n;
    for i in 0..n {
        for j in 0..n {
            let (re, im) = v[i * n + j];
            r.a[i * m + j] = re;
            r.a[(i + n) * m + j + n] = re;
            r.a[i * m + j + n] = -im;
            r.a[(i + n) * m + j] = im;
        }
    }
    r
}

/// Modified Gram-Schmidt in the Frobenius product.
pub fn orthonormalize(vs: &[Mat]) -> Vec<Mat> {
    let mut out: Vec<Mat> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let k = w.dot(u);
                w.axpy(-k, u);
            }
        }
        let nrm = w.norm2().sqrt();
        if nrm > 1e-12 {
            out.push(w.scaled(1.0 / nrm));
        }
    }
    out
}

fn coords(x: &Mat, basis: &[Mat]) -> Vec<f64> {
    basis.iter().map(|b| x.dot(b)).collect()
}

/// Which quantity the search holds at one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `‖[X^m, Y^m]^m‖`.
    Star,
    /// `‖X^m ∧ Y^m‖`.
    DoubleStar,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Star => "star",
            Mode::DoubleStar => "double-star",
        }
    }
}

pub struct SearchProblem {
    pub chain: ExactChain,
    pub mode: Mode,
    complex: bool,
    n: usize,
    m: Vec<Mat>,
    s: Vec<Mat>,
    infeasible: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Eval {
    pub value: f64,
    pub grad: Vec<f64>,
    /// `‖[X, Y]‖²`.
    pub bracket: f64,
    /// Square of the normalised quantity.
    pub norm: f64,
}

impl SearchProblem {
    pub fn new(chain: &ExactChain, mode: Mode) -> SearchProblem {
        let complex = chain.g.basis.iter().any(|b| !b.is_real());
        let m = orthonormalize(&chain.m.iter().map(|b| realify(b, complex)).collect::<Vec<_>>());
        let s = orthonormalize(&chain.s.iter().map(|b| realify(b, complex)).collect::<Vec<_>>());
        let infeasible = match mode {
            Mode::Star if chain.m.is_empty() || m_is_abelian(chain) => Some("m is abelian".to_string()),
            Mode::Star if check_symmetric_subalgebra(chain) => {
                Some("[m, m] lies in h, so [X^m, Y^m]^m vanishes identically".to_string())
            }
            Mode::DoubleStar if chain.m.len() < 2 => Some("m has dimension below two".to_string()),
            _ => None,
        };
        let n = if complex { 2 * chain.matrix_size() } else { chain.matrix_size() };
        SearchProblem { chain: chain.clone(), mode, complex, n, m, s, infeasible }
    }

    pub fn infeasible(&self) -> Option<&str> {
        self.infeasible.as_deref()
    }

    pub fn dim_m(&self) -> usize {
        self.m.len()
    }

    pub fn dim_p(&self) -> usize {
        self.m.len() + self.s.len()
    }

    /// Number of real unknowns: coordinates of `X` then `Y` on `m ⊕ s`.
    pub fn dim(&self) -> usize {
        2 * self.dim_p()
    }

    /// Largest deviation of the numeric Gram matrices from the identity.
    pub fn gram_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for basis in [&self.m, &self.s] {
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((a.dot(b) - target).abs());
                }
            }
        }
        worst
    }

    fn split<'a>(&self, z: &'a [f64]) -> [&'a [f64]; 4] {
        let (dm, dp) = (self.m.len(), self.dim_p());
        [&z[..dm], &z[dm..dp], &z[dp..dp + dm], &z[dp + dm..]]
    }

    pub fn evaluate(&self, z: &[f64], mu: f64) -> Eval {
        let [a, b, a2, b2] = self.split(z);
        let xm = Mat::combo(a, &self.m, self.n);
        let ym = Mat::combo(a2, &self.m, self.n);
        let mut x = xm.clone();
        x.axpy(1.0, &Mat::combo(b, &self.s, self.n));
        let mut y = ym.clone();
        y.axpy(1.0, &Mat::combo(b2, &self.s, self.n));
        let c = x.bracket(&y);
        let bracket = c.norm2();
        let gx = adj_left(&c, &y).scaled(2.0);
        let gy = adj_right(&c, &x).scaled(2.0);
        let mut grad = Vec::with_capacity(z.len());
        grad.extend(coords(&gx, &self.m));
        grad.extend(coords(&gx, &self.s));
        grad.extend(coords(&gy, &self.m));
        grad.extend(coords(&gy, &self.s));
        let (norm, gn_a, gn_a2) = match self.mode {
            Mode::Star => {
                let d = xm.bracket(&ym);
                let dk = coords(&d, &self.m);
                let dm = Mat::combo(&dk, &self.m, self.n);
                let norm: f64 = dk.iter().map(|v| v * v).sum();
                let ga = coords(&adj_left(&dm, &ym), &self.m).into_iter().map(|v| 2.0 * v).collect();
                let ga2 = coords(&adj_right(&dm, &xm), &self.m).into_iter().map(|v| 2.0 * v).collect();
                (norm, ga, ga2)
            }
            Mode::DoubleStar => {
                let aa: f64 = a.iter().map(|v| v * v).sum();
                let bb: f64 = a2.iter().map(|v| v * v).sum();
                let ab: f64 = a.iter().zip(a2).map(|(u, v)| u * v).sum();
                let ga: Vec<f64> = a.iter().zip(a2).map(|(u, v)| 2.0 * bb * u - 2.0 * ab * v).collect();
                let ga2: Vec<f64> = a.iter().zip(a2).map(|(u, v)| 2.0 * aa * v - 2.0 * ab * u).collect();
                (aa * bb - ab * ab, ga, ga2)
            }
        };
        let pen = norm - 1.0;
        let k = 2.0 * mu * pen;
        let (dm, dp) = (self.m.len(), self.dim_p());
        for i in 0..dm {
            grad[i] += k * gn_a[i];
            grad[dp + i] += k * gn_a2[i];
        }
        Eval { value: bracket + mu * pen * pen, grad, bracket, norm }
    }

    /// Coordinates of an exact pair, rescaled so the normalised quantity is one.
    pub fn embed(&self, x: &ExactElem, y: &ExactElem) -> Vec<f64> {
        let (xf, yf) = (realify(x, self.complex), realify(y, self.complex));
        let mut z = Vec::with_capacity(self.dim());
        for v in [&xf, &yf] {
            z.extend(coords(v, &self.m));
            z.extend(coords(v, &self.s));
        }
        let norm = self.evaluate(&z, 0.0).norm;
        if norm > 0.0 {
            let t = norm.powf(-0.25);
            z.iter_mut().for_each(|v| *v *= t);
        }
        z
    }

    fn pair_matrices(&self, z: &[f64]) -> (Mat, Mat) {
        let [a, b, a2, b2] = self.split(z);
        let mut x = Mat::combo(a, &self.m, self.n);
        x.axpy(1.0, &Mat::combo(b, &self.s, self.n));
        let mut y = Mat::combo(a2, &self.m, self.n);
        y.axpy(1.0, &Mat::combo(b2, &self.s, self.n));
        (x, y)
    }
}

/// Largest relative error between the analytic gradient and central
/// differences with step `1e-5`, over `samples` random points.
pub fn gradient_check(problem: &SearchProblem, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5;
    let mu = 10.0;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let z: Vec<f64> = (0..problem.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let g = problem.evaluate(&z, mu).grad;
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..z.len() {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[i] += h;
            zm[i] -= h;
            let fd = (problem.evaluate(&zp, mu).value - problem.evaluate(&zm, mu).value) / (2.0 * h);
            diff = diff.max((fd - g[i]).abs());
            scale = scale.max(g[i].abs()).max(fd.abs());
        }
        if scale > 0.0 {
            worst = worst.max(diff / scale);
        }
    }
    worst
}

/// Limited-memory BFGS with backtracking. `f` returns value and gradient.
fn lbfgs(f: &dyn Fn(&[f64]) -> (f64, Vec<f64>), x0: Vec<f64>, iters: usize, target: f64) -> (Vec<f64>, f64, usize) {
    const MEMORY: usize = 8;
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let mut it = 0;
    let mut past = Vec::with_capacity(iters);
    while it < iters {
        if fx <= target || dot(&g, &g) == 0.0 {
            break;
        }
        // stalled: less than a 1e-8 relative decrease over the last 30 steps
        if it >= 30 && past[it - 30] - fx <= 1e-8 * past[it - 30] {
            break;
        }
        past.push(fx);
        it += 1;
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.last() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if hist.is_empty() { 1.0 / dot(&g, &g).sqrt().max(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            let (fnew, gnew) = f(&xn);
            if fnew <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            if hist.is_empty() {
                break;
            }
            hist.clear();
            continue;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if hist.len() == MEMORY {
                hist.remove(0);
            }
            hist.push((s, y, 1.0 / sy));
        }
        x = xn;
        fx = fnew;
        g = gnew;
    }
    (x, fx, it)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Iterations per restart, split evenly over the penalty schedule.
    pub budget: usize,
    pub mu_schedule: Vec<f64>,
    /// Objective below which a candidate is handed to rationalisation.
    pub accept: f64,
    pub denominator_bound: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 100,
            seed: 1,
            budget: 1500,
            mu_schedule: vec![1.0, 10.0, 100.0],
            accept: 1e-10,
            denominator_bound: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartStats {
    pub objective: f64,
    pub iterations: usize,
    /// Smallest `‖[X, Y]‖ / normalised quantity` seen in this restart.
    pub min_ratio: f64,
}

#[derive(Clone, Debug)]
pub enum SearchStatus {
    /// The normalisation vanishes identically on this chain.
    Infeasible(String),
    /// A rounded pair passed exact verification.
    Verified(ExactWitness),
    /// The best candidate met the acceptance threshold but could not be rounded.
    Unrounded(String),
    /// No candidate met the acceptance threshold.
    NotFound,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub chain: String,
    pub mode: Mode,
    pub status: SearchStatus,
    pub best_objective: f64,
    pub best: Vec<f64>,
    pub restarts: Vec<RestartStats>,
    /// Best objective after each restart; non-increasing.
    pub trace: Vec<f64>,
    /// Empirical lower bound on `‖[X, Y]‖ / normalised quantity`.
    pub margin: f64,
}

impl SearchResult {
    pub fn witness(&self) -> Option<&ExactWitness> {
        match &self.status {
            SearchStatus::Verified(w) => Some(w),
            _ => None,
        }
    }
}

fn run_restart(problem: &SearchProblem, cfg: &SearchConfig, index: usize) -> (RestartStats, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let mut z: Vec<f64> = (0..problem.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    z.iter_mut().for_each(|v| *v /= r);
    let min_ratio = Cell::new(f64::INFINITY);
    let per = (cfg.budget / cfg.mu_schedule.len().max(1)).max(1);
    let mut total = 0;
    let mut value = f64::INFINITY;
    for &mu in &cfg.mu_schedule {
        let f = |w: &[f64]| {
            let e = problem.evaluate(w, mu);
            if e.norm > 1e-12 {
                min_ratio.set(min_ratio.get().min((e.bracket / e.norm).sqrt()));
            }
            (e.value, e.grad)
        };
        let (zn, fx, it) = lbfgs(&f, z, per, 1e-26);
        z = zn;
        value = fx;
        total += it;
    }
    (RestartStats { objective: value, iterations: total, min_ratio: min_ratio.get() }, z)
}

const ROUNDING_TRIES: usize = 6;

pub fn search(problem: &SearchProblem, cfg: &SearchConfig) -> SearchResult {
    let mut result = SearchResult {
        chain: problem.chain.id.clone(),
        mode: problem.mode,
        status: SearchStatus::NotFound,
        best_objective: f64::INFINITY,
        best: vec![],
        restarts: vec![],
        trace: vec![],
        margin: f64::INFINITY,
    };
    if let Some(why) = problem.infeasible() {
        result.status = SearchStatus::Infeasible(why.into());
        return result;
    }
    let runs: Vec<(RestartStats, Vec<f64>)> =
        (0..cfg.restarts.max(1)).into_par_iter().map(|i| run_restart(problem, cfg, i)).collect();
    let mut good: Vec<(f64, usize)> = Vec::new();
    for (i, (stats, z)) in runs.iter().enumerate() {
        if stats.objective < result.best_objective {
            result.best_objective = stats.objective;
            result.best = z.clone();
        }
        if stats.objective < cfg.accept {
            good.push((stats.objective, i));
        }
        result.margin = result.margin.min(stats.min_ratio);
        result.trace.push(result.best_objective);
        result.restarts.push(stats.clone());
    }
    // different restarts land on different points of the commuting variety;
    // some of them have coordinates in the ring and some do not
    good.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut failure = None;
    for &(_, i) in good.iter().take(ROUNDING_TRIES) {
        match rationalize(problem, &runs[i].1, cfg.denominator_bound) {
            Ok(w) => {
                result.status = SearchStatus::Verified(w);
                return result;
            }
            Err(e) => failure = failure.or(Some(e)),
        }
    }
    if let Some(e) = failure {
        result.status = SearchStatus::Unrounded(e.to_string());
    }
    result
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RationalizeError {
    #[error("candidate has no usable pivot")]
    Degenerate,
    #[error("no exact pair within the denominator bound (residual {0:.3e})")]
    NoExactPair(f64),
    #[error("rounded pair rejected: {0}")]
    Rejected(String),
}

/// Nearest element `r`, `r√2`, `r√3` or `r√6` with denominator of `r` at most `bound`.
pub fn nearest_ring_element(x: f64, bound: u32) -> (Scalar, f64) {
    let roots = [
        (1.0, Scalar::one()),
        (2f64.sqrt(), Scalar::sqrt2()),
        (3f64.sqrt(), Scalar::sqrt3()),
        (6f64.sqrt(), Scalar::sqrt6()),
    ];
    let mut best = (Scalar::zero(), 0.0, x.abs() - 1e-12);
    for (k, (rf, rs)) in roots.iter().enumerate() {
        for d in 1..=bound.max(1) {
            let num = (x / rf * d as f64).round();
            if num == 0.0 || num.abs() > 1e6 {
                continue;
            }
            let val = num / d as f64 * rf;
            // small tie-break towards simple values
            let cost = (x - val).abs() + 1e-13 * (d as f64 + k as f64);
            if cost < best.2 {
                best = (&Scalar::frac(num as i64, d as i64) * rs, val, cost);
            }
        }
    }
    (best.0, best.1)
}

struct Refiner {
    n: usize,
    basis: Vec<Mat>,
    h: Vec<Mat>,
    m: Vec<Mat>,
}

impl Refiner {
    fn matrices(&self, w: &[f64]) -> (Mat, Mat) {
        let k = self.basis.len();
        (Mat::combo(&w[..k], &self.basis, self.n), Mat::combo(&w[k..], &self.basis, self.n))
    }

    /// `‖[X, Y]‖² + ‖X_h‖² + ‖Y_h‖²` and its gradient.
    fn residual(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let (x, y) = self.matrices(w);
        let c = x.bracket(&y);
        let mut gx = adj_left(&c, &y).scaled(2.0);
        let mut gy = adj_right(&c, &x).scaled(2.0);
        let mut value = c.norm2();
        for (v, g) in [(&x, &mut gx), (&y, &mut gy)] {
            let hc = coords(v, &self.h);
            value += hc.iter().map(|t| t * t).sum::<f64>();
            g.axpy(2.0, &Mat::combo(&hc, &self.h, self.n));
        }
        let mut grad = coords(&gx, &self.basis);
        grad.extend(coords(&gy, &self.basis));
        (value, grad)
    }

    /// `‖[X^m, Y^m]^m‖² / (‖X‖² ‖Y‖²)`.
    fn vertical(&self, w: &[f64]) -> f64 {
        let (x, y) = self.matrices(w);
        let xm = Mat::combo(&coords(&x, &self.m), &self.m, self.n);
        let ym = Mat::combo(&coords(&y, &self.m), &self.m, self.n);
        let d = coords(&xm.bracket(&ym), &self.m);
        d.iter().map(|t| t * t).sum::<f64>() / (x.norm2() * y.norm2()).max(1e-300)
    }

    fn refine(&self, w: &[f64], fixed: &[bool]) -> (Vec<f64>, f64) {
        let f = |v: &[f64]| {
            let mut full = w.to_vec();
            let mut j = 0;
            for (i, fx) in fixed.iter().enumerate() {
                if !fx {
                    full[i] = v[j];
                    j += 1;
                }
            }
            let (val, g) = self.residual(&full);
            let gfree: Vec<f64> = g.iter().zip(fixed).filter(|(_, f)| !**f).map(|(x, _)| *x).collect();
            (val, gfree)
        };
        let start: Vec<f64> = w.iter().zip(fixed).filter(|(_, f)| !**f).map(|(x, _)| *x).collect();
        let (v, val, _) = lbfgs(&f, start, 2000, 1e-30);
        let mut full = w.to_vec();
        let mut j = 0;
        for (i, fx) in fixed.iter().enumerate() {
            if !fx {
                full[i] = v[j];
                j += 1;
            }
        }
        (full, val)
    }
}

fn solve_small(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, x)| r.iter().copied().chain([*x]).collect()).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, p);
        let piv = m[col][col];
        for i in 0..n {
            if i != col {
                let f = m[i][col] / piv;
                for j in col..=n {
                    m[i][j] -= f * m[col][j];
                }
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}

/// Rounds a near-witness into Q(√2, √3) and verifies it exactly.
///
/// Works in the ambient basis of `g`: fixes the `GL(2)` gauge so the pair is
/// the identity on two pivot coordinates, then snaps one coordinate at a time
/// to the nearest ring element, re-solving the rest after each snap.
pub fn rationalize(problem: &SearchProblem, z: &[f64], bound: u32) -> Result<ExactWitness, RationalizeError> {
    let chain = &problem.chain;
    let complex = problem.complex;
    let exact_basis = &chain.g.basis;
    let basis: Vec<Mat> = exact_basis.iter().map(|b| realify(b, complex)).collect();
    let k = basis.len();
    let gram: Vec<Vec<f64>> = basis.iter().map(|a| basis.iter().map(|b| a.dot(b)).collect()).collect();
    let refiner = Refiner {
        n: problem.n,
        h: orthonormalize(&chain.h.basis.iter().map(|b| realify(b, complex)).collect::<Vec<_>>()),
        m: problem.m.clone(),
        basis,
    };
    let (xf, yf) = problem.pair_matrices(z);
    let u = solve_small(&gram, &coords(&xf, &refiner.basis));
    let v = solve_small(&gram, &coords(&yf, &refiner.basis));
    // gauge: a well-conditioned pair of columns becomes the identity
    let mut pivots: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pivots.push((i, j, u[i] * v[j] - u[j] * v[i]));
        }
    }
    pivots.sort_by(|p, q| q.2.abs().total_cmp(&p.2.abs()).then((p.0, p.1).cmp(&(q.0, q.1))));
    let top = pivots.first().map_or(0.0, |p| p.2.abs());
    if top < 1e-9 {
        return Err(RationalizeError::Degenerate);
    }
    let mut last = RationalizeError::Degenerate;
    for &(pi, pj, det) in pivots.iter().take(GAUGE_TRIES).filter(|p| p.2.abs() > 1e-3 * top) {
        let (a, b, c, d) = (v[pj] / det, -u[pj] / det, -v[pi] / det, u[pi] / det);
        let mut w: Vec<f64> = (0..k).map(|t| a * u[t] + b * v[t]).collect();
        w.extend((0..k).map(|t| c * u[t] + d * v[t]));
        let mut exact: Vec<Option<Scalar>> = vec![None; 2 * k];
        for (idx, val) in [(pi, 1), (pj, 0), (k + pi, 0), (k + pj, 1)] {
            w[idx] = val as f64;
            exact[idx] = Some(Scalar::from_int(val));
        }
        match snap_all(&refiner, w, exact, bound) {
            Ok(coeffs) => {
                let n = chain.matrix_size();
                let x = Elem::lin_comb(&coeffs[..k], exact_basis, n);
                let y = Elem::lin_comb(&coeffs[k..], exact_basis, n);
                match verify_witness(chain, &x, &y) {
                    Ok(wit) => return Ok(wit),
                    Err(e) => last = RationalizeError::Rejected(e.to_string()),
                }
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

const GAUGE_TRIES: usize = 4;
const SNAP_TOL: f64 = 1e-20;

fn fixed_mask(e: &[Option<Scalar>]) -> Vec<bool> {
    e.iter().map(|x| x.is_some()).collect()
}

/// Ring elements near `x`, simplest first: by denominator, then rational
/// before `√2`, `√3`, `√6`, then distance.
pub fn ring_candidates(x: f64, bound: u32) -> Vec<(Scalar, f64)> {
    let window = 0.15 * x.abs().max(1.0);
    let roots = [
        (1.0, Scalar::one()),
        (2f64.sqrt(), Scalar::sqrt2()),
        (3f64.sqrt(), Scalar::sqrt3()),
        (6f64.sqrt(), Scalar::sqrt6()),
    ];
    let mut out: Vec<(u32, usize, f64, Scalar, f64)> = Vec::new();
    for (k, (rf, rs)) in roots.iter().enumerate() {
        for d in 1..=bound.max(1) {
            let lo = ((x - window) / rf * d as f64).ceil() as i64;
            let hi = ((x + window) / rf * d as f64).floor() as i64;
            for num in lo..=hi {
                if num == 0 || num::integer::gcd(num, d as i64) != 1 {
                    continue;
                }
                let val = num as f64 / d as f64 * rf;
                out.push((d, k, (x - val).abs(), &Scalar::frac(num, d as i64) * rs, val));
            }
        }
    }
    out.sort_by(|p, q| (p.0, p.1).cmp(&(q.0, q.1)).then(p.2.total_cmp(&q.2)));
    let mut all: Vec<(Scalar, f64)> = recognise(x, bound).into_iter().collect();
    all.extend(out.into_iter().map(|c| (c.3, c.4)));
    all
}

/// Reads `x` as `a + b·r` with `r ∈ {√2, √3, √6}` over a common denominator
/// up to `bound²`, when the match is tight enough to be more than chance.
pub fn recognise(x: f64, bound: u32) -> Option<(Scalar, f64)> {
    let roots = [(2f64.sqrt(), Scalar::sqrt2()), (3f64.sqrt(), Scalar::sqrt3()), (6f64.sqrt(), Scalar::sqrt6())];
    for d in 1..=(bound * bound).min(64) as i64 {
        for (rf, rs) in &roots {
            let reach = ((x.abs() + 2.0) * d as f64 / rf).ceil() as i64;
            for b in (-reach..=reach).filter(|&b| b != 0) {
                let rest = (x - b as f64 / d as f64 * rf) * d as f64;
                let a = rest.round();
                if (rest - a).abs() < 1e-9 * d as f64 {
                    let a = a as i64;
                    let g = num::integer::gcd(num::integer::gcd(a, b), d);
                    if g != 1 {
                        continue;
                    }
                    let exact = &Scalar::frac(a, d) + &(&Scalar::frac(b, d) * rs);
                    return Some((exact, a as f64 / d as f64 + b as f64 / d as f64 * rf));
                }
            }
        }
    }
    None
}

/// Fixes every free coordinate to a ring element, keeping the pair a
/// commuting pair in `p` with nonzero vertical bracket.
fn snap_all(
    refiner: &Refiner,
    w: Vec<f64>,
    mut exact: Vec<Option<Scalar>>,
    bound: u32,
) -> Result<Vec<Scalar>, RationalizeError> {
    let (mut w, mut res) = refiner.refine(&w, &fixed_mask(&exact));
    if res > SNAP_TOL {
        return Err(RationalizeError::NoExactPair(res));
    }
    let floor = refiner.vertical(&w) * 1e-4;
    let accept = |tw: &[f64], tres: f64| tres < SNAP_TOL && refiner.vertical(tw) > floor;
    let mut try_fix = |w: &mut Vec<f64>, exact: &mut Vec<Option<Scalar>>, i: usize, s: Scalar, val: f64| -> bool {
        let mut trial = w.clone();
        trial[i] = val;
        let mut ex = exact.clone();
        ex[i] = Some(s);
        let (tw, tres) = refiner.refine(&trial, &fixed_mask(&ex));
        if accept(&tw, tres) {
            *w = tw;
            *exact = ex;
            res = tres;
            true
        } else {
            false
        }
    };
    // sparsify first: zero whatever coordinates the variety allows
    let mut order: Vec<usize> = (0..w.len()).filter(|&i| exact[i].is_none()).collect();
    order.sort_by(|&p, &q| w[p].abs().total_cmp(&w[q].abs()).then(p.cmp(&q)));
    for i in order {
        try_fix(&mut w, &mut exact, i, Scalar::zero(), 0.0);
    }
    while exact.iter().any(|e| e.is_none()) {
        let mut cands: Vec<(usize, usize, Scalar, f64)> = Vec::new();
        for i in (0..w.len()).filter(|&i| exact[i].is_none()) {
            for (rank, (s, val)) in ring_candidates(w[i], bound).into_iter().enumerate() {
                cands.push((rank, i, s, val));
            }
        }
        cands.sort_by_key(|c| (c.0, c.1));
        let mut progressed = false;
        for (_, i, s, val) in cands {
            if try_fix(&mut w, &mut exact, i, s, val) {
                progressed = true;
                break;
            }
        }
        if !progressed {
            return Err(RationalizeError::NoExactPair(res));
        }
    }
    Ok(exact.into_iter().map(|e| e.expect("all fixed")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_chain, find_chain, BuiltChain, Params};

    fn exact(id: &str) -> ExactChain {
        match build_chain(find_chain(id).unwrap(), &Params::default()).unwrap() {
            BuiltChain::Exact(c) => c,
            _ => panic!("{id} is parametric"),
        }
    }

    #[test]
    fn rounding() {
        let (s, _) = nearest_ring_element(std::f64::consts::SQRT_2 - 4e-9, 8);
        assert_eq!(s, Scalar::sqrt2());
        let (s, _) = nearest_ring_element(0.499999999, 8);
        assert_eq!(s, Scalar::frac(1, 2));
        assert!(nearest_ring_element(1e-14, 8).0.is_zero());
    }

    #[test]
    fn gradient_matches_differences() {
        for mode in [Mode::Star, Mode::DoubleStar] {
            let p = SearchProblem::new(&exact("g2/su3/su2"), mode);
            assert!(gradient_check(&p, 3, 5) < 1e-6);
            assert!(p.gram_error() < 1e-12);
        }
    }

    #[test]
    fn zero_point_is_critical() {
        let p = SearchProblem::new(&exact("so5/so4/su2"), Mode::Star);
        let e = p.evaluate(&vec![0.0; p.dim()], 10.0);
        assert!(e.grad.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn symmetric_chain_infeasible() {
        let p = SearchProblem::new(&exact("so5/so4/so3"), Mode::Star);
        let r = search(&p, &SearchConfig { restarts: 2, ..Default::default() });
        assert!(matches!(r.status, SearchStatus::Infeasible(_)));
    }

    #[test]
    fn finds_witness_for_so6_diagonal_chain() {
        let p = SearchProblem::new(&exact("so6/so3so3/so3"), Mode::Star);
        let r = search(&p, &SearchConfig { restarts: 8, seed: 3, ..Default::default() });
        assert!(r.best_objective < 1e-10, "{}", r.best_objective);
        assert!(r.witness().is_some(), "{:?}", r.status);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
