//! Joint reconstruction of attenuation `a` and source `f` by alternating
//! proximal minimisation of
//! `||R[a] f - d||^2 + alpha M(a) + lambda TV_c(a) + eta TV_c(f)`.
//!
//! Each half step minimises the objective plus `1/(2 xi) ||. - prev||^2`
//! with ADMM on the splitting `y = D x`. For `a` the `x` step runs
//! (F)ISTA with the multi-bang prox; for `f` it is a linear solve by
//! conjugate gradients. Both `y` steps are solved exactly pixel by pixel.

use crate::error::{invalid, Result};
use crate::grid::{dot, norm2, AdmissibleSet, Image};
use crate::raytrace::{FLinearMap, Projector, Sinogram};
use crate::regularizers::{mb_penalty, mb_prox, tv_grad_slice, tv_value_slice, DiffOperator, OUT_OF_RANGE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicBool, Ordering};

/// Proximal weight `xi`, constant or per outer iteration (the last entry
/// repeats).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Xi {
    Constant(f64),
    Schedule(Vec<f64>),
}

impl Xi {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Xi::Constant(v) => *v,
            Xi::Schedule(v) => v[k.min(v.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Xi::Constant(v) => *v > 0.0 && v.is_finite(),
            Xi::Schedule(v) => !v.is_empty() && v.iter().all(|x| *x > 0.0 && x.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("xi must be positive and finite"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Multi-bang weight.
    pub alpha: f64,
    /// TV weight on `a`.
    pub lambda: f64,
    /// TV weight on `f`.
    pub eta: f64,
    pub c_smooth: f64,
    pub xi: Xi,
    /// Fixed (F)ISTA step; `None` uses `0.9 / L` with `L` estimated by
    /// power iteration at every outer step.
    pub t_step: Option<f64>,
    pub beta0: f64,
    /// `[x-step change, a primal, a dual, f ADMM, outer change]`.
    pub deltas: [f64; 5],
    pub max_outer: usize,
    pub max_inner: usize,
    /// Cap on (F)ISTA steps per ADMM iteration.
    pub max_prox_steps: usize,
    pub fista: bool,
    pub admissible: AdmissibleSet,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 1.0,
            lambda: 0.05,
            eta: 0.05,
            c_smooth: 1e-6,
            xi: Xi::Constant(1.0),
            t_step: None,
            beta0: 1.0,
            deltas: [1e-6, 1e-4, 1e-4, 1e-6, 1e-5],
            max_outer: 100,
            max_inner: 30,
            max_prox_steps: 5,
            fista: true,
            admissible: AdmissibleSet::new(vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]).unwrap(),
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("lambda", self.lambda), ("eta", self.eta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.c_smooth > 0.0) {
            return Err(invalid("c_smooth must be positive"));
        }
        if let Some(t) = self.t_step {
            if !(t > 0.0) {
                return Err(invalid("t_step must be positive"));
            }
        }
        if !(self.beta0 > 0.0) {
            return Err(invalid("beta0 must be positive"));
        }
        if self.deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(invalid("all tolerances must be positive"));
        }
        if self.max_inner == 0 || self.max_prox_steps == 0 {
            return Err(invalid("iteration caps must be at least 1"));
        }
        self.xi.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
    Diverged,
    Cancelled,
}

/// Trace of one ADMM run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InnerReport {
    pub primal_residuals: Vec<f64>,
    pub dual_residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// False when the result raised the proximal objective and was discarded.
    pub accepted: bool,
    pub diverged: bool,
    pub final_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Objective after initialisation and after every outer iteration.
    pub objective_trace: Vec<f64>,
    pub a_updates: Vec<InnerReport>,
    pub f_updates: Vec<InnerReport>,
    pub outer_iterations: usize,
    pub termination: Termination,
    pub init_f: LeastSquaresInfo,
    pub a: Image,
    pub f: Image,
}

/// Terms of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub total: f64,
    pub data: f64,
    pub multibang: f64,
    pub tv_a: f64,
    pub tv_f: f64,
    pub out_of_range: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresInfo {
    pub iterations: usize,
    pub rel_residual: f64,
    pub converged: bool,
}

/// Projector and data for one reconstruction.
struct Problem<'a> {
    proj: Projector,
    d: &'a [f64],
    m: usize,
    dx: f64,
}

impl<'a> Problem<'a> {
    fn new(grid: &Image, d: &'a Sinogram) -> Result<Self> {
        Ok(Problem { proj: Projector::for_data(grid, d)?, d: d.data(), m: grid.m(), dx: grid.dx() })
    }

    fn image(&self, v: Vec<f64>) -> Image {
        Image::from_values(self.m, self.dx, v).expect("solver keeps the grid size")
    }

    fn data_term(&self, a: &[f64], f: &[f64]) -> f64 {
        self.proj.forward(a, f).iter().zip(self.d).map(|(p, d)| (p - d) * (p - d)).sum()
    }

    fn objective(&self, a: &[f64], f: &[f64], cfg: &SolverConfig) -> Objective {
        let mut mb = 0.0;
        let mut out = false;
        for &t in a {
            let p = mb_penalty(t, &cfg.admissible);
            out |= p.out_of_range;
            mb += p.value;
        }
        let data = self.data_term(a, f);
        let tv_a = tv_value_slice(self.m, a, cfg.c_smooth);
        let tv_f = tv_value_slice(self.m, f, cfg.c_smooth);
        let total = if out {
            OUT_OF_RANGE
        } else {
            data + cfg.alpha * mb + cfg.lambda * tv_a + cfg.eta * tv_f
        };
        Objective { total, data, multibang: if out { OUT_OF_RANGE } else { mb }, tv_a, tv_f, out_of_range: out }
    }
}

pub fn objective(a: &Image, f: &Image, d: &Sinogram, cfg: &SolverConfig) -> Result<Objective> {
    a.check_same_grid(f)?;
    let p = Problem::new(a, d)?;
    Ok(p.objective(a.values(), f.values(), cfg))
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn field_dist(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Conjugate gradients for a symmetric positive definite `op`.
fn cg(op: impl Fn(&[f64]) -> Vec<f64>, b: &[f64], x0: Vec<f64>, rel_tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let mut x = x0;
    let ax = op(&x);
    let mut r = sub(b, &ax);
    let bn = norm2(b).max(f64::MIN_POSITIVE);
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut it = 0;
    while it < max_iter && rr.sqrt() > rel_tol * bn {
        let ap = op(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let step = rr / pap;
        for i in 0..x.len() {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
        it += 1;
    }
    (x, it)
}

/// CGLS for `min ||A f - d||` from zero.
fn cgls(map: &FLinearMap<'_>, d: &[f64], rel_tol: f64, max_iter: usize) -> (Vec<f64>, LeastSquaresInfo) {
    let dn = norm2(d);
    let s0 = map.adjoint(d);
    let n = s0.len();
    let mut x = vec![0.0; n];
    if dn == 0.0 {
        return (x, LeastSquaresInfo { iterations: 0, rel_residual: 0.0, converged: true });
    }
    let mut r = d.to_vec();
    let mut s = s0;
    let s0n = norm2(&s).max(f64::MIN_POSITIVE);
    let mut p = s.clone();
    let mut gamma = dot(&s, &s);
    let mut it = 0;
    let mut converged = false;
    while it < max_iter {
        if norm2(&r) <= rel_tol * dn || gamma.sqrt() <= rel_tol * s0n {
            converged = true;
            break;
        }
        let q = map.apply(&p);
        let qq = dot(&q, &q);
        if !(qq > 0.0) {
            converged = true;
            break;
        }
        let step = gamma / qq;
        for i in 0..n {
            x[i] += step * p[i];
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= step * qi;
        }
        s = map.adjoint(&r);
        let g_new = dot(&s, &s);
        let beta = g_new / gamma;
        gamma = g_new;
        for i in 0..n {
            p[i] = s[i] + beta * p[i];
        }
        it += 1;
    }
    let rel = norm2(&r) / dn;
    (x, LeastSquaresInfo { iterations: it, rel_residual: rel, converged })
}

/// Least-squares source for fixed attenuation `a0`, by CGLS stopped at
/// relative residual 1e-8 or 500 iterations.
pub fn init_f_least_squares(a0: &Image, d: &Sinogram, _cfg: &SolverConfig) -> Result<(Image, LeastSquaresInfo)> {
    let p = Problem::new(a0, d)?;
    let map = p.proj.linear_in_f(a0.values());
    let (f, info) = cgls(&map, p.d, 1e-8, 500);
    Ok((p.image(f), info))
}

/// Residual balancing for the ADMM penalty.
pub fn adapt_beta(beta: f64, r: f64, s: f64) -> f64 {
    let b = if r > 10.0 * s {
        beta * 2.0
    } else if s > 10.0 * r {
        beta / 2.0
    } else {
        beta
    };
    b.clamp(1e-6, 1e6)
}

/// `argmin_y w sqrt(|y|^2 + c) + beta/2 |y - v|^2`, which points along `v`.
fn tv_shrink(v: [f64; 2], w: f64, beta: f64, c: f64) -> [f64; 2] {
    let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if rho == 0.0 || w == 0.0 {
        return v;
    }
    // g(r) = w r / sqrt(r^2 + c) + beta (r - rho) is increasing on [0, rho]
    let g = |r: f64| w * r / (r * r + c).sqrt() + beta * (r - rho);
    let (mut lo, mut hi) = (0.0, rho);
    let mut r = 0.0;
    for _ in 0..100 {
        let q = r * r + c;
        let gr = g(r);
        if gr == 0.0 {
            break;
        }
        if gr < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let dg = w * c / (q * q.sqrt()) + beta;
        let mut next = r - gr / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 1e-15 * rho.max(1e-300) {
            r = next;
            break;
        }
        r = next;
    }
    let k = r / rho;
    [k * v[0], k * v[1]]
}

fn y_step(dx: &[[f64; 2]], mu: &[[f64; 2]], w: f64, beta: f64, c: f64) -> Vec<[f64; 2]> {
    let n = dx.len();
    (0..n)
        .map(|i| {
            let v = [dx[i][0] - mu[i][0] / beta, dx[i][1] - mu[i][1] / beta];
            // the last pixel is outside the TV sum
            if i + 1 == n {
                v
            } else {
                tv_shrink(v, w, beta, c)
            }
        })
        .collect()
}

/// `||J||^2` for `J = d/da R[a] f`, by power iteration on `J^T J`.
fn jacobian_norm_sq(p: &Problem<'_>, a: &[f64], f: &[f64], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..a.len()).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut est = 0.0;
    for _ in 0..20 {
        let n = norm2(&v);
        if n == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= n);
        let jv = p.proj.jvp_a(a, f, &v);
        v = p.proj.vjp_a(a, f, &jv);
        let new = norm2(&v);
        if (new - est).abs() <= 1e-3 * new {
            est = new;
            break;
        }
        est = new;
    }
    est
}

fn stop_requested(flag: Option<&AtomicBool>) -> bool {
    flag.is_some_and(|f| f.load(Ordering::Relaxed))
}

fn a_prox_objective(p: &Problem<'_>, a: &[f64], f: &[f64], a_prev: &[f64], cfg: &SolverConfig, xi: f64) -> f64 {
    let o = p.objective(a, f, cfg);
    if o.out_of_range {
        return OUT_OF_RANGE;
    }
    let prox = dist(a, a_prev).powi(2) / (2.0 * xi);
    o.data + cfg.alpha * o.multibang + cfg.lambda * o.tv_a + prox
}

fn update_a_inner(
    p: &Problem<'_>,
    a_prev: &[f64],
    f: &[f64],
    cfg: &SolverConfig,
    xi: f64,
    k: usize,
    stop: Option<&AtomicBool>,
) -> (Vec<f64>, InnerReport) {
    let op = DiffOperator::new(p.m);
    let set = &cfg.admissible;
    let l_data = 2.0 * jacobian_norm_sq(p, a_prev, f, cfg.seed.wrapping_add(k as u64));
    let mut x = a_prev.to_vec();
    let mut y = op.apply(&x);
    let mut mu = vec![[0.0; 2]; x.len()];
    let mut beta = cfg.beta0;
    let mut rep = InnerReport::default();
    let start_obj = a_prox_objective(p, a_prev, f, a_prev, cfg, xi);
    let mut history = vec![start_obj];
    for _ in 0..cfg.max_inner {
        if stop_requested(stop) {
            break;
        }
        let t = cfg.t_step.unwrap_or(0.9 / (l_data + op.norm_sq_bound() * beta + 1.0 / xi));
        let target: Vec<[f64; 2]> = y.iter().zip(&mu).map(|(yi, mi)| [yi[0] + mi[0] / beta, yi[1] + mi[1] / beta]).collect();
        let prox = |z: f64| {
            if cfg.alpha > 0.0 {
                mb_prox(z, t * cfg.alpha, set)
            } else {
                z.clamp(set.min(), set.max())
            }
        };
        // (F)ISTA on the x-subproblem
        let mut x_old = x.clone();
        let mut z = x.clone();
        let mut tk = 1.0f64;
        for _ in 0..cfg.max_prox_steps {
            let (_, g_data, _) = p.proj.value_grad(&z, f, p.d);
            let dz = op.apply(&z);
            let diff: Vec<[f64; 2]> = target.iter().zip(&dz).map(|(q, d)| [q[0] - d[0], q[1] - d[1]]).collect();
            let g_couple = op.adjoint(&diff);
            let x_new: Vec<f64> = (0..z.len())
                .map(|i| prox(z[i] - t * (g_data[i] + (z[i] - a_prev[i]) / xi - beta * g_couple[i])))
                .collect();
            let change = dist(&x_new, &x_old);
            if cfg.fista {
                // gradient-based restart
                let restart = z.iter().zip(&x_new).zip(&x_old).map(|((zi, xn), xo)| (zi - xn) * (xn - xo)).sum::<f64>() > 0.0;
                let tn = if restart { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * tk * tk).sqrt()) };
                let mom = if restart { 0.0 } else { (tk - 1.0) / tn };
                z = (0..x_new.len()).map(|i| x_new[i] + mom * (x_new[i] - x_old[i])).collect();
                tk = tn;
            } else {
                z = x_new.clone();
            }
            x_old = x_new;
            if change < cfg.deltas[0] {
                break;
            }
        }
        x = x_old;
        let dx = op.apply(&x);
        let y_old = std::mem::replace(&mut y, y_step(&dx, &mu, cfg.lambda, beta, cfg.c_smooth));
        for i in 0..mu.len() {
            mu[i][0] += beta * (y[i][0] - dx[i][0]);
            mu[i][1] += beta * (y[i][1] - dx[i][1]);
        }
        let r = field_dist(&y, &dx);
        let dy: Vec<[f64; 2]> = y.iter().zip(&y_old).map(|(a, b)| [a[0] - b[0], a[1] - b[1]]).collect();
        let s = beta * norm2(&op.adjoint(&dy));
        rep.primal_residuals.push(r);
        rep.dual_residuals.push(s);
        rep.iterations += 1;
        let obj = a_prox_objective(p, &x, f, a_prev, cfg, xi);
        history.push(obj);
        if !obj.is_finite() || (history.len() > 20 && obj > 10.0 * history[history.len() - 21].max(f64::MIN_POSITIVE)) {
            rep.diverged = true;
            break;
        }
        if r < cfg.deltas[1] && s < cfg.deltas[2] {
            rep.converged = true;
            break;
        }
        beta = adapt_beta(beta, r, s);
    }
    rep.final_beta = beta;
    let end_obj = a_prox_objective(p, &x, f, a_prev, cfg, xi);
    rep.accepted = !rep.diverged && end_obj <= start_obj;
    if !rep.accepted {
        x = a_prev.to_vec();
    }
    (x, rep)
}

fn f_prox_objective(p: &Problem<'_>, a: &[f64], f: &[f64], f_prev: &[f64], cfg: &SolverConfig, xi: f64) -> f64 {
    p.data_term(a, f) + cfg.eta * tv_value_slice(p.m, f, cfg.c_smooth) + dist(f, f_prev).powi(2) / (2.0 * xi)
}

fn update_f_inner(
    p: &Problem<'_>,
    f_prev: &[f64],
    a: &[f64],
    cfg: &SolverConfig,
    xi: f64,
    stop: Option<&AtomicBool>,
) -> (Vec<f64>, InnerReport) {
    let op = DiffOperator::new(p.m);
    let map = p.proj.linear_in_f(a);
    let atd = map.adjoint(p.d);
    let rhs0: Vec<f64> = atd.iter().zip(f_prev).map(|(g, fp)| 2.0 * g + fp / xi).collect();
    let normal = |v: &[f64]| -> Vec<f64> {
        let av = map.apply(v);
        let aav = map.adjoint(&av);
        aav.iter().zip(v).map(|(q, vi)| 2.0 * q + vi / xi).collect()
    };
    let mut rep = InnerReport::default();
    let start_obj = f_prox_objective(p, a, f_prev, f_prev, cfg, xi);
    let mut x;
    if cfg.eta == 0.0 {
        let (sol, it) = cg(normal, &rhs0, f_prev.to_vec(), 1e-10, 500);
        x = sol;
        rep.iterations = it;
        rep.converged = true;
        rep.final_beta = cfg.beta0;
    } else {
        x = f_prev.to_vec();
        let mut y = op.apply(&x);
        let mut mu = vec![[0.0; 2]; x.len()];
        let mut beta = cfg.beta0;
        let mut history = vec![start_obj];
        for _ in 0..cfg.max_inner {
            if stop_requested(stop) {
                break;
            }
            let target: Vec<[f64; 2]> = y.iter().zip(&mu).map(|(yi, mi)| [beta * yi[0] + mi[0], beta * yi[1] + mi[1]]).collect();
            let rhs: Vec<f64> = rhs0.iter().zip(op.adjoint(&target)).map(|(r, t)| r + t).collect();
            let full = |v: &[f64]| -> Vec<f64> {
                let dtd = op.adjoint(&op.apply(v));
                normal(v).iter().zip(dtd).map(|(n, q)| n + beta * q).collect()
            };
            x = cg(full, &rhs, x, 1e-8, INNER_CG_STEPS).0;
            let dx = op.apply(&x);
            let y_old = std::mem::replace(&mut y, y_step(&dx, &mu, cfg.eta, beta, cfg.c_smooth));
            for i in 0..mu.len() {
                mu[i][0] += beta * (y[i][0] - dx[i][0]);
                mu[i][1] += beta * (y[i][1] - dx[i][1]);
            }
            let r = field_dist(&y, &dx);
            let dy: Vec<[f64; 2]> = y.iter().zip(&y_old).map(|(a, b)| [a[0] - b[0], a[1] - b[1]]).collect();
            let s = beta * norm2(&op.adjoint(&dy));
            rep.primal_residuals.push(r);
            rep.dual_residuals.push(s);
            rep.iterations += 1;
            let obj = f_prox_objective(p, a, &x, f_prev, cfg, xi);
            history.push(obj);
            if !obj.is_finite() || (history.len() > 20 && obj > 10.0 * history[history.len() - 21].max(f64::MIN_POSITIVE)) {
                rep.diverged = true;
                break;
            }
            if r < cfg.deltas[3] && s < cfg.deltas[3] {
                rep.converged = true;
                break;
            }
            beta = adapt_beta(beta, r, s);
        }
        rep.final_beta = beta;
    }
    let end_obj = f_prox_objective(p, a, &x, f_prev, cfg, xi);
    rep.accepted = !rep.diverged && end_obj <= start_obj;
    if !rep.accepted {
        x = f_prev.to_vec();
    }
    (x, rep)
}

/// CG steps per ADMM iteration of the `f` update (warm started).
const INNER_CG_STEPS: usize = 25;

fn check_in_range(a: &Image, set: &AdmissibleSet) -> Result<()> {
    if let Some(v) = a.values().iter().find(|&&v| !(v >= set.min() && v <= set.max())) {
        return Err(invalid(format!(
            "attenuation value {v} outside the admissible range [{}, {}]",
            set.min(),
            set.max()
        )));
    }
    Ok(())
}

/// One proximal `a` step at fixed `f`, using `xi` of the first outer iteration.
pub fn update_a(a_prev: &Image, f: &Image, d: &Sinogram, cfg: &SolverConfig) -> Result<(Image, InnerReport)> {
    cfg.validate()?;
    a_prev.check_same_grid(f)?;
    check_in_range(a_prev, &cfg.admissible)?;
    let p = Problem::new(a_prev, d)?;
    let (a, rep) = update_a_inner(&p, a_prev.values(), f.values(), cfg, cfg.xi.at(0), 0, None);
    Ok((p.image(a), rep))
}

/// One proximal `f` step at fixed `a`.
pub fn update_f(f_prev: &Image, a: &Image, d: &Sinogram, cfg: &SolverConfig) -> Result<(Image, InnerReport)> {
    cfg.validate()?;
    a.check_same_grid(f_prev)?;
    let p = Problem::new(a, d)?;
    let (f, rep) = update_f_inner(&p, f_prev.values(), a.values(), cfg, cfg.xi.at(0), None);
    Ok((p.image(f), rep))
}

pub fn joint_reconstruct(d: &Sinogram, cfg: &SolverConfig, a0: &Image) -> Result<(Image, Image, SolveReport)> {
    joint_reconstruct_with_stop(d, cfg, a0, None)
}

/// As [`joint_reconstruct`]; setting `stop` ends the run between inner
/// iterations with [`Termination::Cancelled`].
pub fn joint_reconstruct_with_stop(
    d: &Sinogram,
    cfg: &SolverConfig,
    a0: &Image,
    stop: Option<&AtomicBool>,
) -> Result<(Image, Image, SolveReport)> {
    cfg.validate()?;
    check_in_range(a0, &cfg.admissible)?;
    let p = Problem::new(a0, d)?;
    let mut a = a0.values().to_vec();
    let map = p.proj.linear_in_f(&a);
    let (mut f, init_info) = cgls(&map, p.d, 1e-8, 500);
    drop(map);
    let mut trace = vec![p.objective(&a, &f, cfg).total];
    let mut a_reps = Vec::new();
    let mut f_reps = Vec::new();
    let mut termination = Termination::MaxIter;
    let mut outer = 0;
    for k in 0..cfg.max_outer {
        if stop_requested(stop) {
            termination = Termination::Cancelled;
            break;
        }
        let xi = cfg.xi.at(k);
        let (a_new, ra) = update_a_inner(&p, &a, &f, cfg, xi, k, stop);
        let a_diverged = ra.diverged;
        a_reps.push(ra);
        if a_diverged {
            termination = Termination::Diverged;
            break;
        }
        let (f_new, rf) = update_f_inner(&p, &f, &a_new, cfg, xi, stop);
        let f_diverged = rf.diverged;
        f_reps.push(rf);
        outer = k + 1;
        let da = dist(&a_new, &a);
        let df = dist(&f_new, &f);
        a = a_new;
        f = f_new;
        trace.push(p.objective(&a, &f, cfg).total);
        if f_diverged {
            termination = Termination::Diverged;
            break;
        }
        if stop_requested(stop) {
            termination = Termination::Cancelled;
            break;
        }
        if da < cfg.deltas[4] && df < cfg.deltas[4] {
            termination = Termination::Converged;
            break;
        }
    }
    let a_img = p.image(a);
    let f_img = p.image(f);
    let report = SolveReport {
        objective_trace: trace,
        a_updates: a_reps,
        f_updates: f_reps,
        outer_iterations: outer,
        termination,
        init_f: init_info,
        a: a_img.clone(),
        f: f_img.clone(),
    };
    Ok((a_img, f_img, report))
}

/// Gradient of the smooth part of the objective in `a` (data + TV), exposed
/// for checks against finite differences.
pub fn smooth_grad_a(a: &Image, f: &Image, d: &Sinogram, cfg: &SolverConfig) -> Result<Image> {
    let p = Problem::new(a, d)?;
    let (_, g, _) = p.proj.value_grad(a.values(), f.values(), p.d);
    let tv = tv_grad_slice(p.m, a.values(), cfg.c_smooth);
    Ok(p.image(g.iter().zip(tv).map(|(x, t)| x + cfg.lambda * t).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_rule() {
        assert_eq!(adapt_beta(1.0, 1.0, 1.0), 1.0);
        assert_eq!(adapt_beta(1.0, 100.0, 1.0), 2.0);
        assert_eq!(adapt_beta(1.0, 1.0, 100.0), 0.5);
        let mut b = 1.0;
        for _ in 0..40 {
            b = adapt_beta(b, 1.0, 0.0);
        }
        assert_eq!(b, 1e6);
    }

    #[test]
    fn shrink_solves_the_pixel_problem() {
        let (w, beta, c) = (0.3, 2.0, 1e-4);
        for v in [[0.5, -0.2], [0.01, 0.0], [1e-3, 2e-3], [3.0, 4.0]] {
            let y = tv_shrink(v, w, beta, c);
            let obj = |y: [f64; 2]| w * (y[0] * y[0] + y[1] * y[1] + c).sqrt() + 0.5 * beta * ((y[0] - v[0]).powi(2) + (y[1] - v[1]).powi(2));
            let best = obj(y);
            for k in 0..400 {
                let ang = k as f64 * 0.0157;
                let r = 1e-3 * (k % 20) as f64;
                let probe = [y[0] + r * ang.cos(), y[1] + r * ang.sin()];
                assert!(obj(probe) >= best - 1e-14, "{v:?}: {probe:?}");
            }
        }
        assert_eq!(tv_shrink([0.0, 0.0], 1.0, 1.0, 1e-6), [0.0, 0.0]);
    }

    #[test]
    fn cg_solves_spd_system() {
        let op = |v: &[f64]| vec![4.0 * v[0] + v[1], v[0] + 3.0 * v[1]];
        let (x, _) = cg(op, &[1.0, 2.0], vec![0.0, 0.0], 1e-14, 10);
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-12 && (x[1] - 7.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn xi_schedule() {
        let x = Xi::Schedule(vec![1.0, 2.0]);
        assert_eq!(x.at(0), 1.0);
        assert_eq!(x.at(5), 2.0);
        assert_eq!(Xi::Constant(3.0).at(9), 3.0);
        let cfg: SolverConfig = serde_json::from_str(r#"{"alpha": 2.0, "xi": [1.0, 0.5]}"#).unwrap();
        assert_eq!(cfg.alpha, 2.0);
        assert_eq!(cfg.xi, Xi::Schedule(vec![1.0, 0.5]));
        assert!(SolverConfig { beta0: 0.0, ..SolverConfig::default() }.validate().is_err());
    }
}
