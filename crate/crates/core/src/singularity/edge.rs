//! Limits along lines that contain flat boundary edges.
//!
//! For a line `L(x, theta*)` through an edge and `x_l = x + l theta*`,
//! `K_n(l) = exp(-D(D_+ a)(l)) lim_{w -> w*+} d^n_l R(x_l, theta(w))
//!         + (-1)^n lim_{w -> w*-} d^n_l R(x_l, theta(w))`
//! where `D(D_+ a)(l)` integrates the jump of `a` along the line beyond `l`.
//! Along an edge `K_2 = D_- a * K_1`, which is what the scanner exploits.

use super::{DataOracle, LimitOptions};
use crate::error::{invalid, Error, Result};
use crate::extrapolate::{limit, Extrapolated};
use crate::geom::{DirectedLine, Point};
use crate::phantoms::{boundary_atlas, BoundaryAtlas, Edge, PhantomSpec};
use crate::raytrace::{beam_transform, compute_u};
use serde::{Deserialize, Serialize};

/// Piecewise-constant `D_+ a` along a line, as `(lo, hi, value)` pieces in
/// the line parameter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JumpProfile {
    pub pieces: Vec<(f64, f64, f64)>,
}

impl JumpProfile {
    pub fn zero() -> Self {
        JumpProfile::default()
    }

    pub fn with_piece(mut self, lo: f64, hi: f64, value: f64) -> Self {
        if hi > lo && value != 0.0 {
            self.pieces.push((lo, hi, value));
        }
        self
    }

    pub fn value_at(&self, l: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|&&(lo, hi, _)| l > lo && l < hi)
            .map(|p| p.2)
            .sum()
    }

    /// `int_l^inf D_+ a`.
    pub fn integral_from(&self, l: f64) -> f64 {
        self.pieces
            .iter()
            .map(|&(lo, hi, v)| v * (hi - lo.max(l)).max(0.0))
            .sum()
    }

    /// The true profile of a phantom along `line`, read from its atlas.
    pub fn from_atlas(atlas: &BoundaryAtlas, line: &DirectedLine) -> Self {
        let dir = line.dir();
        let mut out = JumpProfile::zero();
        for e in atlas.edges_on_line(line) {
            let t0 = (e.p0 - line.x).dot(dir);
            let t1 = (e.p1 - line.x).dot(dir);
            // sides of the edge as seen from the line's own normal
            let (plus, minus) = if t1 > t0 { (e.left, e.right) } else { (e.right, e.left) };
            out = out.with_piece(t0.min(t1), t0.max(t1), minus.a - plus.a);
        }
        out
    }
}

fn check_in_edge_set(atlas: &BoundaryAtlas, line: &DirectedLine) -> Result<()> {
    if atlas.edges_on_line(line).is_empty() {
        return Err(Error::Geometry(format!(
            "line through {:?} at angle {} contains no flat boundary edge",
            line.x, line.omega
        )));
    }
    Ok(())
}

/// `(K_1, K_2)` at parameter `l` on `line`, with `known` supplying the jump
/// of `a` used in the exponential weight. `l_step` is the finite-difference
/// step along the line.
pub fn edge_k_pair<O: DataOracle + ?Sized>(
    oracle: &O,
    line: &DirectedLine,
    l: f64,
    known: &JumpProfile,
    l_step: f64,
    opts: &LimitOptions,
) -> Result<(Extrapolated, Extrapolated)> {
    opts.validate()?;
    if !(l_step > 0.0) {
        return Err(invalid("l_step must be positive"));
    }
    let weight = (-known.integral_from(l)).exp();
    let derivs = |w: f64| {
        let r = |dl: f64| oracle.transform(&DirectedLine::new(line.at(l + dl), line.omega + w));
        let (rm, r0, rp) = (r(-l_step), r(0.0), r(l_step));
        ((rp - rm) / (2.0 * l_step), (rp - 2.0 * r0 + rm) / (l_step * l_step), r0.abs())
    };
    let mut k1 = Vec::with_capacity(opts.h_schedule.len());
    let mut k2 = Vec::with_capacity(opts.h_schedule.len());
    let mut scale = f64::MIN_POSITIVE;
    for &h in &opts.h_schedule {
        let (p1, p2, rp) = derivs(h);
        let (m1, m2, rm) = derivs(-h);
        k1.push(weight * p1 - m1);
        k2.push(weight * p2 + m2);
        scale = scale.max(rp).max(rm);
    }
    let s1 = k1.iter().fold(scale, |m, v| m.max(v.abs()));
    let s2 = k2.iter().fold(scale, |m, v| m.max(v.abs()));
    Ok((
        limit(&opts.h_schedule, &k1, 1.0, opts.tol, s1)?,
        limit(&opts.h_schedule, &k2, 1.0, opts.tol, s2)?,
    ))
}

/// `K_n` (n = 1 or 2) on a line that must contain an edge of `spec`.
pub fn edge_k(
    spec: &PhantomSpec,
    x: Point,
    omega_star: f64,
    n: u32,
    l: f64,
    known: &JumpProfile,
    opts: &LimitOptions,
) -> Result<f64> {
    if n != 1 && n != 2 {
        return Err(invalid(format!("K_n is only defined here for n = 1, 2 (got {n})")));
    }
    let line = DirectedLine::new(x, omega_star);
    check_in_edge_set(&boundary_atlas(spec)?, &line)?;
    let (k1, k2) = edge_k_pair(spec, &line, l, known, ScanOptions::default().l_step, opts)?;
    Ok(if n == 1 { k1.value } else { k2.value })
}

const SIDE_OFFSET: f64 = 1e-9;
const CORNER_GUARD: f64 = 1e-12;

struct EdgeSides {
    a_plus: f64,
    a_minus: f64,
    f_plus: f64,
    f_minus: f64,
    /// flux arriving from the `+` / `-` side
    u_plus: f64,
    u_minus: f64,
    d_plus: f64,
    d_minus: f64,
}

fn edge_sides(edge: &Edge, l: f64, spec: &PhantomSpec) -> Result<EdgeSides> {
    let len = edge.length();
    if !(l > CORNER_GUARD && l < len - CORNER_GUARD) {
        return Err(Error::Geometry(format!(
            "l = {l} is not strictly inside the edge of length {len}"
        )));
    }
    let line = edge.line();
    let x = line.at(l);
    let n = line.normal();
    let xp = x + SIDE_OFFSET * n;
    let xm = x - SIDE_OFFSET * n;
    let (a_plus, f_plus) = spec.eval(xp);
    let (a_minus, f_minus) = spec.eval(xm);
    Ok(EdgeSides {
        a_plus,
        a_minus,
        f_plus,
        f_minus,
        u_plus: compute_u(spec, xp, line.omega),
        u_minus: compute_u(spec, xm, line.omega),
        d_plus: beam_transform(spec, xp, line.omega),
        d_minus: beam_transform(spec, xm, line.omega),
    })
}

/// Closed-form `K_1` at parameter `l` (measured from `edge.p0`) on an edge.
pub fn analytic_edge_k1(edge: &Edge, l: f64, spec: &PhantomSpec) -> Result<f64> {
    let s = edge_sides(edge, l, spec)?;
    let df = s.f_minus - s.f_plus;
    let da = s.a_minus - s.a_plus;
    Ok(2.0 * (-s.d_minus).exp() * (df - 0.5 * da * (s.u_plus + s.u_minus)))
}

/// Closed-form `K_2`, assembled from the two one-sided second derivatives.
pub fn analytic_edge_k2(edge: &Edge, l: f64, spec: &PhantomSpec) -> Result<f64> {
    let s = edge_sides(edge, l, spec)?;
    let df = s.f_minus - s.f_plus;
    let da = s.a_minus - s.a_plus;
    // rotating towards w*+ puts the upstream half on the - side
    let d2_after = (-s.d_plus).exp() * (s.a_plus * df - da * s.f_minus + da * da * s.u_minus);
    let d2_before = (-s.d_minus).exp() * (-s.a_minus * df + da * s.f_plus + da * da * s.u_plus);
    Ok((-(s.d_minus - s.d_plus)).exp() * d2_after + d2_before)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJumpEstimate {
    /// Recovered `D_- a = K_2 / K_1`.
    pub delta_minus_a: f64,
    pub k1: f64,
    pub k2: f64,
}

/// `D_- a` at parameter `l` on `line` from the data, given the jump of `a`
/// further along the line.
pub fn delta_a_from_edge<O: DataOracle + ?Sized>(
    oracle: &O,
    line: &DirectedLine,
    l: f64,
    known: &JumpProfile,
    opts: &LimitOptions,
) -> Result<EdgeJumpEstimate> {
    let (k1, k2) = edge_k_pair(oracle, line, l, known, ScanOptions::default().l_step, opts)?;
    let h = *opts.h_schedule.last().unwrap();
    let scale = oracle.transform(&DirectedLine::new(line.at(l), line.omega + h)).abs();
    if k1.value.abs() < opts.cancel_tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::CancellingCase(format!(
            "K_1 = {:.3e} at l = {l} is below {:.1e} x data scale {:.3e}",
            k1.value, opts.cancel_tol, scale
        )));
    }
    Ok(EdgeJumpEstimate { delta_minus_a: k2.value / k1.value, k1: k1.value, k2: k2.value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Scan starts here (beyond the support) and moves towards `l_min`.
    pub l_max: f64,
    pub l_min: f64,
    /// Spacing of the coarse scan grid.
    pub spacing: f64,
    /// Finite-difference step along the line; also the resolution of the
    /// located discontinuities.
    pub l_step: f64,
    /// Absolute threshold for a non-zero `K_1`.
    pub tol: f64,
    /// Relative change of the recovered jump that signals a new discontinuity.
    pub ratio_tol: f64,
    /// `|K_1|` just below a new discontinuity under which the jump there is
    /// reported as unreadable.
    pub cancel_k1: f64,
    pub limits: LimitOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            l_max: 1.5,
            l_min: -1.5,
            spacing: 0.01,
            l_step: 5e-4,
            tol: 5e-3,
            ratio_tol: 0.05,
            cancel_k1: 8.5e-3,
            limits: LimitOptions::default(),
        }
    }
}

/// Output of the line scan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EdgeScanState {
    /// Discontinuities of the jump profile, strictly decreasing.
    pub beta_points: Vec<f64>,
    /// Recovered `D_+ a` along the line; zero beyond the first discontinuity.
    pub delta_a_current: JumpProfile,
}

struct Scanner<'a, O: DataOracle + ?Sized> {
    oracle: &'a O,
    line: DirectedLine,
    opts: &'a ScanOptions,
    done: JumpProfile,
    /// jump on the open piece `(l, open_hi)`
    cur: f64,
    open_hi: f64,
}

impl<O: DataOracle + ?Sized> Scanner<'_, O> {
    fn k(&self, l: f64, cur: f64) -> Result<(f64, f64)> {
        let profile = self.done.clone().with_piece(l, self.open_hi, cur);
        let (k1, k2) = edge_k_pair(self.oracle, &self.line, l, &profile, self.opts.l_step, &self.opts.limits)?;
        Ok((k1.value, k2.value))
    }

    /// Classifies `l` against the current open piece.
    fn status(&self, l: f64) -> Result<Status> {
        let (k1, k2) = self.k(l, self.cur)?;
        if self.cur == 0.0 {
            // K_2 spikes while the stencil straddles a jump, so it marks the
            // jump even where K_1 is small
            let quiet = k1.abs() <= self.opts.tol && k2.abs() <= self.opts.tol;
            return Ok(if quiet { Status::Consistent } else { Status::Changed });
        }
        if k1.abs() <= self.opts.tol {
            return Ok(Status::Undetermined);
        }
        let r = -k2 / k1;
        Ok(if (r - self.cur).abs() <= self.opts.ratio_tol * self.cur.abs() {
            Status::Consistent
        } else {
            Status::Changed
        })
    }

    /// Finds the first change below `hi` (consistent) down to `lo` (not
    /// consistent), then removes the half-width of the difference stencil,
    /// which sees a discontinuity one step early. The walk comes first
    /// because `K_1` may cross zero inside the interval, so the status need
    /// not be monotone there.
    fn locate(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let step = 2.0 * self.opts.l_step;
        let mut p = hi - step;
        while p > lo {
            if self.status(p)? != Status::Consistent {
                lo = p;
                break;
            }
            hi = p;
            p -= step;
        }
        while hi - lo > 0.25 * self.opts.l_step {
            let mid = 0.5 * (lo + hi);
            if self.status(mid)? == Status::Consistent {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi - self.opts.l_step)
    }

    /// `(K_1, K_2)` just below `beta`, extrapolated linearly from two
    /// points. The weight over the short stretch below `beta` uses the jump
    /// being estimated, refined by a few fixed-point passes.
    fn limit_below(&self, beta: f64) -> Result<(f64, f64)> {
        let d = 3.0 * self.opts.l_step;
        let mut guess = 0.0;
        let mut out = (0.0, 0.0);
        for _ in 0..LIMIT_PASSES {
            let (a1, a2) = self.k(beta - d, guess)?;
            let (b1, b2) = self.k(beta - 2.0 * d, guess)?;
            out = (2.0 * a1 - b1, 2.0 * a2 - b2);
            if out.0.abs() < self.opts.cancel_k1 {
                break;
            }
            guess = -out.1 / out.0;
        }
        Ok(out)
    }

    /// Closes the open piece at `beta` and opens the next one.
    fn split(&mut self, beta: f64) -> Result<()> {
        if self.cur != 0.0 {
            self.done = self.done.clone().with_piece(beta, self.open_hi, self.cur);
        }
        self.open_hi = beta;
        let (k1, k2) = self.limit_below(beta)?;
        if k1.abs() < self.opts.cancel_k1 {
            if self.cur == 0.0 {
                return Err(Error::CancellingCase(format!(
                    "K_1 = {k1:.3e} just below l = {beta:.4} is too small to read off the jump of a"
                )));
            }
            self.cur = 0.0;
        } else {
            self.cur = -k2 / k1;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Consistent,
    /// `K_1` too small to test the ratio; either an isolated zero or the end
    /// of the current jump.
    Undetermined,
    Changed,
}

const LIMIT_PASSES: usize = 3;

/// Runs of undetermined grid points at least this long end the current jump.
const UNDETERMINED_RUN: usize = 3;

/// Recovers the discontinuities of the edge jump of `a` along `line` from
/// data alone, moving from large `l` towards small `l`.
pub fn scan_edge_jumps_along_line<O: DataOracle + ?Sized>(
    oracle: &O,
    line: &DirectedLine,
    opts: &ScanOptions,
) -> Result<EdgeScanState> {
    if !(opts.spacing > 0.0 && opts.l_step > 0.0 && 8.0 * opts.l_step < opts.spacing && opts.l_max > opts.l_min) {
        return Err(invalid("scan needs 0 < 8 l_step < spacing and l_min < l_max"));
    }
    let mut sc = Scanner {
        oracle,
        line: *line,
        opts,
        done: JumpProfile::zero(),
        cur: 0.0,
        open_hi: opts.l_max,
    };
    let mut betas: Vec<f64> = Vec::new();
    // grid points sit off round numbers so they avoid typical corner positions
    let mut l = opts.l_max - GRID_SHIFT * opts.spacing;
    let mut last_ok = opts.l_max;
    let mut undetermined: Vec<f64> = Vec::new();
    while l > opts.l_min {
        let st = sc.status(l)?;
        match st {
            Status::Consistent => {
                last_ok = l;
                undetermined.clear();
            }
            Status::Undetermined => undetermined.push(l),
            Status::Changed => {
                let lo = undetermined.first().copied().unwrap_or(l);
                let beta = sc.locate(lo, last_ok)?;
                sc.split(beta)?;
                betas.push(beta);
                undetermined.clear();
                last_ok = beta;
                l = beta - GRID_SHIFT * opts.spacing;
                continue;
            }
        }
        if undetermined.len() >= UNDETERMINED_RUN {
            let beta = sc.locate(undetermined[0], last_ok)?;
            sc.split(beta)?;
            betas.push(beta);
            undetermined.clear();
            last_ok = beta;
            l = beta - GRID_SHIFT * opts.spacing;
            continue;
        }
        l -= opts.spacing;
    }
    if !undetermined.is_empty() && sc.cur != 0.0 {
        let beta = sc.locate(undetermined[0], last_ok)?;
        sc.done = sc.done.clone().with_piece(beta, sc.open_hi, sc.cur);
        betas.push(beta);
        sc.cur = 0.0;
    }
    if sc.cur != 0.0 {
        sc.done = sc.done.clone().with_piece(opts.l_min, sc.open_hi, sc.cur);
    }
    Ok(EdgeScanState { beta_points: betas, delta_a_current: sc.done })
}

const GRID_SHIFT: f64 = 0.381_966;

/// Jump `lim R(x, theta(w*+)) - lim R(x, theta(w*-))` at `n` evenly spaced
/// points from `p0` to `p1`, with `w*` the direction of the segment. Returns
/// `(distance from p0, jump)` pairs.
pub fn edge_jump_profile<O: DataOracle + ?Sized>(
    oracle: &O,
    p0: Point,
    p1: Point,
    n: usize,
    opts: &LimitOptions,
) -> Result<Vec<(f64, f64)>> {
    opts.validate()?;
    let d = p1 - p0;
    let len = d.norm();
    if !(len > 0.0) || n < 2 {
        return Err(invalid("edge profile needs a non-degenerate segment and n >= 2"));
    }
    let line = DirectedLine::new(p0, d.y.atan2(d.x));
    let samples = crate::par::map_indexed(n, |i| {
        let l = len * i as f64 / (n - 1) as f64;
        let x = line.at(l);
        let vals: Vec<f64> = opts
            .h_schedule
            .iter()
            .map(|&h| {
                oracle.transform(&DirectedLine::new(x, line.omega + h))
                    - oracle.transform(&DirectedLine::new(x, line.omega - h))
            })
            .collect();
        (l, vals)
    });
    samples
        .into_iter()
        .map(|(l, vals)| {
            let scale = vals.iter().fold(1e-300, |m: f64, v| m.max(v.abs()));
            // a vanishing jump converges to zero; measure it on an absolute floor
            limit(&opts.h_schedule, &vals, 1.0, opts.tol, scale.max(1e-6)).map(|e| (l, e.value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantoms::square_family;

    fn bottom_line() -> DirectedLine {
        DirectedLine::new(Point::new(0.0, -0.5), 0.0)
    }

    fn inner_edge(spec: &PhantomSpec) -> Edge {
        let atlas = boundary_atlas(spec).unwrap();
        *atlas
            .edges_on_line(&bottom_line())
            .into_iter()
            .find(|e| e.p0.x.min(e.p1.x) > -0.1)
            .unwrap()
    }

    #[test]
    fn profile_integrates_pieces() {
        let p = JumpProfile::zero().with_piece(0.0, 0.5, -1.0).with_piece(0.7, 0.8, 2.0);
        assert_eq!(p.value_at(0.25), -1.0);
        assert_eq!(p.value_at(0.6), 0.0);
        assert!((p.integral_from(0.25) - (-0.25 + 0.2)).abs() < 1e-15);
        assert!((p.integral_from(-1.0) - (-0.5 + 0.2)).abs() < 1e-15);
        assert_eq!(p.integral_from(1.0), 0.0);
    }

    #[test]
    fn profile_from_atlas_matches_square() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        let p = JumpProfile::from_atlas(&boundary_atlas(&spec).unwrap(), &bottom_line());
        assert_eq!(p.pieces, vec![(0.0, 0.5, -1.0)]);
    }

    #[test]
    fn numeric_k_matches_closed_form() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        let edge = inner_edge(&spec);
        let known = JumpProfile::from_atlas(&boundary_atlas(&spec).unwrap(), &bottom_line());
        for l in [0.1, 0.25, 0.4] {
            let (k1, k2) = edge_k_pair(&spec, &bottom_line(), l, &known, 5e-4, &LimitOptions::default()).unwrap();
            let (e1, e2) = (analytic_edge_k1(&edge, l, &spec).unwrap(), analytic_edge_k2(&edge, l, &spec).unwrap());
            assert!(e1.abs() > 0.1);
            assert!((k1.value - e1).abs() < 0.02 * e1.abs(), "{} vs {e1}", k1.value);
            assert!((k2.value - e2).abs() < 0.02 * e2.abs(), "{} vs {e2}", k2.value);
        }
        let k1 = edge_k(&spec, Point::new(0.0, -0.5), 0.0, 1, 0.8, &known, &LimitOptions::default()).unwrap();
        assert!(k1.abs() < 1e-6);
    }

    #[test]
    fn k_requires_line_along_edge() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        let r = edge_k(&spec, Point::new(0.0, -0.4), 0.0, 1, 0.2, &JumpProfile::zero(), &LimitOptions::default());
        assert!(matches!(r, Err(Error::Geometry(_))));
        let edge = inner_edge(&spec);
        assert!(analytic_edge_k1(&edge, 0.0, &spec).is_err());
    }

    #[test]
    fn closed_form_vanishes_at_cancelling_edge_end() {
        let spec = square_family(1.0, 0.424421496829, 1.0).unwrap();
        let k = analytic_edge_k1(&inner_edge(&spec), 0.5 - 1e-9, &spec).unwrap();
        assert!(k.abs() < 1e-6, "{k}");
    }

    #[test]
    fn edge_jump_ratio() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        let known = JumpProfile::from_atlas(&boundary_atlas(&spec).unwrap(), &bottom_line());
        let est = delta_a_from_edge(&spec, &bottom_line(), 0.25, &known, &LimitOptions::default()).unwrap();
        assert!((est.delta_minus_a - 1.0).abs() < 0.05, "{est:?}");
        let c = square_family(1.0, 0.424421496829, 1.0).unwrap();
        let r = delta_a_from_edge(&c, &bottom_line(), 0.4999, &known, &LimitOptions::default());
        assert!(matches!(r, Err(Error::CancellingCase(_))), "{r:?}");
    }

    #[test]
    fn scan_finds_inner_square_edge() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        let st = scan_edge_jumps_along_line(&spec, &bottom_line(), &ScanOptions::default()).unwrap();
        assert_eq!(st.beta_points.len(), 2, "{st:?}");
        assert!((st.beta_points[0] - 0.5).abs() < 0.01 && st.beta_points[1].abs() < 0.01);
        assert!((st.delta_a_current.value_at(0.25) + 1.0).abs() < 0.05);
        assert_eq!(st.delta_a_current.value_at(0.7), 0.0);
    }

    #[test]
    fn scan_flags_cancelling_edge() {
        let spec = square_family(1.0, 0.4244, 1.0).unwrap();
        let r = scan_edge_jumps_along_line(&spec, &bottom_line(), &ScanOptions::default());
        assert!(matches!(r, Err(Error::CancellingCase(_))), "{r:?}");
    }

    #[test]
    fn scan_of_empty_line_is_trivial() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        let line = DirectedLine::new(Point::new(0.0, 1.2), 0.0);
        let st = scan_edge_jumps_along_line(&spec, &line, &ScanOptions::default()).unwrap();
        assert!(st.beta_points.is_empty());
        assert!(st.delta_a_current.pieces.is_empty());
    }

    #[test]
    fn jump_profile_is_flat_before_the_edge() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        let prof =
            edge_jump_profile(&spec, Point::new(-0.3, -0.5), Point::new(0.8, -0.5), 12, &LimitOptions::default())
                .unwrap();
        let before: Vec<f64> = prof.iter().filter(|p| p.0 < 0.25).map(|p| p.1).collect();
        assert!(before.len() >= 2);
        assert!(before.iter().all(|v| (v - before[0]).abs() < 1e-6 * before[0].abs().max(1e-3)));
        assert!(before[0].abs() > 0.05);
    }
}
