//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use spect_mb::phantoms::{Layer, Region};
use spect_mb::{DirectedLine, PhantomSpec, Point};

/// Sampling step used to find where `(a, f)` changes along a line.
const PROBE_STEP: f64 = 1e-4;

#[allow(clippy::too_many_arguments)]
fn simpson_adaptive(g: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    simpson_adaptive(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_adaptive(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `g` over `[a, b]`.
pub fn integrate(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (g(a), g(b), g(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_adaptive(g, a, b, fa, fm, fb, whole, tol, 30)
}

fn locate(spec: &PhantomSpec, line: &DirectedLine, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let vlo = spec.eval(line.at(lo));
    let vhi = spec.eval(line.at(hi));
    if vlo == vhi {
        return;
    }
    if hi - lo < 1e-14 {
        out.push(0.5 * (lo + hi));
        return;
    }
    let mid = 0.5 * (lo + hi);
    locate(spec, line, lo, mid, out);
    locate(spec, line, mid, hi, out);
}

/// `int f(x + t theta) exp(-int_t^inf a(x + r theta) dr) dt` from point
/// evaluations only: breakpoints are found by dense sampling and bisection,
/// then each smooth piece is integrated adaptively.
pub fn quadrature_transform(spec: &PhantomSpec, line: &DirectedLine) -> f64 {
    let t0 = -line.x.dot(line.dir());
    let half = spec.extent() + 0.1;
    let (lo, hi) = (t0 - half, t0 + half);
    let n = ((hi - lo) / PROBE_STEP).ceil() as usize;
    let mut breaks = vec![lo];
    for k in 0..n {
        let a = lo + (hi - lo) * k as f64 / n as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / n as f64;
        locate(spec, line, a, b, &mut breaks);
    }
    breaks.push(hi);
    // walk downstream to upstream accumulating the attenuation integral
    let mut total = 0.0;
    let mut d_hi = 0.0;
    for w in breaks.windows(2).rev() {
        let (p, q) = (w[0], w[1]);
        let (a, f) = spec.eval(line.at(0.5 * (p + q)));
        if f != 0.0 {
            let g = |t: f64| f * (-(d_hi + a * (q - t))).exp();
            total += integrate(&g, p, q, 1e-13 * (q - p) * f.abs());
        }
        d_hi += a * (q - p);
    }
    total
}

fn random_region(rng: &mut impl Rng) -> Region {
    let center = Point::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
    match rng.random_range(0..3) {
        0 => Region::Disk { center, radius: rng.random_range(0.1..0.6) },
        1 => {
            let r_inner = rng.random_range(0.1..0.4);
            Region::Annulus { center, r_inner, r_outer: r_inner + rng.random_range(0.05..0.3) }
        }
        _ => {
            let (w, h) = (rng.random_range(0.1..0.8), rng.random_range(0.1..0.8));
            Region::Rect { x_min: center.x - w / 2.0, x_max: center.x + w / 2.0, y_min: center.y - h / 2.0, y_max: center.y + h / 2.0 }
        }
    }
}

/// One to four random layers with `a, f` in `[0, 2)`.
pub fn random_phantom(rng: &mut impl Rng) -> PhantomSpec {
    let n = rng.random_range(1..=4);
    let layers = (0..n)
        .map(|_| Layer { region: random_region(rng), a: rng.random_range(0.0..2.0), f: rng.random_range(0.0..2.0) })
        .collect();
    PhantomSpec::new(layers).unwrap()
}

/// Smallest distance from the line to a tangency or a rectangle corner.
pub fn clearance(spec: &PhantomSpec, line: &DirectedLine) -> f64 {
    let mut best = f64::INFINITY;
    for l in &spec.layers {
        match l.region {
            Region::Disk { center, radius } => best = best.min((line.signed_distance(center).abs() - radius).abs()),
            Region::Annulus { center, r_inner, r_outer } => {
                let d = line.signed_distance(center).abs();
                best = best.min((d - r_inner).abs()).min((d - r_outer).abs());
            }
            Region::Rect { x_min, x_max, y_min, y_max } => {
                for c in [(x_min, y_min), (x_min, y_max), (x_max, y_min), (x_max, y_max)] {
                    best = best.min(line.signed_distance(Point::new(c.0, c.1)).abs());
                }
            }
        }
    }
    best
}

/// A random line through the support that stays at least `margin` away
/// from tangencies and corners.
pub fn random_line(spec: &PhantomSpec, rng: &mut impl Rng, margin: f64) -> DirectedLine {
    loop {
        let omega = rng.random_range(0.0..std::f64::consts::TAU);
        let s = rng.random_range(-0.9..0.9);
        let line = DirectedLine::from_sinogram(omega, s);
        if clearance(spec, &line) > margin {
            return line;
        }
    }
}
