//! The non-cancellation condition at boundary points and its roots for the
//! two built-in phantom families.

use crate::error::{invalid, Error, Result};
use crate::geom::{theta, theta_perp, Point};
use crate::phantoms::{boundary_atlas, radial_layers, square_layers, PhantomSpec};
use crate::raytrace::compute_u;
use serde::{Deserialize, Serialize};

const SIDE_OFFSET: f64 = 1e-9;
const ON_BOUNDARY: f64 = 1e-9;
const CORNER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationCheck {
    pub lhs: f64,
    pub tol: f64,
    pub is_cancelling: bool,
    /// Whether the tangent line runs along a flat edge.
    pub on_edge: bool,
}

/// Jumps and incoming fluxes on both sides of the tangent line at `x`.
fn side_terms(spec: &PhantomSpec, x: Point, omega: f64) -> (f64, f64, f64, f64) {
    let n = theta_perp(omega);
    let (ap, fp) = spec.eval(x + SIDE_OFFSET * n);
    let (am, fm) = spec.eval(x - SIDE_OFFSET * n);
    let up = compute_u(spec, x + SIDE_OFFSET * n, omega);
    let um = compute_u(spec, x - SIDE_OFFSET * n, omega);
    (fm - fp, am - ap, up, um)
}

fn edge_lhs(spec: &PhantomSpec, x: Point, omega: f64) -> (f64, f64) {
    let (df, da, up, um) = side_terms(spec, x, omega);
    let lhs = df - 0.5 * da * (up + um);
    (lhs, 1e-6 * (df.abs() + da.abs() * up.abs().max(um.abs()) + 1e-300))
}

fn curved_lhs(spec: &PhantomSpec, x: Point, omega: f64) -> (f64, f64) {
    let (df, da, _, _) = side_terms(spec, x, omega);
    let u = compute_u(spec, x, omega);
    (df - da * u, 1e-6 * (df.abs() + da.abs() * u.abs() + 1e-300))
}

/// Evaluates the non-cancellation expression at the boundary point `x_star`
/// with tangent direction `theta(omega_star)`.
pub fn check_cancellation(spec: &PhantomSpec, x_star: Point, omega_star: f64) -> Result<CancellationCheck> {
    let atlas = boundary_atlas(spec)?;
    if atlas.is_corner(x_star, ON_BOUNDARY) {
        return Err(Error::Geometry(format!("{x_star:?} is a corner; the tangent line is not defined")));
    }
    let dir = theta(omega_star);
    let on_edge = atlas.edges.iter().any(|e| {
        let d = e.p1 - e.p0;
        let len = d.norm();
        let t = (x_star - e.p0).dot(d) / len;
        d.cross(dir).abs() < ON_BOUNDARY * len
            && (x_star - e.p0).cross(d).abs() < ON_BOUNDARY * len
            && t > CORNER_TOL
            && t < len - CORNER_TOL
    });
    let on_arc = atlas.arcs.iter().any(|a| {
        let r = x_star - a.center;
        (r.norm() - a.radius).abs() < ON_BOUNDARY && r.dot(dir).abs() < ON_BOUNDARY * a.radius
    });
    let (lhs, tol) = if on_edge {
        edge_lhs(spec, x_star, omega_star)
    } else if on_arc {
        curved_lhs(spec, x_star, omega_star)
    } else {
        return Err(Error::Geometry(format!(
            "{x_star:?} with direction {omega_star} is not a boundary point with that tangent"
        )));
    };
    Ok(CancellationCheck { lhs, tol, is_cancelling: lhs.abs() < tol, on_edge })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Evaluated at the lowest point of the inner circle, horizontal tangent.
    Radial,
    /// Evaluated on the bottom edge of the inner square at its right end.
    Edge,
}

/// Two of the three family parameters; the missing one is solved for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub c: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
}

fn family_lhs(family: Family, c: f64, f1: f64, f2: f64) -> f64 {
    match family {
        Family::Radial => curved_lhs(&radial_layers(c, f1, f2), Point::new(0.0, -0.5), 0.0).0,
        Family::Edge => edge_lhs(&square_layers(c, f1, f2), Point::new(0.5 - 1e-10, -0.5), 0.0).0,
    }
}

/// Root of the cancellation expression in the free parameter by bisection.
pub fn solve_cancellation(family: Family, fixed: FixedParams, bracket: (f64, f64)) -> Result<f64> {
    let missing = [fixed.c, fixed.f1, fixed.f2].iter().filter(|v| v.is_none()).count();
    if missing != 1 {
        return Err(invalid("exactly one of c, f1, f2 must be left free"));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("bad bracket ({lo}, {hi})")));
    }
    let g = |v: f64| {
        family_lhs(
            family,
            fixed.c.unwrap_or(v),
            fixed.f1.unwrap_or(v),
            fixed.f2.unwrap_or(v),
        )
    };
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoRoot { lo, hi });
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
