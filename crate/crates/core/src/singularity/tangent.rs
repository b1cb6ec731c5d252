use super::{d2_omega, d_omega, DataOracle, LimitOptions};
use crate::error::{Error, Result};
use crate::extrapolate::{limit, Extrapolated};
use crate::geom::{DirectedLine, Point};
use crate::phantoms::{PhantomSpec, TangentPointInfo};
use crate::raytrace::{beam_transform, compute_u};
use serde::{Deserialize, Serialize};

/// Leading coefficient `J_s` of `dR/domega ~ J_s |omega - omega*|^{-1/2}`
/// at a tangency with a curved boundary, from the phantom itself.
pub fn analytic_tangent_j(info: &TangentPointInfo, spec: &PhantomSpec) -> Result<f64> {
    if !(info.kappa > 0.0) {
        return Err(Error::Geometry("tangency with a flat boundary has no curvature term".into()));
    }
    if info.ell == 0.0 {
        return Ok(0.0);
    }
    let u = compute_u(spec, info.x_star, info.omega_star);
    let da = beam_transform(spec, info.x_star, info.omega_star);
    let amp = (2.0 * info.ell.abs() / info.kappa).sqrt();
    Ok(info.ell.signum() * amp * (info.delta_f - info.delta_a * u) * (-da).exp())
}

fn sample_scale(vals: &[f64]) -> f64 {
    vals.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()))
}

/// `lim |omega - omega*|^{1/2} dR/domega` from the side `omega* + side * 0`,
/// extrapolated in `sqrt(h)`.
pub fn numeric_j<O: DataOracle + ?Sized>(
    oracle: &O,
    x: Point,
    omega_star: f64,
    side: f64,
    opts: &LimitOptions,
) -> Result<Extrapolated> {
    opts.validate()?;
    let s = side.signum();
    let vals: Vec<f64> = opts
        .h_schedule
        .iter()
        .map(|&h| h.sqrt() * d_omega(oracle, &DirectedLine::new(x, omega_star + s * h), opts.fd_ratio * h))
        .collect();
    limit(&opts.h_schedule, &vals, 0.5, opts.tol, sample_scale(&vals))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentJumpEstimate {
    /// Recovered `D_+ a` at the tangency point.
    pub delta_plus_a: f64,
    pub j: f64,
    pub j_residual: f64,
    pub second_limit: f64,
    pub second_residual: f64,
}

/// Recovers `D_+ a` at a tangency from the data alone, using the geometry in
/// `info` (distance and curvature) and the singular side `side`.
pub fn recover_delta_a_tangent<O: DataOracle + ?Sized>(
    oracle: &O,
    x: Point,
    omega_star: f64,
    side: f64,
    info: &TangentPointInfo,
    opts: &LimitOptions,
) -> Result<TangentJumpEstimate> {
    if !(info.kappa > 0.0) || info.ell == 0.0 {
        return Err(Error::Geometry("jump recovery needs a curved boundary away from the probe".into()));
    }
    let j = numeric_j(oracle, x, omega_star, side, opts)?;
    let scale = oracle.transform(&DirectedLine::new(x, omega_star)).abs();
    if j.value.abs() < opts.cancel_tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::CancellingCase(format!(
            "leading coefficient {:.3e} is below {:.1e} x data scale {:.3e}",
            j.value, opts.cancel_tol, scale
        )));
    }
    let s = side.signum();
    let vals: Vec<f64> = opts
        .h_schedule
        .iter()
        .map(|&h| {
            let step = opts.fd_ratio * h;
            let near = DirectedLine::new(x, omega_star + s * h);
            let mirror = DirectedLine::new(x, omega_star - s * h);
            h * d2_omega(oracle, &near, step)
                + 0.5 * s * (d_omega(oracle, &near, step) - d_omega(oracle, &mirror, step))
        })
        .collect();
    let second = limit(&opts.h_schedule, &vals, 0.5, opts.tol, sample_scale(&vals).max(j.value.abs()))?;
    let amp = (2.0 * info.ell.abs() / info.kappa).sqrt();
    Ok(TangentJumpEstimate {
        delta_plus_a: second.value / (amp * j.value),
        j: j.value,
        j_residual: j.residual,
        second_limit: second.value,
        second_residual: second.residual,
    })
}
