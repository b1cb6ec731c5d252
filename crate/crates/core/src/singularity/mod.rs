//! Numerical evaluation of the one-sided limits of the data that locate
//! boundaries and recover attenuation jumps.
//!
//! Sign conventions: for a directed line with direction `theta` and normal
//! `theta_perp`, `g_+` / `g_-` are the limits of `g` from the `+theta_perp` /
//! `-theta_perp` side and `D_+ g = g_- - g_+`, `D_- g = -D_+ g`.
//!
//! Every sampled quantity comes from a [`DataOracle`], so the same routines
//! run on analytic phantoms and on arbitrary measurement callbacks.

mod cancel;
mod edge;
mod sweep;
mod tangent;

pub use cancel::{check_cancellation, solve_cancellation, CancellationCheck, Family, FixedParams};
pub use edge::{
    analytic_edge_k1, analytic_edge_k2, delta_a_from_edge, edge_k, edge_k_pair, edge_jump_profile,
    scan_edge_jumps_along_line, EdgeJumpEstimate, EdgeScanState, JumpProfile, ScanOptions,
};
pub use sweep::{growth_exponent, sweep_transform, SweepCurve};
pub use tangent::{analytic_tangent_j, numeric_j, recover_delta_a_tangent, TangentJumpEstimate};

use crate::geom::DirectedLine;
use crate::phantoms::PhantomSpec;
use crate::raytrace::forward_point;
use serde::{Deserialize, Serialize};

/// Source of attenuated-transform values along arbitrary directed lines.
pub trait DataOracle: Sync {
    fn transform(&self, line: &DirectedLine) -> f64;
}

impl DataOracle for PhantomSpec {
    fn transform(&self, line: &DirectedLine) -> f64 {
        forward_point(self, line)
    }
}

/// Wraps a closure as a [`DataOracle`].
pub struct FnOracle<F>(pub F);

impl<F: Fn(&DirectedLine) -> f64 + Sync> DataOracle for FnOracle<F> {
    fn transform(&self, line: &DirectedLine) -> f64 {
        (self.0)(line)
    }
}

/// Sampling and convergence settings for limit extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    /// Distances from the critical angle, strictly decreasing.
    pub h_schedule: Vec<f64>,
    /// Finite-difference step in `omega` as a fraction of the current `h`.
    pub fd_ratio: f64,
    /// Relative convergence tolerance of the extrapolation.
    pub tol: f64,
    /// Relative threshold below which a leading coefficient counts as zero.
    pub cancel_tol: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            h_schedule: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            fd_ratio: 1e-2,
            tol: 1e-3,
            cancel_tol: 5e-3,
        }
    }
}

impl LimitOptions {
    fn validate(&self) -> crate::Result<()> {
        if self.h_schedule.len() < 4 {
            return Err(crate::error::invalid("h schedule needs at least 4 entries"));
        }
        if self.h_schedule.iter().any(|&h| !(h > 0.0)) || self.h_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(crate::error::invalid("h schedule must be positive and strictly decreasing"));
        }
        if !(self.fd_ratio > 0.0 && self.fd_ratio < 1.0) {
            return Err(crate::error::invalid("fd_ratio must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Result record shared by the command-line reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub query: String,
    pub extrapolated_value: f64,
    pub residual: f64,
    pub is_cancelling: bool,
}

/// `dR/domega` at `omega` by a central difference of half-width `step`.
pub(crate) fn d_omega<O: DataOracle + ?Sized>(oracle: &O, line: &DirectedLine, step: f64) -> f64 {
    let p = oracle.transform(&line.rotated(step));
    let m = oracle.transform(&line.rotated(-step));
    (p - m) / (2.0 * step)
}

/// `d^2R/domega^2` at `omega` by a central second difference.
pub(crate) fn d2_omega<O: DataOracle + ?Sized>(oracle: &O, line: &DirectedLine, step: f64) -> f64 {
    let p = oracle.transform(&line.rotated(step));
    let c = oracle.transform(line);
    let m = oracle.transform(&line.rotated(-step));
    (p - 2.0 * c + m) / (step * step)
}
