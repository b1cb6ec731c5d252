//! Forward operators.
//!
//! The data model is
//! `R_a f(x, theta) = int f(x + t theta) exp(-Da(x + t theta, theta)) dt`
//! with the beam transform `Da(x, theta) = int_0^inf a(x + r theta) dr`, so
//! attenuation acts downstream of each emitting point. Both the continuum
//! operator on analytic phantoms and the pixel-grid operator use the same
//! per-segment closed form for piecewise-constant `a` and `f`.

mod continuum;
mod discrete;
mod sinogram;

pub use continuum::{
    attenuated_integral, beam_transform, compute_u, forward_point, project_continuum,
    segment_line, Segmentation,
};
pub use discrete::{fidelity_value_grad, project_discrete, FLinearMap, Projector, RayPath};
pub use sinogram::{add_gaussian_noise, uniform_angles, uniform_offsets, Sinogram};

/// `(1 - exp(-a L)) / a`, the emission of a unit-source segment of length
/// `L` and attenuation `a` seen from its downstream end.
pub fn segment_emission(a: f64, len: f64) -> f64 {
    let x = a * len;
    if x.abs() < 1e-8 {
        len - 0.5 * a * len * len
    } else {
        -(-x).exp_m1() / a
    }
}

/// Derivative of [`segment_emission`] with respect to `a`.
pub fn segment_emission_da(a: f64, len: f64) -> f64 {
    let x = a * len;
    if x.abs() < 1e-3 {
        let l2 = len * len;
        l2 * (-0.5 + x / 3.0 - x * x / 8.0 + x * x * x / 30.0 - x * x * x * x / 144.0)
    } else {
        let e = (-x).exp();
        (x * e + (-x).exp_m1()) / (a * a)
    }
}
