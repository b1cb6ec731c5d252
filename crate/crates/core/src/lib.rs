//! Attenuated Radon transform modelling, singularity analysis and joint
//! reconstruction of attenuation and source for emission tomography.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`]: pixel images and admissible value sets,
//! - [`phantoms`]: analytic layered phantoms and their boundary atlas,
//! - [`raytrace`]: exact continuum and pixel-grid forward operators,
//! - [`singularity`]: limits of the data at tangencies and along flat edges,
//! - [`regularizers`]: multi-bang penalty, smoothed total variation,
//! - [`solver`]: alternating proximal reconstruction of `(a, f)`,
//! - [`io`]: file formats shared with the command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extrapolate;
pub mod geom;
pub mod grid;
pub mod io;
mod par;
pub mod phantoms;
pub mod raytrace;
pub mod regularizers;
pub mod singularity;
pub mod solver;

pub use error::{Error, Result};
pub use geom::{theta, theta_perp, DirectedLine, Point};
pub use grid::{make_image, multibang_project, rel_l2_error, AdmissibleSet, Image};
pub use phantoms::{
    boundary_atlas, eval_phantom, radial_family, rasterize, square_family, tangent_info,
    BoundaryAtlas, PhantomSpec, Region, TangentPointInfo,
};
pub use raytrace::{
    add_gaussian_noise, beam_transform, compute_u, fidelity_value_grad, forward_point,
    project_continuum, project_discrete, segment_line, Projector, Segmentation, Sinogram,
};
