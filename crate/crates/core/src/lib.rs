//! Riesz and logarithmic potentials of convex bodies and their parallel bodies, the
//! centers they define, minimal unfolded regions, explicit thresholds on the parallel
//! radius, and numerical checks of the sign inequalities behind uniqueness of centers.
//!
//! Everything is generic over the scalar through [`Real`]; the `*F64` and `*F32` aliases
//! fix the common choices.

pub mod centers;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod potential;
pub mod quadrature;
pub mod real;
pub mod report;
pub mod unfolded;
pub mod verify;

pub use centers::{centroid, find_center, CenterConfig, CenterResult, Mode};
pub use error::{Error, Result};
pub use geometry::{BodySpec, ConvexBody};
pub use potential::{Evaluation, Kernel, PotentialParams, PotentialReport};
pub use real::Real;
pub use report::{CaseResult, LemmaId, LemmaReport, Verdict};
pub use unfolded::{UnfoldedConfig, UnfoldedRegion};

pub type BodyF64 = ConvexBody<f64>;
pub type BodyF32 = ConvexBody<f32>;
pub type SpecF64 = BodySpec<f64>;
pub type SpecF32 = BodySpec<f32>;
pub type ParamsF64 = PotentialParams<f64>;
pub type ParamsF32 = PotentialParams<f32>;
pub type ReportF64 = LemmaReport<f64>;
pub type ReportF32 = LemmaReport<f32>;
