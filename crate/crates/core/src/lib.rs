//! Curved quantum layers of constant width over surfaces with a pole.
//!
//! The core is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases at the bottom fix it to `f64`.

pub mod error;
pub mod layer;
pub mod numkernel;
pub mod real;
pub mod spectrum;
pub mod surface;
pub mod varform;

pub use error::{Error, Result};
pub use real::Real;

pub type Chart = surface::PolarChart<f64>;
pub type Profile = surface::RevolutionProfile<f64>;
pub type Graph = surface::graph::GraphSurface<f64>;
pub type Layer = layer::LayerSpec<f64>;
pub type Trial = varform::TrialFunction<f64>;
pub type FormValue = varform::FormEvaluation<f64>;
pub type Certificate = varform::Certificate<f64>;
pub type Mesh = spectrum::AxisymMesh<f64>;
pub type Spectrum = spectrum::SpectrumResult<f64>;
