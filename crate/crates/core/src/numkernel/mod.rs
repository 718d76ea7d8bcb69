//! Numerical primitives: quadrature, ODE integration, Bessel K, sparse eigensolver.

pub mod bessel;
pub mod eigen;
pub mod ode;
pub mod quadrature;
pub mod skyline;
pub mod sparse;
pub mod tridiag;

pub use bessel::{bessel_k, bessel_k_eval, bessel_k_scaled, BesselValue};
pub use eigen::{lowest_eigenpairs, lowest_eigenpairs_with, EigenOptions, EigenPair, Shift};
pub use ode::{integrate_ode, integrate_ode_with, OdeOptions, OdeTrajectory};
pub use quadrature::{gauss_legendre, geometric_breaks, merge_breaks, uniform_breaks, LegendreRule, QuadratureGrid};
pub use sparse::{CsrMatrix, SparseSymmetricPair};
