#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Smallest-eigenvalue statistics of β-Wishart-Laguerre ensembles.
//!
//! The density of the smallest eigenvalue is e^{−βnx/2} x^α g(x) for a
//! polynomial g built by a finite recursion. Everything else in the crate
//! (fixed-trace densities, moments, the matrix-argument ₁F₁, asymptotic
//! comparisons, samplers and brute-force oracles) hangs off that polynomial.

pub mod asymptotics;
pub mod density;
pub mod error;
pub mod hyp;
pub mod montecarlo;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod quadrature;
pub mod recursion;
pub mod reference;
pub mod scalar;
pub mod special;
pub mod verify;

pub use density::{build_density, build_fixed_trace, ClosedFormDensity, DelayTimeDensity, EigenDensity, FixedTraceDensity};
pub use error::{Error, Result};
pub use hyp::{hyp1f1_matrix, HypergeomResult};
pub use params::{Beta, EnsembleParams, Precision};
pub use poly::{AnyPolynomial, DensePolynomial};
pub use recursion::{compute_g, norm_constant_c, selberg_constant_c, GPolynomial};
pub use scalar::{BigFloat, Constant, FloatContext, Scalar};
