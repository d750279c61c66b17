//! Periods, monodromy and period identities for the Hulek-Verrill elliptic
//! curves and the one-parameter threefold built from them.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: arbitrary precision reals/complexes, polynomials, series, matrices
//! - [`fuchsian`]: Fuchsian operators and Frobenius bases
//! - [`transport`]: analytic continuation along plane paths
//! - [`hv_elliptic`], [`hv_threefold`]: the two concrete families
//! - [`contours`]: tensor-product integrands and quadrature
//! - [`relations`]: pairings, identities and integer relation search

pub mod contours;
pub mod error;
pub mod fuchsian;
pub mod hv_elliptic;
pub mod hv_threefold;
pub mod numerics;
pub mod relations;
pub mod transport;

pub use error::{Error, Result};
pub use numerics::{BigComplex, BigFloat, PrecisionContext, Rational};
