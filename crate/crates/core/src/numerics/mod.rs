//! Arbitrary precision scalars, polynomials, truncated series and small dense matrices.

mod bigfloat;
mod complex;
pub mod elementary;
mod field;
mod matrix;
mod poly;
mod rational;
pub mod roots;
mod series;

pub use bigfloat::BigFloat;
pub use complex::BigComplex;
pub use field::Field;
pub use matrix::Matrix;
pub use poly::Poly;
pub use rational::{parse_rational, ratio, rational_reconstruct, rational_to_string};
pub use series::TruncatedSeries;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Working precision, series length and the tolerance results are judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub working_digits: u32,
    pub truncation_order: usize,
    pub target_tolerance: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { working_digits: 120, truncation_order: 400, target_tolerance: 1e-40 }
    }
}

impl PrecisionContext {
    /// Requires `working_digits >= 2 * ceil(-log10(target_tolerance))`.
    pub fn new(working_digits: u32, truncation_order: usize, target_tolerance: f64) -> Result<Self> {
        if !(target_tolerance > 0.0 && target_tolerance < 1.0) {
            return Err(Error::Precision(format!("tolerance {target_tolerance:e} must lie in (0, 1)")));
        }
        if truncation_order < 8 {
            return Err(Error::Precision(format!("truncation order {truncation_order} is too small")));
        }
        let ctx = Self { working_digits, truncation_order, target_tolerance };
        if working_digits < 2 * ctx.tolerance_digits() {
            return Err(Error::Precision(format!(
                "{working_digits} working digits cannot support tolerance {target_tolerance:e}; need at least {}",
                2 * ctx.tolerance_digits()
            )));
        }
        Ok(ctx)
    }

    /// Decimal digits implied by the tolerance.
    pub fn tolerance_digits(&self) -> u32 {
        (-self.target_tolerance.log10()).ceil().max(1.0) as u32
    }

    /// Mantissa width in bits, with a few guard bits.
    pub fn bits(&self) -> u32 {
        (self.working_digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    /// `log2` of the tolerance.
    pub fn tolerance_log2(&self) -> f64 {
        self.target_tolerance.log2()
    }

    /// Same tolerance and digits with another series length.
    pub fn with_order(&self, truncation_order: usize) -> Self {
        Self { truncation_order, ..self.clone() }
    }
}
