//! JSON rendering of numerical results.

use hv_periods::numerics::{Matrix, Rational};
use hv_periods::{BigComplex, BigFloat};
use serde_json::{json, Value};

pub fn real(x: &BigFloat, digits: usize) -> String {
    x.to_sci_string(digits)
}

/// `{"re", "im", "digits"}` with decimal strings.
pub fn complex(z: &BigComplex, digits: usize) -> Value {
    json!({ "re": real(&z.re, digits), "im": real(&z.im, digits), "digits": digits })
}

/// Small floats (residuals, deviations) as strings.
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn rational(r: &Rational) -> String {
    hv_periods::numerics::rational_to_string(r)
}

/// Rounded integer entries when every entry is within `tol` of one, else `null`.
pub fn integer_matrix(m: &Matrix<BigComplex>, tol: f64) -> Value {
    match hv_periods::relations::integer_matrix(m, tol) {
        Some(rows) => json!(rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
        None => Value::Null,
    }
}

pub fn matrix(m: &Matrix<BigComplex>, digits: usize, tol: f64) -> Value {
    let entries: Vec<Vec<Value>> =
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| complex(&m[(i, j)], digits)).collect()).collect();
    json!({
        "integer": integer_matrix(m, tol),
        "max_integer_deviation": sci(m.max_integer_deviation()),
        "entries": entries,
    })
}
