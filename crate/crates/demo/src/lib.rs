//! wasm-bindgen entry points for `www/index.html`. Every function returns a
//! JSON string; errors come back as JS exceptions carrying the message.

use hv_periods::hv_elliptic::{constant_term_oracle, f0_coefficients, sl2z_conjecture_check, Phi, INTEGRALITY_TOLERANCE};
use hv_periods::numerics::rational_to_string;
use hv_periods::relations::{integer_matrix, invariant_vector};
use hv_periods::PrecisionContext;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Out = Result<String, JsValue>;

fn fail<E: std::fmt::Display>(e: E) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn phi_of(s: &str, prec: u32) -> Result<Phi, JsValue> {
    let phi = Phi::parse(s.trim(), prec).map_err(fail)?;
    if phi.is_zero() {
        return Err(fail("phi must be nonzero"));
    }
    Ok(phi)
}

/// Coefficients of the holomorphic period `f0(lambda, phi)`, with the
/// constant-term count alongside for the first few.
#[wasm_bindgen]
pub fn series(phi: &str, count: u32) -> Out {
    let Phi::Exact(r) = phi_of(phi, 64)? else {
        return Err(fail("the series needs a rational phi"));
    };
    let count = count.clamp(1, 60) as usize;
    let coeffs = f0_coefficients(&r, count);
    let rows: Vec<Value> = coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let oracle = constant_term_oracle(&r, n).ok().map(|o| rational_to_string(&o));
            json!({"n": n, "coefficient": rational_to_string(c), "constant_term": oracle})
        })
        .collect();
    Ok(json!({"phi": phi, "coefficients": rows}).to_string())
}

/// Elliptic monodromy around each finite singular point, at modest precision.
#[wasm_bindgen]
pub fn monodromy(phi: &str, digits: u32) -> Out {
    let digits = digits.clamp(20, 60);
    let ctx = PrecisionContext::new(digits, (digits * 4) as usize, 10f64.powi(-(digits as i32) / 2)).map_err(fail)?;
    let phi_v = phi_of(phi, ctx.bits())?;
    let r = sl2z_conjecture_check(&phi_v, &ctx).map_err(fail)?;
    let rows: Vec<Value> = r
        .monodromies
        .iter()
        .map(|m| {
            let ints = integer_matrix(&m.matrix, INTEGRALITY_TOLERANCE)
                .map(|rows| rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
            json!({
                "label": m.label,
                "point": m.location.to_sci_string(8),
                "matrix": ints,
                "integer_deviation": format!("{:.2e}", m.integer_deviation),
                "det_deviation": format!("{:.2e}", m.det_deviation),
            })
        })
        .collect();
    Ok(json!({
        "phi": phi,
        "digits": digits,
        "basepoint": r.basepoint.to_sci_string(8),
        "monodromies": rows,
        "integral": r.integral(),
        "loop_product_deviation": format!("{:.2e}", r.relation_deviation),
    })
    .to_string())
}

/// Primitive vector fixed by a unipotent integer matrix `[[a, b], [c, d]]`.
#[wasm_bindgen]
pub fn invariant(a: i32, b: i32, c: i32, d: i32) -> Out {
    let v = invariant_vector([[a as i64, b as i64], [c as i64, d as i64]]).map_err(fail)?;
    Ok(json!({"matrix": [[a, b], [c, d]], "invariant": v}).to_string())
}
