//! Identity specifications `gamma^T Sigma_4 Pi(phi) = sum_i G_i^T Sigma_{2,2} int_{C_i} omega (x) omega`.

use serde::{Deserialize, Serialize};

use super::{identity_lhs, relative_residual, tensor2};
use crate::contours::{builtin_cycle, ContourSpec, QuadratureResult, TensorPlane};
use crate::error::{Error, Result};
use crate::hv_elliptic::Phi;
use crate::hv_threefold::ThreefoldPeriods;
use crate::numerics::{parse_rational, rational_to_string, BigComplex, PrecisionContext, Rational};
use crate::transport::{ContourFile, Route};

pub const BUILTIN_IDENTITIES: [&str; 3] = ["vanishing-1-9", "vanishing-1-25", "t3-holomorphic"];

/// A pairing vector, flat or as `g1 (x) g2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GSpec {
    Flat([i64; 4]),
    Pure { g1: [i64; 2], g2: [i64; 2] },
}

impl GSpec {
    pub fn vector(&self) -> [i64; 4] {
        match self {
            GSpec::Flat(v) => *v,
            GSpec::Pure { g1, g2 } => tensor2(*g1, *g2),
        }
    }
}

/// A named built-in contour or an inline contour file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContourRef {
    Named(String),
    Inline(ContourFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityTerm {
    #[serde(rename = "G")]
    pub g: GSpec,
    pub contour: ContourRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySpec {
    pub name: String,
    /// Rational strings; absent when `gamma` is to be searched for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<String>>,
    pub phi: String,
    pub terms: Vec<IdentityTerm>,
}

impl IdentitySpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("identity spec: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn gamma(&self) -> Result<Option<[Rational; 4]>> {
        let Some(g) = &self.gamma else { return Ok(None) };
        if g.len() != 4 {
            return Err(Error::Parse("gamma needs four entries".into()));
        }
        let v = g.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(Some([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]))
    }
}

/// The shipped identity for a named contour at `phi`.
pub fn builtin_identity(name: &str, phi: &str) -> Result<IdentitySpec> {
    let (g1, g2, gamma) = builtin_cycle(name)?;
    Ok(IdentitySpec {
        name: name.into(),
        gamma: Some(gamma.iter().map(rational_to_string).collect()),
        phi: phi.into(),
        terms: vec![IdentityTerm { g: GSpec::Pure { g1, g2 }, contour: ContourRef::Named(name.into()) }],
    })
}

/// Quadrature data of one term.
#[derive(Clone, Debug)]
pub struct TermCertificate {
    pub contour: String,
    pub g: [i64; 4],
    pub closed: bool,
    /// Monodromy invariance of the pairing row (closed contours only).
    pub invariant: Option<bool>,
    pub value: BigComplex,
    pub node_count: usize,
    pub error_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: String,
    pub phi: Phi,
    pub detour: Route,
    pub gamma: Option<[Rational; 4]>,
    pub pi: Vec<BigComplex>,
    pub lhs: Option<BigComplex>,
    pub rhs: BigComplex,
    pub residual: Option<f64>,
    pub terms: Vec<TermCertificate>,
}

/// `sum_i G_i^T Sigma_{2,2} int_{C_i} omega(lambda, 1) (x) omega(lambda, phi) d lambda`.
/// Closed contours must leave their pairing row invariant.
pub fn identity_rhs(spec: &IdentitySpec, plane: &TensorPlane, detour: Route) -> Result<(BigComplex, Vec<TermCertificate>)> {
    let prec = plane.prec();
    let mut total = BigComplex::zero(prec);
    let mut certs = Vec::new();
    for term in &spec.terms {
        let g = term.g.vector();
        let (label, contour) = match &term.contour {
            ContourRef::Named(n) => (n.clone(), plane.builtin(n, detour)?.contour),
            ContourRef::Inline(f) => {
                let path = f.build(plane, prec)?;
                let closed = match (path.start(), path.end()) {
                    (Some(a), Some(b)) => a.dist_f64(&b) < 1e-20,
                    _ => false,
                };
                let c = if closed { ContourSpec::closed(path)? } else { ContourSpec::open(path) };
                ("inline".to_string(), c)
            }
        };
        let closed = contour.kind == crate::contours::ContourKind::Closed;
        let invariant = if closed { Some(plane.invariance_check(&contour, &g)?) } else { None };
        if invariant == Some(false) {
            return Err(Error::NotInvariant);
        }
        let r: QuadratureResult = plane.integrate(&contour, &g, detour)?;
        total = total.add_ref(&r.value);
        certs.push(TermCertificate {
            contour: label,
            g,
            closed,
            invariant,
            value: r.value,
            node_count: r.node_count,
            error_estimate: r.error_estimate,
        });
    }
    Ok((total, certs))
}

/// Evaluates both sides; with `gamma` absent only `Pi` and the right side are returned.
pub fn verify_identity(spec: &IdentitySpec, ctx: &PrecisionContext, detour: Route) -> Result<IdentityReport> {
    let prec = ctx.bits();
    let phi = Phi::parse(&spec.phi, prec)?;
    if phi.is_zero() {
        return Err(Error::Invalid("phi must be nonzero".into()));
    }
    let gamma = spec.gamma()?;
    let plane = TensorPlane::new(&phi, ctx)?;
    let (rhs, terms) = identity_rhs(spec, &plane, detour)?;
    let pi = ThreefoldPeriods::new(ctx)?.pi_vector(&phi.value(prec))?;
    let lhs = gamma.as_ref().map(|g| identity_lhs(g, &pi));
    let residual = lhs.as_ref().map(|l| relative_residual(l, &rhs));
    Ok(IdentityReport { name: spec.name.clone(), phi, detour, gamma, pi, lhs, rhs, residual, terms })
}
