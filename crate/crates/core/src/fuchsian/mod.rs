//! Fuchsian operators in theta form, local exponents and Frobenius bases.

mod frobenius;
mod local;
mod operator;

pub use frobenius::{FrobeniusBasis, LogSeries};
pub use local::{LocalOperator, Location};
pub use operator::{Coefficients, FuchsianOperator, OperatorFile};

use num_traits::ToPrimitive;

use crate::error::Result;
use crate::numerics::roots::{roots_exact, roots_numeric};
use crate::numerics::{rational_reconstruct, BigComplex, Field, PrecisionContext, Rational};
use frobenius::residual;

/// A candidate singular point with its local exponents. `apparent` means every
/// local solution is single valued there.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint {
    pub location: Location,
    pub exponents: Vec<Rational>,
    pub apparent: bool,
}

impl SingularPoint {
    /// Exponents `0, 1, ..., n-1` with no logarithms: an ordinary point in disguise.
    pub fn is_removable(&self) -> bool {
        self.apparent
            && self.exponents.iter().enumerate().all(|(i, e)| *e == Rational::from_integer((i as i64).into()))
    }
}

/// Roots of the leading coefficient together with `0` and infinity. Rational
/// roots of exact operators are recognised and kept exact.
pub fn singular_candidates(op: &FuchsianOperator, prec: u32) -> Vec<Location> {
    let mut out: Vec<Location> = vec![Location::Exact(Rational::from_integer(0.into()))];
    let roots: Vec<Location> = match op.coefficients() {
        Coefficients::Exact(c) => {
            let lead = c.last().unwrap();
            roots_exact(lead, prec)
                .into_iter()
                .map(|(x, _)| {
                    rational_reconstruct(&x, 1 << 40, (-(prec as f64) * 0.75).exp2())
                        .ok()
                        .filter(|r| lead.eval(r).is_zero())
                        .map_or(Location::Numeric(x), Location::Exact)
                })
                .collect()
        }
        Coefficients::Numeric(_) => {
            roots_numeric(&op.leading_complex(prec)).into_iter().map(|(x, _)| Location::Numeric(x)).collect()
        }
    };
    for r in roots {
        let (a, b) = r.to_f64_pair().unwrap();
        if a.hypot(b) == 0.0 || matches!(&r, Location::Numeric(z) if z.log2_abs() < -(prec as f64) / 2.0) {
            continue;
        }
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out.sort_by(|x, y| {
        let (a, b) = x.to_f64_pair().unwrap();
        let (c, d) = y.to_f64_pair().unwrap();
        a.total_cmp(&c).then(b.total_cmp(&d))
    });
    out.push(Location::Infinity);
    out
}

/// Distance from `loc` to the nearest other finite candidate.
pub fn isolation_radius(loc: &Location, candidates: &[Location]) -> Option<f64> {
    let (a, b) = loc.to_f64_pair()?;
    candidates
        .iter()
        .filter(|c| *c != loc)
        .filter_map(|c| c.to_f64_pair())
        .map(|(c, d)| (a - c).hypot(b - d))
        .filter(|d| *d > 0.0)
        .reduce(f64::min)
}

fn local_exact_or_numeric(op: &FuchsianOperator, loc: &Location, prec: u32) -> Result<(Vec<(Rational, usize)>, bool)> {
    let exact = op.is_exact() && !matches!(loc, Location::Numeric(_));
    if exact {
        let local = LocalOperator::<Rational>::new(op, loc, &())?;
        let exps = local.exponents()?;
        let span = exps.last().unwrap().0.clone() - exps[0].0.clone();
        let order = span.to_integer().to_usize().unwrap_or(0) + 2;
        let apparent = FrobeniusBasis::new(local, order).map(|b| b.is_apparent()).unwrap_or(false);
        Ok((exps, apparent))
    } else {
        let local = LocalOperator::<BigComplex>::new(op, loc, &prec)?;
        let exps = local.exponents()?;
        let span = exps.last().unwrap().0.clone() - exps[0].0.clone();
        let order = span.to_integer().to_usize().unwrap_or(0) + 2;
        let apparent = FrobeniusBasis::new(local, order).map(|b| b.is_apparent()).unwrap_or(false);
        Ok((exps, apparent))
    }
}

/// Local exponents with multiplicity, listed with repetition in ascending order.
pub fn indicial_exponents(op: &FuchsianOperator, loc: &Location, prec: u32) -> Result<Vec<Rational>> {
    let (exps, _) = local_exact_or_numeric(op, loc, prec)?;
    Ok(exps.into_iter().flat_map(|(e, m)| std::iter::repeat_n(e, m)).collect())
}

/// Every candidate singular point, classified.
pub fn singular_points(op: &FuchsianOperator, prec: u32) -> Result<Vec<SingularPoint>> {
    singular_candidates(op, prec)
        .into_iter()
        .map(|location| {
            let (exps, apparent) = local_exact_or_numeric(op, &location, prec)?;
            Ok(SingularPoint {
                location,
                exponents: exps.into_iter().flat_map(|(e, m)| std::iter::repeat_n(e, m)).collect(),
                apparent,
            })
        })
        .collect()
}

/// Floating Frobenius basis at `loc` with the certified radius set from the
/// operator's own candidate singularities.
pub fn frobenius_basis(op: &FuchsianOperator, loc: &Location, ctx: &PrecisionContext) -> Result<FrobeniusBasis<BigComplex>> {
    let prec = ctx.bits();
    let cands = singular_candidates(op, prec);
    let local = LocalOperator::<BigComplex>::new(op, loc, &prec)?;
    let basis = FrobeniusBasis::new(local, ctx.truncation_order)?;
    let radius = match loc {
        Location::Infinity => cands
            .iter()
            .filter_map(|c| c.to_f64_pair())
            .map(|(a, b)| a.hypot(b))
            .fold(0.0, f64::max)
            .recip(),
        other => isolation_radius(other, &cands).unwrap_or(f64::INFINITY),
    };
    Ok(basis.with_radius(radius))
}

/// Exact Frobenius basis at a rational point of an exact operator.
pub fn frobenius_basis_exact(op: &FuchsianOperator, point: &Rational, order: usize) -> Result<FrobeniusBasis<Rational>> {
    FrobeniusBasis::new(LocalOperator::<Rational>::new(op, &Location::Exact(point.clone()), &())?, order)
}

/// `op` applied to a log series; all coefficients up to the series order are computed.
pub fn apply_operator<F: Field>(op: &FuchsianOperator, s: &LogSeries<F>, ctx: &F::Ctx) -> Result<LogSeries<F>> {
    let local = LocalOperator::<F>::new(op, &s.location, ctx)?;
    let fact = |k: usize| Rational::from_integer((1..=k as i64).product::<i64>().into());
    let divided: Vec<Vec<F>> =
        s.coeffs.iter().map(|v| v.iter().enumerate().map(|(k, c)| c.mul_rational(&fact(k))).collect()).collect();
    let res = residual(&local, &s.exponent, &divided);
    Ok(LogSeries {
        location: s.location.clone(),
        exponent: &s.exponent + Rational::from_integer(local.v_min().into()),
        coeffs: res
            .into_iter()
            .map(|v| v.into_iter().enumerate().map(|(k, c)| c.mul_rational(&fact(k).recip())).collect())
            .collect(),
    })
}
