use num_complex::Complex64;
use num_traits::Zero;

use super::operator::FuchsianOperator;
use crate::error::{Error, Result};
use crate::numerics::roots::{aberth_f64, small_rational_near};
use crate::numerics::{rational_to_string, BigComplex, Field, Poly, Rational};

/// Where a local expansion is centred.
#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    Exact(Rational),
    Numeric(BigComplex),
    Infinity,
}

impl Location {
    /// Finite location as a complex number; `None` at infinity.
    pub fn value(&self, prec: u32) -> Option<BigComplex> {
        match self {
            Location::Exact(r) => Some(BigComplex::from_rational(r, prec)),
            Location::Numeric(z) => Some(z.with_prec(prec)),
            Location::Infinity => None,
        }
    }

    pub fn to_f64_pair(&self) -> Option<(f64, f64)> {
        self.value(64).map(|z| z.to_f64_pair())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Location::Infinity)
    }

    pub fn label(&self) -> String {
        match self {
            Location::Exact(r) => rational_to_string(r),
            Location::Numeric(z) => z.to_sci_string(20),
            Location::Infinity => "infinity".into(),
        }
    }
}

/// `|x|` below the working precision relative to `2^scale_log2`, or exactly zero.
pub(crate) fn vanishes<F: Field>(x: &F, scale_log2: f64, bits: Option<u32>) -> bool {
    match bits {
        None => x.is_zero(),
        Some(b) => x.is_zero() || x.log2_abs() < scale_log2 - b as f64 / 2.0,
    }
}

fn falling_factorial<F: Field>(k: usize, ctx: &F::Ctx) -> Poly<F> {
    let mut p = Poly::constant(F::one(ctx));
    for i in 0..k {
        p = p.mul(&Poly::new(vec![F::from_i64(-(i as i64), ctx), F::one(ctx)]));
    }
    p
}

/// An operator rewritten around a point `c` in `t = x - c` (or `t = 1/x`) as
/// `t^v_min * sum_j t^j Q_j(theta_t)`, with `Q_0` the indicial polynomial.
#[derive(Clone, Debug)]
pub struct LocalOperator<F: Field> {
    location: Location,
    order: usize,
    q: Vec<Poly<F>>,
    v_min: i64,
    ctx: F::Ctx,
}

impl<F: Field> LocalOperator<F> {
    pub fn new(op: &FuchsianOperator, location: &Location, ctx: &F::Ctx) -> Result<Self> {
        let (base, center) = match location {
            Location::Infinity => (op.at_infinity(), Location::Exact(<Rational as Zero>::zero())),
            other => (op.clone(), other.clone()),
        };
        let bits = F::ctx_bits(ctx);
        let shifted: Vec<Poly<F>> = match (&center, base.is_exact()) {
            (Location::Exact(c), true) => base
                .d_form::<Rational>(&())?
                .iter()
                .map(|a| a.taylor_shift(c).map(|r| F::from_rational(r, ctx)))
                .collect(),
            _ => {
                let c = match &center {
                    Location::Exact(r) => F::from_rational(r, ctx),
                    Location::Numeric(z) => F::from_complex(z, ctx)
                        .ok_or_else(|| Error::Invalid(format!("{} needs floating arithmetic", location.label())))?,
                    Location::Infinity => unreachable!(),
                };
                let cabs = c.log2_abs().max(0.0).exp2();
                base.d_form::<F>(ctx)?
                    .iter()
                    .map(|a| {
                        let scale = a
                            .coeffs()
                            .iter()
                            .enumerate()
                            .map(|(i, x)| x.log2_abs() + i as f64 * (1.0 + cabs).log2())
                            .fold(f64::NEG_INFINITY, f64::max);
                        let s = a.taylor_shift(&c);
                        Poly::new(
                            s.coeffs()
                                .iter()
                                .map(|x| if vanishes(x, scale, bits) { F::zero(ctx) } else { x.clone() })
                                .collect(),
                        )
                    })
                    .collect()
            }
        };
        Self::from_d_form(shifted, location.clone(), ctx)
    }

    fn from_d_form(a: Vec<Poly<F>>, location: Location, ctx: &F::Ctx) -> Result<Self> {
        let n = a.len() - 1;
        let ff: Vec<Poly<F>> = (0..=n).map(|k| falling_factorial::<F>(k, ctx)).collect();
        let mut v_min = i64::MAX;
        let mut v_max = i64::MIN;
        for (k, ak) in a.iter().enumerate() {
            for (i, c) in ak.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    v_min = v_min.min(i as i64 - k as i64);
                    v_max = v_max.max(i as i64 - k as i64);
                }
            }
        }
        if v_min == i64::MAX {
            return Err(Error::MalformedOperator("operator vanishes identically".into()));
        }
        let mut q = vec![Poly::<F>::zero(); (v_max - v_min) as usize + 1];
        for (k, ak) in a.iter().enumerate() {
            for (i, c) in ak.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    let j = (i as i64 - k as i64 - v_min) as usize;
                    q[j] = q[j].add(&ff[k].scale(c));
                }
            }
        }
        if q[0].degree() != Some(n) {
            return Err(Error::IrregularPoint(location.label()));
        }
        Ok(Self { location, order: n, q, v_min, ctx: ctx.clone() })
    }

    pub fn location(&self) -> &Location {
        &self.location
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `Q_j` as polynomials in `theta_t`.
    pub fn q(&self) -> &[Poly<F>] {
        &self.q
    }

    pub fn v_min(&self) -> i64 {
        self.v_min
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn indicial(&self) -> &Poly<F> {
        &self.q[0]
    }

    /// Taylor coefficients of `Q_j` at `x`, padded to `order + 1`.
    pub(crate) fn taylor_at(&self, j: usize, x: &F) -> Vec<F> {
        let mut v = self.q[j].taylor_shift(x).coeffs().to_vec();
        v.resize(self.order + 1, F::zero(&self.ctx));
        v
    }

    /// Local exponents with multiplicity, ascending. Only rational exponents
    /// with small denominators are recognised.
    pub fn exponents(&self) -> Result<Vec<(Rational, usize)>> {
        let ind = &self.q[0];
        let bits = F::ctx_bits(&self.ctx);
        let seeds: Vec<Complex64> = ind
            .coeffs()
            .iter()
            .map(|c| {
                let (a, b) = c.to_complex(80).to_f64_pair();
                Complex64::new(a, b)
            })
            .collect();
        let mut found: Vec<(Rational, usize)> = Vec::new();
        for s in aberth_f64(&seeds) {
            let Some(r) = small_rational_near(s, 12, 1e-2) else {
                return Err(Error::UnsupportedExponents(format!(
                    "exponent near {:.6}{:+.6}i at {} is not a small rational",
                    s.re,
                    s.im,
                    self.location.label()
                )));
            };
            if found.iter().any(|(x, _)| *x == r) {
                continue;
            }
            let rf = F::from_rational(&r, &self.ctx);
            let rabs = 1.0 + r.log2_abs().exp2();
            let mut p = ind.clone();
            let mut mult = 0;
            while mult < self.order {
                let scale = p
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.log2_abs() + i as f64 * rabs.log2())
                    .fold(f64::NEG_INFINITY, f64::max);
                if !vanishes(&p.eval(&rf), scale, bits) {
                    break;
                }
                mult += 1;
                p = p.derivative();
            }
            if mult > 0 {
                found.push((r, mult));
            }
        }
        let total: usize = found.iter().map(|(_, m)| m).sum();
        if total != self.order {
            return Err(Error::UnsupportedExponents(format!(
                "only {total} of {} exponents at {} are rational",
                self.order,
                self.location.label()
            )));
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn toy() -> FuchsianOperator {
        // theta^2 - x (theta + 1/2)^2
        let p0 = Poly::new(vec![ratio(0, 1), ratio(-1, 4)]);
        let p1 = Poly::new(vec![ratio(0, 1), ratio(-1, 1)]);
        let p2 = Poly::new(vec![ratio(1, 1), ratio(-1, 1)]);
        FuchsianOperator::exact("toy", "x", ratio(0, 1), vec![p0, p1, p2]).unwrap()
    }

    #[test]
    fn exponents_of_legendre_type() {
        let op = toy();
        let at0 = LocalOperator::<Rational>::new(&op, &Location::Exact(ratio(0, 1)), &()).unwrap();
        assert_eq!(at0.exponents().unwrap(), vec![(ratio(0, 1), 2)]);
        let at1 = LocalOperator::<Rational>::new(&op, &Location::Exact(ratio(1, 1)), &()).unwrap();
        assert_eq!(at1.exponents().unwrap(), vec![(ratio(0, 1), 2)]);
        let inf = LocalOperator::<Rational>::new(&op, &Location::Infinity, &()).unwrap();
        assert_eq!(inf.exponents().unwrap(), vec![(ratio(1, 2), 2)]);
    }

    #[test]
    fn ordinary_point_exponents() {
        let op = toy();
        let l = LocalOperator::<Rational>::new(&op, &Location::Exact(ratio(1, 3)), &()).unwrap();
        assert_eq!(l.exponents().unwrap(), vec![(ratio(0, 1), 1), (ratio(1, 1), 1)]);
        let z = BigComplex::from_f64(0.25, 0.5, 256);
        let l = LocalOperator::<BigComplex>::new(&op, &Location::Numeric(z), &256).unwrap();
        assert_eq!(l.exponents().unwrap(), vec![(ratio(0, 1), 1), (ratio(1, 1), 1)]);
    }

    #[test]
    fn numeric_singular_center_is_chopped() {
        let op = toy();
        let one = BigComplex::from_rational(&ratio(1, 1), 256);
        let l = LocalOperator::<BigComplex>::new(&op.with_inexact(256), &Location::Numeric(one), &256).unwrap();
        assert_eq!(l.exponents().unwrap(), vec![(ratio(0, 1), 2)]);
    }

    #[test]
    fn irregular_point_is_rejected() {
        // x^2 d/dx + 1 has an irregular singularity at 0
        let op = FuchsianOperator::exact(
            "irr",
            "x",
            ratio(0, 1),
            vec![Poly::from_i64s(&[1]), Poly::from_i64s(&[0, 1])],
        )
        .unwrap();
        let r = LocalOperator::<Rational>::new(&op, &Location::Exact(ratio(0, 1)), &());
        assert!(matches!(r, Err(Error::IrregularPoint(_))));
    }
}
