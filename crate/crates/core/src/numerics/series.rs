use super::Field;
use crate::error::{Error, Result};

/// `sum_{k < order} c_k (x - point)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<F> {
    coeffs: Vec<F>,
    point: F,
}

impl<F: Field> TruncatedSeries<F> {
    /// Pads with zeros or truncates to `order` coefficients.
    pub fn new(mut coeffs: Vec<F>, point: F, order: usize) -> Self {
        let ctx = point.ctx();
        coeffs.resize_with(order, || F::zero(&ctx));
        Self { coeffs, point }
    }

    pub fn zero(point: F, order: usize) -> Self {
        Self::new(Vec::new(), point, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn point(&self) -> &F {
        &self.point
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.point != o.point {
            return Err(Error::SeriesMismatch("different expansion points".into()));
        }
        if self.order() != o.order() {
            return Err(Error::SeriesMismatch(format!("orders {} and {}", self.order(), o.order())));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let c = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(Self { coeffs: c, point: self.point.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let c = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect();
        Ok(Self { coeffs: c, point: self.point.clone() })
    }

    pub fn scale(&self, s: &F) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(), point: self.point.clone() }
    }

    /// Cauchy product truncated to the common order.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.order();
        let ctx = self.point.ctx();
        let mut out = vec![F::zero(&ctx); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..n - i].iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ok(Self { coeffs: out, point: self.point.clone() })
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.order();
        let ctx = self.point.ctx();
        let Some(c0) = self.coeffs.first().filter(|c| !c.is_zero()) else {
            return Err(Error::SeriesMismatch("constant term is not invertible".into()));
        };
        let inv0 = F::one(&ctx).div(c0);
        let mut out: Vec<F> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for k in 1..n {
            let mut s = F::zero(&ctx);
            for j in 1..=k {
                s = s.add(&self.coeffs[j].mul(&out[k - j]));
            }
            out.push(s.mul(&inv0).neg());
        }
        Ok(Self { coeffs: out, point: self.point.clone() })
    }

    pub fn divide(&self, o: &Self) -> Result<Self> {
        self.multiply(&o.inverse()?)
    }

    /// Value of the truncated sum at `x`.
    pub fn eval(&self, x: &F) -> F {
        let z = x.sub(&self.point);
        let ctx = self.point.ctx();
        self.coeffs.iter().rev().fold(F::zero(&ctx), |acc, c| acc.mul(&z).add(c))
    }
}
