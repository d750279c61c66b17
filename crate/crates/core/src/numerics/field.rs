use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{BigComplex, Rational};

/// Scalars the operator and series machinery can run over: exact rationals or
/// fixed-precision complex numbers.
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// What is needed to build constants (nothing for rationals, a precision otherwise).
    type Ctx: Clone + Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn from_rational(r: &Rational, ctx: &Self::Ctx) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Panics on division by zero.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_i64(&self, k: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `log2 |x|`, `-inf` at zero.
    fn log2_abs(&self) -> f64;
    fn to_complex(&self, prec: u32) -> BigComplex;
    /// Conversion from a floating value; `None` where that would be inexact.
    fn from_complex(z: &BigComplex, ctx: &Self::Ctx) -> Option<Self>;
    /// Whether arithmetic is exact.
    fn is_exact() -> bool;
    /// Working precision in bits, `None` for exact scalars.
    fn ctx_bits(ctx: &Self::Ctx) -> Option<u32>;

    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_i64(1, ctx)
    }

    fn from_i64(v: i64, ctx: &Self::Ctx) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)), ctx)
    }

    fn mul_rational(&self, r: &Rational) -> Self {
        if r.denom() == &BigInt::from(1) {
            if let Some(k) = r.numer().to_i64() {
                return self.mul_i64(k);
            }
        }
        self.mul(&Self::from_rational(r, &self.ctx()))
    }
}

impl Field for Rational {
    type Ctx = ();

    fn ctx(&self) {}

    fn zero(_: &()) -> Self {
        <Rational as Zero>::zero()
    }

    fn from_rational(r: &Rational, _: &()) -> Self {
        r.clone()
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn sub(&self, o: &Self) -> Self {
        self - o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn div(&self, o: &Self) -> Self {
        assert!(!Zero::is_zero(o), "rational division by zero");
        self / o
    }

    fn neg(&self) -> Self {
        -self
    }

    fn mul_i64(&self, k: i64) -> Self {
        self * Rational::from_integer(BigInt::from(k))
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn log2_abs(&self) -> f64 {
        if Zero::is_zero(self) {
            return f64::NEG_INFINITY;
        }
        let n = self.numer().abs();
        let d = self.denom();
        let shift = n.bits() as i64 - d.bits() as i64;
        let scaled = if shift > 0 { Rational::new(n, d << shift as usize) } else { Rational::new(n << (-shift) as usize, d.clone()) };
        scaled.to_f64().unwrap_or(1.0).log2() + shift as f64
    }

    fn to_complex(&self, prec: u32) -> BigComplex {
        BigComplex::from_rational(self, prec)
    }

    fn from_complex(_: &BigComplex, _: &()) -> Option<Self> {
        None
    }

    fn is_exact() -> bool {
        true
    }

    fn ctx_bits(_: &()) -> Option<u32> {
        None
    }
}

impl Field for BigComplex {
    type Ctx = u32;

    fn ctx(&self) -> u32 {
        self.prec()
    }

    fn zero(prec: &u32) -> Self {
        BigComplex::zero(*prec)
    }

    fn from_rational(r: &Rational, prec: &u32) -> Self {
        BigComplex::from_rational(r, *prec)
    }

    fn add(&self, o: &Self) -> Self {
        self.add_ref(o)
    }

    fn sub(&self, o: &Self) -> Self {
        self.sub_ref(o)
    }

    fn mul(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }

    fn div(&self, o: &Self) -> Self {
        self.div_ref(o)
    }

    fn neg(&self) -> Self {
        self.neg_ref()
    }

    fn mul_i64(&self, k: i64) -> Self {
        BigComplex::mul_i64(self, k)
    }

    fn is_zero(&self) -> bool {
        BigComplex::is_zero(self)
    }

    fn log2_abs(&self) -> f64 {
        BigComplex::log2_abs(self)
    }

    fn to_complex(&self, prec: u32) -> BigComplex {
        self.with_prec(prec)
    }

    fn from_complex(z: &BigComplex, prec: &u32) -> Option<Self> {
        Some(z.with_prec(*prec))
    }

    fn is_exact() -> bool {
        false
    }

    fn ctx_bits(prec: &u32) -> Option<u32> {
        Some(*prec)
    }

    fn mul_rational(&self, r: &Rational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            let v = BigComplex::mul_i64(self, n);
            return if d == 1 { v } else { v.div_i64(d) };
        }
        BigComplex::mul_rational(self, r)
    }
}
