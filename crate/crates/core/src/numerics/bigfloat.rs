//! Binary floating point numbers with an arbitrary, per-value mantissa width.
//!
//! A value is `mant * 2^exp` where `mant` carries exactly `prec` significant
//! bits (or is zero). Every operation rounds to nearest at the larger of the
//! operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn round_shift(m: BigInt, sh: u64) -> BigInt {
    if sh == 0 {
        return m;
    }
    let half = BigInt::one() << (sh - 1);
    if m.is_negative() {
        -((-m + half) >> sh)
    } else {
        (m + half) >> sh
    }
}

impl BigFloat {
    pub(crate) fn normalize(mant: BigInt, exp: i64, prec: u32) -> Self {
        if mant.is_zero() {
            return Self::zero(prec);
        }
        let p = prec as i64;
        let bits = mant.bits() as i64;
        let (mut mant, mut exp) = (mant, exp);
        match bits.cmp(&p) {
            Ordering::Greater => {
                let sh = bits - p;
                mant = round_shift(mant, sh as u64);
                exp += sh;
                if mant.bits() as i64 > p {
                    // rounding carried into a new leading bit; the low bit is zero
                    mant >>= 1;
                    exp += 1;
                }
            }
            Ordering::Less => {
                let sh = p - bits;
                mant <<= sh as usize;
                exp -= sh;
            }
            Ordering::Equal => {}
        }
        Self { mant, exp, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::normalize(BigInt::from(v), 0, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Self::normalize(v.clone(), 0, prec)
    }

    /// `num / den` rounded to `prec` bits. Panics if `den` is zero.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "BigFloat::from_ratio: zero denominator");
        if num.is_zero() {
            return Self::zero(prec);
        }
        let s = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (n, d, e) = if s >= 0 {
            (num << (s as usize), den.clone(), -s)
        } else {
            (num.clone(), den << ((-s) as usize), -s)
        };
        Self::normalize(n.div_floor(&d), e, prec)
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec)
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "BigFloat::from_f64: non-finite input");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = if exponent == 0 {
            (bits & 0xfffffffffffff) << 1
        } else {
            (bits & 0xfffffffffffff) | 0x10000000000000
        };
        Self::normalize(BigInt::from(sign) * BigInt::from(mantissa), exponent - 1075, prec)
    }

    /// Builds `mant * 2^exp` exactly (then rounds to `prec`).
    pub fn from_parts(mant: BigInt, exp: i64, prec: u32) -> Self {
        Self::normalize(mant, exp, prec)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        if prec == self.prec {
            self.clone()
        } else {
            Self::normalize(self.mant.clone(), self.exp, prec)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self { mant: self.mant.clone(), exp: self.exp + k, prec: self.prec }
    }

    /// Approximate `log2 |x|`; `-inf` for zero. Never underflows.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits() as i64;
        let top = if bits > 60 { (&self.mant >> ((bits - 60) as usize)).abs() } else { self.mant.abs() };
        let shift = if bits > 60 { bits - 60 } else { 0 };
        top.to_f64().unwrap_or(1.0).log2() + (self.exp + shift) as f64
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (top, shift) = if bits > 62 {
            (round_shift(self.mant.clone(), (bits - 62) as u64), bits - 62)
        } else {
            (self.mant.clone(), 0)
        };
        ldexp(top.to_f64().unwrap_or(0.0), self.exp + shift)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as usize)
        } else {
            &self.mant >> ((-self.exp) as usize)
        }
    }

    /// Nearest integer (halves round up).
    pub fn round(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as usize)
        } else {
            round_shift(self.mant.clone(), (-self.exp) as u64)
        }
    }

    /// Exact rational value of the binary float.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << (self.exp as usize))
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    /// `round(x * 2^frac_bits)`: the fixed-point image used by the elementary functions.
    pub(crate) fn to_fixed(&self, frac_bits: u64) -> BigInt {
        let e = self.exp + frac_bits as i64;
        if e >= 0 {
            &self.mant << (e as usize)
        } else {
            round_shift(self.mant.clone(), (-e) as u64)
        }
    }

    pub(crate) fn from_fixed(v: BigInt, frac_bits: u64, prec: u32) -> Self {
        Self::normalize(v, -(frac_bits as i64), prec)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "BigFloat::sqrt of a negative number");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        let want = 2 * prec as i64 + 4;
        let mut sh = (want - self.mant.bits() as i64).max(0);
        if (self.exp - sh).rem_euclid(2) != 0 {
            sh += 1;
        }
        let m = &self.mant << (sh as usize);
        let r = m.sqrt();
        Self::normalize(r, (self.exp - sh) / 2, prec)
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec).div_ref(self)
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        if self.is_zero() {
            return o.with_prec(prec);
        }
        if o.is_zero() {
            return self.with_prec(prec);
        }
        let top_s = self.exp + self.mant.bits() as i64;
        let top_o = o.exp + o.mant.bits() as i64;
        let guard = prec as i64 + 3;
        if top_o < top_s - guard {
            return self.with_prec(prec);
        }
        if top_s < top_o - guard {
            return o.with_prec(prec);
        }
        let (hi, lo) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = (hi.exp - lo.exp) as usize;
        Self::normalize((&hi.mant << d) + &lo.mant, lo.exp, prec)
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        Self { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        if self.is_zero() || o.is_zero() {
            return Self::zero(prec);
        }
        Self::normalize(&self.mant * &o.mant, self.exp + o.exp, prec)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::normalize(&self.mant * BigInt::from(k), self.exp, self.prec)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self.div_ref(&Self::from_i64(k, self.prec))
    }

    /// Panics on division by zero, like integer division.
    pub fn div_ref(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "BigFloat: division by zero");
        let prec = self.prec.max(o.prec);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let s = prec as i64 + 2 + o.mant.bits() as i64 - self.mant.bits() as i64;
        let s = s.max(0);
        let num = &self.mant << (s as usize);
        Self::normalize(num / &o.mant, self.exp - s - o.exp, prec)
    }

    pub fn cmp_value(&self, o: &Self) -> Ordering {
        self.sub_ref(o).signum().cmp(&0)
    }

    pub fn max_ref<'a>(&'a self, o: &'a Self) -> &'a Self {
        if self.cmp_value(o) == Ordering::Less {
            o
        } else {
            self
        }
    }

    /// Decimal scientific notation with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.is_negative();
        let a = self.abs();
        let mut e10 = (a.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let scale = digits as i64 - 1 - e10;
            let n = scaled_integer(&a, scale);
            let s = n.to_string();
            if s.len() > digits {
                e10 += 1;
                continue;
            }
            if s.len() < digits {
                e10 -= 1;
                continue;
            }
            let (head, tail) = s.split_at(1);
            let sign = if neg { "-" } else { "" };
            return if tail.is_empty() {
                format!("{sign}{head}e{e10}")
            } else {
                format!("{sign}{head}.{tail}e{e10}")
            };
        }
    }
}

/// `round(a * 10^scale)` for `a >= 0`.
fn scaled_integer(a: &BigFloat, scale: i64) -> BigInt {
    let ten = BigInt::from(10u32);
    let (num, den) = if scale >= 0 {
        (&a.mant * num_traits::pow(ten, scale as usize), BigInt::one())
    } else {
        (a.mant.clone(), num_traits::pow(ten, (-scale) as usize))
    };
    let (num, den): (BigInt, BigInt) = if a.exp >= 0 {
        (num << (a.exp as usize), den)
    } else {
        (num, den << ((-a.exp) as usize))
    };
    let twice: BigInt = num * 2 + &den;
    twice.div_floor(&(den * 2))
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(25))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.prec as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_sci_string(digits))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $m(self, o: &BigFloat) -> BigFloat {
                self.$imp(o)
            }
        }
        impl $tr<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $m(self, o: BigFloat) -> BigFloat {
                self.$imp(&o)
            }
        }
        impl $tr<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $m(self, o: &BigFloat) -> BigFloat {
                self.$imp(o)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        self.neg_ref()
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    #[test]
    fn small_integers_are_exact() {
        let a = BigFloat::from_i64(12345, P);
        let b = BigFloat::from_i64(-678, P);
        assert_eq!((&a + &b).round(), BigInt::from(11667));
        assert_eq!((&a * &b).round(), BigInt::from(-8369910));
        assert_eq!((&a - &a).signum(), 0);
    }

    #[test]
    fn thirds_sum_to_one() {
        let third = BigFloat::from_ratio(&BigInt::from(1), &BigInt::from(3), P);
        let s = &(&third + &third) + &third;
        let err = (&s - &BigFloat::one(P)).abs();
        assert!(err.log2_abs() < -(P as f64) + 3.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let two = BigFloat::from_i64(2, P);
        let r = two.sqrt();
        let err = (&(&r * &r) - &two).abs();
        assert!(err.log2_abs() < -(P as f64) + 4.0);
    }

    #[test]
    fn f64_round_trip() {
        for v in [1.0, -0.1, 3.5e-200, 7.25e150, 1.0 / 3.0] {
            assert_eq!(BigFloat::from_f64(v, P).to_f64(), v);
        }
    }

    #[test]
    fn sci_string() {
        let x = BigFloat::from_ratio(&BigInt::from(-1), &BigInt::from(8), P);
        assert_eq!(x.to_sci_string(3), "-1.25e-1");
        assert_eq!(BigFloat::from_i64(1000, P).to_sci_string(2), "1.0e3");
    }

    #[test]
    fn tiny_addend_is_absorbed() {
        let one = BigFloat::one(64);
        let tiny = BigFloat::one(64).mul_pow2(-500);
        assert_eq!(&one + &tiny, one);
    }
}
