use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{elementary, BigFloat, Rational};

/// Complex number with [`BigFloat`] parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(BigFloat::zero(prec), BigFloat::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::new(BigFloat::one(prec), BigFloat::zero(prec))
    }

    pub fn i(prec: u32) -> Self {
        Self::new(BigFloat::zero(prec), BigFloat::one(prec))
    }

    pub fn from_real(re: BigFloat) -> Self {
        let prec = re.prec();
        Self::new(re, BigFloat::zero(prec))
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_real(BigFloat::from_i64(v, prec))
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        Self::from_real(BigFloat::from_rational(r, prec))
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: u32) -> Self {
        Self::new(BigFloat::from_rational(re, prec), BigFloat::from_rational(im, prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Self::new(BigFloat::from_f64(re, prec), BigFloat::from_f64(im, prec))
    }

    /// `2 pi i`.
    pub fn two_pi_i(prec: u32) -> Self {
        Self::new(BigFloat::zero(prec), elementary::pi(prec).mul_pow2(1))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        Self::new(self.re.add_ref(&o.re), self.im.add_ref(&o.im))
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        Self::new(self.re.sub_ref(&o.re), self.im.sub_ref(&o.im))
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        if self.im.is_zero() {
            if o.im.is_zero() {
                let prec = self.prec().max(o.prec());
                return Self::new(self.re.mul_ref(&o.re), BigFloat::zero(prec));
            }
            return o.mul_real(&self.re);
        }
        if o.im.is_zero() {
            return self.mul_real(&o.re);
        }
        let re = self.re.mul_ref(&o.re).sub_ref(&self.im.mul_ref(&o.im));
        let im = self.re.mul_ref(&o.im).add_ref(&self.im.mul_ref(&o.re));
        Self::new(re, im)
    }

    pub fn mul_real(&self, r: &BigFloat) -> Self {
        Self::new(self.re.mul_ref(r), self.im.mul_ref(r))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::new(self.re.mul_i64(k), self.im.mul_i64(k))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        Self::new(self.re.div_i64(k), self.im.div_i64(k))
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        let prec = self.prec();
        self.mul_real(&BigFloat::from_rational(r, prec + 8)).with_prec(prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Self::new(self.re.mul_pow2(k), self.im.mul_pow2(k))
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self::new(self.im.neg_ref(), self.re.clone())
    }

    pub fn neg_ref(&self) -> Self {
        Self::new(self.re.neg_ref(), self.im.neg_ref())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg_ref())
    }

    pub fn norm_sqr(&self) -> BigFloat {
        self.re.mul_ref(&self.re).add_ref(&self.im.mul_ref(&self.im))
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt()
    }

    /// Panics on division by zero.
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self::new(self.re.div_ref(&n), self.im.neg_ref().div_ref(&n))
    }

    pub fn div_ref(&self, o: &Self) -> Self {
        if o.im.is_zero() {
            return Self::new(self.re.div_ref(&o.re), self.im.div_ref(&o.re));
        }
        let n = o.norm_sqr();
        let num = self.mul_ref(&o.conj());
        Self::new(num.re.div_ref(&n), num.im.div_ref(&n))
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> BigFloat {
        elementary::atan2(&self.im, &self.re)
    }

    /// Logarithm with the imaginary part fixed to `arg`.
    pub fn ln_with_arg(&self, arg: &BigFloat) -> Self {
        let prec = self.prec();
        let m = elementary::ln(&self.norm_sqr().with_prec(prec + 8)).mul_pow2(-1).with_prec(prec);
        Self::new(m, arg.with_prec(prec))
    }

    /// Principal logarithm. Panics at zero.
    pub fn ln(&self) -> Self {
        assert!(!self.is_zero(), "BigComplex::ln of zero");
        self.ln_with_arg(&self.arg())
    }

    pub fn exp(&self) -> Self {
        let r = elementary::exp(&self.re);
        if self.im.is_zero() {
            let prec = r.prec();
            return Self::new(r, BigFloat::zero(prec));
        }
        let (s, c) = elementary::sin_cos(&self.im);
        Self::new(r.mul_ref(&c), r.mul_ref(&s))
    }

    /// `e^(i t)` for real `t`.
    pub fn cis(t: &BigFloat) -> Self {
        let (s, c) = elementary::sin_cos(t);
        Self::new(c, s)
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        if self.im.is_zero() {
            return if self.re.is_negative() {
                Self::new(BigFloat::zero(self.prec()), self.re.neg_ref().sqrt())
            } else {
                Self::new(self.re.sqrt(), BigFloat::zero(self.prec()))
            };
        }
        let r = self.abs();
        // sqrt((r + |re|)/2) then the other part from im / (2 t)
        let t = r.add_ref(&self.re.abs()).mul_pow2(-1).sqrt();
        let u = self.im.abs().div_ref(&t).mul_pow2(-1);
        if !self.re.is_negative() {
            let im = if self.im.is_negative() { u.neg_ref() } else { u };
            Self::new(t, im)
        } else {
            let im = if self.im.is_negative() { t.neg_ref() } else { t };
            Self::new(u, im)
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// `log2 max(|re|, |im|)`, within half a bit of `log2 |z|`.
    pub fn log2_abs(&self) -> f64 {
        self.re.log2_abs().max(self.im.log2_abs())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Distance, rounded to `f64`; fine for geometry.
    pub fn dist_f64(&self, o: &Self) -> f64 {
        let d = self.sub_ref(o);
        let (a, b) = d.to_f64_pair();
        a.hypot(b)
    }

    /// `|self - o| <= tol * max(1, |self|, |o|)` in a loose `log2` sense.
    pub fn approx_eq(&self, o: &Self, tol_log2: f64) -> bool {
        let d = self.sub_ref(o);
        if d.is_zero() {
            return true;
        }
        let scale = self.log2_abs().max(o.log2_abs()).max(0.0);
        d.log2_abs() + 0.5 < scale + tol_log2
    }

    pub fn to_sci_string(&self, digits: usize) -> String {
        let re = self.re.to_sci_string(digits);
        if self.im.is_zero() {
            return re;
        }
        let im = self.im.to_sci_string(digits);
        if let Some(stripped) = im.strip_prefix('-') {
            format!("{re} - {stripped}i")
        } else {
            format!("{re} + {im}i")
        }
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.re, self.im)
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or(((self.prec() as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_sci_string(digits))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &BigComplex) -> BigComplex {
                self.$imp(o)
            }
        }
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                self.$imp(&o)
            }
        }
        impl $tr<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &BigComplex) -> BigComplex {
                self.$imp(o)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        self.neg_ref()
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 300;

    #[test]
    fn i_squared() {
        let i = BigComplex::i(P);
        assert!((&i * &i).approx_eq(&BigComplex::from_i64(-1, P), -290.0));
    }

    #[test]
    fn exp_of_two_pi_i_is_one() {
        let e = BigComplex::two_pi_i(P).exp();
        assert!(e.approx_eq(&BigComplex::one(P), -290.0));
    }

    #[test]
    fn ln_exp_round_trip() {
        let z = BigComplex::from_f64(-0.75, 2.5, P);
        assert!(z.ln().exp().approx_eq(&z, -285.0));
        let w = BigComplex::from_f64(0.3, -1.1, P);
        assert!(w.exp().ln().approx_eq(&w, -285.0));
    }

    #[test]
    fn sqrt_branches() {
        for (a, b) in [(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (-2.0, 0.0), (0.5, -0.0)] {
            let z = BigComplex::from_f64(a, b, P);
            let r = z.sqrt();
            assert!((&r * &r).approx_eq(&z, -285.0), "{a} {b}");
            assert!(!r.re.is_negative());
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = BigComplex::from_f64(1.25, -7.0, P);
        let b = BigComplex::from_f64(-0.5, 0.125, P);
        assert!((&(&a * &b) / &b).approx_eq(&a, -285.0));
        assert!(b.powi(-3).mul_ref(&b.powi(3)).approx_eq(&BigComplex::one(P), -285.0));
    }
}
