//! Elementary functions on [`BigFloat`], evaluated in fixed point with guard bits.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::BigFloat;

const GUARD: u64 = 40;

fn one_fixed(w: u64) -> BigInt {
    BigInt::one() << (w as usize)
}

fn fmul(a: &BigInt, b: &BigInt, w: u64) -> BigInt {
    (a * b) >> (w as usize)
}

/// `sum_k (-1)^k x^(2k+1)/(2k+1)` for `x = 1/n` (or `atanh` when `alternate` is false).
fn arctan_inv(n: u64, w: u64, alternate: bool) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut term = one_fixed(w) / BigInt::from(n);
    let mut sum = term.clone();
    let mut k: u64 = 1;
    while !term.is_zero() {
        term /= &n2;
        let t = &term / BigInt::from(2 * k + 1);
        if alternate && k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

fn pi_fixed(w: u64) -> BigInt {
    let w2 = w + 8;
    let v = arctan_inv(5, w2, true) * 16 - arctan_inv(239, w2, true) * 4;
    v >> 8usize
}

fn ln2_fixed(w: u64) -> BigInt {
    let w2 = w + 8;
    (arctan_inv(3, w2, false) * 2) >> 8usize
}

pub fn pi(prec: u32) -> BigFloat {
    let w = prec as u64 + GUARD;
    BigFloat::from_fixed(pi_fixed(w), w, prec)
}

pub fn ln2(prec: u32) -> BigFloat {
    let w = prec as u64 + GUARD;
    BigFloat::from_fixed(ln2_fixed(w), w, prec)
}

/// Apery's constant via `zeta(3) = 5/2 * sum_{k>=1} (-1)^(k+1) / (k^3 C(2k,k))`.
pub fn zeta3(prec: u32) -> BigFloat {
    let w = prec as u64 + GUARD;
    // t_k = 2^w / C(2k,k)
    let mut t = one_fixed(w);
    let mut sum = BigInt::zero();
    let mut k: u64 = 1;
    loop {
        t = t * BigInt::from(k * k) / BigInt::from((2 * k) * (2 * k - 1));
        let term = &t / BigInt::from(k * k * k);
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
    BigFloat::from_fixed(sum * 5, w + 1, prec)
}

/// `e^r` for a fixed-point `|r| <= 1`.
fn exp_small_fixed(r: &BigInt, w: u64) -> BigInt {
    let mut sum = one_fixed(w);
    let mut term = one_fixed(w);
    let mut k: u64 = 1;
    loop {
        term = fmul(&term, r, w) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum
}

pub fn exp(x: &BigFloat) -> BigFloat {
    let prec = x.prec();
    if x.is_zero() {
        return BigFloat::one(prec);
    }
    let approx = x.to_f64();
    assert!(approx.abs() < 1e15, "exp: argument out of range");
    let k = (approx / std::f64::consts::LN_2).round() as i64;
    let kbits = 64 - k.unsigned_abs().leading_zeros() as u64;
    let w = prec as u64 + GUARD + kbits;
    let r = x.to_fixed(w) - ln2_fixed(w) * BigInt::from(k);
    let v = exp_small_fixed(&r, w);
    BigFloat::from_fixed(v, w, prec).mul_pow2(k)
}

/// Natural logarithm of a positive number.
pub fn ln(x: &BigFloat) -> BigFloat {
    assert!(x.signum() > 0, "ln: argument must be positive");
    let prec = x.prec();
    let bits = x.mantissa().bits() as i64;
    // x = m * 2^e with m in [1/sqrt2, sqrt2)
    let mut e = x.exponent() + bits;
    let w = prec as u64 + GUARD + 8;
    let mut m = if bits as u64 >= w {
        x.mantissa() >> ((bits as u64 - w) as usize)
    } else {
        x.mantissa() << ((w - bits as u64) as usize)
    };
    // m now represents a value in [1/2, 1)
    let inv_sqrt2 = BigInt::from(181u32) << ((w - 8) as usize); // ~0.707 in fixed point
    if m < inv_sqrt2 {
        m <<= 1usize;
        e -= 1;
    }
    let one = one_fixed(w);
    let t = ((&m - &one) << (w as usize)) / (&m + &one);
    let t2 = fmul(&t, &t, w);
    let mut pow = t.clone();
    let mut sum = t;
    let mut k: u64 = 1;
    loop {
        pow = fmul(&pow, &t2, w);
        let term = &pow / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        k += 1;
    }
    let total = sum * 2 + ln2_fixed(w) * BigInt::from(e);
    BigFloat::from_fixed(total, w, prec)
}

/// Fixed-point arctangent for `|x| <= 1`.
fn atan_unit_fixed(x: &BigInt, w: u64) -> BigInt {
    // two argument halvings: atan x = 2 atan(x / (1 + sqrt(1 + x^2)))
    let one = one_fixed(w);
    let mut y = x.clone();
    for _ in 0..2 {
        let s = (fmul(&y, &y, w) + &one) << (w as usize);
        let root = s.sqrt();
        y = (&y << (w as usize)) / (root + &one);
    }
    let y2 = fmul(&y, &y, w);
    let mut pow = y.clone();
    let mut sum = y;
    let mut k: u64 = 1;
    loop {
        pow = fmul(&pow, &y2, w);
        let term = &pow / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum * 4
}

pub fn atan(x: &BigFloat) -> BigFloat {
    let prec = x.prec();
    if x.is_zero() {
        return BigFloat::zero(prec);
    }
    let w = prec as u64 + GUARD;
    if x.abs().cmp_value(&BigFloat::one(prec)) != std::cmp::Ordering::Greater {
        return BigFloat::from_fixed(atan_unit_fixed(&x.to_fixed(w), w), w, prec);
    }
    // |x| > 1: atan x = sign(x) pi/2 - atan(1/x)
    let inv = BigFloat::one(prec + 16).div_ref(&x.with_prec(prec + 16));
    let a = atan_unit_fixed(&inv.to_fixed(w), w);
    let half_pi = pi_fixed(w) >> 1usize;
    let v = if x.is_negative() { -half_pi - a } else { half_pi - a };
    BigFloat::from_fixed(v, w, prec)
}

/// Angle of the point `(x, y)` in `(-pi, pi]`.
pub fn atan2(y: &BigFloat, x: &BigFloat) -> BigFloat {
    let prec = y.prec().max(x.prec());
    if x.is_zero() && y.is_zero() {
        return BigFloat::zero(prec);
    }
    let w = prec as u64 + GUARD;
    let p = pi_fixed(w);
    if x.is_zero() {
        let h = p >> 1usize;
        return BigFloat::from_fixed(if y.is_negative() { -h } else { h }, w, prec);
    }
    let ratio_prec = prec + 16;
    let yx = y.with_prec(ratio_prec).div_ref(&x.with_prec(ratio_prec));
    let base = atan(&yx).to_fixed(w);
    let v = if !x.is_negative() {
        base
    } else if y.is_negative() {
        base - p
    } else {
        base + p
    };
    BigFloat::from_fixed(v, w, prec)
}

/// `(sin x, cos x)`.
pub fn sin_cos(x: &BigFloat) -> (BigFloat, BigFloat) {
    let prec = x.prec();
    let approx = x.to_f64();
    assert!(approx.abs() < 1e12, "sin_cos: argument out of range");
    let q = (approx / std::f64::consts::FRAC_PI_2).round() as i64;
    let qbits = 64 - q.unsigned_abs().leading_zeros() as u64;
    let w = prec as u64 + GUARD + qbits;
    let half_pi = pi_fixed(w) >> 1usize;
    let r = x.to_fixed(w) - half_pi * BigInt::from(q);
    let r2 = fmul(&r, &r, w);
    let one = one_fixed(w);
    // sin
    let mut term = r.clone();
    let mut s = r.clone();
    let mut k: u64 = 1;
    loop {
        term = -fmul(&term, &r2, w) / BigInt::from((2 * k) * (2 * k + 1));
        if term.is_zero() {
            break;
        }
        s += &term;
        k += 1;
    }
    let mut term = one.clone();
    let mut c = one;
    let mut k: u64 = 1;
    loop {
        term = -fmul(&term, &r2, w) / BigInt::from((2 * k - 1) * (2 * k));
        if term.is_zero() {
            break;
        }
        c += &term;
        k += 1;
    }
    let (s, c) = match q.rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    (BigFloat::from_fixed(s, w, prec), BigFloat::from_fixed(c, w, prec))
}

/// Nearest integer as `i64`, if it fits.
pub fn round_i64(x: &BigFloat) -> Option<i64> {
    let r = x.round();
    if r.abs() > BigInt::from(i64::MAX) {
        None
    } else {
        r.to_i64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 420;

    fn close(a: &BigFloat, b: &BigFloat, bits: f64) -> bool {
        let d = (a - b).abs();
        d.is_zero() || d.log2_abs() < -bits
    }

    fn parse(s: &str) -> BigFloat {
        let r: crate::numerics::Rational = crate::numerics::parse_rational(s).unwrap();
        BigFloat::from_rational(&r, P)
    }

    #[test]
    fn pi_digits() {
        let p = pi(P);
        let reference = parse("3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384460955058223172535940812848111745028410270193852110555964462294895493038196");
        assert!(close(&p, &reference, 400.0));
    }

    #[test]
    fn zeta3_digits() {
        let z = zeta3(P);
        let reference = parse("1.2020569031595942853997381615114499907649862923404988817922715553418382057863130901864558736093352581461991577952607194184919959986732832137763968372079001614539417829493600667191915755222424942439615639");
        assert!(close(&z, &reference, 400.0));
    }

    #[test]
    fn exp_ln_inverse() {
        for v in ["0.001", "1", "2.5", "-7.125", "40", "1e-30"] {
            let x = parse(v);
            let y = ln(&exp(&x));
            assert!(close(&x, &y, 400.0 - 8.0), "{v}");
        }
        let e = exp(&BigFloat::one(P));
        let reference = parse("2.71828182845904523536028747135266249775724709369995957496696762772407663035354759457138217852516642742746639193200305992181741359662904357290033429526059563073813232862794349076323382988075319525101901");
        assert!(close(&e, &reference, 400.0));
    }

    #[test]
    fn ln_of_two_and_tenth() {
        assert!(close(&ln(&BigFloat::from_i64(2, P)), &ln2(P), 410.0));
        let l = ln(&parse("0.1"));
        let reference = parse("-2.30258509299404568401799145468436420760110148862877297603332790096757260967735248023599720508959829834196778404228624863340952546508280675666628736909878168948290720832555468084379989482623319852839350");
        assert!(close(&l, &reference, 400.0));
    }

    #[test]
    fn trig_identities() {
        for v in ["0.3", "-2", "10", "1.5707963"] {
            let x = parse(v);
            let (s, c) = sin_cos(&x);
            let one = &(&s * &s) + &(&c * &c);
            assert!(close(&one, &BigFloat::one(P), 405.0));
            let back = atan2(&s, &c);
            // atan2 returns the angle reduced into (-pi, pi]
            let mut diff = &x - &back;
            let two_pi = pi(P).mul_pow2(1);
            let k = (&diff / &two_pi).round();
            diff = &diff - &(&two_pi * &BigFloat::from_bigint(&k, P));
            assert!(diff.is_zero() || diff.log2_abs() < -400.0, "{v}");
        }
    }

    #[test]
    fn atan_of_one_is_quarter_pi() {
        let a = atan(&BigFloat::one(P));
        assert!(close(&a, &pi(P).mul_pow2(-2), 410.0));
        let a = atan(&BigFloat::from_i64(-3, P));
        let b = atan2(&BigFloat::from_i64(-3, P), &BigFloat::one(P));
        assert!(close(&a, &b, 410.0));
    }
}
