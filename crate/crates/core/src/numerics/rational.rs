use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{BigComplex, BigFloat, Rational};
use crate::error::{Error, Result};

/// Parses `"p/q"`, an integer, or a decimal such as `"-1.25e-3"`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    if neg {
        num = -num;
    }
    let e = exp10 - frac_part.len() as i64;
    if e.unsigned_abs() > 100_000 {
        return Err(bad());
    }
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    Ok(if e >= 0 { Rational::from_integer(num * p) } else { Rational::new(num, p) })
}

/// `"p/q"`, or just `"p"` for integers.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The rational of smallest denominator `<= max_den` within `tol` of `re(x)`.
///
/// The imaginary part must itself be below `tol`.
pub fn rational_reconstruct(x: &BigComplex, max_den: u64, tol: f64) -> Result<Rational> {
    let none = || Error::NoCandidate { value: x.to_sci_string(30), max_den };
    if max_den == 0 {
        return Err(none());
    }
    if x.im.log2_abs() >= tol.log2() {
        return Err(none());
    }
    let target = x.re.to_rational();
    let prec = x.prec().max(64);
    let tol_f = BigFloat::from_f64(tol, prec);
    let within = |r: &Rational| {
        let d = BigFloat::from_rational(&(r - &target), prec).abs();
        d.cmp_value(&tol_f) == std::cmp::Ordering::Less
    };
    let max = BigInt::from(max_den);
    // closest rational with bounded denominator is a convergent or semiconvergent
    let mut best: Option<Rational> = None;
    let consider = |cand: Rational, best: &mut Option<Rational>| {
        if cand.denom() <= &max && within(&cand) {
            let better = match best {
                Some(b) => cand.denom() < b.denom(),
                None => true,
            };
            if better {
                *best = Some(cand);
            }
        }
    };
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = target.clone();
    loop {
        let a = rem.floor().to_integer();
        // largest admissible semiconvergent
        if k1 > BigInt::zero() {
            let m = (&max - &k0).div_floor(&k1).min(a.clone());
            if m > BigInt::zero() {
                consider(Rational::new(&m * &h1 + &h0, &m * &k1 + &k0), &mut best);
            }
        }
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > max {
            break;
        }
        consider(Rational::new(h2.clone(), k2.clone()), &mut best);
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let frac = &rem - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rem = frac.recip();
    }
    // tolerance wider than the Legendre bound: fall back to a scan of small denominators
    if best.is_none() && max_den <= 10_000 {
        for q in 1..=max_den {
            let p = (&target * Rational::from_integer(BigInt::from(q))).round().to_integer();
            let cand = Rational::new(p, BigInt::from(q));
            if within(&cand) {
                best = Some(cand);
                break;
            }
        }
    }
    best.ok_or_else(none)
}

/// `a / b` for machine integers as an exact rational.
pub fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 300;

    fn approx(s: &str) -> BigComplex {
        BigComplex::from_rational(&parse_rational(s).unwrap(), P)
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("1/64").unwrap(), ratio(1, 64));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-1.5e-2").unwrap(), ratio(-3, 200));
        assert_eq!(parse_rational("2E3").unwrap(), ratio(2000, 1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn reconstruct_half_and_minus_five() {
        let half = approx("0.5000000000000000000000000000000000000001");
        assert_eq!(rational_reconstruct(&half, 10, 1e-39).unwrap(), ratio(1, 2));
        let m5 = approx("-5.0000000000000000000000000000000000000000");
        assert_eq!(rational_reconstruct(&m5, 10, 1e-40).unwrap(), ratio(-5, 1));
    }

    #[test]
    fn third_excluded_by_bound() {
        let third = approx("0.3333333333333333333333333333333333333333");
        assert!(matches!(rational_reconstruct(&third, 2, 1e-39), Err(Error::NoCandidate { .. })));
        assert_eq!(rational_reconstruct(&third, 3, 1e-39).unwrap(), ratio(1, 3));
    }

    #[test]
    fn imaginary_part_must_vanish() {
        let z = BigComplex::from_f64(0.5, 1e-10, P);
        assert!(rational_reconstruct(&z, 10, 1e-40).is_err());
    }

    #[test]
    fn string_round_trip() {
        for s in ["5", "-7/3", "1/64"] {
            assert_eq!(rational_to_string(&parse_rational(s).unwrap()), s);
        }
    }
}
