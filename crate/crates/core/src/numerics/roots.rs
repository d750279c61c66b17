//! Polynomial roots: double precision seeds, then Newton polishing.

use num_complex::Complex64;

use super::{BigComplex, Poly, Rational};

/// All complex roots of `sum c_k x^k` in double precision (Aberth iteration).
pub fn aberth_f64(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..=n).rev() {
            dp = dp * x + p;
            p = p * x + c[k];
        }
        (p, dp)
    };
    // Cauchy bound for the initial circle
    let bound = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let r0 = bound.min(1e6) * 0.5 + 1e-3;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += 1.0 / d;
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn to_c64(z: &BigComplex) -> Complex64 {
    let (a, b) = z.to_f64_pair();
    Complex64::new(a, b)
}

/// Newton iteration `x -= m p(x)/p'(x)` at full precision.
pub fn newton_polish(p: &Poly<BigComplex>, x0: BigComplex, multiplicity: usize) -> BigComplex {
    let dp = p.derivative();
    let prec = x0.prec();
    let mut x = x0;
    for _ in 0..200 {
        let v = p.eval(&x);
        let d = dp.eval(&x);
        if v.is_zero() || d.is_zero() {
            break;
        }
        let step = v.div_ref(&d).mul_i64(multiplicity as i64);
        x = x.sub_ref(&step);
        let scale = x.log2_abs().max(-(prec as f64));
        if step.log2_abs() < scale - prec as f64 + 6.0 {
            break;
        }
    }
    x
}

/// Roots of a numeric polynomial with multiplicities, found by clustering the
/// double precision seeds.
pub fn roots_numeric(p: &Poly<BigComplex>) -> Vec<(BigComplex, usize)> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let prec = p.coeffs()[0].prec().max(p.leading().unwrap().prec());
    let seeds = aberth_f64(&p.coeffs().iter().map(to_c64).collect::<Vec<_>>());
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for s in seeds {
        match clusters.iter_mut().find(|(c, _)| (c - s).norm() <= 1e-4 * (1.0 + s.norm())) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + s) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => clusters.push((s, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(c, m)| {
            let x0 = BigComplex::from_f64(c.re, c.im, prec);
            let mut q = p.clone();
            for _ in 1..m {
                q = q.derivative();
            }
            // a root of multiplicity m is a simple root of the (m-1)-st derivative
            (newton_polish(&q, x0, 1), m)
        })
        .collect()
}

/// Square-free decomposition `p = c * prod f_i^i` (Yun), returning `(f_i, i)` with `f_i != 1`.
pub fn squarefree_decomposition(p: &Poly<Rational>) -> Vec<(Poly<Rational>, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let c = dp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let b_next = b.div_rem(&a).0;
        let c_next = d.div_rem(&a).0;
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        d = c_next.sub(&b_next.derivative());
        b = b_next;
        i += 1;
    }
    out
}

/// Roots of an exact polynomial with exact multiplicities, at `prec` bits.
pub fn roots_exact(p: &Poly<Rational>, prec: u32) -> Vec<(BigComplex, usize)> {
    let mut out = Vec::new();
    for (f, m) in squarefree_decomposition(p) {
        let fc = f.to_complex(prec + 32);
        let seeds = aberth_f64(&fc.coeffs().iter().map(to_c64).collect::<Vec<_>>());
        for s in seeds {
            let x = newton_polish(&fc, BigComplex::from_f64(s.re, s.im, prec + 32), 1);
            out.push((x.with_prec(prec), m));
        }
    }
    out
}

/// Rational within `tol` of a double precision value, denominator at most `max_den`.
pub fn small_rational_near(x: Complex64, max_den: i64, tol: f64) -> Option<Rational> {
    if x.im.abs() > tol {
        return None;
    }
    let mut best: Option<(f64, i64, i64)> = None;
    for q in 1..=max_den {
        let p = (x.re * q as f64).round();
        let err = (x.re - p / q as f64).abs();
        if err <= tol && best.is_none_or(|(e, _, _)| err < e - 1e-15) {
            best = Some((err, p as i64, q));
        }
    }
    best.map(|(_, p, q)| Rational::new(p.into(), q.into()))
}

/// `|x| <= 2^log2_tol * scale`, used for numerically vanishing values.
pub fn negligible(x: &BigComplex, scale_log2: f64, log2_tol: f64) -> bool {
    x.is_zero() || x.log2_abs() < scale_log2 + log2_tol
}
