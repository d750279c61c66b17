//! Pairing matrices, identity evaluation and integer relation search.

mod identity;
mod lll;

pub use identity::{
    builtin_identity, identity_rhs, verify_identity, ContourRef, GSpec, IdentityReport, IdentitySpec, IdentityTerm,
    TermCertificate, BUILTIN_IDENTITIES,
};
pub use lll::{lll_reduce, LllError};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{rational_reconstruct, BigComplex, BigFloat, Matrix, Rational};

/// `Sigma_n = [[0, I], [-I, 0]]` for even `n`.
pub fn sigma(n: usize) -> Vec<Vec<i64>> {
    assert!(n % 2 == 0 && n > 0, "Sigma_n needs a positive even n");
    let h = n / 2;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < h && j == i + h {
                        1
                    } else if i >= h && j + h == i {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

pub fn kron_i64(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    (0..ra * rb).map(|i| (0..ca * cb).map(|j| a[i / rb][j / cb] * b[i % rb][j % cb]).collect()).collect()
}

/// `Sigma_{m,n} = Sigma_m (x) Sigma_n`.
pub fn sigma_mn(m: usize, n: usize) -> Vec<Vec<i64>> {
    kron_i64(&sigma(m), &sigma(n))
}

/// Row vector `v^T S`.
pub fn row_times(v: &[i64], s: &[Vec<i64>]) -> Vec<i64> {
    (0..s[0].len()).map(|j| v.iter().zip(s).map(|(a, r)| a * r[j]).sum()).collect()
}

/// `g1 (x) g2` in the order `(a1 b1, a1 b2, a2 b1, a2 b2)`.
pub fn tensor2(g1: [i64; 2], g2: [i64; 2]) -> [i64; 4] {
    [g1[0] * g2[0], g1[0] * g2[1], g1[1] * g2[0], g1[1] * g2[1]]
}

/// The pairing row `G^T Sigma_{2,2}` applied to `omega(lambda, 1) (x) omega(lambda, phi)`.
pub fn pairing_row(g: &[i64; 4]) -> [i64; 4] {
    let r = row_times(g, &sigma_mn(2, 2));
    [r[0], r[1], r[2], r[3]]
}

/// `Sigma_4 Pi`.
pub fn sigma4_pi(pi: &[BigComplex]) -> Vec<BigComplex> {
    vec![pi[2].clone(), pi[3].clone(), pi[0].neg_ref(), pi[1].neg_ref()]
}

/// `gamma^T Sigma_4 Pi`.
pub fn identity_lhs(gamma: &[Rational; 4], pi: &[BigComplex]) -> BigComplex {
    let prec = pi[0].prec();
    sigma4_pi(pi).iter().zip(gamma).fold(BigComplex::zero(prec), |a, (s, g)| a.add_ref(&s.mul_rational(g)))
}

/// `|a - b| / max(|a|, |b|)`, or `|a - b|` when both vanish.
pub fn relative_residual(a: &BigComplex, b: &BigComplex) -> f64 {
    let d = a.sub_ref(b).abs();
    let m = a.abs().max_ref(&b.abs()).clone();
    if m.is_zero() {
        return d.to_f64();
    }
    let l = d.log2_abs() - m.log2_abs();
    if l.is_finite() { l.exp2() } else { 0.0 }
}

/// A recovered cycle vector with its lattice certificate.
#[derive(Clone, Debug)]
pub struct GammaResult {
    pub gamma: [Rational; 4],
    /// `|gamma^T Sigma_4 Pi - rhs| / |rhs|`.
    pub residual: f64,
    /// The integer relation `(c_1..c_4, c_5)` with `sum c_k (Sigma_4 Pi)_k + c_5 rhs ~ 0`.
    pub relation: Vec<BigInt>,
    pub relation_norm: f64,
    /// Norm of the next reduced vector over the norm of the relation.
    pub separation: f64,
}

/// Outcome of [`find_gamma`].
#[derive(Clone, Debug)]
pub enum GammaOutcome {
    Found(GammaResult),
    /// A short vector exists but the next one is not well separated from it.
    Ambiguous(GammaResult),
    NoRelation { shortest_norm: f64, reason: String },
}

impl GammaOutcome {
    pub fn found(&self) -> Option<&GammaResult> {
        match self {
            GammaOutcome::Found(g) => Some(g),
            _ => None,
        }
    }
}

/// Required ratio between the second and first reduced vector.
pub const SEPARATION: f64 = 1e10;

fn scaled(x: &BigFloat, scale: &BigFloat) -> BigInt {
    x.mul_ref(scale).round()
}

fn big_norm(v: &[BigInt]) -> f64 {
    lll::norm2(v).to_f64().unwrap_or(f64::INFINITY).sqrt()
}

/// Searches `gamma` with `gamma^T Sigma_4 Pi = rhs` by reducing the lattice
/// spanned by `(e_k, 10^d Re x_k, 10^d Im x_k)` for `x = ((Sigma_4 Pi)_1..4, rhs)`.
/// A relation is accepted when its norm is below `10^(d/5)`, it involves
/// `rhs`, all denominators are at most `max_den` and the next reduced vector
/// is at least [`SEPARATION`] times longer.
pub fn find_gamma(rhs: &BigComplex, pi: &[BigComplex], max_den: u64, digits_used: u32) -> Result<GammaOutcome> {
    if pi.len() != 4 {
        return Err(Error::Invalid("Pi must have four components".into()));
    }
    let prec = rhs.prec();
    if (prec as f64) < (digits_used as f64 + 10.0) * std::f64::consts::LOG2_10 {
        return Err(Error::Precision(format!("{digits_used} lattice digits need more than {prec} bits")));
    }
    let mut x = sigma4_pi(pi);
    x.push(rhs.clone());
    let scale = BigFloat::from_bigint(&num_traits::pow(BigInt::from(10), digits_used as usize), prec);
    let rows: Vec<Vec<BigInt>> = (0..5)
        .map(|k| {
            let mut r: Vec<BigInt> = (0..5).map(|j| BigInt::from((j == k) as i64)).collect();
            r.push(scaled(&x[k].re, &scale));
            r.push(scaled(&x[k].im, &scale));
            r
        })
        .collect();
    let mut red = lll_reduce(&rows).map_err(|_| Error::Invalid("degenerate relation lattice".into()))?;
    red.sort_by(|a, b| big_norm(a).total_cmp(&big_norm(b)));
    let (first, second) = (&red[0], &red[1]);
    let norm = big_norm(first);
    let separation = big_norm(second) / norm;
    let threshold = 10f64.powf(digits_used as f64 / 5.0);
    let c5 = &first[4];
    if norm > threshold {
        return Ok(GammaOutcome::NoRelation { shortest_norm: norm, reason: format!("shortest vector norm {norm:.3e} above {threshold:.1e}") });
    }
    if c5.is_zero() {
        return Ok(GammaOutcome::NoRelation { shortest_norm: norm, reason: "shortest relation does not involve the integral".into() });
    }
    let gamma: Vec<Rational> = first[..4].iter().map(|c| Rational::new(-c.clone(), c5.clone())).collect();
    if gamma.iter().any(|g| g.denom() > &BigInt::from(max_den)) {
        return Ok(GammaOutcome::NoRelation {
            shortest_norm: norm,
            reason: format!("relation needs denominator {} > {max_den}", c5.abs()),
        });
    }
    let gamma: [Rational; 4] = [gamma[0].clone(), gamma[1].clone(), gamma[2].clone(), gamma[3].clone()];
    let residual = relative_residual(&identity_lhs(&gamma, pi), rhs);
    let result = GammaResult { gamma, residual, relation: first[..5].to_vec(), relation_norm: norm, separation };
    Ok(if separation >= SEPARATION { GammaOutcome::Found(result) } else { GammaOutcome::Ambiguous(result) })
}

/// Primitive generator of `ker(mu - I)` for unipotent `mu != I`, first nonzero entry positive.
pub fn invariant_vector(mu: [[i64; 2]; 2]) -> Result<[i64; 2]> {
    let det = mu[0][0] * mu[1][1] - mu[0][1] * mu[1][0];
    if det != 1 || mu[0][0] + mu[1][1] != 2 {
        return Err(Error::Invalid("matrix is not unipotent".into()));
    }
    let n = [[mu[0][0] - 1, mu[0][1]], [mu[1][0], mu[1][1] - 1]];
    let row = if n[0] != [0, 0] { n[0] } else { n[1] };
    if row == [0, 0] {
        return Err(Error::Invalid("identity has a two-dimensional invariant space".into()));
    }
    let v = [row[1], -row[0]];
    let g = v[0].gcd(&v[1]);
    let s = if v[0] < 0 || (v[0] == 0 && v[1] < 0) { -1 } else { 1 };
    Ok([s * v[0] / g, s * v[1] / g])
}

/// Rounds a numerical matrix to integers, if every entry is within `tol` of one.
pub fn integer_matrix(m: &Matrix<BigComplex>, tol: f64) -> Option<Vec<Vec<BigInt>>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| rational_reconstruct(&m[(i, j)], 1, tol).ok().map(|r| r.to_integer()))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

/// True iff `gamma2 = M gamma1` exactly once `M` is rounded to integers.
pub fn vanishing_cycle_branch_relation(gamma1: &[Rational; 4], gamma2: &[Rational; 4], m: &Matrix<BigComplex>) -> bool {
    let Some(mi) = integer_matrix(m, 1e-20) else { return false };
    (0..4).all(|i| {
        let v: Rational = (0..4).map(|j| Rational::from_integer(mi[i][j].clone()) * &gamma1[j]).sum();
        v == gamma2[i]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
        (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
    }

    fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        a.iter().map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect()
    }

    proptest! {
        #[test]
        fn sigma_is_antisymmetric_and_squares_to_minus_one(h in 1usize..6) {
            let n = 2 * h;
            let s = sigma(n);
            let neg: Vec<Vec<i64>> = s.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
            prop_assert_eq!(transpose(&s), neg);
            let sq = mul(&s, &s);
            for (i, r) in sq.iter().enumerate() {
                for (j, x) in r.iter().enumerate() {
                    prop_assert_eq!(*x, if i == j { -1 } else { 0 });
                }
            }
        }

        #[test]
        fn pairing_of_pure_tensors_factorises(a in -5i64..5, b in -5i64..5, c in -5i64..5, d in -5i64..5) {
            let r = pairing_row(&tensor2([a, b], [c, d]));
            let l = row_times(&[a, b], &sigma(2));
            let rr = row_times(&[c, d], &sigma(2));
            prop_assert_eq!(r, tensor2([l[0], l[1]], [rr[0], rr[1]]));
        }
    }

    use crate::numerics::{elementary::pi, ratio};

    const P: u32 = 400;

    fn sample_pi() -> Vec<BigComplex> {
        // generic values standing in for a period vector
        let c = |a: f64, b: f64| BigComplex::from_f64(a, b, P);
        let z = BigComplex::from_real(pi(P).sqrt());
        vec![
            c(-1.0449294916512421, 0.0).add_ref(&z.mul_i64(1).div_i64(1000)),
            c(0.0, -12.511719255193349).mul_ref(&z.ln()),
            c(0.0, -4.2316808951491077).add_ref(&z.exp().div_i64(7)),
            c(2.7044817830612045, 0.0).mul_ref(&z),
        ]
    }

    #[test]
    fn lhs_of_the_holomorphic_row_is_minus_pi3() {
        let p = sample_pi();
        let g = [ratio(-1, 1), ratio(0, 1), ratio(0, 1), ratio(0, 1)];
        assert!(identity_lhs(&g, &p).approx_eq(&p[2].neg_ref(), -390.0));
        let zero = [ratio(0, 1), ratio(0, 1), ratio(0, 1), ratio(0, 1)];
        assert!(identity_lhs(&zero, &p).is_zero());
    }

    #[test]
    fn recovers_planted_gammas() {
        let p = sample_pi();
        for g in [
            [ratio(1, 2), ratio(0, 1), ratio(-5, 2), ratio(1, 2)],
            [ratio(0, 1), ratio(0, 1), ratio(-5, 2), ratio(0, 1)],
            [ratio(-1, 1), ratio(0, 1), ratio(0, 1), ratio(0, 1)],
        ] {
            let rhs = identity_lhs(&g, &p);
            for d in [30, 40, 50] {
                let out = find_gamma(&rhs, &p, 4, d).unwrap();
                let r = out.found().unwrap_or_else(|| panic!("{out:?}"));
                assert_eq!(r.gamma, g);
                assert!(r.separation >= SEPARATION);
                assert!(r.residual < 1e-100);
            }
        }
    }

    #[test]
    fn transcendental_right_side_has_no_relation() {
        let p = sample_pi();
        let rhs = p[0].mul_real(&pi(P));
        let out = find_gamma(&rhs, &p, 4, 40).unwrap();
        assert!(matches!(out, GammaOutcome::NoRelation { .. }), "{out:?}");
    }

    #[test]
    fn denominators_above_the_bound_are_rejected() {
        let p = sample_pi();
        let g = [ratio(1, 7), ratio(0, 1), ratio(0, 1), ratio(0, 1)];
        let out = find_gamma(&identity_lhs(&g, &p), &p, 4, 40).unwrap();
        assert!(matches!(out, GammaOutcome::NoRelation { .. }), "{out:?}");
        assert_eq!(find_gamma(&identity_lhs(&g, &p), &p, 7, 40).unwrap().found().unwrap().gamma, g);
    }

    #[test]
    fn invariant_vectors() {
        assert_eq!(invariant_vector([[1, -2], [0, 1]]).unwrap(), [1, 0]);
        assert_eq!(invariant_vector([[5, -4], [4, -3]]).unwrap(), [1, 1]);
        assert_eq!(invariant_vector([[5, -2], [8, -3]]).unwrap(), [1, 2]);
        assert_eq!(invariant_vector([[1, 0], [3, 1]]).unwrap(), [0, 1]);
        assert!(invariant_vector([[1, 0], [0, 1]]).is_err());
        assert!(invariant_vector([[2, 1], [1, 1]]).is_err());
    }

    #[test]
    fn branch_relation_checks() {
        let id = Matrix::<BigComplex>::identity(4, &P);
        let g1 = [ratio(1, 1), ratio(0, 1), ratio(-5, 1), ratio(1, 1)];
        assert!(vanishing_cycle_branch_relation(&g1, &g1, &id));
        let twice = [ratio(2, 1), ratio(0, 1), ratio(-10, 1), ratio(2, 1)];
        assert!(!vanishing_cycle_branch_relation(&g1, &twice, &id));
        let mut m = id.clone();
        m[(2, 0)] = BigComplex::from_i64(10, P);
        let g2 = [ratio(1, 1), ratio(0, 1), ratio(5, 1), ratio(1, 1)];
        assert!(vanishing_cycle_branch_relation(&g1, &g2, &m));
        assert!(!vanishing_cycle_branch_relation(&g2, &g1, &m));
    }

    #[test]
    fn displayed_blocks() {
        assert_eq!(sigma(2), vec![vec![0, 1], vec![-1, 0]]);
        assert_eq!(sigma(4)[0], vec![0, 0, 1, 0]);
        assert_eq!(sigma(4)[3], vec![0, -1, 0, 0]);
        // (-1,0,0,0) Sigma_4 = (0,0,-1,0)
        assert_eq!(row_times(&[-1, 0, 0, 0], &sigma(4)), vec![0, 0, -1, 0]);
        assert_eq!(pairing_row(&tensor2([0, 1], [0, 1])), [1, 0, 0, 0]);
    }
}
