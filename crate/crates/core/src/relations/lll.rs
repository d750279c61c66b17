use num_bigint::BigInt;
use num_traits::Zero;

use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LllError {
    /// The input vectors are linearly dependent.
    Dependent,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<BigInt>]) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>, Vec<Rational>) {
    let n = b.len();
    let mut bs: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rational::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let bi: Vec<Rational> = b[i].iter().map(|x| Rational::from_integer(x.clone())).collect();
        let mut v = bi.clone();
        for j in 0..i {
            let m = if norms[j] == Rational::zero() { Rational::zero() } else { dot(&bi, &bs[j]) / &norms[j] };
            for (vk, bk) in v.iter_mut().zip(&bs[j]) {
                *vk -= &m * bk;
            }
            mu[i][j] = m;
        }
        norms.push(dot(&v, &v));
        bs.push(v);
    }
    (bs, mu, norms)
}

/// Exact LLL reduction (`delta = 3/4`) of the rows of `basis`.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, LllError> {
    let mut b = basis.to_vec();
    let n = b.len();
    let delta = Rational::new(3.into(), 4.into());
    let (_, mut mu, mut norms) = gram_schmidt(&b);
    if norms.iter().any(|x| x.is_zero()) {
        return Err(LllError::Dependent);
    }
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if !q.is_zero() {
                let q = q.to_integer();
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let qr = Rational::from_integer(q);
                for l in 0..j {
                    let t = &qr * &mu[j][l];
                    mu[k][l] -= t;
                }
                mu[k][j] -= &qr;
            }
        }
        let m = mu[k][k - 1].clone();
        let rhs = (&delta - &m * &m) * &norms[k - 1];
        if norms[k] >= rhs {
            k += 1;
            continue;
        }
        // swap b_k and b_(k-1), updating the orthogonalisation in place
        b.swap(k, k - 1);
        let big = &norms[k] + &m * &m * &norms[k - 1];
        mu[k][k - 1] = &m * &norms[k - 1] / &big;
        norms[k] = &norms[k - 1] * &norms[k] / &big;
        norms[k - 1] = big;
        for j in 0..k - 1 {
            let t = mu[k - 1][j].clone();
            mu[k - 1][j] = mu[k][j].clone();
            mu[k][j] = t;
        }
        for i in k + 1..n {
            let t = mu[i][k].clone();
            mu[i][k] = &mu[i][k - 1] - &m * &t;
            mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
        }
        k = (k - 1).max(1);
    }
    Ok(b)
}

/// Squared Euclidean norm.
pub(crate) fn norm2(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}
