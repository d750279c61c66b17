use std::ops::{Index, IndexMut};

use num_bigint::BigInt;

use super::{BigComplex, BigFloat, Field, Rational};
use crate::error::{Error, Result};

/// Small dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        &self.data[r * self.cols + c]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        &mut self.data[r * self.cols + c]
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize, ctx: &F::Ctx) -> Self {
        Self { rows, cols, data: vec![F::zero(ctx); rows * cols] }
    }

    pub fn identity(n: usize, ctx: &F::Ctx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m[(i, i)] = F::one(ctx);
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self[(r, c)].clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Panics on shape mismatch.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let ctx = self.data.first().or(o.data.first()).map(|x| x.ctx());
        let Some(ctx) = ctx else {
            return Self { rows: self.rows, cols: o.cols, data: Vec::new() };
        };
        let mut out = Self::zeros(self.rows, o.cols, &ctx);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a.mul(&o[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&t);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        (0..self.cols)
            .map(|j| {
                let mut acc = F::zero(&self[(0, j)].ctx());
                for (i, x) in v.iter().enumerate() {
                    acc = acc.add(&x.mul(&self[(i, j)]));
                }
                acc
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero(&self[(i, 0)].ctx());
                for (j, x) in v.iter().enumerate() {
                    acc = acc.add(&self[(i, j)].mul(x));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    /// Kronecker product, `(a ⊗ b)[(i p + k, j q + l)] = a[i,j] b[k,l]`.
    pub fn kron(&self, o: &Self) -> Self {
        let (p, q) = (o.rows, o.cols);
        let ctx = self.data[0].ctx();
        let mut out = Self::zeros(self.rows * p, self.cols * q, &ctx);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..p {
                    for l in 0..q {
                        out[(i * p + k, j * q + l)] = self[(i, j)].mul(&o[(k, l)]);
                    }
                }
            }
        }
        out
    }

    /// Gaussian elimination with partial pivoting; returns the reduced
    /// upper triangle, the transformed right side and the row-swap parity.
    fn eliminate(&self, rhs: Option<&Self>) -> Result<(Self, Option<Self>, bool)> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.cloned();
        let mut odd = false;
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&x, &y| a[(x, col)].log2_abs().total_cmp(&a[(y, col)].log2_abs()))
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                odd = !odd;
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                if let Some(b) = b.as_mut() {
                    let m = b.cols;
                    for j in 0..m {
                        b.data.swap(pivot * m + j, col * m + j);
                    }
                }
            }
            let p = a[(col, col)].clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].div(&p);
                for j in col..n {
                    let t = f.mul(&a[(col, j)]);
                    a[(r, j)] = a[(r, j)].sub(&t);
                }
                if let Some(b) = b.as_mut() {
                    for j in 0..b.cols {
                        let t = f.mul(&b[(col, j)]);
                        b[(r, j)] = b[(r, j)].sub(&t);
                    }
                }
            }
        }
        Ok((a, b, odd))
    }

    pub fn det(&self) -> F {
        let ctx = self.data[0].ctx();
        match self.eliminate(None) {
            Ok((a, _, odd)) => {
                let mut d = F::one(&ctx);
                for i in 0..self.rows {
                    d = d.mul(&a[(i, i)]);
                }
                if odd {
                    d.neg()
                } else {
                    d
                }
            }
            Err(_) => F::zero(&ctx),
        }
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.rows;
        let (a, b, _) = self.eliminate(Some(rhs))?;
        let mut x = b.expect("right side present");
        for col in 0..x.cols {
            for i in (0..n).rev() {
                let mut s = x[(i, col)].clone();
                for j in i + 1..n {
                    s = s.sub(&a[(i, j)].mul(&x[(j, col)]));
                }
                x[(i, col)] = s.div(&a[(i, i)]);
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let ctx = self.data[0].ctx();
        self.solve(&Self::identity(self.rows, &ctx))
    }
}

impl Matrix<BigComplex> {
    /// Largest distance of any entry (real and imaginary part) to the nearest integer.
    pub fn max_integer_deviation(&self) -> f64 {
        self.data
            .iter()
            .map(|z| {
                let dr = (&z.re - &BigFloat::from_bigint(&z.re.round(), z.re.prec())).abs();
                let di = z.im.abs();
                dr.log2_abs().max(di.log2_abs())
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .exp2()
    }

    /// Entries rounded to integers.
    pub fn round_to_integers(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|z| z.re.round()).collect()).collect()
    }

    /// Largest entry of `|self - o|` (in the sup-of-parts sense).
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.sub_ref(b).log2_abs())
            .fold(f64::NEG_INFINITY, f64::max)
            .exp2()
    }

    pub fn from_integers(rows: &[Vec<i64>], prec: u32) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigComplex::from_i64(v, prec)).collect()).collect())
    }
}

impl Matrix<Rational> {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect()).collect())
    }
}
