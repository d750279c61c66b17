use super::{BigComplex, Field, Rational};

/// Dense univariate polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize, ctx: &F::Ctx) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(|| F::zero(ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        let mut it = self.coeffs.iter().rev();
        let Some(first) = it.next() else {
            return F::zero(&x.ctx());
        };
        it.fold(first.clone(), |acc, c| acc.mul(x).add(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul_i64(k as i64))
                .collect(),
        )
    }

    /// `p(x + c)`.
    pub fn taylor_shift(&self, c: &F) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = a[j + 1].mul(c);
                a[j] = a[j].add(&t);
            }
        }
        Self::new(a)
    }

    /// `x^d p(1/x)` for `d >= deg p`.
    pub fn reversed(&self, d: usize, ctx: &F::Ctx) -> Self {
        let mut out = vec![F::zero(ctx); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[d - k] = c.clone();
        }
        Self::new(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let ctx = self.coeffs[0].ctx();
        let mut out = vec![F::zero(&ctx); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    /// Monic normalisation; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let ctx = l.ctx();
                self.scale(&F::one(&ctx).div(l))
            }
            None => self.clone(),
        }
    }

    /// Euclidean division. Panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("polynomial division by zero").clone();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let ctx = dl.ctx();
        let mut q = vec![F::zero(&ctx); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = r[k + dd].div(&dl);
            for (j, c) in d.coeffs.iter().enumerate() {
                let t = f.mul(c);
                r[k + j] = r[k + j].sub(&t);
            }
            r[k + dd] = F::zero(&ctx);
            q[k] = f;
        }
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor (exact only over an exact field).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_complex(&self, prec: u32) -> Poly<BigComplex> {
        self.map(|c| c.to_complex(prec))
    }
}

impl Poly<Rational> {
    pub fn from_i64s(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    /// Evaluation of an exact polynomial at a complex point.
    pub fn eval_complex(&self, x: &BigComplex) -> BigComplex {
        let prec = x.prec();
        let mut acc = BigComplex::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(&BigComplex::from_rational(c, prec));
        }
        acc
    }
}
