use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{parse_rational, rational_to_string, BigComplex, Field, Poly, Rational};

/// Polynomial coefficients of an operator, exact when the parameters allow it.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Exact(Vec<Poly<Rational>>),
    Numeric(Vec<Poly<BigComplex>>),
}

/// `sum_i p_i(x) (theta + shift)^i` with `theta = x d/dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuchsianOperator {
    name: String,
    variable: String,
    shift: Rational,
    coeffs: Coefficients,
}

/// Operator data file: `coefficients[i][j]` is the `x^j` coefficient of the
/// `(theta + shift)^i` term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub name: String,
    pub order: usize,
    pub shift: String,
    pub variable: String,
    pub coefficients: Vec<Vec<String>>,
}

/// Stirling numbers of the second kind `S(j, k)` for `j, k <= n`.
fn stirling2(n: usize) -> Vec<Vec<i64>> {
    let mut s = vec![vec![0i64; n + 1]; n + 1];
    s[0][0] = 1;
    for j in 1..=n {
        for k in 1..=j {
            s[j][k] = k as i64 * s[j - 1][k] + s[j - 1][k - 1];
        }
    }
    s
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

fn check_shape<F: Field>(coeffs: &[Poly<F>]) -> Result<()> {
    if coeffs.len() < 2 {
        return Err(Error::MalformedOperator("an operator needs order at least 1".into()));
    }
    if coeffs.last().unwrap().is_zero() {
        return Err(Error::MalformedOperator("leading coefficient is identically zero".into()));
    }
    Ok(())
}

impl FuchsianOperator {
    pub fn exact(name: &str, variable: &str, shift: Rational, coeffs: Vec<Poly<Rational>>) -> Result<Self> {
        check_shape(&coeffs)?;
        Ok(Self { name: name.into(), variable: variable.into(), shift, coeffs: Coefficients::Exact(coeffs) })
    }

    pub fn numeric(name: &str, variable: &str, shift: Rational, coeffs: Vec<Poly<BigComplex>>) -> Result<Self> {
        check_shape(&coeffs)?;
        Ok(Self { name: name.into(), variable: variable.into(), shift, coeffs: Coefficients::Numeric(coeffs) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    pub fn order(&self) -> usize {
        match &self.coeffs {
            Coefficients::Exact(c) => c.len() - 1,
            Coefficients::Numeric(c) => c.len() - 1,
        }
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.coeffs, Coefficients::Exact(_))
    }

    /// The same operator with floating coefficients at `prec` bits.
    pub fn with_inexact(&self, prec: u32) -> Self {
        let coeffs = match &self.coeffs {
            Coefficients::Exact(c) => Coefficients::Numeric(c.iter().map(|p| p.to_complex(prec)).collect()),
            Coefficients::Numeric(c) => Coefficients::Numeric(c.iter().map(|p| p.map(|z| z.with_prec(prec))).collect()),
        };
        Self { coeffs, ..self.clone() }
    }

    /// Largest degree among the coefficient polynomials.
    pub fn degree(&self) -> usize {
        match &self.coeffs {
            Coefficients::Exact(c) => c.iter().filter_map(|p| p.degree()).max().unwrap_or(0),
            Coefficients::Numeric(c) => c.iter().filter_map(|p| p.degree()).max().unwrap_or(0),
        }
    }

    /// The coefficients over `F`; fails when asking an inexact operator for exact values.
    pub fn coeffs_in<F: Field>(&self, ctx: &F::Ctx) -> Result<Vec<Poly<F>>> {
        match &self.coeffs {
            Coefficients::Exact(c) => Ok(c.iter().map(|p| p.map(|r| F::from_rational(r, ctx))).collect()),
            Coefficients::Numeric(c) => c
                .iter()
                .map(|p| {
                    let v: Option<Vec<F>> = p.coeffs().iter().map(|z| F::from_complex(z, ctx)).collect();
                    v.map(Poly::new)
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Invalid(format!("operator {} has inexact coefficients", self.name))),
        }
    }

    /// The leading coefficient `p_n` as a complex polynomial.
    pub fn leading_complex(&self, prec: u32) -> Poly<BigComplex> {
        match &self.coeffs {
            Coefficients::Exact(c) => c.last().unwrap().to_complex(prec),
            Coefficients::Numeric(c) => c.last().unwrap().map(|z| z.with_prec(prec)),
        }
    }

    /// Coefficients `q_j` of plain `theta^j`.
    pub fn theta_coeffs<F: Field>(&self, ctx: &F::Ctx) -> Result<Vec<Poly<F>>> {
        let p = self.coeffs_in::<F>(ctx)?;
        let n = p.len() - 1;
        let s = F::from_rational(&self.shift, ctx);
        let mut q = vec![Poly::<F>::zero(); n + 1];
        for (i, pi) in p.iter().enumerate() {
            // (theta + s)^i = sum_j C(i, j) s^(i - j) theta^j
            let mut spow = F::one(ctx);
            for j in (0..=i).rev() {
                let c = spow.mul_i64(binomial(i, j));
                q[j] = q[j].add(&pi.scale(&c));
                spow = spow.mul(&s);
            }
        }
        Ok(q)
    }

    /// Coefficients `A_k` of `(d/dx)^k`.
    pub fn d_form<F: Field>(&self, ctx: &F::Ctx) -> Result<Vec<Poly<F>>> {
        let q = self.theta_coeffs::<F>(ctx)?;
        let n = q.len() - 1;
        let s2 = stirling2(n);
        let mut a = vec![Poly::<F>::zero(); n + 1];
        for (j, qj) in q.iter().enumerate() {
            for (k, ak) in a.iter_mut().enumerate().take(j + 1).skip(1) {
                if s2[j][k] == 0 {
                    continue;
                }
                let mut xk = vec![F::zero(ctx); k];
                xk.push(F::from_i64(s2[j][k], ctx));
                *ak = ak.add(&qj.mul(&Poly::new(xk)));
            }
            if j == 0 {
                a[0] = a[0].add(qj);
            }
        }
        Ok(a)
    }

    /// The operator in `t = 1/x`; its solutions are those of `self` read in `t`.
    pub fn at_infinity(&self) -> Self {
        let d = self.degree();
        let flip = |i: usize| if i % 2 == 0 { 1 } else { -1 };
        let coeffs = match &self.coeffs {
            Coefficients::Exact(c) => Coefficients::Exact(
                c.iter().enumerate().map(|(i, p)| p.reversed(d, &()).scale(&Rational::from_integer(flip(i).into()))).collect(),
            ),
            Coefficients::Numeric(c) => {
                let prec = c.last().unwrap().leading().unwrap().prec();
                Coefficients::Numeric(
                    c.iter()
                        .enumerate()
                        .map(|(i, p)| p.reversed(d, &prec).scale(&BigComplex::from_i64(flip(i), prec)))
                        .collect(),
                )
            }
        };
        Self {
            name: format!("{} at infinity", self.name),
            variable: format!("1/{}", self.variable),
            shift: -self.shift.clone(),
            coeffs,
        }
    }

    /// The operator annihilating `x^k y` for every solution `y` of `self`.
    pub fn conjugated(&self, k: &Rational) -> Self {
        Self { shift: &self.shift - k, ..self.clone() }
    }

    pub fn to_file(&self) -> Result<OperatorFile> {
        let Coefficients::Exact(c) = &self.coeffs else {
            return Err(Error::Invalid("only exact operators can be written to the operator format".into()));
        };
        let width = c.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
        Ok(OperatorFile {
            name: self.name.clone(),
            order: self.order(),
            shift: rational_to_string(&self.shift),
            variable: self.variable.clone(),
            coefficients: c
                .iter()
                .map(|p| (0..width).map(|j| rational_to_string(&p.coeff(j, &()))).collect())
                .collect(),
        })
    }

    pub fn from_file(f: &OperatorFile) -> Result<Self> {
        if f.coefficients.len() != f.order + 1 {
            return Err(Error::MalformedOperator(format!(
                "order {} needs {} coefficient rows, found {}",
                f.order,
                f.order + 1,
                f.coefficients.len()
            )));
        }
        let coeffs = f
            .coefficients
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>().map(Poly::new))
            .collect::<Result<Vec<_>>>()?;
        Self::exact(&f.name, &f.variable, parse_rational(&f.shift)?, coeffs)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_file()?).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: OperatorFile = serde_json::from_str(s).map_err(|e| Error::MalformedOperator(e.to_string()))?;
        Self::from_file(&f)
    }

    /// Short stable identifier of the operator data (name, shift and coefficients).
    pub fn fingerprint(&self) -> String {
        let body = match &self.coeffs {
            Coefficients::Exact(c) => c
                .iter()
                .map(|p| p.coeffs().iter().map(rational_to_string).collect::<Vec<_>>().join(","))
                .collect::<Vec<_>>()
                .join(";"),
            Coefficients::Numeric(c) => c
                .iter()
                .map(|p| p.coeffs().iter().map(|z| z.to_sci_string(40)).collect::<Vec<_>>().join(","))
                .collect::<Vec<_>>()
                .join(";"),
        };
        format!("{}|{}|{}", self.name, rational_to_string(&self.shift), body)
    }

    /// Residual of `L` applied to a polynomial `sum c_k x^k` (exact arithmetic).
    pub fn apply_to_polynomial(&self, y: &Poly<Rational>) -> Result<Poly<Rational>> {
        let q = self.theta_coeffs::<Rational>(&())?;
        let mut out = Poly::zero();
        for (j, qj) in q.iter().enumerate() {
            // theta^j x^k = k^j x^k
            let ty = Poly::new(
                y.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * Rational::from_integer(BigInt::from(k).pow(j as u32)))
                    .collect(),
            );
            out = out.add(&qj.mul(&ty));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn toy() -> FuchsianOperator {
        // theta^2 - x (theta + 1/2)^2, the complete elliptic integral operator
        let p0 = Poly::new(vec![ratio(0, 1), ratio(-1, 4)]);
        let p1 = Poly::new(vec![ratio(0, 1), ratio(-1, 1)]);
        let p2 = Poly::new(vec![ratio(1, 1), ratio(-1, 1)]);
        FuchsianOperator::exact("toy", "x", ratio(0, 1), vec![p0, p1, p2]).unwrap()
    }

    #[test]
    fn d_form_of_theta_squared() {
        // theta^2 = x^2 D^2 + x D
        let op = FuchsianOperator::exact(
            "t2",
            "x",
            ratio(0, 1),
            vec![Poly::zero(), Poly::zero(), Poly::from_i64s(&[1])],
        )
        .unwrap();
        let a = op.d_form::<Rational>(&()).unwrap();
        assert_eq!(a[2], Poly::from_i64s(&[0, 0, 1]));
        assert_eq!(a[1], Poly::from_i64s(&[0, 1]));
        assert!(a[0].is_zero());
    }

    #[test]
    fn shift_expands_binomially() {
        let op = FuchsianOperator::exact("s", "x", ratio(1, 1), vec![Poly::zero(), Poly::zero(), Poly::from_i64s(&[1])])
            .unwrap();
        let q = op.theta_coeffs::<Rational>(&()).unwrap();
        assert_eq!(q[0], Poly::from_i64s(&[1]));
        assert_eq!(q[1], Poly::from_i64s(&[2]));
        assert_eq!(q[2], Poly::from_i64s(&[1]));
    }

    #[test]
    fn json_round_trip() {
        let op = toy();
        let back = FuchsianOperator::from_json(&op.to_json().unwrap()).unwrap();
        assert_eq!(back, op);
        assert!(FuchsianOperator::from_json("{\"name\":\"x\"}").is_err());
        let bad = OperatorFile {
            name: "z".into(),
            order: 2,
            shift: "0".into(),
            variable: "x".into(),
            coefficients: vec![vec!["1".into()], vec!["0".into()], vec!["0".into()]],
        };
        assert!(matches!(FuchsianOperator::from_file(&bad), Err(Error::MalformedOperator(_))));
    }

    #[test]
    fn infinity_twice_is_identity() {
        let op = toy();
        let back = op.at_infinity().at_infinity();
        assert_eq!(back.coefficients(), op.coefficients());
        assert_eq!(back.shift(), op.shift());
    }
}
