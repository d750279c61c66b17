use num_traits::{ToPrimitive, Zero};

use super::local::{vanishes, LocalOperator, Location};
use crate::error::{Error, Result};
use crate::numerics::{BigComplex, BigFloat, Field, Matrix, Rational};

/// `sum_m sum_k coeffs[m][k] t^(exponent + m) log^k(t)` around `location`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSeries<F: Field> {
    pub location: Location,
    pub exponent: Rational,
    pub coeffs: Vec<Vec<F>>,
}

impl<F: Field> LogSeries<F> {
    /// A plain power series `sum_m c_m t^(exponent + m)`.
    pub fn power_series(location: Location, exponent: Rational, c: Vec<F>) -> Self {
        Self { location, exponent, coeffs: c.into_iter().map(|x| vec![x]).collect() }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Highest power of the logarithm present.
    pub fn log_degree(&self) -> usize {
        self.coeffs.iter().map(|v| v.len()).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.is_zero())
    }

    /// Coefficient of `t^(exponent + m) log^k(t)`, zero when absent.
    pub fn coeff(&self, m: usize, k: usize) -> Option<&F> {
        self.coeffs.get(m).and_then(|v| v.get(k))
    }
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// `out[k] = sum_r t[r] v[k + r]`: a polynomial in `x + N` applied to a
/// divided-power log vector, `N` shifting `log^k/k!` down by one.
pub(crate) fn apply_taylor<F: Field>(t: &[F], v: &[F]) -> Vec<F> {
    (0..v.len())
        .map(|k| {
            let mut acc = t[0].mul(&v[k]);
            for r in 1..t.len().min(v.len() - k) {
                acc = acc.add(&t[r].mul(&v[k + r]));
            }
            acc
        })
        .collect()
}

/// Residual of the local operator on a divided-power coefficient table.
pub(crate) fn residual<F: Field>(local: &LocalOperator<F>, exponent: &Rational, d: &[Vec<F>]) -> Vec<Vec<F>> {
    let ctx = local.ctx().clone();
    let jmax = local.q().len() - 1;
    (0..d.len())
        .map(|m| {
            let mut out: Vec<F> = Vec::new();
            for j in 0..=jmax.min(m) {
                let v = &d[m - j];
                if v.is_empty() {
                    continue;
                }
                let x = F::from_rational(&(exponent + Rational::from_integer((m as i64 - j as i64).into())), &ctx);
                let part = apply_taylor(&local.taylor_at(j, &x), v);
                if out.len() < part.len() {
                    out.resize(part.len(), F::zero(&ctx));
                }
                for (o, p) in out.iter_mut().zip(&part) {
                    *o = o.add(p);
                }
            }
            out
        })
        .collect()
}

/// Local solutions around one point, all exponents differing by integers.
///
/// Solution `s` owns the free slot `slots[s] = (m, p)`: its coefficient of
/// `t^(rho0 + m) log^p(t)/p!` is one and its other free slots vanish.
#[derive(Clone, Debug)]
pub struct FrobeniusBasis<F: Field> {
    local: LocalOperator<F>,
    exponents: Vec<(Rational, usize)>,
    rho0: Rational,
    resonances: Vec<(usize, usize)>,
    slots: Vec<(usize, usize)>,
    /// `[solution][m][k]`, coefficient of `t^(rho0 + m) log^k(t) / k!`
    coeffs: Vec<Vec<Vec<F>>>,
    envelope: Vec<Vec<f64>>,
    radius: Option<f64>,
}

impl<F: Field> FrobeniusBasis<F> {
    pub fn new(local: LocalOperator<F>, order: usize) -> Result<Self> {
        let exponents = local.exponents()?;
        let rho0 = exponents[0].0.clone();
        let mut resonances = Vec::new();
        for (e, mu) in &exponents {
            let d = e - &rho0;
            if !d.is_integer() {
                return Err(Error::UnsupportedExponents(format!(
                    "exponent difference {d} at {} is not an integer",
                    local.location().label()
                )));
            }
            resonances.push((d.to_integer().to_usize().unwrap(), *mu));
        }
        let max_res = resonances.last().unwrap().0;
        if max_res >= order {
            return Err(Error::Precision(format!(
                "truncation order {order} cannot resolve exponent difference {max_res}"
            )));
        }
        let slots: Vec<(usize, usize)> =
            resonances.iter().flat_map(|&(m, mu)| (0..mu).map(move |p| (m, p))).collect();
        let ctx = local.ctx().clone();
        let bits = F::ctx_bits(&ctx);
        let n = local.order();
        let jmax = local.q().len() - 1;
        let ns = slots.len();
        let mut coeffs: Vec<Vec<Vec<F>>> = vec![Vec::with_capacity(order); ns];
        for m in 0..order {
            let taylor: Vec<Vec<F>> = (0..=jmax.min(m))
                .map(|j| {
                    let x = F::from_rational(&(&rho0 + Rational::from_integer((m as i64 - j as i64).into())), &ctx);
                    local.taylor_at(j, &x)
                })
                .collect();
            let mu = resonances.iter().find(|r| r.0 == m).map_or(0, |r| r.1);
            for s in 0..ns {
                let c = &coeffs[s];
                let width = (1..taylor.len()).map(|j| c[m - j].len()).max().unwrap_or(0);
                let mut rhs = vec![F::zero(&ctx); width];
                let mut scale = f64::NEG_INFINITY;
                for (j, t) in taylor.iter().enumerate().skip(1) {
                    let v = &c[m - j];
                    if v.is_empty() {
                        continue;
                    }
                    let part = apply_taylor(t, v);
                    if bits.is_some() {
                        let tl = t.iter().map(|x| x.log2_abs()).fold(f64::NEG_INFINITY, f64::max);
                        let vl = v.iter().map(|x| x.log2_abs()).fold(f64::NEG_INFINITY, f64::max);
                        scale = scale.max(tl + vl);
                    }
                    for (r, p) in rhs.iter_mut().zip(&part) {
                        *r = r.sub(p);
                    }
                }
                let t0 = &taylor[0];
                let next = if mu == 0 {
                    let mut out = vec![F::zero(&ctx); rhs.len()];
                    for k in (0..rhs.len()).rev() {
                        let mut acc = rhs[k].clone();
                        for r in 1..=n.min(out.len() - 1 - k) {
                            acc = acc.sub(&t0[r].mul(&out[k + r]));
                        }
                        out[k] = acc.div(&t0[0]);
                    }
                    out
                } else {
                    while rhs.last().is_some_and(|x| vanishes(x, scale, bits)) {
                        rhs.pop();
                    }
                    let own = (slots[s].0 == m).then_some(slots[s].1);
                    let forced = if rhs.is_empty() { 0 } else { rhs.len() + mu };
                    let w = forced.max(own.map_or(0, |p| p + 1));
                    let mut out = vec![F::zero(&ctx); w];
                    if let Some(p) = own {
                        out[p] = F::one(&ctx);
                    }
                    for k in (0..w.saturating_sub(mu)).rev() {
                        let mut acc = rhs.get(k).cloned().unwrap_or_else(|| F::zero(&ctx));
                        for r in mu + 1..=n.min(w - 1 - k) {
                            acc = acc.sub(&t0[r].mul(&out[k + r]));
                        }
                        out[k + mu] = acc.div(&t0[mu]);
                    }
                    if out.iter().all(|x| x.is_zero()) {
                        out.clear();
                    }
                    out
                };
                coeffs[s].push(next);
            }
        }
        let envelope = coeffs
            .iter()
            .map(|sol| {
                sol.iter().map(|v| v.iter().map(|x| x.log2_abs()).fold(f64::NEG_INFINITY, f64::max)).collect()
            })
            .collect();
        Ok(Self { local, exponents, rho0, resonances, slots, coeffs, envelope, radius: None })
    }

    /// Declares the convergence radius used by the certified-disk check.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn location(&self) -> &Location {
        self.local.location()
    }

    pub fn local_operator(&self) -> &LocalOperator<F> {
        &self.local
    }

    pub fn dimension(&self) -> usize {
        self.slots.len()
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs[0].len()
    }

    /// Local exponents with multiplicity.
    pub fn exponents(&self) -> &[(Rational, usize)] {
        &self.exponents
    }

    /// Exponents listed with repetition, ascending.
    pub fn exponent_list(&self) -> Vec<Rational> {
        self.exponents.iter().flat_map(|(e, m)| std::iter::repeat_n(e.clone(), *m)).collect()
    }

    pub fn rho0(&self) -> &Rational {
        &self.rho0
    }

    pub fn slots(&self) -> &[(usize, usize)] {
        &self.slots
    }

    pub fn resonances(&self) -> &[(usize, usize)] {
        &self.resonances
    }

    /// Coefficients in divided powers of the logarithm.
    pub fn divided_coefficients(&self, s: usize) -> &[Vec<F>] {
        &self.coeffs[s]
    }

    /// Whether any solution involves a logarithm.
    pub fn has_logs(&self) -> bool {
        self.coeffs.iter().flatten().any(|v| v.len() > 1)
    }

    /// Integer exponents and no logarithms: every solution is single valued.
    pub fn is_apparent(&self) -> bool {
        self.rho0.is_integer() && !self.has_logs()
    }

    /// Solutions with plain `log^k` coefficients, in slot order.
    pub fn solutions(&self) -> Vec<LogSeries<F>> {
        self.coeffs
            .iter()
            .map(|sol| LogSeries {
                location: self.location().clone(),
                exponent: self.rho0.clone(),
                coeffs: sol
                    .iter()
                    .map(|v| {
                        v.iter()
                            .enumerate()
                            .map(|(k, c)| c.mul_rational(&Rational::new(1.into(), factorial(k).into())))
                            .collect()
                    })
                    .collect(),
            })
            .collect()
    }

    /// Local operator applied to every solution; each table should vanish.
    pub fn residuals(&self) -> Vec<Vec<Vec<F>>> {
        self.coeffs.iter().map(|d| residual(&self.local, &self.rho0, d)).collect()
    }

    /// Anticlockwise local monodromy `y -> M y` of the solution vector.
    pub fn local_monodromy(&self, prec: u32) -> Matrix<BigComplex> {
        let tpi = BigComplex::two_pi_i(prec);
        let phase = tpi.mul_rational(&self.rho0).exp();
        let maxw = self.coeffs.iter().flatten().map(|v| v.len()).max().unwrap_or(1);
        let mut pw = vec![BigComplex::one(prec)];
        for j in 1..maxw {
            pw.push(pw[j - 1].mul_ref(&tpi).div_i64(j as i64));
        }
        let rows = self
            .coeffs
            .iter()
            .map(|sol| {
                self.slots
                    .iter()
                    .map(|&(m, p)| {
                        let v = &sol[m];
                        let mut acc = BigComplex::zero(prec);
                        for j in 0..v.len().saturating_sub(p) {
                            acc = acc.add_ref(&v[p + j].to_complex(prec).mul_ref(&pw[j]));
                        }
                        acc.mul_ref(&phase)
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(rows)
    }
}

impl FrobeniusBasis<BigComplex> {
    /// Values and `t`-derivatives `d^r/dt^r` for `r < nderiv` of every solution
    /// at offset `t` from the centre; `arg` selects the branch of `log t`
    /// (principal when `None`). Rows are solutions.
    pub fn jets(&self, t: &BigComplex, arg: Option<&BigFloat>, nderiv: usize, tol_log2: f64) -> Result<Matrix<BigComplex>> {
        let prec = t.prec();
        let ns = self.dimension();
        let (tr, ti) = t.to_f64_pair();
        let tabs = tr.hypot(ti);
        if let Some(r) = self.radius {
            if tabs > 0.5 * r * (1.0 + 1e-9) {
                return Err(Error::OutsideDisk(format!(
                    "|t| = {tabs:.3e} exceeds half the radius {r:.3e} at {}",
                    self.location().label()
                )));
            }
        }
        if t.is_zero() {
            return self.jets_at_centre(nderiv, prec);
        }
        let order = self.truncation_order();
        let lt = tabs.log2();
        let growth = |m: usize| (nderiv.saturating_sub(1)) as f64 * ((m + 1) as f64).log2();
        let mut top = f64::NEG_INFINITY;
        for env in &self.envelope {
            for (m, e) in env.iter().enumerate() {
                top = top.max(e + m as f64 * lt + growth(m));
            }
        }
        let cutoff = top - prec as f64 - 8.0;
        let mut m_eff = 0;
        for env in &self.envelope {
            if let Some(m) = env.iter().enumerate().rposition(|(m, e)| e + m as f64 * lt + growth(m) >= cutoff) {
                m_eff = m_eff.max(m + 1);
            }
        }
        if m_eff == order {
            let window = order.saturating_sub(8);
            let last = self
                .envelope
                .iter()
                .flat_map(|env| env[window..].iter().enumerate().map(move |(i, e)| e + (window + i) as f64 * lt))
                .fold(f64::NEG_INFINITY, f64::max)
                + growth(order);
            let q = match self.radius {
                Some(r) => lt - r.log2(),
                None => -1.0,
            };
            let tail = if q < 0.0 { last - (1.0 - q.exp2()).log2() - top } else { f64::INFINITY };
            if tail > tol_log2 {
                return Err(Error::Truncation { tail: tail.exp2(), order });
            }
        }
        let maxw = self.coeffs.iter().flatten().map(|v| v.len()).max().unwrap_or(1);
        let rho_int = self.rho0.is_integer();
        let log = (maxw > 1 || !rho_int).then(|| match arg {
            Some(a) => t.ln_with_arg(a),
            None => t.ln(),
        });
        let mut lk = vec![BigComplex::one(prec)];
        if let Some(l) = &log {
            for k in 1..maxw {
                lk.push(lk[k - 1].mul_ref(l).div_i64(k as i64));
            }
        }
        let mut pw = Vec::with_capacity(m_eff);
        pw.push(BigComplex::one(prec));
        for m in 1..m_eff {
            pw.push(pw[m - 1].mul_ref(t));
        }
        let mut out = Matrix::zeros(ns, nderiv, &prec);
        for r in 0..nderiv {
            let factor = if rho_int {
                t.powi(self.rho0.to_integer().to_i64().unwrap() - r as i64)
            } else {
                log.as_ref().unwrap().mul_rational(&(&self.rho0 - Rational::from_integer((r as i64).into()))).exp()
            };
            for s in 0..ns {
                let mut acc = BigComplex::zero(prec);
                let mut sums = vec![BigComplex::zero(prec); maxw];
                for (m, p) in pw.iter().enumerate() {
                    let d = self.derivative_coeffs(s, m, r, prec);
                    for (k, c) in d.iter().enumerate() {
                        if !c.is_zero() {
                            sums[k] = sums[k].add_ref(&c.mul_ref(p));
                        }
                    }
                }
                for (k, sk) in sums.iter().enumerate() {
                    if k < lk.len() {
                        acc = acc.add_ref(&sk.mul_ref(&lk[k]));
                    }
                }
                out[(s, r)] = acc.mul_ref(&factor);
            }
        }
        Ok(out)
    }

    /// Divided-power coefficients of `t^(r - rho0 - m) d^r/dt^r` applied to the
    /// `m`-th term of solution `s`.
    fn derivative_coeffs(&self, s: usize, m: usize, r: usize, prec: u32) -> Vec<BigComplex> {
        let mut d: Vec<BigComplex> = self.coeffs[s][m].iter().map(|c| c.with_prec(prec)).collect();
        for i in 0..r {
            let a = &self.rho0 + Rational::from_integer((m as i64 - i as i64).into());
            let next: Vec<BigComplex> = (0..d.len())
                .map(|k| {
                    let v = if Zero::is_zero(&a) { BigComplex::zero(prec) } else { Field::mul_rational(&d[k], &a) };
                    if k + 1 < d.len() {
                        v.add_ref(&d[k + 1])
                    } else {
                        v
                    }
                })
                .collect();
            d = next;
        }
        d
    }

    fn jets_at_centre(&self, nderiv: usize, prec: u32) -> Result<Matrix<BigComplex>> {
        let Some(r0) = self.rho0.to_integer().to_i64().filter(|r| *r >= 0 && self.rho0.is_integer()) else {
            return Err(Error::OutsideDisk(format!("{} is a branch point", self.location().label())));
        };
        if self.has_logs() {
            return Err(Error::OutsideDisk(format!("{} is a logarithmic point", self.location().label())));
        }
        let mut out = Matrix::zeros(self.dimension(), nderiv, &prec);
        for s in 0..self.dimension() {
            for r in 0..nderiv {
                let m = r as i64 - r0;
                if m >= 0 {
                    if let Some(c) = self.coeffs[s].get(m as usize).and_then(|v| v.first()) {
                        out[(s, r)] = c.mul_i64(factorial(r)).with_prec(prec);
                    }
                }
            }
        }
        Ok(out)
    }
}
