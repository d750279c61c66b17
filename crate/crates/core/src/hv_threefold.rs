//! The threefold side: the fourth order operator AESZ 34 in `phi`, its
//! Frobenius periods at the point of maximal unipotent monodromy and the
//! integral symplectic period vector `Pi(phi)`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fuchsian::{frobenius_basis_exact, indicial_exponents, singular_candidates, FuchsianOperator, Location};
use crate::numerics::elementary::zeta3;
use crate::numerics::{ratio, BigComplex, Matrix, PrecisionContext, Rational};
use crate::transport::{conjugate, PlanePath, Route, Transporter};

/// The shipped operator data (coefficients of AESZ 34 before normalisation).
pub const AESZ34_JSON: &str = include_str!("../data/aesz34.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopologicalData {
    pub h3: i64,
    pub c2h: i64,
    pub chi: i64,
}

impl TopologicalData {
    pub const HULEK_VERRILL: Self = Self { h3: 12, c2h: 12, chi: -8 };

    pub fn sigma(&self) -> i64 {
        self.h3.rem_euclid(2)
    }
}

/// Reads an order four operator and normalises it so that the exponents at
/// `phi = 0` are `(1, 1, 1, 1)`. Input already in that form is kept.
pub fn load_aesz34(json: &str) -> Result<FuchsianOperator> {
    let raw = FuchsianOperator::from_json(json)?;
    if raw.order() != 4 {
        return Err(Error::Validation(format!("expected an order 4 operator, found order {}", raw.order())));
    }
    if !raw.is_exact() {
        return Err(Error::Validation("operator data must be exact".into()));
    }
    let zero = Location::Exact(ratio(0, 1));
    let e = indicial_exponents(&raw, &zero, 128)?;
    let op = if e.iter().all(|x| *x == ratio(0, 1)) {
        raw.conjugated(&ratio(1, 1))
    } else {
        raw
    };
    let e = indicial_exponents(&op, &zero, 128)?;
    if e != vec![ratio(1, 1); 4] {
        return Err(Error::Validation(format!(
            "exponents at phi = 0 are {:?}, expected maximal unipotent monodromy",
            e.iter().map(crate::numerics::rational_to_string).collect::<Vec<_>>()
        )));
    }
    let cands = singular_candidates(&op, 128);
    for need in [ratio(1, 25), ratio(1, 9), ratio(1, 1)] {
        if !cands.contains(&Location::Exact(need.clone())) {
            return Err(Error::Validation(format!(
                "phi = {} is not a singular point",
                crate::numerics::rational_to_string(&need)
            )));
        }
    }
    let seed = frobenius_basis_exact(&op, &ratio(0, 1), 4)?;
    let hol = &seed.solutions()[0];
    if hol.log_degree() != 0 || hol.coeffs[0][0] != ratio(1, 1) {
        return Err(Error::Validation("no holomorphic solution phi + O(phi^2)".into()));
    }
    Ok(op)
}

/// The normalised AESZ 34 operator from the shipped data.
pub fn aesz34() -> Result<FuchsianOperator> {
    load_aesz34(AESZ34_JSON)
}

/// Coefficients of the holomorphic solution `phi * sum a_n phi^n`:
/// `a_n = sum over a+b+c+d+e = n of (n!/(a! b! c! d! e!))^2`.
pub fn holomorphic_coefficients(count: usize) -> Vec<BigInt> {
    // n!^2 [x^n] (sum_k x^k / k!^2)^5
    let mut fact = vec![BigInt::from(1)];
    for k in 1..count.max(1) {
        let f = &fact[k - 1] * k;
        fact.push(f);
    }
    let base: Vec<Rational> = fact.iter().map(|f| Rational::new(1.into(), f * f)).collect();
    let mut acc = base.clone();
    for _ in 0..4 {
        acc = (0..count).map(|n| (0..=n).map(|k| &acc[k] * &base[n - k]).sum()).collect();
    }
    acc.iter().zip(&fact).map(|(c, f)| (c * Rational::from_integer(f * f)).to_integer()).collect()
}

/// `M_top` with rows `(zeta(3) chi/(2 pi i)^3, c2H/24, 0, H^3/6)`,
/// `(c2H/24, sigma/2, -H^3/2, 0)`, `(1, 0, 0, 0)`, `(0, 1, 0, 0)`.
pub fn m_top(top: &TopologicalData, prec: u32) -> Matrix<BigComplex> {
    let r = |p: i64, q: i64| BigComplex::from_rational(&ratio(p, q), prec);
    let tpi3 = BigComplex::two_pi_i(prec).powi(3);
    let z = BigComplex::from_real(zeta3(prec)).mul_i64(top.chi).div_ref(&tpi3);
    Matrix::from_rows(vec![
        vec![z, r(top.c2h, 24), r(0, 1), r(top.h3, 6)],
        vec![r(top.c2h, 24), r(top.sigma(), 2), r(-top.h3, 2), r(0, 1)],
        vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)],
        vec![r(0, 1), r(1, 1), r(0, 1), r(0, 1)],
    ])
}

/// `Q` with `Pi = Q varpi`: `(2 pi i)^3 M_top diag(1, (2 pi i)^-1, (2 pi i)^-2, (2 pi i)^-3)`.
pub fn pi_matrix(top: &TopologicalData, prec: u32) -> Matrix<BigComplex> {
    let tpi = BigComplex::two_pi_i(prec);
    let mut d = Matrix::zeros(4, 4, &prec);
    for j in 0..4 {
        d[(j, j)] = tpi.powi(3 - j as i64);
    }
    m_top(top, prec).mul(&d)
}

/// `varpi_j = j! y_j` with `y_j` the divided-log Frobenius slots at 0.
fn varpi_from_slots(prec: u32) -> Matrix<BigComplex> {
    let mut d = Matrix::zeros(4, 4, &prec);
    for (j, f) in [1, 1, 2, 6].into_iter().enumerate() {
        d[(j, j)] = BigComplex::from_i64(f, prec);
    }
    d
}

/// `Sigma_4 = [[0, I], [-I, 0]]`.
pub fn sigma4(prec: u32) -> Matrix<BigComplex> {
    Matrix::from_integers(
        &[vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-1, 0, 0, 0], vec![0, -1, 0, 0]],
        prec,
    )
}

/// `max |M^T Sigma_4 M - Sigma_4|`.
pub fn symplectic_deviation(m: &Matrix<BigComplex>) -> f64 {
    let prec = m[(0, 0)].prec();
    let s = sigma4(prec);
    m.transpose().mul(&s).mul(m).max_abs_diff(&s)
}

/// Standard basepoint of phi-plane runs.
pub fn phi_basepoint() -> Rational {
    ratio(1, 50)
}

/// `Pi(phi)` and its continuation in the phi-plane.
pub struct ThreefoldPeriods {
    topology: TopologicalData,
    transporter: Transporter,
    basepoint: BigComplex,
    q: Matrix<BigComplex>,
    to_pi: Matrix<BigComplex>,
}

impl ThreefoldPeriods {
    pub fn new(ctx: &PrecisionContext) -> Result<Self> {
        Self::with_operator(&aesz34()?, TopologicalData::HULEK_VERRILL, ctx)
    }

    pub fn with_operator(op: &FuchsianOperator, topology: TopologicalData, ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.bits();
        let labels = singular_candidates(op, prec)
            .into_iter()
            .filter_map(|l| l.value(prec).map(|v| (format!("phi={}", l.label()), v)))
            .collect();
        let transporter = Transporter::new(op, ctx)?.with_labels(labels);
        let basepoint = BigComplex::from_rational(&phi_basepoint(), prec);
        let q = pi_matrix(&topology, prec).mul(&varpi_from_slots(prec));
        let to_pi = q.mul(&transporter.local_in_taylor(&Location::Exact(ratio(0, 1)), &basepoint)?);
        Ok(Self { topology, transporter, basepoint, q, to_pi })
    }

    pub fn topology(&self) -> &TopologicalData {
        &self.topology
    }

    pub fn transporter(&self) -> &Transporter {
        &self.transporter
    }

    pub fn basepoint(&self) -> &BigComplex {
        &self.basepoint
    }

    /// `(varpi_0, .., varpi_3)` at `phi`, continued from 0 along the straight
    /// segment (principal `log phi`).
    pub fn varpi(&self, phi: &BigComplex) -> Result<Vec<BigComplex>> {
        let prec = self.transporter.prec();
        let c = self.transporter.local_in_taylor(&Location::Exact(ratio(0, 1)), phi)?;
        let v = varpi_from_slots(prec).mul(&c);
        Ok((0..4).map(|i| v[(i, 0)].clone()).collect())
    }

    /// `Pi(phi) = Q varpi(phi)`.
    pub fn pi_vector(&self, phi: &BigComplex) -> Result<Vec<BigComplex>> {
        let c = self.transporter.local_in_taylor(&Location::Exact(ratio(0, 1)), phi)?;
        let v = self.q.mul(&c);
        Ok((0..4).map(|i| v[(i, 0)].clone()).collect())
    }

    /// Monodromy of `Pi` along a closed path at the basepoint (`Pi -> M Pi`).
    pub fn monodromy_along(&self, path: &PlanePath) -> Result<Matrix<BigComplex>> {
        conjugate(&self.transporter.transport(path)?, &self.to_pi)
    }

    /// Monodromy of `Pi` around `s` along the standard loop from `phi = 1/50`.
    pub fn monodromy(&self, s: &BigComplex, route: Route) -> Result<Matrix<BigComplex>> {
        self.monodromy_along(&self.transporter.standard_loop(&self.basepoint, s, route)?)
    }

    /// The same loop acting on cycle vectors: `Gamma^T Sigma_4 (M Pi) = (M^-1 Gamma)^T Sigma_4 Pi`
    /// for symplectic `M`, so cycles move by `M^-1`.
    pub fn cycle_monodromy(&self, s: &BigComplex, route: Route) -> Result<Matrix<BigComplex>> {
        self.monodromy(s, route)?.inverse()
    }

    /// `log phi -> log phi + 2 pi i` applied to the `varpi` ladder, in the `Pi` basis.
    pub fn unipotent_at_zero(&self) -> Result<Matrix<BigComplex>> {
        let prec = self.transporter.prec();
        let tpi = BigComplex::two_pi_i(prec);
        let mut u = Matrix::zeros(4, 4, &prec);
        for j in 0..4usize {
            for k in 0..=j {
                let binom = (0..k).fold(1i64, |a, i| a * (j - i) as i64 / (i as i64 + 1));
                u[(j, k)] = tpi.powi((j - k) as i64).mul_i64(binom);
            }
        }
        let q = pi_matrix(&self.topology, prec);
        conjugate(&u, &q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40, 160, 1e-18).unwrap()
    }

    #[test]
    fn loader_normalises_and_validates() {
        let op = aesz34().unwrap();
        assert_eq!(op.shift(), &ratio(-1, 1));
        let raw = FuchsianOperator::from_json(AESZ34_JSON).unwrap();
        assert_eq!(indicial_exponents(&raw, &Location::Exact(ratio(0, 1)), 128).unwrap(), vec![ratio(0, 1); 4]);
        // already normalised input is accepted as is
        assert_eq!(load_aesz34(&op.to_json().unwrap()).unwrap(), op);
        let bad = AESZ34_JSON.replace("\"-35\"", "\"-36\"");
        assert!(matches!(load_aesz34(&bad), Err(Error::Validation(_))));
        assert!(load_aesz34("{}").is_err());
    }

    #[test]
    fn holomorphic_period_matches_multinomial_sums() {
        let a = holomorphic_coefficients(8);
        assert_eq!(&a[..3], &[BigInt::from(1), BigInt::from(5), BigInt::from(45)]);
        let b = frobenius_basis_exact(&aesz34().unwrap(), &ratio(0, 1), 8).unwrap();
        let hol = &b.solutions()[0];
        for (n, an) in a.iter().enumerate() {
            assert_eq!(hol.coeffs[n][0], Rational::from_integer(an.clone()));
        }
    }

    #[test]
    fn pi_components_are_the_displayed_combinations() {
        let prec = ctx().bits();
        let top = TopologicalData::HULEK_VERRILL;
        assert_eq!(top.sigma(), 0);
        let m = m_top(&top, prec);
        let want = [(0, 1, ratio(1, 2)), (0, 3, ratio(2, 1)), (1, 0, ratio(1, 2)), (1, 2, ratio(-6, 1)), (1, 1, ratio(0, 1))];
        for (i, j, v) in want {
            assert!(m[(i, j)].approx_eq(&BigComplex::from_rational(&v, prec), -120.0));
        }
        let t = ThreefoldPeriods::new(&ctx()).unwrap();
        let phi = BigComplex::from_rational(&ratio(1, 64), prec);
        let pi = t.pi_vector(&phi).unwrap();
        let w = t.varpi(&phi).unwrap();
        let tpi3 = BigComplex::two_pi_i(prec).powi(3);
        assert!(pi[2].approx_eq(&tpi3.mul_ref(&w[0]), -110.0));
        assert!(pi[3].approx_eq(&BigComplex::two_pi_i(prec).powi(2).mul_ref(&w[1]), -110.0));
        // varpi_0 = phi (1 + 5 phi + 45 phi^2 + ...), varpi_1 = varpi_0 log phi + O(phi^2)
        let s: BigComplex = holomorphic_coefficients(100)
            .iter()
            .rev()
            .fold(BigComplex::zero(prec), |acc, a| acc.mul_ref(&phi).add_ref(&BigComplex::from_real(crate::numerics::BigFloat::from_bigint(a, prec))))
            .mul_ref(&phi);
        assert!(w[0].approx_eq(&s, -100.0));
    }

    #[test]
    fn monodromy_is_integral_symplectic() {
        let t = ThreefoldPeriods::new(&ctx()).unwrap();
        let prec = ctx().bits();
        let m0 = t.monodromy(&BigComplex::zero(prec), Route::Upper).unwrap();
        assert!(m0.max_abs_diff(&t.unipotent_at_zero().unwrap()) < 1e-25);
        for s in [ratio(0, 1), ratio(1, 25), ratio(1, 9), ratio(1, 1)] {
            let m = t.monodromy(&BigComplex::from_rational(&s, prec), Route::Upper).unwrap();
            assert!(m.max_integer_deviation() < 1e-25, "{s} {:?}", m.round_to_integers());
            assert!(symplectic_deviation(&m) < 1e-25);
        }
    }

    #[test]
    fn conifold_cycle_action_relates_the_two_branches() {
        let t = ThreefoldPeriods::new(&ctx()).unwrap();
        let prec = ctx().bits();
        let s = BigComplex::from_rational(&ratio(1, 25), prec);
        let m = t.monodromy(&s, Route::Upper).unwrap();
        let c = t.cycle_monodromy(&s, Route::Upper).unwrap();
        let v = |x: &[i64]| x.iter().map(|&k| BigComplex::from_i64(k, prec)).collect::<Vec<_>>();
        let img = c.mul_vec(&v(&[1, 0, -5, 1]));
        for (a, b) in img.iter().zip(v(&[1, 0, 5, 1])) {
            assert!(a.dist_f64(&b) < 1e-25);
        }
        // the period action itself sends it elsewhere
        let img = m.mul_vec(&v(&[1, 0, -5, 1]));
        assert!(img[2].dist_f64(&BigComplex::from_i64(-15, prec)) < 1e-25);
    }
}
