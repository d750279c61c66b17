//! The elliptic family with parameters `(1, 1, 1/phi)`: its Picard-Fuchs
//! operator, the holomorphic period at `lambda = 0`, the singular locus and
//! the integral period basis.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianOperator, Location};
use crate::numerics::{parse_rational, BigComplex, BigFloat, Field, Matrix, Poly, PrecisionContext, Rational};
use crate::transport::{conjugate, PlanePath, Route, Transporter};

/// The fibre parameter `phi`, exact when rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Phi {
    Exact(Rational),
    Numeric(BigComplex),
}

impl Phi {
    pub fn value(&self, prec: u32) -> BigComplex {
        match self {
            Phi::Exact(r) => BigComplex::from_rational(r, prec),
            Phi::Numeric(z) => z.with_prec(prec),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Phi::Exact(r) => r.is_zero(),
            Phi::Numeric(z) => z.is_zero(),
        }
    }

    /// `"1/64"`, `"0.25"`, `"2"`, or complex forms such as `"1/10+1/10i"`, `"i"`.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Phi::Exact(parse_rational(&t)?));
        };
        let cut = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
            .map(|(k, _)| k)
            .last();
        let (re, im) = match cut {
            Some(k) => (parse_rational(&body[..k])?, &body[k..]),
            None => (Rational::from_integer(0.into()), body),
        };
        let im = match im {
            "" | "+" => Rational::from_integer(1.into()),
            "-" => Rational::from_integer((-1).into()),
            x => parse_rational(x)?,
        };
        if im.is_zero() {
            return Ok(Phi::Exact(re));
        }
        Ok(Phi::Numeric(BigComplex::from_rationals(&re, &im, prec)))
    }

    pub fn label(&self) -> String {
        match self {
            Phi::Exact(r) => crate::numerics::rational_to_string(r),
            Phi::Numeric(z) => z.to_sci_string(20),
        }
    }
}

fn lin<F: Field>(a: F, b: F) -> Poly<F> {
    Poly::new(vec![a, b])
}

/// `(R0, R1, R2)` for `u = 1/phi`.
pub fn r_polynomials<F: Field>(u: &F) -> [Poly<F>; 3] {
    let ctx = u.ctx();
    let c = |k: i64| F::from_i64(k, &ctx);
    let um4 = u.sub(&c(4));
    let r2 = lin(c(3), um4.clone())
        .mul(&lin(c(1), u.neg()))
        .mul(&Poly::new(vec![c(1), u.add(&c(4)).mul_i64(-2), um4.mul(&um4)]));
    let r1 = Poly::new(vec![
        c(-6),
        u.add(&c(6)).mul_i64(6),
        um4.mul(&u.mul_i64(3).add(&c(8))).mul_i64(2),
        um4.mul(&c(8).sub(&u.mul_i64(6)).add(&u.mul(u).mul_i64(3))).mul_i64(-2),
    ]);
    let r0 = Poly::new(vec![
        c(3),
        u.add(&c(14)).neg(),
        u.add(&c(2)).mul(&u.mul_i64(3).sub(&c(10))).neg(),
        um4.mul(&c(4).sub(&u.mul_i64(2)).add(&u.mul(u))),
    ]);
    [r0, r1, r2]
}

/// `R2 (theta+1)^2 + R1 (theta+1) + R0` in `lambda`.
pub fn elliptic_operator(phi: &Phi) -> Result<FuchsianOperator> {
    if phi.is_zero() {
        return Err(Error::Invalid("phi must be nonzero".into()));
    }
    let name = format!("elliptic phi={}", phi.label());
    let one = Rational::from_integer(1.into());
    match phi {
        Phi::Exact(p) => FuchsianOperator::exact(&name, "lambda", one, r_polynomials(&p.recip()).to_vec()),
        Phi::Numeric(z) => FuchsianOperator::numeric(&name, "lambda", one, r_polynomials(&z.recip()).to_vec()),
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// `sum_k C(n,k)^2 C(2k,k) phi^(k-n)` for `n < count`.
pub fn f0_coefficients(phi: &Rational, count: usize) -> Vec<Rational> {
    let u = phi.recip();
    (0..count as u64)
        .map(|n| {
            (0..=n).fold(Rational::default(), |acc, k| {
                let b = binomial(n, k);
                let w = Rational::from_integer(&b * &b * binomial(2 * k, k));
                acc + w * num_traits::pow(u.clone(), (n - k) as usize)
            })
        })
        .collect()
}

/// Constant term of `[(X + Y + 1)(1/X + 1/Y + 1/phi)]^n`, expanded term by term.
pub fn constant_term_oracle(phi: &Rational, n: usize) -> Result<Rational> {
    if n > 12 {
        return Err(Error::Invalid(format!("constant-term oracle is limited to n <= 12, got {n}")));
    }
    let u = phi.recip();
    let one = Rational::from_integer(1.into());
    let left = [((1, 0), one.clone()), ((0, 1), one.clone()), ((0, 0), one.clone())];
    let right = [((-1, 0), one.clone()), ((0, -1), one.clone()), ((0, 0), u)];
    let mut factor: HashMap<(i32, i32), Rational> = HashMap::new();
    for ((a, b), x) in &left {
        for ((c, d), y) in &right {
            *factor.entry((a + c, b + d)).or_insert_with(Rational::default) += x * y;
        }
    }
    let mut acc: HashMap<(i32, i32), Rational> = HashMap::from([((0, 0), one)]);
    for _ in 0..n {
        let mut next: HashMap<(i32, i32), Rational> = HashMap::new();
        for ((a, b), x) in &acc {
            for ((c, d), y) in &factor {
                *next.entry((a + c, b + d)).or_insert_with(Rational::default) += x * y;
            }
        }
        acc = next;
    }
    Ok(acc.remove(&(0, 0)).unwrap_or_else(Rational::default))
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// One named point of the singular locus.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticSingularity {
    pub label: &'static str,
    pub location: Location,
}

/// `0, 3phi/(4phi-1), phi, phi/(1+2 sqrt phi)^2, phi/(1-2 sqrt phi)^2, infinity`
/// under the principal square root. Points that run off to infinity for
/// special `phi` are omitted.
pub fn singular_set(phi: &Phi, prec: u32) -> Vec<EllipticSingularity> {
    let mut out = vec![EllipticSingularity { label: "0", location: Location::Exact(Rational::default()) }];
    match phi {
        Phi::Exact(p) => {
            let one = Rational::from_integer(1.into());
            let four = Rational::from_integer(4.into());
            let den = &four * p - &one;
            if !den.is_zero() {
                out.push(EllipticSingularity {
                    label: "3phi/(4phi-1)",
                    location: Location::Exact(Rational::from_integer(3.into()) * p / den),
                });
            }
            out.push(EllipticSingularity { label: "phi", location: Location::Exact(p.clone()) });
            let labels = ["phi/(1+2sqrt(phi))^2", "phi/(1-2sqrt(phi))^2"];
            match rational_sqrt(p) {
                Some(s) => {
                    for (label, sign) in labels.iter().zip([1i64, -1]) {
                        let b = &one + Rational::from_integer((2 * sign).into()) * &s;
                        if !b.is_zero() {
                            out.push(EllipticSingularity { label, location: Location::Exact(p / (&b * &b)) });
                        }
                    }
                }
                None => {
                    let z = BigComplex::from_rational(p, prec);
                    push_sqrt_pair(&mut out, &z, labels);
                }
            }
        }
        Phi::Numeric(z) => {
            let z = z.with_prec(prec);
            let den = z.mul_i64(4).sub_ref(&BigComplex::one(prec));
            if !den.is_zero() {
                out.push(EllipticSingularity {
                    label: "3phi/(4phi-1)",
                    location: Location::Numeric(z.mul_i64(3).div_ref(&den)),
                });
            }
            out.push(EllipticSingularity { label: "phi", location: Location::Numeric(z.clone()) });
            push_sqrt_pair(&mut out, &z, ["phi/(1+2sqrt(phi))^2", "phi/(1-2sqrt(phi))^2"]);
        }
    }
    out.push(EllipticSingularity { label: "infinity", location: Location::Infinity });
    out
}

fn push_sqrt_pair(out: &mut Vec<EllipticSingularity>, z: &BigComplex, labels: [&'static str; 2]) {
    let prec = z.prec();
    let s = z.sqrt().mul_i64(2);
    for (label, b) in labels.iter().zip([BigComplex::one(prec).add_ref(&s), BigComplex::one(prec).sub_ref(&s)]) {
        if !b.is_zero() {
            out.push(EllipticSingularity { label, location: Location::Numeric(z.div_ref(&b.mul_ref(&b))) });
        }
    }
}

/// `(2 pi i) [[1, 0], [-log(phi)/(2 pi i), 3/(2 pi i)]] = [[2 pi i, 0], [-log phi, 3]]`
/// with the principal logarithm, acting on `(f0, f0 log(lambda) + f1)`.
pub fn integral_basis_matrix(phi: &Phi, prec: u32) -> Matrix<BigComplex> {
    let z = phi.value(prec);
    let log_phi = z.ln();
    Matrix::from_rows(vec![
        vec![BigComplex::two_pi_i(prec), BigComplex::zero(prec)],
        vec![log_phi.neg_ref(), BigComplex::from_i64(3, prec)],
    ])
}

/// Real basepoint at half the distance from 0 to the nearest other point.
pub fn standard_basepoint(points: &[Location], prec: u32) -> BigComplex {
    let mut best: Option<(f64, Location)> = None;
    for l in points {
        let Some((x, y)) = l.to_f64_pair() else { continue };
        let d = x.hypot(y);
        if d > 0.0 && best.as_ref().map_or(true, |(b, _)| d < *b) {
            best = Some((d, l.clone()));
        }
    }
    match best {
        Some((_, Location::Exact(r))) => BigComplex::from_rational(&(r.abs() / Rational::from_integer(2.into())), prec),
        Some((d, _)) => BigComplex::from_real(BigFloat::from_f64(d / 2.0, prec)),
        None => BigComplex::from_rational(&Rational::new(1.into(), 2.into()), prec),
    }
}

/// The integral period vector `omega(lambda, phi)` continued from a fixed
/// basepoint: monodromy matrices are expressed in that basis.
pub struct EllipticPeriods {
    phi: Phi,
    transporter: Transporter,
    basepoint: BigComplex,
    to_integral: Matrix<BigComplex>,
    singularities: Vec<EllipticSingularity>,
}

impl EllipticPeriods {
    pub fn new(phi: &Phi, ctx: &PrecisionContext) -> Result<Self> {
        Self::in_plane(phi, ctx, &[], None)
    }

    /// `others` are points of other operators sharing the lambda-plane; they
    /// shape loop radii and routes. The basepoint defaults to the standard one
    /// for the combined point set.
    pub fn in_plane(phi: &Phi, ctx: &PrecisionContext, others: &[Location], basepoint: Option<BigComplex>) -> Result<Self> {
        if phi.is_zero() {
            return Err(Error::Invalid("phi must be non-zero".into()));
        }
        let prec = ctx.bits();
        let op = elliptic_operator(phi)?;
        let mut singularities: Vec<EllipticSingularity> = Vec::new();
        for s in singular_set(phi, prec).into_iter().filter(|s| !s.location.is_infinity()) {
            let v = s.location.value(prec).unwrap();
            if !singularities.iter().any(|t| t.location.value(prec).unwrap().sub_ref(&v).log2_abs() < -(prec as f64) / 2.0) {
                singularities.push(s);
            }
        }
        let mut labels = Vec::new();
        for s in &singularities {
            let v = s.location.value(prec).unwrap();
            labels.push((format!("lambda={}", s.label), v.clone()));
            if s.label == "phi" {
                labels.push(("lambda=varphi".into(), v));
            }
        }
        let other_values: Vec<BigComplex> = others.iter().filter_map(|l| l.value(prec)).collect();
        let transporter = Transporter::new(&op, ctx)?.with_spacing_points(&other_values).with_labels(labels);
        let mut all: Vec<Location> = singularities.iter().map(|s| s.location.clone()).collect();
        all.extend(others.iter().cloned());
        let basepoint = basepoint.unwrap_or_else(|| standard_basepoint(&all, prec));
        let t0 = transporter.local_in_taylor(&Location::Exact(Rational::default()), &basepoint)?;
        let to_integral = integral_basis_matrix(phi, prec).mul(&t0);
        Ok(Self { phi: phi.clone(), transporter, basepoint, to_integral, singularities })
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn basepoint(&self) -> &BigComplex {
        &self.basepoint
    }

    pub fn transporter(&self) -> &Transporter {
        &self.transporter
    }

    /// `P` with `omega = P y`, `y` the Taylor basis at the basepoint.
    pub fn to_integral(&self) -> &Matrix<BigComplex> {
        &self.to_integral
    }

    /// Finite singular points with their labels.
    pub fn singularities(&self) -> &[EllipticSingularity] {
        &self.singularities
    }

    /// Monodromy of `omega` along a closed path at the basepoint.
    pub fn monodromy_along(&self, path: &PlanePath) -> Result<Matrix<BigComplex>> {
        conjugate(&self.transporter.transport(path)?, &self.to_integral)
    }

    /// Monodromy of `omega` around `s` along the standard loop.
    pub fn monodromy(&self, s: &BigComplex, route: Route) -> Result<Matrix<BigComplex>> {
        self.monodromy_along(&self.transporter.standard_loop(&self.basepoint, s, route)?)
    }

    pub fn monodromy_at_infinity(&self) -> Result<Matrix<BigComplex>> {
        self.monodromy_along(&self.transporter.big_circle(&self.basepoint)?)?.inverse()
    }
}

/// Entries within this distance of integers count as integral.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-20;

#[derive(Clone, Debug)]
pub struct SingularMonodromy {
    pub label: String,
    pub location: BigComplex,
    pub matrix: Matrix<BigComplex>,
    pub integer_deviation: f64,
    pub det_deviation: f64,
}

impl SingularMonodromy {
    pub fn is_integral(&self) -> bool {
        self.integer_deviation < INTEGRALITY_TOLERANCE && self.det_deviation < INTEGRALITY_TOLERANCE
    }
}

#[derive(Clone, Debug)]
pub struct ConjectureReport {
    pub phi: Phi,
    pub basepoint: BigComplex,
    pub monodromies: Vec<SingularMonodromy>,
    /// `|prod of loops - big circle|`, loops taken in increasing real part.
    pub relation_deviation: f64,
}

impl ConjectureReport {
    pub fn integral(&self) -> bool {
        self.monodromies.iter().all(SingularMonodromy::is_integral)
    }
}

pub fn det_deviation(m: &Matrix<BigComplex>) -> f64 {
    let prec = m[(0, 0)].prec();
    m.det().dist_f64(&BigComplex::one(prec))
}

/// Monodromies of `omega(lambda, phi)` around every finite singular point.
pub fn sl2z_conjecture_check(phi: &Phi, ctx: &PrecisionContext) -> Result<ConjectureReport> {
    let periods = EllipticPeriods::new(phi, ctx)?;
    let prec = ctx.bits();
    let mut monodromies = Vec::new();
    for s in periods.singularities() {
        let location = s.location.value(prec).unwrap();
        let matrix = periods.monodromy(&location, Route::Upper)?;
        monodromies.push(SingularMonodromy {
            label: s.label.to_string(),
            integer_deviation: matrix.max_integer_deviation(),
            det_deviation: det_deviation(&matrix),
            location,
            matrix,
        });
    }
    let mut order: Vec<&SingularMonodromy> = monodromies.iter().collect();
    // a loop dropping onto a point passes any point straight above it on the east
    order.sort_by(|a, b| {
        let (p, q) = (a.location.to_f64_pair(), b.location.to_f64_pair());
        if (p.0 - q.0).abs() <= 1e-25 * (1.0 + p.0.abs()) {
            q.1.total_cmp(&p.1)
        } else {
            p.0.total_cmp(&q.0)
        }
    });
    let product = order.iter().fold(Matrix::identity(2, &prec), |acc, m| acc.mul(&m.matrix));
    let big = periods.monodromy_along(&periods.transporter().big_circle(periods.basepoint())?)?;
    let relation_deviation = product.max_abs_diff(&big);
    Ok(ConjectureReport { phi: phi.clone(), basepoint: periods.basepoint().clone(), monodromies, relation_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{apply_operator, frobenius_basis_exact, indicial_exponents, singular_points, LogSeries};
    use crate::numerics::ratio;

    fn exps(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| ratio(x, 1)).collect()
    }

    #[test]
    fn phi_strings() {
        assert_eq!(Phi::parse("1/64", 100).unwrap(), Phi::Exact(ratio(1, 64)));
        assert_eq!(Phi::parse("0.25", 100).unwrap(), Phi::Exact(ratio(1, 4)));
        assert_eq!(Phi::parse("2+0i", 100).unwrap(), Phi::Exact(ratio(2, 1)));
        let z = Phi::parse("1/10 + 1/10i", 200).unwrap().value(200);
        assert!(z.approx_eq(&BigComplex::from_rationals(&ratio(1, 10), &ratio(1, 10), 200), -190.0));
        assert!(Phi::parse("i", 100).unwrap().value(100).approx_eq(&BigComplex::i(100), -90.0));
        assert!(Phi::parse("1e-3-2i", 100).unwrap().value(100).im.to_f64() == -2.0);
        assert!(Phi::parse("x", 100).is_err());
    }

    #[test]
    fn r2_factors_at_phi_one() {
        let [r0, r1, r2] = r_polynomials(&ratio(1, 1));
        let one_minus = Poly::from_i64s(&[1, -1]);
        let expected =
            one_minus.mul(&one_minus).mul(&one_minus).mul(&Poly::from_i64s(&[1, -9])).scale(&ratio(3, 1));
        assert_eq!(r2, expected);
        for phi in [ratio(1, 1), ratio(1, 64), ratio(-7, 3)] {
            let [a, b, c] = r_polynomials(&phi.recip());
            assert_eq!((c.coeff(0, &()), b.coeff(0, &()), a.coeff(0, &())), (ratio(3, 1), ratio(-6, 1), ratio(3, 1)));
        }
        assert_eq!(r2.degree(), Some(4));
        assert_eq!((r0.degree(), r1.degree()), (Some(3), Some(3)));
    }

    #[test]
    fn constant_term_matches_binomial_sum() {
        assert_eq!(constant_term_oracle(&ratio(1, 1), 0).unwrap(), ratio(1, 1));
        assert_eq!(constant_term_oracle(&ratio(1, 1), 1).unwrap(), ratio(3, 1));
        assert_eq!(constant_term_oracle(&ratio(1, 64), 2).unwrap(), ratio(4614, 1));
        assert!(constant_term_oracle(&ratio(1, 1), 13).is_err());
        assert_eq!(f0_coefficients(&ratio(1, 1), 4), exps(&[1, 3, 15, 93]));
        for phi in [ratio(1, 1), ratio(1, 64), ratio(2, 1), ratio(-3, 5)] {
            let f = f0_coefficients(&phi, 13);
            for (n, c) in f.iter().enumerate() {
                assert_eq!(*c, constant_term_oracle(&phi, n).unwrap());
            }
        }
    }

    #[test]
    fn f0_is_annihilated_exactly() {
        for phi in [ratio(1, 1), ratio(1, 64), ratio(3, 7)] {
            let op = elliptic_operator(&Phi::Exact(phi.clone())).unwrap();
            let s = LogSeries::power_series(Location::Exact(ratio(0, 1)), ratio(0, 1), f0_coefficients(&phi, 50));
            let res = apply_operator(&op, &s, &()).unwrap();
            assert!(res.is_zero());
        }
        // L(1) = R2 + R1 + R0 vanishes at lambda^0 only
        let op = elliptic_operator(&Phi::Exact(ratio(1, 64))).unwrap();
        let one = LogSeries::power_series(Location::Exact(ratio(0, 1)), ratio(0, 1), vec![ratio(1, 1), ratio(0, 1)]);
        let res = apply_operator(&op, &one, &()).unwrap();
        assert!(res.coeffs[0][0].is_zero());
        assert!(!res.coeffs[1][0].is_zero());
    }

    #[test]
    fn riemann_symbol_at_one_sixty_fourth() {
        let phi = Phi::Exact(ratio(1, 64));
        let op = elliptic_operator(&phi).unwrap();
        let set = singular_set(&phi, 256);
        let locs: Vec<_> = set.iter().map(|s| s.location.clone()).collect();
        assert_eq!(
            locs,
            vec![
                Location::Exact(ratio(0, 1)),
                Location::Exact(ratio(-1, 20)),
                Location::Exact(ratio(1, 64)),
                Location::Exact(ratio(1, 100)),
                Location::Exact(ratio(1, 36)),
                Location::Infinity,
            ]
        );
        for s in &set {
            let e = indicial_exponents(&op, &s.location, 256).unwrap();
            let want = match s.label {
                "3phi/(4phi-1)" => exps(&[0, 2]),
                "infinity" => exps(&[1, 1]),
                _ => exps(&[0, 0]),
            };
            assert_eq!(e, want, "{}", s.label);
        }
        let pts = singular_points(&op, 256).unwrap();
        assert_eq!(pts.len(), 6);
        let app: Vec<_> = pts.iter().filter(|p| p.apparent).map(|p| p.location.clone()).collect();
        assert_eq!(app, vec![Location::Exact(ratio(-1, 20))]);
        // ordinary point
        assert_eq!(indicial_exponents(&op, &Location::Exact(ratio(1, 2)), 256).unwrap(), exps(&[0, 1]));
    }

    #[test]
    fn degenerate_symbol_at_phi_one() {
        let op = elliptic_operator(&Phi::Exact(ratio(1, 1))).unwrap();
        let pts = singular_points(&op, 256).unwrap();
        let essential: Vec<_> = pts.iter().filter(|p| !p.is_removable()).map(|p| p.location.clone()).collect();
        assert_eq!(
            essential,
            vec![Location::Exact(ratio(0, 1)), Location::Exact(ratio(1, 9)), Location::Exact(ratio(1, 1)), Location::Infinity]
        );
        for p in &pts {
            let want = if p.location.is_infinity() { exps(&[1, 1]) } else { exps(&[0, 0]) };
            assert_eq!(p.exponents, want);
        }
    }

    #[test]
    fn frobenius_at_zero_reproduces_f0() {
        let phi = ratio(1, 64);
        let op = elliptic_operator(&Phi::Exact(phi.clone())).unwrap();
        let b = frobenius_basis_exact(&op, &ratio(0, 1), 20).unwrap();
        let f0 = f0_coefficients(&phi, 20);
        let sols = b.solutions();
        for m in 0..20 {
            assert_eq!(sols[0].coeffs[m], vec![f0[m].clone()]);
            assert_eq!(sols[1].coeffs[m][1], f0[m]);
        }
        assert_eq!(f0[1], ratio(66, 1));
        assert!(sols[1].coeffs[0][0].is_zero());
    }

    #[test]
    fn singular_locations_are_roots_of_r2() {
        for phi in [ratio(1, 64), ratio(2, 1), ratio(-1, 3), ratio(5, 7)] {
            let op = elliptic_operator(&Phi::Exact(phi.clone())).unwrap();
            let [_, _, r2] = r_polynomials(&phi.recip());
            for s in singular_set(&Phi::Exact(phi.clone()), 256) {
                if let Some(z) = s.location.value(256) {
                    if s.label != "0" {
                        assert!(r2.eval_complex(&z).log2_abs() < -200.0, "{} at {}", s.label, phi);
                    }
                }
            }
            assert!(op.is_exact());
        }
    }

    fn mat(m: &Matrix<BigComplex>) -> Vec<Vec<i64>> {
        m.round_to_integers().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
    }

    #[test]
    fn integral_monodromy_at_one_sixty_fourth() {
        let ctx = PrecisionContext::new(40, 160, 1e-18).unwrap();
        let r = sl2z_conjecture_check(&Phi::Exact(ratio(1, 64)), &ctx).unwrap();
        assert!(r.integral(), "{r:?}");
        assert!(r.relation_deviation < 1e-25);
        let by = |l: &str| mat(&r.monodromies.iter().find(|m| m.label == l).unwrap().matrix);
        assert_eq!(by("0"), vec![vec![1, 0], vec![3, 1]]);
        assert_eq!(by("3phi/(4phi-1)"), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(by("phi/(1+2sqrt(phi))^2"), vec![vec![1, -2], vec![0, 1]]);
        assert_eq!(by("phi"), vec![vec![5, -4], vec![4, -3]]);
        assert_eq!(by("phi/(1-2sqrt(phi))^2"), vec![vec![5, -2], vec![8, -3]]);
    }

    #[test]
    fn degenerate_and_complex_parameters() {
        let ctx = PrecisionContext::new(40, 160, 1e-18).unwrap();
        let r = sl2z_conjecture_check(&Phi::Exact(ratio(1, 1)), &ctx).unwrap();
        let labels: Vec<_> = r.monodromies.iter().map(|m| m.label.clone()).collect();
        assert_eq!(labels, vec!["0", "3phi/(4phi-1)", "phi/(1+2sqrt(phi))^2"]);
        assert!(r.integral());
        assert_eq!(mat(&r.monodromies[1].matrix), vec![vec![7, -6], vec![6, -5]]);
        assert_eq!(mat(&r.monodromies[2].matrix), vec![vec![1, -2], vec![0, 1]]);
        for phi in [Phi::Exact(ratio(2, 1)), Phi::Numeric(BigComplex::from_rationals(&ratio(1, 10), &ratio(1, 10), ctx.bits()))] {
            let r = sl2z_conjecture_check(&phi, &ctx).unwrap();
            assert_eq!(r.monodromies.len(), 5);
            assert!(r.integral(), "{}", phi.label());
            assert!(r.relation_deviation < 1e-25);
        }
    }

    #[test]
    fn loops_step_around_points_on_the_same_vertical() {
        // phi = i puts 0 and phi on one vertical line
        let ctx = PrecisionContext::new(40, 160, 1e-18).unwrap();
        let r = sl2z_conjecture_check(&Phi::parse("i", ctx.bits()).unwrap(), &ctx).unwrap();
        assert_eq!(r.monodromies.len(), 5);
        assert!(r.integral());
        assert!(r.relation_deviation < 1e-25, "{}", r.relation_deviation);
    }
}
