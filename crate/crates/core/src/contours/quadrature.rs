//! Double-exponential and periodic trapezoidal rules with node doubling.

use crate::error::{Error, Result};
use crate::numerics::elementary::{exp, pi};
use crate::numerics::{BigComplex, BigFloat};

/// Outcome of one quadrature: value, nodes used, last change under doubling.
#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub value: BigComplex,
    pub node_count: usize,
    pub error_estimate: f64,
}

impl QuadratureResult {
    pub fn zero(prec: u32) -> Self {
        Self { value: BigComplex::zero(prec), node_count: 0, error_estimate: 0.0 }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            value: self.value.add_ref(&o.value),
            node_count: self.node_count + o.node_count,
            error_estimate: self.error_estimate + o.error_estimate,
        }
    }
}

/// A point of `[0, 1]` given with its complement, so both ends keep full
/// relative precision.
#[derive(Clone, Debug)]
pub struct UnitNode {
    pub u: BigFloat,
    pub one_minus_u: BigFloat,
}

/// Node schedule and stopping rule.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub prec: u32,
    pub tolerance: f64,
    pub max_nodes: usize,
    /// Nodes closer than `10^-cutoff_digits` to an end are dropped.
    pub cutoff_digits: u32,
}

fn map_nodes<T: Sync>(items: &[T], f: &(dyn Fn(&T) -> Result<BigComplex> + Sync)) -> Result<Vec<BigComplex>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn sum(values: &[BigComplex], prec: u32) -> BigComplex {
    values.iter().fold(BigComplex::zero(prec), |a, v| a.add_ref(v))
}

fn converged(a: &BigComplex, b: &BigComplex, tol: f64) -> (bool, f64) {
    let d = a.dist_f64(b);
    let scale = a.dist_f64(&BigComplex::zero(64)).max(1.0);
    (d <= tol * scale, d)
}

/// `int_0^1 f(u) du` by the tanh-sinh rule `u = 1/(1 + exp(-pi sinh v))`.
/// `f` receives the node and returns the integrand value.
pub fn tanh_sinh(f: &(dyn Fn(&UnitNode) -> Result<BigComplex> + Sync), sch: &Schedule) -> Result<QuadratureResult> {
    let prec = sch.prec;
    let pi_v = pi(prec);
    // u (1 - u) ~ exp(-pi sinh V) reaches 10^-cutoff at V
    let vmax = ((sch.cutoff_digits as f64 * std::f64::consts::LN_10) / std::f64::consts::PI).asinh() + 0.1;
    let node = |v: f64| -> (UnitNode, BigFloat) {
        let vb = BigFloat::from_f64(v, prec);
        let ev = exp(&vb);
        let emv = ev.recip();
        let sinh = ev.sub_ref(&emv).mul_pow2(-1);
        let cosh = ev.add_ref(&emv).mul_pow2(-1);
        let e = exp(&pi_v.mul_ref(&sinh));
        let one = BigFloat::one(prec);
        let den = one.add_ref(&e);
        let u = e.div_ref(&den);
        let one_minus_u = den.recip();
        let w = pi_v.mul_ref(&cosh).mul_ref(&u).mul_ref(&one_minus_u);
        (UnitNode { u, one_minus_u }, w)
    };
    let cut = -(sch.cutoff_digits as f64) * std::f64::consts::LOG2_10;
    let keep = |n: &UnitNode| n.u.log2_abs() > cut && n.one_minus_u.log2_abs() > cut;
    let mut level = 3u32;
    let mut h = 0.5f64.powi(level as i32);
    let kmax = (vmax / h).ceil() as i64;
    let mut pts: Vec<(UnitNode, BigFloat)> = (-kmax..=kmax).map(|k| node(k as f64 * h)).filter(|(n, _)| keep(n)).collect();
    let eval = |pts: &[(UnitNode, BigFloat)]| -> Result<BigComplex> {
        let vals = map_nodes(pts, &|(n, w): &(UnitNode, BigFloat)| f(n).map(|y| y.mul_real(w)))?;
        Ok(sum(&vals, prec))
    };
    let mut acc = eval(&pts)?;
    let mut nodes = pts.len();
    let mut estimate = acc.mul_real(&BigFloat::from_f64(h, prec));
    loop {
        level += 1;
        h /= 2.0;
        let kmax = (vmax / h).ceil() as i64;
        pts = (-kmax..=kmax)
            .filter(|k| k % 2 != 0)
            .map(|k| node(k as f64 * h))
            .filter(|(n, _)| keep(n))
            .collect();
        acc = acc.add_ref(&eval(&pts)?);
        nodes += pts.len();
        let next = acc.mul_real(&BigFloat::from_f64(h, prec));
        let (ok, d) = converged(&next, &estimate, sch.tolerance);
        estimate = next;
        if ok && level >= 5 {
            return Ok(QuadratureResult { value: estimate, node_count: nodes, error_estimate: d });
        }
        if nodes >= sch.max_nodes {
            return Err(Error::Quadrature(format!("no convergence with {nodes} nodes (last change {d:.3e})")));
        }
    }
}

/// `int_0^1 f(s) ds` for a 1-periodic `f` by the trapezoidal rule; `f`
/// receives `s` in `[0, 1)`.
pub fn periodic_trapezoid(f: &(dyn Fn(&BigFloat) -> Result<BigComplex> + Sync), sch: &Schedule) -> Result<QuadratureResult> {
    let prec = sch.prec;
    let mut n = 32usize;
    let pts: Vec<BigFloat> = (0..n).map(|k| BigFloat::from_ratio(&(k as i64).into(), &(n as i64).into(), prec)).collect();
    let vals = map_nodes(&pts, f)?;
    let mut acc = sum(&vals, prec);
    let mut estimate = acc.div_i64(n as i64);
    loop {
        let m = 2 * n;
        let pts: Vec<BigFloat> =
            (0..n).map(|k| BigFloat::from_ratio(&(2 * k as i64 + 1).into(), &(m as i64).into(), prec)).collect();
        acc = acc.add_ref(&sum(&map_nodes(&pts, f)?, prec));
        n = m;
        let next = acc.div_i64(n as i64);
        let (ok, d) = converged(&next, &estimate, sch.tolerance);
        estimate = next;
        if ok {
            return Ok(QuadratureResult { value: estimate, node_count: n, error_estimate: d });
        }
        if n >= sch.max_nodes {
            return Err(Error::Quadrature(format!("no convergence with {n} nodes (last change {d:.3e})")));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::elementary::ln;

    fn sch() -> Schedule {
        Schedule { prec: 200, tolerance: 1e-40, max_nodes: 4096, cutoff_digits: 60 }
    }

    #[test]
    fn log_endpoint_singularity() {
        // int_0^1 log(u) du = -1
        let r = tanh_sinh(&|n: &UnitNode| Ok(BigComplex::from_real(ln(&n.u))), &sch()).unwrap();
        assert!(r.value.approx_eq(&BigComplex::from_i64(-1, 200), -95.0), "{}", r.value);
        assert!(r.error_estimate < 1e-30);
    }

    #[test]
    fn polynomial_and_doubling() {
        // int_0^1 3u^2 du = 1
        let r = tanh_sinh(&|n: &UnitNode| Ok(BigComplex::from_real(n.u.mul_ref(&n.u).mul_i64(3))), &sch()).unwrap();
        assert!(r.value.approx_eq(&BigComplex::one(200), -120.0));
    }

    #[test]
    fn trapezoid_on_a_circle() {
        // int_0^1 exp(2 pi i s) ds = 0 and int_0^1 (2 + cos 2 pi s)^-1 ds = 1/sqrt(3)
        let p = pi(200);
        let r = periodic_trapezoid(&|s: &BigFloat| Ok(BigComplex::cis(&p.mul_ref(s).mul_pow2(1))), &sch()).unwrap();
        assert!(r.value.dist_f64(&BigComplex::zero(64)) < 1e-50);
        let r = periodic_trapezoid(
            &|s: &BigFloat| {
                let c = BigComplex::cis(&p.mul_ref(s).mul_pow2(1)).re;
                Ok(BigComplex::from_real(c.add_ref(&BigFloat::from_i64(2, 200)).recip()))
            },
            &sch(),
        )
        .unwrap();
        let want = BigFloat::from_i64(3, 200).sqrt().recip();
        assert!(r.value.approx_eq(&BigComplex::from_real(want), -120.0));
    }
}
