//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines always reach the
//! test log. Exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;

use hv_periods::contours::{tanh_sinh, ContourSpec, Schedule, TensorPlane, UnitNode};
use hv_periods::fuchsian::{apply_operator, frobenius_basis_exact, Location, LogSeries};
use hv_periods::hv_elliptic::{
    constant_term_oracle, det_deviation, elliptic_operator, f0_coefficients, sl2z_conjecture_check, EllipticPeriods, Phi,
};
use hv_periods::hv_threefold::{symplectic_deviation, ThreefoldPeriods};
use hv_periods::numerics::elementary::ln;
use hv_periods::numerics::{ratio, Matrix};
use hv_periods::relations::{
    builtin_identity, find_gamma, identity_lhs, relative_residual, sigma, sigma_mn, vanishing_cycle_branch_relation,
    verify_identity, GammaOutcome, IdentityReport, SEPARATION,
};
use hv_periods::transport::{Piece, PlanePath, Route};
use hv_periods::{BigComplex, BigFloat, PrecisionContext, Rational};

type Verdict = (bool, String);

fn ctx_table() -> PrecisionContext {
    PrecisionContext::new(120, 400, 1e-40).unwrap()
}

fn ctx_identity() -> PrecisionContext {
    PrecisionContext::new(120, 480, 1e-60).unwrap()
}

fn ctx_low() -> PrecisionContext {
    PrecisionContext::new(40, 160, 1e-18).unwrap()
}

fn ints(m: &Matrix<BigComplex>) -> Vec<Vec<i64>> {
    m.round_to_integers().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
}

fn q(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

// 1. Tensor monodromy table at phi = 1/64.
fn monodromy_table() -> Verdict {
    let start = Instant::now();
    let ctx = ctx_table();
    let plane = TensorPlane::new(&Phi::Exact(q(1, 64)), &ctx).unwrap();
    let table = plane.monodromy_table(Route::Upper).unwrap();
    let id = vec![vec![1, 0], vec![0, 1]];
    let m = |a: i64, b: i64, c: i64, d: i64| vec![vec![a, b], vec![c, d]];
    let want: Vec<(f64, Vec<Vec<i64>>, Vec<Vec<i64>>)> = vec![
        (0.0, m(1, 0, 3, 1), m(1, 0, 3, 1)),
        (1.0 / 100.0, id.clone(), m(1, -2, 0, 1)),
        (1.0 / 64.0, id.clone(), m(5, -4, 4, -3)),
        (1.0 / 36.0, id.clone(), m(5, -2, 8, -3)),
        (1.0 / 9.0, m(1, -2, 0, 1), id.clone()),
        (1.0, m(7, -6, 6, -5), id.clone()),
    ];
    let mut worst_int: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    let mut ok = true;
    for (x, l, r) in &want {
        let Some(t) = table.iter().find(|t| (t.point.re.to_f64() - x).abs() < 1e-12 && t.point.im.to_f64().abs() < 1e-12) else {
            return (false, format!("no monodromy at lambda = {x}"));
        };
        ok &= ints(&t.left) == *l && ints(&t.right) == *r;
        worst_int = worst_int.max(t.integer_deviation());
        worst_det = worst_det.max(t.det_deviation());
    }
    // the apparent point must be trivial
    let apparent = table.iter().find(|t| (t.point.re.to_f64() + 0.05).abs() < 1e-12);
    let trivial = apparent.is_some_and(|t| ints(&t.left) == id && ints(&t.right) == id && t.integer_deviation() < 1e-20);
    let secs = start.elapsed().as_secs_f64();
    let pass = ok && trivial && worst_int < 1e-20 && worst_det < 1e-30 && secs < 300.0;
    (
        pass,
        format!(
            "6 matrices match: {ok}, apparent point trivial: {trivial}, max |entry - int| {worst_int:.1e} (< 1e-20), max |det - 1| {worst_det:.1e} (< 1e-30), {secs:.1} s (< 300 s)"
        ),
    )
}

struct Identities {
    reports: Vec<(String, IdentityReport)>,
    times: Vec<Duration>,
}

fn identities() -> Identities {
    let ctx = ctx_identity();
    let mut reports = Vec::new();
    let mut times = Vec::new();
    for name in ["vanishing-1-9", "vanishing-1-25", "t3-holomorphic"] {
        let t = Instant::now();
        let spec = builtin_identity(name, "1/64").unwrap();
        reports.push((name.to_string(), verify_identity(&spec, &ctx, Route::Upper).unwrap()));
        times.push(t.elapsed());
    }
    Identities { reports, times }
}

// 2.-4. Identity residuals.
fn identity(ids: &Identities, k: usize, gamma: [Rational; 4], pairing: [i64; 4]) -> Verdict {
    let (name, r) = &ids.reports[k];
    let term = &r.terms[0];
    let gamma_ok = r.gamma.as_ref() == Some(&gamma) && term.g == pairing;
    // recompute the left side from the exposed Pi
    let lhs = identity_lhs(&gamma, &r.pi);
    let residual = relative_residual(&lhs, &r.rhs);
    let mut detail = format!(
        "{name}: residual {residual:.1e} (< 1e-30), {} nodes, quadrature change {:.1e}, {:.1} s",
        term.node_count,
        term.error_estimate,
        ids.times[k].as_secs_f64()
    );
    let mut pass = gamma_ok && residual < 1e-30;
    if k == 2 {
        let inv = term.invariant == Some(true);
        detail += &format!(", invariance_check {inv}");
        pass &= inv;
    }
    (pass, detail)
}

// 5. Gamma recovery with the claimed vector withheld.
fn gamma_recovery(ids: &Identities) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, r) in &ids.reports {
        let want = r.gamma.clone().unwrap();
        let mut seps = Vec::new();
        for du in [30, 40, 50] {
            // only the right side and Pi go in
            match find_gamma(&r.rhs, &r.pi, 4, du).unwrap() {
                GammaOutcome::Found(g) => {
                    pass &= g.gamma == want && g.separation >= SEPARATION;
                    seps.push(format!("{:.0e}", g.separation));
                }
                other => {
                    pass = false;
                    seps.push(format!("{other:?}"));
                }
            }
        }
        parts.push(format!("{name} separations [{}]", seps.join(", ")));
    }
    (pass, format!("{} (>= 1e10, same gamma at 30/40/50 digits)", parts.join("; ")))
}

// 6. Conifold cycle action at phi = 1/25.
fn branch_relation() -> Verdict {
    let ctx = ctx_table();
    let prec = ctx.bits();
    let t = ThreefoldPeriods::new(&ctx).unwrap();
    let s = BigComplex::from_rational(&q(1, 25), prec);
    let m = t.monodromy(&s, Route::Upper).unwrap();
    let cyc = t.cycle_monodromy(&s, Route::Upper).unwrap();
    let from = [q(1, 1), q(0, 1), q(-5, 1), q(1, 1)];
    let to = [q(1, 1), q(0, 1), q(5, 1), q(1, 1)];
    let rel = vanishing_cycle_branch_relation(&from, &to, &cyc);
    let dev = cyc.max_integer_deviation().max(m.max_integer_deviation());
    let symp = symplectic_deviation(&m).max(symplectic_deviation(&cyc));
    (
        rel && dev < 1e-20 && symp < 1e-30,
        format!(
            "(1,0,5,1) = M(1,0,-5,1) with M the cycle action of the loop at 1/25: {rel}; integral to {dev:.1e}; M^T S M - S {symp:.1e} (< 1e-30)"
        ),
    )
}

/// `sum_{a+b+c=n} (n!/(a!b!c!))^2 phi^-c`: the constant term counted by multinomials.
fn multinomial_oracle(phi: &Rational, n: u64) -> Rational {
    let fact = |k: u64| (1..=k).fold(BigInt::one(), |a, i| a * i);
    let u = phi.recip();
    let mut acc = Rational::default();
    for a in 0..=n {
        for b in 0..=n - a {
            let c = n - a - b;
            let m = fact(n) / (fact(a) * fact(b) * fact(c));
            acc += Rational::from_integer(&m * &m) * num_traits::pow(u.clone(), c as usize);
        }
    }
    acc
}

// 7. Exact oracle equivalence.
fn oracles() -> Verdict {
    let mut pass = true;
    for phi in [q(1, 1), q(1, 64), q(3, 7)] {
        let c = f0_coefficients(&phi, 13);
        for n in 0..=12usize {
            let lib = constant_term_oracle(&phi, n).unwrap();
            pass &= c[n] == lib && c[n] == multinomial_oracle(&phi, n as u64);
        }
    }
    let head: Vec<Rational> = f0_coefficients(&q(1, 1), 4);
    let want = [1, 3, 15, 93].map(|x| q(x, 1));
    pass &= head == want;
    (pass, format!("n <= 12 at phi in {{1, 1/64, 3/7}} against two oracles; f0(lambda, 1) starts {:?}", head.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

// 8. Exact annihilation through order 50.
fn annihilation() -> Verdict {
    let mut pass = true;
    let mut checked = 0;
    for phi in [q(1, 1), q(1, 64)] {
        let op = elliptic_operator(&Phi::Exact(phi.clone())).unwrap();
        let f0 = LogSeries::power_series(Location::Exact(q(0, 1)), q(0, 1), f0_coefficients(&phi, 51));
        pass &= apply_operator(&op, &f0, &()).unwrap().is_zero();
        let basis = frobenius_basis_exact(&op, &q(0, 1), 51).unwrap();
        for s in basis.solutions() {
            pass &= apply_operator(&op, &s, &()).unwrap().is_zero();
            checked += 1;
        }
        // the ladder's holomorphic member is f0 itself
        pass &= basis.solutions()[0].coeffs.iter().zip(f0_coefficients(&phi, 51)).all(|(c, f)| c[0] == f);
    }
    (pass, format!("L f0 = 0 and L applied to {checked} Frobenius solutions = 0 in exact arithmetic, orders 0..=50, phi in {{1, 1/64}}"))
}

// 9. Integrality of elliptic monodromy.
fn conjecture() -> Verdict {
    let ctx = ctx_table();
    let mut pass = true;
    let mut parts = Vec::new();
    for s in ["1/64", "1", "2", "1/10+1/10i"] {
        let phi = Phi::parse(s, ctx.bits()).unwrap();
        let r = sl2z_conjecture_check(&phi, &ctx).unwrap();
        let dev = r.monodromies.iter().map(|m| m.integer_deviation).fold(0.0, f64::max);
        let det = r.monodromies.iter().map(|m| m.det_deviation).fold(0.0, f64::max);
        pass &= r.integral() && dev < 1e-20 && det < 1e-20;
        parts.push(format!("{s}: {} loops, {dev:.0e}/{det:.0e}", r.monodromies.len()));
    }
    (pass, format!("integer/det deviations {}", parts.join(", ")))
}

// 10. Property suite.
fn properties() -> Verdict {
    let ctx = ctx_low();
    let prec = ctx.bits();
    let mut fails: Vec<&str> = Vec::new();
    let mut check = |ok: bool, name: &'static str| {
        if !ok {
            fails.push(name);
        }
    };
    let c = |re: f64, im: f64| BigComplex::from_f64(re, im, prec);
    let ell = EllipticPeriods::new(&Phi::Exact(q(1, 64)), &ctx).unwrap();
    let tr = ell.transporter();
    let b = ell.basepoint().clone();
    let id = Matrix::identity(2, &prec);

    // homotopy: both routes around 0 enclose only 0; a split segment transports the same
    let up = tr.standard_loop(&b, &c(0.0, 0.0), Route::Upper).unwrap();
    let down = tr.standard_loop(&b, &c(0.0, 0.0), Route::Lower).unwrap();
    check(tr.homotopy_check(&up, &down).unwrap(), "homotopy");
    let (p0, p1, mid) = (c(0.004, 0.0), c(0.012, 0.006), c(0.008, 0.003));
    let whole = PlanePath::new(vec![Piece::Segment { start: p0.clone(), end: p1.clone() }]).unwrap();
    let split = PlanePath::new(vec![
        Piece::Segment { start: p0, end: mid.clone() },
        Piece::Segment { start: mid, end: p1 },
    ])
    .unwrap();
    check(tr.transport(&whole).unwrap().max_abs_diff(&tr.transport(&split).unwrap()) < 1e-17, "refinement");

    // reversal
    let t = tr.transport(&up).unwrap();
    let back = tr.transport(&up.reverse()).unwrap();
    check(t.mul(&back).max_abs_diff(&id) < 1e-17, "reversal");

    // ordinary point and the apparent point
    let ordinary = PlanePath::new(vec![Piece::Loop {
        center: c(0.02, 0.01),
        radius: BigFloat::from_f64(0.002, prec),
        base_turn: q(0, 1),
        orientation: 1,
    }])
    .unwrap();
    check(tr.transport(&ordinary).unwrap().max_abs_diff(&id) < 1e-17, "ordinary point");
    let apparent = ell.monodromy(&BigComplex::from_rational(&q(-1, 20), prec), Route::Upper).unwrap();
    check(apparent.max_abs_diff(&id) < 1e-17 && det_deviation(&apparent) < 1e-17, "apparent point");

    // node doubling: int_0^1 log u du = -1 gets better as the tolerance tightens
    let mut errs = Vec::new();
    for tol in [1e-10, 1e-20, 1e-30] {
        let sch = Schedule { prec: 200, tolerance: tol, max_nodes: 1 << 14, cutoff_digits: 50 };
        let r = tanh_sinh(&|n: &UnitNode| Ok(BigComplex::from_real(ln(&n.u))), &sch).unwrap();
        let e = r.value.dist_f64(&BigComplex::from_i64(-1, 200));
        errs.push((e, r.node_count, tol));
    }
    check(errs.iter().all(|(e, _, tol)| *e < 10.0 * tol) && errs.windows(2).all(|w| w[1].1 >= w[0].1), "node doubling");
    let plane = TensorPlane::new(&Phi::Exact(q(1, 64)), &ctx).unwrap();
    let v = plane.builtin("vanishing-1-9", Route::Upper).unwrap();
    let coarse = plane.integrate(&v.contour, &v.g, Route::Upper).unwrap();
    let fine_ctx = PrecisionContext::new(60, 240, 1e-28).unwrap();
    let fine_plane = TensorPlane::new(&Phi::Exact(q(1, 64)), &fine_ctx).unwrap();
    let fine = fine_plane.integrate(&v.contour, &v.g, Route::Upper).unwrap();
    check(fine.node_count > coarse.node_count && coarse.value.dist_f64(&fine.value) < 1e-16, "contour doubling");

    // reversing a contour negates the integral; the deformed detour agrees
    let t3 = plane.builtin("t3-circle", Route::Upper).unwrap();
    let fwd = plane.integrate(&t3.contour, &t3.g, Route::Upper).unwrap().value;
    let rev = plane.integrate(&ContourSpec::closed(t3.contour.path.reverse()).unwrap(), &t3.g, Route::Upper).unwrap().value;
    check(fwd.add_ref(&rev).dist_f64(&BigComplex::zero(64)) < 1e-15, "contour reversal");

    // Sigma identities
    let neg = |m: &Vec<Vec<i64>>| m.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()).collect::<Vec<_>>();
    let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| {
        a.iter().map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect::<Vec<Vec<i64>>>()
    };
    let mut sig_ok = true;
    for n in [2, 4, 6] {
        let s = sigma(n);
        let st: Vec<Vec<i64>> = (0..n).map(|j| s.iter().map(|r| r[j]).collect()).collect();
        let minus_id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { -1 } else { 0 }).collect()).collect();
        sig_ok &= st == neg(&s) && mul(&s, &s) == minus_id;
    }
    let s22 = sigma_mn(2, 2);
    sig_ok &= mul(&s22, &s22) == (0..4).map(|i| (0..4).map(|j| if i == j { 1 } else { 0 }).collect()).collect::<Vec<Vec<i64>>>();
    check(sig_ok, "sigma");

    // the vanishing integral shrinks as phi -> 1/9
    let v: Vec<f64> = [q(1, 10), q(21, 200), q(11, 100)]
        .into_iter()
        .map(|phi| {
            let p = TensorPlane::new(&Phi::Exact(phi), &ctx).unwrap();
            let b = p.builtin("vanishing-1-9", Route::Upper).unwrap();
            p.integrate(&b.contour, &b.g, Route::Upper).unwrap().value.dist_f64(&BigComplex::zero(64))
        })
        .collect();
    check(v[0] > v[1] && v[1] > v[2] && v[2] < 0.2 * v[0], "shrink");

    let pass = fails.is_empty();
    let detail = if pass {
        format!(
            "homotopy, refinement, reversal, ordinary/apparent points, node doubling, Sigma, shrink |I| = {:.2e} > {:.2e} > {:.2e}",
            v[0], v[1], v[2]
        )
    } else {
        format!("failed: {}", fails.join(", "))
    };
    (pass, detail)
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        }
    }
}

fn main() {
    // `cargo test -- <filter>` passes arguments; a filter that does not
    // mention this target skips it
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut report = |n: usize, name: &'static str, v: Verdict| {
        println!("criterion {n:>2} {} {name}: {}", if v.0 { "PASS" } else { "FAIL" }, v.1);
        results.push((n, name, v));
    };
    report(1, "monodromy table", guarded(monodromy_table));
    let ids = catch_unwind(identities).ok();
    let half = |n: i64| q(n, 2);
    let names = ["identity 1/64 -> 1/9", "identity 1/36 -> 1/9", "closed contour identity"];
    let expect: [([Rational; 4], [i64; 4]); 3] = [
        ([half(1), q(0, 1), half(-5), half(1)], [1, 1, 0, 0]),
        ([q(0, 1), q(0, 1), half(-5), q(0, 1)], [1, 2, 0, 0]),
        ([q(-1, 1), q(0, 1), q(0, 1), q(0, 1)], [0, 0, 0, 1]),
    ];
    for (k, (gamma, g)) in expect.into_iter().enumerate() {
        let v = match &ids {
            Some(ids) => guarded(|| identity(ids, k, gamma, g)),
            None => (false, "identity evaluation panicked".into()),
        };
        report(2 + k, names[k], v);
    }
    let v = match &ids {
        Some(ids) => guarded(|| gamma_recovery(ids)),
        None => (false, "identity evaluation panicked".into()),
    };
    report(5, "gamma recovery", v);
    report(6, "vanishing-cycle branch relation", guarded(branch_relation));
    report(7, "oracle equivalence", guarded(oracles));
    report(8, "exact annihilation", guarded(annihilation));
    report(9, "conjecture suite", guarded(conjecture));
    report(10, "property suite", guarded(properties));
    let failed: Vec<usize> = results.iter().filter(|r| !r.2 .0).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
