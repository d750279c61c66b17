//! Tensor products `omega(lambda, 1) (x) omega(lambda, phi)` of elliptic
//! periods, paired with integer cycle rows and integrated over contours in
//! the lambda-plane.

mod quadrature;

pub use quadrature::{periodic_trapezoid, tanh_sinh, QuadratureResult, Schedule, UnitNode};

use crate::error::{Error, Result};
use crate::fuchsian::Location;
use crate::hv_elliptic::{det_deviation, singular_set, standard_basepoint, EllipticPeriods, Phi};
use crate::numerics::elementary::pi;
use crate::numerics::{ratio, BigComplex, BigFloat, Matrix, PrecisionContext, Rational};
use crate::relations::{pairing_row, tensor2};
use crate::transport::{point_on_circle, Piece, PlanePath, PointResolver, Route, Sheet, Transporter};

/// Whether a contour is an open chain or a closed loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContourKind {
    Open,
    Closed,
}

/// A contour in the lambda-plane. Open chains may start and end at singular
/// points; everything else keeps clear of them.
#[derive(Clone, Debug)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub path: PlanePath,
}

impl ContourSpec {
    pub fn open(path: PlanePath) -> Self {
        Self { kind: ContourKind::Open, path }
    }

    pub fn closed(path: PlanePath) -> Result<Self> {
        if let (Some(a), Some(b)) = (path.start(), path.end()) {
            if a.dist_f64(&b) > 1e-20 {
                return Err(Error::EndpointMismatch("closed contour does not return to its start".into()));
            }
        }
        Ok(Self { kind: ContourKind::Closed, path })
    }
}

/// The two elliptic period vectors over one lambda-plane, sharing basepoint,
/// routes and loop radii.
pub struct TensorPlane {
    phi: Phi,
    ctx: PrecisionContext,
    left: EllipticPeriods,
    right: EllipticPeriods,
}

fn finite(phi: &Phi, prec: u32) -> Vec<Location> {
    singular_set(phi, prec).into_iter().map(|s| s.location).filter(|l| !l.is_infinity()).collect()
}

impl TensorPlane {
    pub fn new(phi: &Phi, ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.bits();
        let one = Phi::Exact(ratio(1, 1));
        let (l, r) = (finite(&one, prec), finite(phi, prec));
        let mut all = l.clone();
        all.extend(r.iter().cloned());
        let b = standard_basepoint(&all, prec);
        let left = EllipticPeriods::in_plane(&one, ctx, &r, Some(b.clone()))?;
        let right = EllipticPeriods::in_plane(phi, ctx, &l, Some(b))?;
        Ok(Self { phi: phi.clone(), ctx: ctx.clone(), left, right })
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn prec(&self) -> u32 {
        self.ctx.bits()
    }

    /// `omega(lambda, 1)`.
    pub fn left(&self) -> &EllipticPeriods {
        &self.left
    }

    /// `omega(lambda, phi)`.
    pub fn right(&self) -> &EllipticPeriods {
        &self.right
    }

    pub fn basepoint(&self) -> &BigComplex {
        self.left.basepoint()
    }

    /// Labelled finite singular points of both factors, ordered by real part.
    pub fn singular_points(&self) -> Vec<(String, BigComplex)> {
        let prec = self.prec();
        let mut out: Vec<(String, BigComplex)> = Vec::new();
        let items = self
            .left
            .singularities()
            .iter()
            .map(|s| (s, "lambda(1)"))
            .chain(self.right.singularities().iter().map(|s| (s, "lambda")));
        for (s, side) in items {
            let v = s.location.value(prec).unwrap();
            if let Some(e) = out.iter_mut().find(|(_, w)| w.dist_f64(&v) < 1e-30) {
                e.0 = format!("{} = {side}:{}", e.0, s.label);
                continue;
            }
            out.push((format!("{side}:{}", s.label), v));
        }
        out.sort_by(|a, b| a.1.re.cmp_value(&b.1.re).then(a.1.im.cmp_value(&b.1.im)));
        out
    }

    /// `mu_left (x) mu_right` along a closed path at the basepoint.
    pub fn monodromy_along(&self, path: &PlanePath) -> Result<Matrix<BigComplex>> {
        Ok(self.left.monodromy_along(path)?.kron(&self.right.monodromy_along(path)?))
    }

    /// Tensor monodromy around `s` along the standard loop.
    pub fn monodromy(&self, s: &BigComplex, route: Route) -> Result<Matrix<BigComplex>> {
        self.monodromy_along(&self.left.transporter().standard_loop(self.basepoint(), s, route)?)
    }

    /// `G^T Sigma_{2,2} mu = G^T Sigma_{2,2}` for the total monodromy of a
    /// closed contour, continued from the basepoint along the upper connector.
    pub fn invariance_check(&self, contour: &ContourSpec, g: &[i64; 4]) -> Result<bool> {
        if contour.kind != ContourKind::Closed {
            return Err(Error::Invalid("invariance is defined for closed contours".into()));
        }
        let Some(start) = contour.path.start() else { return Ok(true) };
        let conn = self.left.transporter().connector(self.basepoint(), &start, Route::Upper)?;
        let lp = conn.then(&contour.path)?.then(&conn.reverse())?;
        let mu = self.monodromy_along(&lp)?;
        let prec = self.prec();
        let row = pairing_row(g);
        let tol = self.ctx.target_tolerance.max(1e-30);
        Ok((0..4).all(|j| {
            let v = (0..4).fold(BigComplex::zero(prec), |a, i| a.add_ref(&mu[(i, j)].mul_i64(row[i])));
            v.dist_f64(&BigComplex::from_i64(row[j], prec)) < tol * 1e3
        }))
    }

    /// Tensor monodromy around every finite singular point of the plane,
    /// ordered by real part, as its two elliptic factors.
    pub fn monodromy_table(&self, route: Route) -> Result<Vec<TensorMonodromy>> {
        let t = self.left.transporter();
        self.singular_points()
            .into_iter()
            .map(|(label, point)| {
                let path = t.standard_loop(self.basepoint(), &point, route)?;
                let left = self.left.monodromy_along(&path)?;
                let right = self.right.monodromy_along(&path)?;
                Ok(TensorMonodromy { label, point, left, right })
            })
            .collect()
    }

    fn schedule(&self) -> Schedule {
        Schedule {
            prec: self.prec(),
            tolerance: self.ctx.target_tolerance,
            max_nodes: 4096,
            cutoff_digits: cutoff_digits(&self.ctx),
        }
    }

    /// `int G^T Sigma_{2,2} omega(lambda, 1) (x) omega(lambda, phi) d lambda`.
    pub fn integrate(&self, contour: &ContourSpec, g: &[i64; 4], detour: Route) -> Result<QuadratureResult> {
        let prec = self.prec();
        let pieces = contour.path.pieces();
        if pieces.is_empty() {
            return Ok(QuadratureResult::zero(prec));
        }
        let row: Vec<BigComplex> = pairing_row(g).iter().map(|&k| BigComplex::from_i64(k, prec)).collect();
        let (walk, caps) = self.trim(contour)?;
        let tracks = [
            Track::build(&self.left, &walk, &caps, detour)?,
            Track::build(&self.right, &walk, &caps, detour)?,
        ];
        let integrand = |i: usize, x: &BigComplex, offset: Option<&BigFloat>| -> Result<BigComplex> {
            let a = tracks[0].omega(i, x, offset)?;
            let b = tracks[1].omega(i, x, offset)?;
            let t = [a[0].mul_ref(&b[0]), a[0].mul_ref(&b[1]), a[1].mul_ref(&b[0]), a[1].mul_ref(&b[1])];
            Ok(t.iter().zip(&row).fold(BigComplex::zero(prec), |s, (x, r)| s.add_ref(&x.mul_ref(r))))
        };
        let sch = self.schedule();
        let two_pi = pi(prec).mul_pow2(1);
        let mut total = QuadratureResult::zero(prec);
        for (i, piece) in pieces.iter().enumerate() {
            let r = match piece {
                Piece::Segment { start, end } => {
                    let d = end.sub_ref(start);
                    let f = |n: &UnitNode| -> Result<BigComplex> {
                        let x = if n.u.log2_abs() < -1.0 {
                            start.add_ref(&d.mul_real(&n.u))
                        } else {
                            end.sub_ref(&d.mul_real(&n.one_minus_u))
                        };
                        integrand(i, &x, None)
                    };
                    let r = tanh_sinh(&f, &sch)?;
                    QuadratureResult { value: r.value.mul_ref(&d), ..r }
                }
                Piece::Arc { center, radius, start_turn, sweep } => {
                    let sw = BigFloat::from_rational(sweep, prec);
                    let t0 = BigFloat::from_rational(start_turn, prec);
                    let f = |n: &UnitNode| -> Result<BigComplex> {
                        let off = sw.mul_ref(&n.u);
                        let z = BigComplex::cis(&two_pi.mul_ref(&t0.add_ref(&off))).mul_real(radius);
                        let x = center.add_ref(&z);
                        Ok(integrand(i, &x, Some(&off))?.mul_ref(&z))
                    };
                    let r = tanh_sinh(&f, &sch)?;
                    let k = BigComplex::two_pi_i(prec).mul_real(&sw);
                    QuadratureResult { value: r.value.mul_ref(&k), ..r }
                }
                Piece::Loop { center, radius, base_turn, orientation } => {
                    let o = *orientation as i64;
                    let t0 = BigFloat::from_rational(base_turn, prec);
                    let at = |s: &BigFloat| -> Result<BigComplex> {
                        let off = s.mul_i64(o);
                        let z = BigComplex::cis(&two_pi.mul_ref(&t0.add_ref(&off))).mul_real(radius);
                        let x = center.add_ref(&z);
                        Ok(integrand(i, &x, Some(&off))?.mul_ref(&z))
                    };
                    // around a singular point the integrand jumps at the base
                    let r = if self.is_singular(center) {
                        tanh_sinh(&|n: &UnitNode| at(&n.u), &sch)?
                    } else {
                        periodic_trapezoid(&at, &sch)?
                    };
                    let k = BigComplex::two_pi_i(prec).mul_i64(o);
                    QuadratureResult { value: r.value.mul_ref(&k), ..r }
                }
            };
            total = total.add(&r);
        }
        Ok(total)
    }

    fn is_singular(&self, z: &BigComplex) -> bool {
        self.left.transporter().candidate_at(z).is_some() || self.right.transporter().candidate_at(z).is_some()
    }

    fn reach(&self, z: &BigComplex) -> f64 {
        self.left.transporter().distance_to_singular(z).min(self.right.transporter().distance_to_singular(z))
    }

    /// The walked path with singular ends pulled in, and the ends themselves.
    fn trim(&self, contour: &ContourSpec) -> Result<(PlanePath, Caps)> {
        let pieces = contour.path.pieces();
        let prec = self.prec();
        let mut walk: Vec<Piece> = pieces.to_vec();
        let mut caps = Caps { start: None, end: None };
        let start = contour.path.start().unwrap();
        let end = contour.path.end().unwrap();
        if contour.kind == ContourKind::Open && self.is_singular(&start) {
            let Piece::Segment { start: a, end: b } = &pieces[0] else {
                return Err(Error::Invalid("a contour starting at a singular point must start with a segment".into()));
            };
            let len = a.dist_f64(b);
            let frac = (0.25 * self.reach(a) / len).min(0.25);
            let p = a.add_ref(&b.sub_ref(a).mul_real(&BigFloat::from_f64(frac, prec)));
            walk[0] = Piece::Segment { start: p, end: b.clone() };
            caps.start = Some(a.clone());
        }
        if contour.kind == ContourKind::Open && self.is_singular(&end) {
            let last = walk.len() - 1;
            let Piece::Segment { start: a, end: b } = walk[last].clone() else {
                return Err(Error::Invalid("a contour ending at a singular point must end with a segment".into()));
            };
            let len = a.dist_f64(&b);
            let frac = (0.25 * self.reach(&b) / len).min(0.25);
            let p = b.add_ref(&a.sub_ref(&b).mul_real(&BigFloat::from_f64(frac, prec)));
            walk[last] = Piece::Segment { start: a, end: p };
            caps.end = Some(b);
        }
        let walk = PlanePath::new(walk)?;
        self.left.transporter().validate(&walk)?;
        Ok((walk, caps))
    }

    /// Named contours: `vanishing-1-9`, `vanishing-1-25`, `t3-holomorphic`
    /// (the loops around `0`, `phi/(1+2 sqrt(phi))^2`, `phi`, `phi/(1-2 sqrt(phi))^2`
    /// from the basepoint, in that order) and `t3-circle` (one circle around
    /// the same four points).
    pub fn builtin(&self, name: &str, detour: Route) -> Result<BuiltinContour> {
        let (g1, g2, gamma) = builtin_cycle(name)?;
        let pts = self.right_points()?;
        let one_ninth = BigComplex::from_rational(&ratio(1, 9), self.prec());
        let contour = match name {
            "vanishing-1-9" => ContourSpec::open(self.real_chain(&pts.phi, &one_ninth, detour)?),
            "vanishing-1-25" => ContourSpec::open(self.real_chain(&pts.minus, &one_ninth, detour)?),
            "t3-circle" => ContourSpec::closed(self.enclosing_circle(&pts)?)?,
            _ => {
                let t = self.left.transporter();
                let b = self.basepoint();
                let zero = BigComplex::zero(self.prec());
                let loops = [&zero, &pts.plus, &pts.phi, &pts.minus]
                    .iter()
                    .map(|s| t.standard_loop(b, s, Route::Upper))
                    .collect::<Result<Vec<_>>>()?;
                ContourSpec::closed(PlanePath::compose(&loops)?)?
            }
        };
        Ok(BuiltinContour { name: name.into(), contour, g: tensor2(g1, g2), gamma: Some(gamma) })
    }

    fn right_points(&self) -> Result<RightPoints> {
        let prec = self.prec();
        let get = |label: &str| {
            self.right
                .singularities()
                .iter()
                .find(|s| s.label == label)
                .and_then(|s| s.location.value(prec))
                .ok_or_else(|| Error::UnknownSingularity(format!("lambda={label} at phi={}", self.phi.label())))
        };
        Ok(RightPoints {
            plus: get("phi/(1+2sqrt(phi))^2")?,
            phi: get("phi")?,
            minus: get("phi/(1-2sqrt(phi))^2")?,
        })
    }

    /// Straight chain from `a` to `b`, with half-circle detours around any
    /// singular point strictly between them.
    pub fn real_chain(&self, a: &BigComplex, b: &BigComplex, detour: Route) -> Result<PlanePath> {
        let prec = self.prec();
        let d = b.sub_ref(a);
        let len = a.dist_f64(b);
        if len == 0.0 {
            return Ok(PlanePath::empty());
        }
        let mut inner: Vec<(f64, BigComplex)> = self
            .singular_points()
            .into_iter()
            .filter_map(|(_, z)| {
                let t = z.sub_ref(a).div_ref(&d);
                let (tr, ti) = t.to_f64_pair();
                (ti.abs() * len < 1e-20 && tr > 1e-12 && tr < 1.0 - 1e-12).then_some((tr, z))
            })
            .collect();
        inner.sort_by(|x, y| x.0.total_cmp(&y.0));
        let dir_turn = {
            let (x, y) = d.to_f64_pair();
            Rational::from_float(y.atan2(x) / std::f64::consts::TAU).unwrap_or_default()
        };
        let mut pieces = Vec::new();
        let mut cur = a.clone();
        for (_, z) in inner {
            let r = BigFloat::from_f64(self.left.transporter().exclusion_radius(&z), prec);
            let back = dir_turn.clone() + ratio(1, 2);
            let p_in = point_on_circle(&z, &r, &back);
            let sweep = match detour {
                Route::Upper => ratio(-1, 2),
                Route::Lower => ratio(1, 2),
            };
            let p_out = point_on_circle(&z, &r, &(&back + &sweep));
            pieces.push(Piece::Segment { start: cur, end: p_in });
            pieces.push(Piece::Arc { center: z, radius: r, start_turn: back, sweep });
            cur = p_out;
        }
        pieces.push(Piece::Segment { start: cur, end: b.clone() });
        PlanePath::new(pieces)
    }

    /// Anticlockwise circle around `0` and the three real singularities of the
    /// second factor, clear of every other singular point, started at its top.
    fn enclosing_circle(&self, pts: &RightPoints) -> Result<PlanePath> {
        let prec = self.prec();
        let inside = [BigComplex::zero(prec), pts.plus.clone(), pts.phi.clone(), pts.minus.clone()];
        let xs: Vec<(f64, f64)> = inside.iter().map(|z| z.to_f64_pair()).collect();
        let (x0, x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (y0, y1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let r_in = xs.iter().map(|p| (p.0 - cx).hypot(p.1 - cy)).fold(0.0, f64::max);
        let r_out = self
            .singular_points()
            .iter()
            .map(|(_, z)| z.to_f64_pair())
            .filter(|p| !xs.iter().any(|q| (q.0 - p.0).hypot(q.1 - p.1) < 1e-15))
            .map(|p| (p.0 - cx).hypot(p.1 - cy))
            .fold(f64::INFINITY, f64::min);
        if r_out <= r_in {
            return Err(Error::Invalid("no circle separates the T^3 base points from the others".into()));
        }
        let r = if r_out.is_finite() { (r_in + r_out) / 2.0 } else { 2.0 * r_in };
        let center = BigComplex::from_rational(
            &Rational::from_float(cx).unwrap_or_default(),
            prec,
        )
        .add_ref(&BigComplex::from_f64(0.0, cy, prec));
        PlanePath::new(vec![Piece::Loop {
            center,
            radius: BigFloat::from_f64(r, prec),
            base_turn: ratio(1, 4),
            orientation: 1,
        }])
    }
}

/// Endpoint cutoff: `working_digits / 2`, raised to ten digits past the
/// tolerance when that is stricter, and kept ten digits inside the working precision.
fn cutoff_digits(ctx: &PrecisionContext) -> u32 {
    let want = ctx.tolerance_digits() + 10;
    (ctx.working_digits / 2).max(want).min(ctx.working_digits.saturating_sub(10))
}

struct RightPoints {
    plus: BigComplex,
    phi: BigComplex,
    minus: BigComplex,
}

/// `mu = left (x) right` around one point of the lambda-plane.
#[derive(Clone, Debug)]
pub struct TensorMonodromy {
    pub label: String,
    pub point: BigComplex,
    /// Factor acting on `omega(lambda, 1)`.
    pub left: Matrix<BigComplex>,
    /// Factor acting on `omega(lambda, phi)`.
    pub right: Matrix<BigComplex>,
}

impl TensorMonodromy {
    pub fn kron(&self) -> Matrix<BigComplex> {
        self.left.kron(&self.right)
    }

    pub fn integer_deviation(&self) -> f64 {
        self.left.max_integer_deviation().max(self.right.max_integer_deviation())
    }

    pub fn det_deviation(&self) -> f64 {
        det_deviation(&self.left).max(det_deviation(&self.right))
    }
}

/// A shipped contour with its cycle data.
#[derive(Clone, Debug)]
pub struct BuiltinContour {
    pub name: String,
    pub contour: ContourSpec,
    pub g: [i64; 4],
    pub gamma: Option<[Rational; 4]>,
}

/// `(g1, g2, gamma)` of a named contour: the pairing `g1 (x) g2` and the
/// expected cycle vector.
pub fn builtin_cycle(name: &str) -> Result<([i64; 2], [i64; 2], [Rational; 4])> {
    let z = || ratio(0, 1);
    match name {
        "vanishing-1-9" => Ok(([1, 0], [1, 1], [ratio(1, 2), z(), ratio(-5, 2), ratio(1, 2)])),
        "vanishing-1-25" => Ok(([1, 0], [1, 2], [z(), z(), ratio(-5, 2), z()])),
        "t3-holomorphic" | "t3-circle" => Ok(([0, 1], [0, 1], [ratio(-1, 1), z(), z(), z()])),
        other => Err(Error::Invalid(format!("unknown contour {other}"))),
    }
}

pub const BUILTIN_CONTOURS: [&str; 4] = ["vanishing-1-9", "vanishing-1-25", "t3-holomorphic", "t3-circle"];

struct Caps {
    start: Option<BigComplex>,
    end: Option<BigComplex>,
}

struct Station {
    sheet: Sheet,
    /// Position along the piece, `0` at its start and `1` at its end.
    t: f64,
}

/// Parameter of `x` along `piece`; on arcs the angle is unwrapped next to `near`.
fn piece_param(piece: &Piece, x: &BigComplex, near: f64) -> f64 {
    match piece.as_arc() {
        None => {
            let (a, b) = (piece.start(), piece.end());
            x.sub_ref(&a).div_ref(&b.sub_ref(&a)).to_f64_pair().0
        }
        Some((c, _, t0, sweep)) => {
            let sw = ratio_f64(&sweep);
            let (dx, dy) = x.sub_ref(c).to_f64_pair();
            let turn = dy.atan2(dx) / std::f64::consts::TAU - ratio_f64(&t0);
            let d = turn - near * sw;
            (near * sw + d - d.round()) / sw
        }
    }
}

fn ratio_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Way-station sheets of one period vector along a contour.
struct Track<'a> {
    periods: &'a EllipticPeriods,
    pieces: Vec<Piece>,
    stations: Vec<Vec<Station>>,
}

impl<'a> Track<'a> {
    fn build(periods: &'a EllipticPeriods, walk: &PlanePath, caps: &Caps, route: Route) -> Result<Self> {
        let t = periods.transporter();
        let start = walk.start().unwrap();
        let conn = t.connector(periods.basepoint(), &start, route)?;
        let sheet = t.run(&conn, t.taylor_sheet(periods.basepoint())?)?;
        let mut sheets: Vec<Vec<Sheet>> = (0..walk.pieces().len()).map(|_| Vec::new()).collect();
        let first = sheet.clone();
        let mut last = t.run_recorded(walk, sheet, &mut |i, s| sheets[i].push(s.clone()))?;
        if let Some(a) = &caps.start {
            let mut cap = first;
            let local = t.local_sheet(&t.location_for(a), &cap.pos.clone())?;
            t.switch(&mut cap, local)?;
            sheets[0].insert(0, cap);
        }
        let n = sheets.len();
        sheets[n - 1].push(last.clone());
        if let Some(e) = &caps.end {
            let local = t.local_sheet(&t.location_for(e), &last.pos.clone())?;
            t.switch(&mut last, local)?;
            sheets[n - 1].push(last);
        }
        let stations = sheets
            .into_iter()
            .zip(walk.pieces())
            .map(|(v, piece)| {
                let mut near = 0.0;
                v.into_iter()
                    .map(|sheet| {
                        near = piece_param(piece, &sheet.pos, near);
                        Station { sheet, t: near }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { periods, pieces: walk.pieces().to_vec(), stations })
    }

    /// `omega` at `x` on piece `i`; `offset` is the turn travelled from the
    /// start of an arc or loop piece.
    fn omega(&self, i: usize, x: &BigComplex, offset: Option<&BigFloat>) -> Result<[BigComplex; 2]> {
        let t: &Transporter = self.periods.transporter();
        let piece = &self.pieces[i];
        let arc_center = piece.center();
        let on_centre = |s: &Station| s.sheet.arg.is_some() && arc_center == Some(&s.sheet.center) && s.t.abs() < 1e-9;
        let best = match self.stations[i].iter().find(|s| offset.is_some() && on_centre(s)) {
            Some(s) => s,
            None => {
                let u = match (offset, piece.as_arc()) {
                    (Some(off), Some((_, _, _, sw))) => off.to_f64() / ratio_f64(&sw),
                    _ => piece_param(piece, x, 0.0),
                };
                self.stations[i]
                    .iter()
                    .filter(|s| t.can_eval(&s.sheet, x))
                    .min_by(|a, b| (a.t - u).abs().total_cmp(&(b.t - u).abs()))
                    .ok_or_else(|| Error::OutsideDisk(format!("no way-station covers {}", x.to_sci_string(12))))?
            }
        };
        let s = &best.sheet;
        let prec = t.prec();
        let arg = match (s.arg.as_ref(), offset) {
            (Some(a), Some(off)) if on_centre(best) => Some(a.add_ref(&pi(prec).mul_pow2(1).mul_ref(off))),
            _ => s.arg_at(x),
        };
        let tt = x.sub_ref(&s.center);
        let tol = t.context().tolerance_log2();
        let j = match s.basis.jets(&tt, arg.as_ref(), 1, tol) {
            Err(Error::Truncation { .. }) => {
                let b = t.basis_at(s.basis.location(), 2 * s.basis.truncation_order())?;
                b.jets(&tt, arg.as_ref(), 1, tol)?
            }
            other => other?,
        };
        let v = self.periods.to_integral().mul(&s.coords).mul(&j);
        Ok([v[(0, 0)].clone(), v[(1, 0)].clone()])
    }
}

impl PointResolver for TensorPlane {
    fn resolve(&self, label: &str) -> Result<BigComplex> {
        self.left
            .transporter()
            .resolve_label(label)
            .or_else(|_| self.right.transporter().resolve_label(label))
    }

    fn exclusion_radius(&self, point: &BigComplex) -> f64 {
        self.left.transporter().exclusion_radius(point)
    }

    fn standard_loop(&self, basepoint: &BigComplex, singularity: &BigComplex, route: Route) -> Result<PlanePath> {
        self.left.transporter().standard_loop(basepoint, singularity, route)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv_threefold::ThreefoldPeriods;
    use crate::relations::identity_lhs;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 120, 1e-15).unwrap()
    }

    fn plane(phi: Rational) -> TensorPlane {
        TensorPlane::new(&Phi::Exact(phi), &ctx()).unwrap()
    }

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, ctx().bits())
    }

    #[test]
    fn loops_around_ordinary_points_and_empty_chains_give_zero() {
        let p = plane(ratio(1, 64));
        let l = PlanePath::new(vec![Piece::Loop {
            center: c(0.02, 0.03),
            radius: BigFloat::from_f64(0.01, ctx().bits()),
            base_turn: ratio(1, 4),
            orientation: 1,
        }])
        .unwrap();
        let spec = ContourSpec::closed(l).unwrap();
        assert!(p.invariance_check(&spec, &tensor2([1, 0], [1, 0])).unwrap());
        let r = p.integrate(&spec, &tensor2([1, 0], [1, 1]), Route::Upper).unwrap();
        assert!(r.value.dist_f64(&BigComplex::zero(64)) < 1e-14, "{}", r.value);
        let r = p.integrate(&ContourSpec::open(PlanePath::empty()), &tensor2([1, 0], [1, 1]), Route::Upper).unwrap();
        assert!(r.value.is_zero() && r.node_count == 0);
        let b = p.builtin("vanishing-1-9", Route::Upper).unwrap();
        assert!(p.integrate(&b.contour, &[0, 0, 0, 0], Route::Upper).unwrap().value.is_zero());
    }

    #[test]
    fn t3_contours_agree_and_reverse_to_the_negative() {
        let p = plane(ratio(1, 64));
        let circle = p.builtin("t3-circle", Route::Upper).unwrap();
        let loops = p.builtin("t3-holomorphic", Route::Upper).unwrap();
        assert!(p.invariance_check(&loops.contour, &loops.g).unwrap());
        assert!(p.invariance_check(&circle.contour, &circle.g).unwrap());
        let a = p.integrate(&circle.contour, &circle.g, Route::Upper).unwrap().value;
        let b = p.integrate(&loops.contour, &loops.g, Route::Upper).unwrap().value;
        assert!(a.dist_f64(&b) < 1e-12, "{a} vs {b}");
        let rev = ContourSpec::closed(circle.contour.path.reverse()).unwrap();
        let r = p.integrate(&rev, &circle.g, Route::Upper).unwrap().value;
        assert!(r.add_ref(&a).dist_f64(&BigComplex::zero(64)) < 1e-14);
        // the same circle started from its right-hand point
        let Piece::Loop { center, radius, .. } = circle.contour.path.pieces()[0].clone() else { unreachable!() };
        let moved = PlanePath::new(vec![Piece::Loop { center, radius, base_turn: ratio(0, 1), orientation: 1 }]).unwrap();
        let m = p.integrate(&ContourSpec::closed(moved).unwrap(), &circle.g, Route::Upper).unwrap().value;
        assert!(m.dist_f64(&a) < 1e-14);
        let pi = ThreefoldPeriods::new(&ctx()).unwrap().pi_vector(&BigComplex::from_rational(&ratio(1, 64), ctx().bits())).unwrap();
        assert!(identity_lhs(&circle.gamma.unwrap(), &pi).dist_f64(&a) < 1e-13);
    }

    fn ints(m: &Matrix<BigComplex>) -> Vec<Vec<i64>> {
        (0..2).map(|i| (0..2).map(|j| m[(i, j)].re.round().try_into().unwrap()).collect()).collect()
    }

    #[test]
    fn tensor_monodromy_table() {
        let p = plane(ratio(1, 64));
        let t = p.monodromy_table(Route::Upper).unwrap();
        let got: Vec<(Vec<Vec<i64>>, Vec<Vec<i64>>)> = t.iter().map(|m| (ints(&m.left), ints(&m.right))).collect();
        let id = vec![vec![1, 0], vec![0, 1]];
        let want = vec![
            (id.clone(), id.clone()),
            (vec![vec![1, 0], vec![3, 1]], vec![vec![1, 0], vec![3, 1]]),
            (id.clone(), vec![vec![1, -2], vec![0, 1]]),
            (id.clone(), vec![vec![5, -4], vec![4, -3]]),
            (id.clone(), vec![vec![5, -2], vec![8, -3]]),
            (vec![vec![1, -2], vec![0, 1]], id.clone()),
            (vec![vec![7, -6], vec![6, -5]], id.clone()),
        ];
        assert_eq!(got, want);
        assert!(t.iter().all(|m| m.integer_deviation() < 1e-12 && m.det_deviation() < 1e-12));
    }

    #[test]
    fn pairing_not_invariant_around_zero() {
        let p = plane(ratio(1, 64));
        let l = p.left().transporter().standard_loop(p.basepoint(), &c(0.0, 0.0), Route::Upper).unwrap();
        let spec = ContourSpec::closed(l).unwrap();
        assert!(!p.invariance_check(&spec, &tensor2([1, 0], [1, 0])).unwrap());
        assert!(p.invariance_check(&spec, &tensor2([0, 1], [0, 1])).unwrap());
    }

    #[test]
    fn detours_and_deformations() {
        let p = plane(ratio(1, 64));
        let up = p.builtin("vanishing-1-9", Route::Upper).unwrap();
        assert_eq!(up.contour.path.pieces().len(), 3);
        let a = p.integrate(&up.contour, &up.g, Route::Upper).unwrap().value;
        // a wider detour around 1/36 in the same homotopy class
        let one_ninth = BigComplex::from_rational(&ratio(1, 9), ctx().bits());
        let s = BigComplex::from_rational(&ratio(1, 36), ctx().bits());
        let r = BigFloat::from_f64(0.002, ctx().bits());
        let phi = BigComplex::from_rational(&ratio(1, 64), ctx().bits());
        let p_in = point_on_circle(&s, &r, &ratio(1, 2));
        let p_out = point_on_circle(&s, &r, &ratio(0, 1));
        let wide = PlanePath::new(vec![
            Piece::Segment { start: phi, end: p_in },
            Piece::Arc { center: s, radius: r, start_turn: ratio(1, 2), sweep: ratio(-1, 2) },
            Piece::Segment { start: p_out, end: one_ninth },
        ])
        .unwrap();
        let b = p.integrate(&ContourSpec::open(wide), &up.g, Route::Upper).unwrap().value;
        assert!(a.dist_f64(&b) < 1e-13, "{a} vs {b}");
        // the lower detour is a different cycle
        let low = p.builtin("vanishing-1-9", Route::Lower).unwrap();
        let l = p.integrate(&low.contour, &low.g, Route::Lower).unwrap().value;
        assert!(l.dist_f64(&a) > 1e-3);
    }

    #[test]
    fn vanishing_integral_shrinks_towards_one_ninth() {
        let v: Vec<f64> = [ratio(1, 10), ratio(21, 200), ratio(11, 100)]
            .into_iter()
            .map(|phi| {
                let p = plane(phi);
                let b = p.builtin("vanishing-1-9", Route::Upper).unwrap();
                assert_eq!(b.contour.path.pieces().len(), 1);
                p.integrate(&b.contour, &b.g, Route::Upper).unwrap().value.dist_f64(&BigComplex::zero(64))
            })
            .collect();
        assert!(v[0] > v[1] && v[1] > v[2], "{v:?}");
        assert!(v[2] < 0.2 * v[0], "{v:?}");
    }
}
