//! Analytic continuation of local solution bases along paths, transition and
//! monodromy matrices.
//!
//! Solution vectors are columns and continuation acts as `omega -> M omega`,
//! so the matrix of a concatenated path is the product of the pieces' matrices
//! in traversal order.

mod path;

pub use path::{point_on_circle, ContourFile, Coord, Piece, PieceSpec, PlanePath, PointResolver, Route};

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::fuchsian::{singular_candidates, FrobeniusBasis, FuchsianOperator, LocalOperator, Location};
use crate::numerics::elementary::pi;
use crate::numerics::{BigComplex, BigFloat, Matrix, PrecisionContext, Rational};

type Basis = Arc<FrobeniusBasis<BigComplex>>;

const MAX_STEPS: usize = 100_000;

/// The continued solution vector near one expansion centre: `omega = coords * y`
/// with `y` the local basis at `center`. `arg` is the branch of `arg(pos - center)`
/// for singular centres.
#[derive(Clone, Debug)]
pub struct Sheet {
    pub basis: Basis,
    pub center: BigComplex,
    pub coords: Matrix<BigComplex>,
    pub pos: BigComplex,
    pub arg: Option<BigFloat>,
}

impl Sheet {
    /// Branch of `arg(x - center)` reached from `pos` along a short straight move.
    pub fn arg_at(&self, x: &BigComplex) -> Option<BigFloat> {
        self.arg.as_ref().map(|a| {
            let d = x.sub_ref(&self.center).div_ref(&self.pos.sub_ref(&self.center));
            a.add_ref(&d.arg())
        })
    }

    fn offset(&self, x: &BigComplex) -> f64 {
        x.dist_f64(&self.center)
    }
}

fn f64_pair(z: &BigComplex) -> (f64, f64) {
    z.to_f64_pair()
}

fn loc_key(loc: &Location) -> String {
    match loc {
        Location::Exact(r) => crate::numerics::rational_to_string(r),
        Location::Numeric(z) => z.to_sci_string(45),
        Location::Infinity => "inf".into(),
    }
}

/// Continuation engine for one operator at one precision.
pub struct Transporter {
    op: FuchsianOperator,
    ctx: PrecisionContext,
    prec: u32,
    candidates: Vec<(Location, BigComplex)>,
    spacing: Vec<(f64, f64)>,
    labels: Vec<(String, BigComplex)>,
    bases: RwLock<HashMap<String, Basis>>,
    memo: RwLock<HashMap<String, Matrix<BigComplex>>>,
}

impl Transporter {
    pub fn new(op: &FuchsianOperator, ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.bits();
        let candidates: Vec<(Location, BigComplex)> = singular_candidates(op, prec)
            .into_iter()
            .filter_map(|l| l.value(prec).map(|v| (l, v)))
            .collect();
        let spacing = candidates.iter().map(|(_, v)| f64_pair(v)).collect();
        Ok(Self {
            op: op.clone(),
            ctx: ctx.clone(),
            prec,
            candidates,
            spacing,
            labels: Vec::new(),
            bases: RwLock::new(HashMap::new()),
            memo: RwLock::new(HashMap::new()),
        })
    }

    /// Adds points that only shape routes and exclusion radii (for example the
    /// singularities of a second operator sharing the plane).
    pub fn with_spacing_points(mut self, extra: &[BigComplex]) -> Self {
        for z in extra {
            let p = f64_pair(z);
            if !self.spacing.iter().any(|q| (q.0 - p.0).hypot(q.1 - p.1) <= 1e-14 * (1.0 + p.0.hypot(p.1))) {
                self.spacing.push(p);
            }
        }
        self
    }

    /// Names accepted by contour files, e.g. `lambda=1/9`.
    pub fn with_labels(mut self, labels: Vec<(String, BigComplex)>) -> Self {
        self.labels = labels;
        self
    }

    pub fn operator(&self) -> &FuchsianOperator {
        &self.op
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn order(&self) -> usize {
        self.op.order()
    }

    /// Finite candidate singular points of the operator.
    pub fn singular_points(&self) -> Vec<BigComplex> {
        self.candidates.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn singular_locations(&self) -> Vec<Location> {
        self.candidates.iter().map(|(l, _)| l.clone()).collect()
    }

    /// The candidate at `z`, if `z` is one.
    pub fn candidate_at(&self, z: &BigComplex) -> Option<&Location> {
        let scale = 1.0 + z.log2_abs().max(0.0).exp2();
        self.candidates
            .iter()
            .find(|(_, v)| v.dist_f64(z) <= 1e-25 * scale && v.sub_ref(z).log2_abs() < -(self.prec as f64) / 2.0)
            .map(|(l, _)| l)
    }

    /// Distance from `z` to the nearest singular candidate other than `z`.
    pub fn distance_to_singular(&self, z: &BigComplex) -> f64 {
        self.nearest(f64_pair(z))
    }

    /// Distance from `p` to the nearest candidate other than `p` itself.
    fn nearest(&self, p: (f64, f64)) -> f64 {
        self.candidates
            .iter()
            .map(|(_, v)| {
                let q = f64_pair(v);
                (q.0 - p.0).hypot(q.1 - p.1)
            })
            .filter(|d| *d > 1e-25 * (1.0 + p.0.hypot(p.1)))
            .fold(f64::INFINITY, f64::min)
    }

    /// One eighth of the distance from `z` to the nearest other spacing point.
    pub fn exclusion_radius(&self, z: &BigComplex) -> f64 {
        let p = f64_pair(z);
        let d = self
            .spacing
            .iter()
            .map(|q| (q.0 - p.0).hypot(q.1 - p.1))
            .filter(|d| *d > 1e-25 * (1.0 + p.0.hypot(p.1)))
            .fold(f64::INFINITY, f64::min);
        d / 8.0
    }

    fn exclusion_data(&self) -> (Vec<(f64, f64)>, Vec<f64>) {
        let radii = self
            .spacing
            .iter()
            .map(|p| BigComplex::from_f64(p.0, p.1, 64))
            .map(|z| self.exclusion_radius(&z))
            .collect();
        (self.spacing.clone(), radii)
    }

    /// Checks a path against the exclusion radii of the spacing set.
    pub fn validate(&self, path: &PlanePath) -> Result<()> {
        let (pts, radii) = self.exclusion_data();
        path.check_exclusion(&pts, &radii)
    }

    /// Local basis at a location, cached per truncation order.
    pub fn basis_at(&self, loc: &Location, order: usize) -> Result<Basis> {
        let key = format!("{}#{order}", loc_key(loc));
        if let Some(b) = self.bases.read().unwrap().get(&key) {
            return Ok(b.clone());
        }
        let local = LocalOperator::<BigComplex>::new(&self.op, loc, &self.prec)?;
        let radius = match loc.value(self.prec) {
            Some(v) => self.nearest(f64_pair(&v)),
            None => {
                let m = self.candidates.iter().map(|(_, v)| v.dist_f64(&BigComplex::zero(64))).fold(0.0, f64::max);
                if m > 0.0 {
                    1.0 / m
                } else {
                    f64::INFINITY
                }
            }
        };
        let basis = Arc::new(FrobeniusBasis::new(local, order)?.with_radius(radius));
        self.bases.write().unwrap().insert(key, basis.clone());
        Ok(basis)
    }

    pub fn location_for(&self, z: &BigComplex) -> Location {
        self.candidate_at(z).cloned().unwrap_or_else(|| Location::Numeric(z.clone()))
    }

    /// Taylor sheet at an ordinary point with the identity coordinates.
    pub fn taylor_sheet(&self, z: &BigComplex) -> Result<Sheet> {
        if let Some(l) = self.candidate_at(z) {
            return Err(Error::Exclusion(format!("{} is a singular point", l.label())));
        }
        let basis = self.basis_at(&Location::Numeric(z.clone()), self.ctx.truncation_order)?;
        let n = self.order();
        Ok(Sheet { basis, center: z.clone(), coords: Matrix::identity(n, &self.prec), pos: z.clone(), arg: None })
    }

    /// Sheet of the local basis at `loc`, positioned at `pos` on the principal branch.
    pub fn local_sheet(&self, loc: &Location, pos: &BigComplex) -> Result<Sheet> {
        let center = loc.value(self.prec).ok_or_else(|| Error::Invalid("no finite sheet at infinity".into()))?;
        let basis = self.basis_at(loc, self.ctx.truncation_order)?;
        let arg = (!pos.sub_ref(&center).is_zero()).then(|| pos.sub_ref(&center).arg());
        Ok(Sheet { basis, center, coords: Matrix::identity(self.order(), &self.prec), pos: pos.clone(), arg })
    }

    /// Jets of the sheet's local basis at `x`, retrying once with a doubled
    /// truncation order when the tail is too large.
    pub fn local_jets(&self, sheet: &mut Sheet, x: &BigComplex) -> Result<Matrix<BigComplex>> {
        let t = x.sub_ref(&sheet.center);
        let arg = sheet.arg_at(x);
        let tol = self.ctx.tolerance_log2();
        let n = self.order();
        match sheet.basis.jets(&t, arg.as_ref(), n, tol) {
            Err(Error::Truncation { .. }) => {
                let order = 2 * sheet.basis.truncation_order();
                sheet.basis = self.basis_at(sheet.basis.location(), order)?;
                sheet.basis.jets(&t, arg.as_ref(), n, tol)
            }
            other => other,
        }
    }

    /// Values and derivatives of the continued vector at `x` (rows: solutions).
    pub fn jets(&self, sheet: &mut Sheet, x: &BigComplex) -> Result<Matrix<BigComplex>> {
        let j = self.local_jets(sheet, x)?;
        Ok(sheet.coords.mul(&j))
    }

    pub fn can_eval(&self, sheet: &Sheet, x: &BigComplex) -> bool {
        let r = sheet.basis.radius().unwrap_or(f64::INFINITY);
        sheet.offset(x) <= 0.5 * r * (1.0 + 1e-9)
    }

    /// Re-expresses `sheet` in the basis of `new` at `new.pos`.
    pub fn switch(&self, sheet: &mut Sheet, new: Sheet) -> Result<()> {
        let pos = new.pos.clone();
        let ja = self.local_jets(sheet, &pos)?;
        let mut new = new;
        let jb = self.local_jets(&mut new, &pos)?;
        let t = ja.mul(&jb.inverse()?);
        new.coords = sheet.coords.mul(&t);
        *sheet = new;
        Ok(())
    }

    /// Moves to an ordinary point `x` near the sheet, recentring there.
    fn move_to(&self, sheet: &mut Sheet, x: &BigComplex) -> Result<()> {
        if !self.can_eval(sheet, x) {
            self.recenter(sheet)?;
            if !self.can_eval(sheet, x) {
                return Err(Error::OutsideDisk(format!("step to {} is too long", x.to_sci_string(12))));
            }
        }
        let new = self.taylor_sheet(x)?;
        self.switch(sheet, new)
    }

    /// Replaces the sheet by the Taylor sheet at its current position.
    pub fn recenter(&self, sheet: &mut Sheet) -> Result<()> {
        if sheet.arg.is_none() && sheet.center == sheet.pos {
            return Ok(());
        }
        let new = self.taylor_sheet(&sheet.pos.clone())?;
        self.switch(sheet, new)
    }

    fn walk_segment(&self, sheet: &mut Sheet, end: &BigComplex, rec: &mut dyn FnMut(&Sheet)) -> Result<()> {
        let tiny = (-(self.prec as f64) / 2.0).exp2();
        for _ in 0..MAX_STEPS {
            let d = sheet.pos.dist_f64(end);
            if d <= tiny * (1.0 + end.dist_f64(&BigComplex::zero(64))) {
                sheet.pos = end.clone();
                return Ok(());
            }
            let step = 0.5 * self.nearest(f64_pair(&sheet.pos));
            let next = if step >= d {
                end.clone()
            } else {
                let dir = end.sub_ref(&sheet.pos);
                sheet.pos.add_ref(&dir.mul_real(&BigFloat::from_f64(step / d, self.prec)))
            };
            self.move_to(sheet, &next)?;
            rec(sheet);
            if next == *end {
                return Ok(());
            }
        }
        Err(Error::Exclusion("segment approaches a singular point".into()))
    }

    /// Radius small enough for the local basis at `c` to cover the whole circle.
    pub fn centre_covers(&self, c: &BigComplex, radius: f64) -> bool {
        radius <= 0.5 * self.nearest(f64_pair(c)) * (1.0 + 1e-9)
    }

    fn walk_arc(
        &self,
        sheet: &mut Sheet,
        c: &BigComplex,
        radius: &BigFloat,
        t0: &Rational,
        sweep: &Rational,
        rec: &mut dyn FnMut(&Sheet),
    ) -> Result<()> {
        let rho = radius.to_f64();
        let end = point_on_circle(c, radius, &(t0 + sweep));
        if self.centre_covers(c, rho) {
            let loc = self.location_for(c);
            let same = sheet.center == *c && sheet.basis.location() == &loc;
            if !same {
                let new = self.local_sheet(&loc, &sheet.pos.clone())?;
                self.switch(sheet, new)?;
                rec(sheet);
            }
            if let Some(a) = &sheet.arg {
                let turn = BigFloat::from_rational(sweep, self.prec).mul_ref(&pi(self.prec)).mul_pow2(1);
                sheet.arg = Some(a.add_ref(&turn));
            }
            sheet.pos = end;
            return Ok(());
        }
        use num_traits::ToPrimitive;
        let total = sweep.to_f64().unwrap_or(0.0);
        let sign = total.signum();
        let mut done = 0.0f64;
        for _ in 0..MAX_STEPS {
            let r = self.nearest(f64_pair(&sheet.pos));
            let dmax = 0.95 * 2.0 * (r / (4.0 * rho)).min(1.0).asin() / std::f64::consts::TAU;
            if (total - done).abs() <= dmax {
                self.move_to(sheet, &end)?;
                rec(sheet);
                return Ok(());
            }
            done += sign * dmax;
            let turn = t0 + Rational::from_f64(done).unwrap();
            self.move_to(sheet, &point_on_circle(c, radius, &turn))?;
            rec(sheet);
        }
        Err(Error::Exclusion("arc approaches a singular point".into()))
    }

    /// Continues `sheet` along `path`, returning the sheet at the end.
    pub fn run(&self, path: &PlanePath, sheet: Sheet) -> Result<Sheet> {
        self.run_recorded(path, sheet, &mut |_, _| {})
    }

    /// As [`Transporter::run`], reporting every sheet used on each piece (the
    /// sheet at the piece start, and each new sheet after it is built).
    pub fn run_recorded(&self, path: &PlanePath, mut sheet: Sheet, record: &mut dyn FnMut(usize, &Sheet)) -> Result<Sheet> {
        if let Some(s) = path.start() {
            if s.dist_f64(&sheet.pos) > 1e-20 * (1.0 + s.dist_f64(&BigComplex::zero(64))) {
                return Err(Error::EndpointMismatch("path does not start at the sheet position".into()));
            }
        }
        for (i, piece) in path.pieces().iter().enumerate() {
            record(i, &sheet);
            let mut rec = |s: &Sheet| record(i, s);
            let r = match piece.as_arc() {
                None => self.walk_segment(&mut sheet, &piece.end(), &mut rec),
                Some((c, rho, t0, sw)) => self.walk_arc(&mut sheet, c, rho, &t0, &sw, &mut rec),
            };
            r.map_err(|e| match e {
                Error::Truncation { .. } | Error::OutsideDisk(_) => {
                    Error::Precision(format!("piece {i} ({}): {e}", piece.key().chars().take(60).collect::<String>()))
                }
                other => other,
            })?;
        }
        Ok(sheet)
    }

    /// Matrix `T` with (start Taylor basis continued along `path`) = `T` (end Taylor basis).
    pub fn transport(&self, path: &PlanePath) -> Result<Matrix<BigComplex>> {
        let n = self.order();
        let Some(start) = path.start() else {
            return Ok(Matrix::identity(n, &self.prec));
        };
        let key = format!("{}#{}", path.key(), self.ctx.truncation_order);
        if let Some(m) = self.memo.read().unwrap().get(&key) {
            return Ok(m.clone());
        }
        self.validate(path)?;
        let mut sheet = self.run(path, self.taylor_sheet(&start)?)?;
        self.recenter(&mut sheet)?;
        let m = sheet.coords;
        self.memo.write().unwrap().insert(key, m.clone());
        Ok(m)
    }

    /// `J_local(b) J_taylor(b)^-1`: the local basis at `loc`, continued along the
    /// straight line to `b` on the principal branch, in the Taylor basis at `b`.
    pub fn local_in_taylor(&self, loc: &Location, b: &BigComplex) -> Result<Matrix<BigComplex>> {
        let c = loc.value(self.prec).ok_or_else(|| Error::Invalid("no finite sheet at infinity".into()))?;
        let d = b.dist_f64(&c);
        let reach = 0.5 * self.nearest(f64_pair(&c));
        let p0 = if d <= reach {
            b.clone()
        } else {
            c.add_ref(&b.sub_ref(&c).mul_real(&BigFloat::from_f64(reach / d, self.prec)))
        };
        let sheet = self.local_sheet(loc, &p0)?;
        let seg = PlanePath::new(vec![Piece::Segment { start: p0.clone(), end: b.clone() }])?;
        let (pts, radii) = self.exclusion_data();
        let own: Vec<usize> = (0..pts.len()).filter(|&i| (pts[i].0 - f64_pair(&c).0).hypot(pts[i].1 - f64_pair(&c).1) > 1e-25).collect();
        seg.check_exclusion(&own.iter().map(|&i| pts[i]).collect::<Vec<_>>(), &own.iter().map(|&i| radii[i]).collect::<Vec<_>>())?;
        let mut sheet = self.run(&seg, sheet)?;
        self.recenter(&mut sheet)?;
        Ok(sheet.coords)
    }

    /// Height of routes through the upper (or lower) half plane from `b` to `s`.
    fn route_height(&self, b: &BigComplex, s: &BigComplex, route: Route) -> f64 {
        let max_ex = self
            .spacing
            .iter()
            .map(|p| self.exclusion_radius(&BigComplex::from_f64(p.0, p.1, 64)))
            .fold(0.0, f64::max);
        let pad = (b.dist_f64(s) / 2.0).max(4.0 * max_ex);
        let ims = self.spacing.iter().map(|p| p.1).chain([f64_pair(b).1, f64_pair(s).1]);
        match route {
            Route::Upper => ims.fold(f64::NEG_INFINITY, f64::max) + pad,
            Route::Lower => ims.fold(f64::INFINITY, f64::min) - pad,
        }
    }

    /// Straight pieces through `pts`; vertical legs step around any spacing
    /// point lying close to them with a small box on the far side, so the
    /// homotopy class is that of the straight leg pushed off the point.
    fn polyline(&self, pts: &[BigComplex]) -> Vec<Piece> {
        let prec = self.prec;
        let mut out = Vec::new();
        let push = |out: &mut Vec<Piece>, a: &BigComplex, b: &BigComplex| {
            if a != b {
                out.push(Piece::Segment { start: a.clone(), end: b.clone() });
            }
        };
        for w in pts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.re != b.re {
                push(&mut out, a, b);
                continue;
            }
            let x0 = f64_pair(a).0;
            let (ya, yb) = (f64_pair(a).1, f64_pair(b).1);
            let up = yb > ya;
            let mut hits: Vec<((f64, f64), f64)> = self
                .spacing
                .iter()
                .filter_map(|&t| {
                    let r = self.exclusion_radius(&BigComplex::from_f64(t.0, t.1, 64));
                    let rho = 3.0 * r;
                    let inside = t.1 - rho > ya.min(yb) && t.1 + rho < ya.max(yb);
                    ((t.0 - x0).abs() < 2.0 * r && inside).then_some((t, rho))
                })
                .collect();
            hits.sort_by(|p, q| if up { p.0 .1.total_cmp(&q.0 .1) } else { q.0 .1.total_cmp(&p.0 .1) });
            let mut cur = a.clone();
            for ((tx, ty), rho) in hits {
                // near ties count as west of the leg, matching the order used for loop products
                let side = if tx <= x0 + 1e-25 * (1.0 + x0.abs()) { tx + rho } else { tx - rho };
                let (y1, y2) = if up { (ty - rho, ty + rho) } else { (ty + rho, ty - rho) };
                let c = [
                    BigComplex::new(a.re.clone(), BigFloat::from_f64(y1, prec)),
                    BigComplex::from_f64(side, y1, prec),
                    BigComplex::from_f64(side, y2, prec),
                    BigComplex::new(a.re.clone(), BigFloat::from_f64(y2, prec)),
                ];
                push(&mut out, &cur, &c[0]);
                for v in c.windows(2) {
                    push(&mut out, &v[0], &v[1]);
                }
                cur = c[3].clone();
            }
            push(&mut out, &cur, b);
        }
        out
    }

    /// Up (or down) from `b`, across, and straight to `p`.
    pub fn connector(&self, b: &BigComplex, p: &BigComplex, route: Route) -> Result<PlanePath> {
        if b == p {
            return Ok(PlanePath::empty());
        }
        let hb = BigFloat::from_f64(self.route_height(b, p, route), self.prec);
        let legs = [b.clone(), BigComplex::new(b.re.clone(), hb.clone()), BigComplex::new(p.re.clone(), hb), p.clone()];
        let path = PlanePath::new(self.polyline(&legs))?;
        self.validate(&path)?;
        Ok(path)
    }

    /// Out from `b` through the chosen half plane, once anticlockwise around
    /// `s` at its exclusion radius, and back the same way.
    pub fn standard_loop(&self, b: &BigComplex, s: &BigComplex, route: Route) -> Result<PlanePath> {
        let prec = self.prec;
        let rs = self.exclusion_radius(s);
        let max_ex = self
            .spacing
            .iter()
            .map(|p| self.exclusion_radius(&BigComplex::from_f64(p.0, p.1, 64)))
            .fold(0.0, f64::max);
        let pad = (b.dist_f64(s) / 2.0).max(4.0 * max_ex);
        let ims = self.spacing.iter().map(|p| p.1).chain([f64_pair(b).1]);
        let (h, base, dy) = match route {
            Route::Upper => (ims.fold(f64::NEG_INFINITY, f64::max) + pad, Rational::new(1.into(), 4.into()), rs),
            Route::Lower => (ims.fold(f64::INFINITY, f64::min) - pad, Rational::new(3.into(), 4.into()), -rs),
        };
        let hb = BigFloat::from_f64(h, prec);
        let p2 = BigComplex::new(b.re.clone(), hb.clone());
        let p3 = BigComplex::new(s.re.clone(), hb);
        let p4 = s.add_ref(&BigComplex::new(BigFloat::zero(prec), BigFloat::from_f64(dy, prec)));
        let legs = [b.clone(), p2, p3, p4.clone()];
        let mut out = self.polyline(&legs);
        let back: Vec<Piece> = out.iter().rev().map(|p| p.reversed()).collect();
        out.push(Piece::Loop { center: s.clone(), radius: BigFloat::from_f64(rs, prec), base_turn: base, orientation: 1 });
        out.extend(back);
        let path = PlanePath::new(out)?;
        self.validate(&path)?;
        Ok(path)
    }

    /// Monodromy of the Taylor basis at `b` around `s` along the standard loop.
    pub fn monodromy(&self, s: &BigComplex, b: &BigComplex, route: Route) -> Result<Matrix<BigComplex>> {
        self.transport(&self.standard_loop(b, s, route)?)
    }

    /// Up from `b` to a circle enclosing every finite candidate, once
    /// anticlockwise, and back.
    pub fn big_circle(&self, b: &BigComplex) -> Result<PlanePath> {
        let pts: Vec<(f64, f64)> = self.candidates.iter().map(|(_, v)| f64_pair(v)).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in pts.iter().chain([&f64_pair(b)]) {
            x0 = x0.min(p.0);
            x1 = x1.max(p.0);
            y0 = y0.min(p.1);
            y1 = y1.max(p.1);
        }
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let r = 2.0 * pts.iter().chain([&f64_pair(b)]).map(|p| (p.0 - cx).hypot(p.1 - cy)).fold(0.0, f64::max);
        let prec = self.prec;
        let center = BigComplex::from_f64(cx, cy, prec);
        let top = BigFloat::from_f64(cy + r, prec);
        let p2 = BigComplex::new(b.re.clone(), top.clone());
        let p3 = BigComplex::new(center.re.clone(), top);
        let mut out = self.polyline(&[b.clone(), p2.clone(), p3.clone()]);
        let back: Vec<Piece> = out.iter().rev().map(|p| p.reversed()).collect();
        let start = point_on_circle(&center, &BigFloat::from_f64(r, prec), &Rational::new(1.into(), 4.into()));
        // the loop starts at the computed top point; bridge any rounding gap
        if start != p3 {
            out.push(Piece::Segment { start: p3.clone(), end: start.clone() });
        }
        out.push(Piece::Loop {
            center,
            radius: BigFloat::from_f64(r, prec),
            base_turn: Rational::new(1.into(), 4.into()),
            orientation: 1,
        });
        if start != p3 {
            out.push(Piece::Segment { start, end: p3 });
        }
        out.extend(back);
        let path = PlanePath::new(out)?;
        self.validate(&path)?;
        Ok(path)
    }

    /// Monodromy around infinity: the inverse of the big anticlockwise circle.
    pub fn monodromy_at_infinity(&self, b: &BigComplex) -> Result<Matrix<BigComplex>> {
        self.transport(&self.big_circle(b)?)?.inverse()
    }

    /// Whether two paths with common endpoints give the same transition.
    pub fn homotopy_check(&self, p1: &PlanePath, p2: &PlanePath) -> Result<bool> {
        let (a, b) = (self.transport(p1)?, self.transport(p2)?);
        let scale = (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].dist_f64(&BigComplex::zero(64)))
            .fold(1.0, f64::max);
        Ok(a.max_abs_diff(&b) <= self.ctx.target_tolerance * scale * 1e3)
    }

    /// Finite singular point by label, or by an exact coordinate string.
    pub fn resolve_label(&self, label: &str) -> Result<BigComplex> {
        if let Some((_, z)) = self.labels.iter().find(|(l, _)| l == label) {
            return Ok(z.clone());
        }
        let body = label.strip_prefix("lambda=").or_else(|| label.strip_prefix("phi=")).unwrap_or(label);
        let z = crate::numerics::parse_rational(body)
            .map(|r| BigComplex::from_rational(&r, self.prec))
            .map_err(|_| Error::UnknownSingularity(label.into()))?;
        if self.candidate_at(&z).is_none() {
            return Err(Error::UnknownSingularity(label.into()));
        }
        Ok(z)
    }
}

impl PointResolver for Transporter {
    fn resolve(&self, label: &str) -> Result<BigComplex> {
        self.resolve_label(label)
    }

    fn exclusion_radius(&self, point: &BigComplex) -> f64 {
        Transporter::exclusion_radius(self, point)
    }

    fn standard_loop(&self, basepoint: &BigComplex, singularity: &BigComplex, route: Route) -> Result<PlanePath> {
        Transporter::standard_loop(self, basepoint, singularity, route)
    }
}

/// `P M P^-1`: a matrix written for `y` rewritten for `omega = P y`.
pub fn conjugate(m: &Matrix<BigComplex>, p: &Matrix<BigComplex>) -> Result<Matrix<BigComplex>> {
    Ok(p.mul(m).mul(&p.inverse()?))
}
