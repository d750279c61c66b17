use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::elementary::pi;
use crate::numerics::{parse_rational, rational_to_string, BigComplex, BigFloat, Rational};

/// `center + radius * e^(2 pi i turn)`.
pub fn point_on_circle(center: &BigComplex, radius: &BigFloat, turn: &Rational) -> BigComplex {
    let prec = center.prec();
    let angle = BigFloat::from_rational(turn, prec).mul_ref(&pi(prec)).mul_pow2(1);
    center.add_ref(&BigComplex::cis(&angle).mul_real(radius))
}

fn f64_pair(z: &BigComplex) -> (f64, f64) {
    z.to_f64_pair()
}

/// One piece of a path in a complex parameter plane. Angles are in turns.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    Segment { start: BigComplex, end: BigComplex },
    /// Positive `sweep` is anticlockwise.
    Arc { center: BigComplex, radius: BigFloat, start_turn: Rational, sweep: Rational },
    /// A full turn starting and ending at `center + radius e^(2 pi i base_turn)`;
    /// `orientation` is `1` (anticlockwise) or `-1`.
    Loop { center: BigComplex, radius: BigFloat, base_turn: Rational, orientation: i8 },
}

impl Piece {
    /// Circle data `(center, radius, start_turn, sweep)` for arcs and loops.
    pub fn as_arc(&self) -> Option<(&BigComplex, &BigFloat, Rational, Rational)> {
        match self {
            Piece::Segment { .. } => None,
            Piece::Arc { center, radius, start_turn, sweep } => Some((center, radius, start_turn.clone(), sweep.clone())),
            Piece::Loop { center, radius, base_turn, orientation } => {
                Some((center, radius, base_turn.clone(), Rational::from_integer((*orientation as i64).into())))
            }
        }
    }

    pub fn start(&self) -> BigComplex {
        match self {
            Piece::Segment { start, .. } => start.clone(),
            _ => {
                let (c, r, t, _) = self.as_arc().unwrap();
                point_on_circle(c, r, &t)
            }
        }
    }

    pub fn end(&self) -> BigComplex {
        match self {
            Piece::Segment { end, .. } => end.clone(),
            _ => {
                let (c, r, t, s) = self.as_arc().unwrap();
                point_on_circle(c, r, &(t + s))
            }
        }
    }

    pub fn reversed(&self) -> Piece {
        match self {
            Piece::Segment { start, end } => Piece::Segment { start: end.clone(), end: start.clone() },
            Piece::Arc { center, radius, start_turn, sweep } => Piece::Arc {
                center: center.clone(),
                radius: radius.clone(),
                start_turn: start_turn + sweep,
                sweep: -sweep.clone(),
            },
            Piece::Loop { center, radius, base_turn, orientation } => Piece::Loop {
                center: center.clone(),
                radius: radius.clone(),
                base_turn: base_turn.clone(),
                orientation: -orientation,
            },
        }
    }

    pub fn key(&self) -> String {
        let z = |c: &BigComplex| c.to_sci_string(45);
        match self {
            Piece::Segment { start, end } => format!("S[{};{}]", z(start), z(end)),
            Piece::Arc { center, radius, start_turn, sweep } => format!(
                "A[{};{};{};{}]",
                z(center),
                radius.to_sci_string(45),
                rational_to_string(start_turn),
                rational_to_string(sweep)
            ),
            Piece::Loop { center, radius, base_turn, orientation } => format!(
                "L[{};{};{};{}]",
                z(center),
                radius.to_sci_string(45),
                rational_to_string(base_turn),
                orientation
            ),
        }
    }

    /// Distance from `p` to the piece, in double precision.
    pub fn distance_to(&self, p: (f64, f64)) -> f64 {
        match self {
            Piece::Segment { start, end } => {
                let (a, b) = (f64_pair(start), f64_pair(end));
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len2 = dx * dx + dy * dy;
                let s = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
                (a.0 + s * dx - p.0).hypot(a.1 + s * dy - p.1)
            }
            _ => {
                let (c, r, t, s) = self.as_arc().unwrap();
                let c = f64_pair(c);
                let r = r.to_f64();
                let (t0, sw) = (rf(&t), rf(&s));
                let d = (p.0 - c.0).hypot(p.1 - c.1);
                if sw.abs() >= 1.0 || d == 0.0 {
                    return (d - r).abs();
                }
                let ang = (p.1 - c.1).atan2(p.0 - c.0) / std::f64::consts::TAU;
                let (lo, hi) = if sw > 0.0 { (t0, t0 + sw) } else { (t0 + sw, t0) };
                let rel = (ang - lo).rem_euclid(1.0);
                if rel <= hi - lo {
                    (d - r).abs()
                } else {
                    let e = |tt: f64| {
                        let a = tt * std::f64::consts::TAU;
                        (c.0 + r * a.cos() - p.0).hypot(c.1 + r * a.sin() - p.1)
                    };
                    e(lo).min(e(hi))
                }
            }
        }
    }

    /// Centre of an arc or loop.
    pub fn center(&self) -> Option<&BigComplex> {
        self.as_arc().map(|(c, _, _, _)| c)
    }
}

fn rf(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(0.0)
}

fn close(a: &BigComplex, b: &BigComplex) -> bool {
    let prec = a.prec().min(b.prec());
    let d = a.sub_ref(b);
    d.is_zero() || d.log2_abs() < 1.0 + a.log2_abs().max(0.0) - prec as f64 / 2.0
}

/// A chain of pieces; each piece starts where the previous one ends.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PlanePath {
    pieces: Vec<Piece>,
}

impl PlanePath {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        for (i, w) in pieces.windows(2).enumerate() {
            if !close(&w[0].end(), &w[1].start()) {
                return Err(Error::EndpointMismatch(format!(
                    "piece {i} ends at {} but piece {} starts at {}",
                    w[0].end().to_sci_string(12),
                    i + 1,
                    w[1].start().to_sci_string(12)
                )));
            }
        }
        Ok(Self { pieces })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn start(&self) -> Option<BigComplex> {
        self.pieces.first().map(|p| p.start())
    }

    pub fn end(&self) -> Option<BigComplex> {
        self.pieces.last().map(|p| p.end())
    }

    /// Concatenation in traversal order.
    pub fn compose(paths: &[PlanePath]) -> Result<Self> {
        Self::new(paths.iter().flat_map(|p| p.pieces.iter().cloned()).collect())
    }

    pub fn then(&self, other: &PlanePath) -> Result<Self> {
        Self::compose(&[self.clone(), other.clone()])
    }

    pub fn reverse(&self) -> Self {
        Self { pieces: self.pieces.iter().rev().map(|p| p.reversed()).collect() }
    }

    /// Stable identifier for memoisation.
    pub fn key(&self) -> String {
        self.pieces.iter().map(|p| p.key()).collect::<Vec<_>>().join("|")
    }

    /// Every piece keeps at least `radii[i]` away from `points[i]`, except
    /// arcs and loops around that very point.
    pub fn check_exclusion(&self, points: &[(f64, f64)], radii: &[f64]) -> Result<()> {
        for (k, piece) in self.pieces.iter().enumerate() {
            let own = piece.center().map(f64_pair);
            for (p, r) in points.iter().zip(radii) {
                if let Some(c) = own {
                    if (c.0 - p.0).hypot(c.1 - p.1) <= 1e-12 * (1.0 + p.0.hypot(p.1)) {
                        continue;
                    }
                }
                let d = piece.distance_to(*p);
                if d < r * (1.0 - 1e-9) {
                    return Err(Error::Exclusion(format!(
                        "piece {k} passes within {d:.3e} of the singular point {:.6e}{:+.6e}i (exclusion radius {r:.3e})",
                        p.0, p.1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A coordinate in a contour file: a real number or `[re, im]`, each an exact
/// rational or decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Real(String),
    Complex([String; 2]),
}

impl Coord {
    pub fn to_complex(&self, prec: u32) -> Result<BigComplex> {
        match self {
            Coord::Real(s) => Ok(BigComplex::from_rational(&parse_rational(s)?, prec)),
            Coord::Complex([a, b]) => Ok(BigComplex::from_rationals(&parse_rational(a)?, &parse_rational(b)?, prec)),
        }
    }
}

/// Route side for standard loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Upper,
    Lower,
}

/// One entry of a contour file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PieceSpec {
    Segment { start: Coord, end: Coord },
    Arc { center: Coord, radius: String, start_turn: String, sweep: String },
    /// `around` is a singularity label such as `lambda=1/9`, or a coordinate via `center`.
    Loop {
        #[serde(default)]
        around: Option<String>,
        #[serde(default)]
        center: Option<Coord>,
        #[serde(default)]
        radius: Option<String>,
        #[serde(default = "quarter")]
        base_turn: String,
        #[serde(default = "one")]
        orientation: i8,
    },
    /// Out from the current point, once around the labelled singularity, and back.
    StandardLoop {
        around: String,
        #[serde(default = "upper")]
        route: Route,
    },
}

fn quarter() -> String {
    "1/4".into()
}

fn one() -> i8 {
    1
}

fn upper() -> Route {
    Route::Upper
}

/// Contour file: pieces in traversal order, starting from `basepoint` when given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourFile {
    #[serde(default)]
    pub basepoint: Option<Coord>,
    pub pieces: Vec<PieceSpec>,
}

/// Resolves singularity labels and builds standard loops for contour files.
pub trait PointResolver {
    fn resolve(&self, label: &str) -> Result<BigComplex>;
    fn exclusion_radius(&self, point: &BigComplex) -> f64;
    fn standard_loop(&self, basepoint: &BigComplex, singularity: &BigComplex, route: Route) -> Result<PlanePath>;
}

impl ContourFile {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("contour file: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self, resolver: &dyn PointResolver, prec: u32) -> Result<PlanePath> {
        let mut pieces: Vec<Piece> = Vec::new();
        let mut current = match &self.basepoint {
            Some(c) => Some(c.to_complex(prec)?),
            None => None,
        };
        for spec in &self.pieces {
            let new: Vec<Piece> = match spec {
                PieceSpec::Segment { start, end } => {
                    vec![Piece::Segment { start: start.to_complex(prec)?, end: end.to_complex(prec)? }]
                }
                PieceSpec::Arc { center, radius, start_turn, sweep } => vec![Piece::Arc {
                    center: center.to_complex(prec)?,
                    radius: BigFloat::from_rational(&parse_rational(radius)?, prec),
                    start_turn: parse_rational(start_turn)?,
                    sweep: parse_rational(sweep)?,
                }],
                PieceSpec::Loop { around, center, radius, base_turn, orientation } => {
                    let c = match (around, center) {
                        (Some(l), _) => resolver.resolve(l)?,
                        (None, Some(c)) => c.to_complex(prec)?,
                        (None, None) => return Err(Error::Parse("loop needs `around` or `center`".into())),
                    };
                    let r = match radius {
                        Some(r) => BigFloat::from_rational(&parse_rational(r)?, prec),
                        None => BigFloat::from_f64(resolver.exclusion_radius(&c), prec),
                    };
                    if orientation.abs() != 1 {
                        return Err(Error::Parse("loop orientation must be 1 or -1".into()));
                    }
                    vec![Piece::Loop { center: c, radius: r, base_turn: parse_rational(base_turn)?, orientation: *orientation }]
                }
                PieceSpec::StandardLoop { around, route } => {
                    let b = current
                        .clone()
                        .ok_or_else(|| Error::Parse("standard_loop needs a basepoint or a preceding piece".into()))?;
                    resolver.standard_loop(&b, &resolver.resolve(around)?, *route)?.pieces
                }
            };
            if let Some(last) = new.last() {
                current = Some(last.end());
            }
            pieces.extend(new);
        }
        PlanePath::new(pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    const P: u32 = 200;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, P)
    }

    #[test]
    fn chaining_is_enforced() {
        let a = Piece::Segment { start: c(0.0, 0.0), end: c(1.0, 0.0) };
        let b = Piece::Segment { start: c(1.0, 0.0), end: c(1.0, 1.0) };
        assert!(PlanePath::new(vec![a.clone(), b.clone()]).is_ok());
        assert!(matches!(PlanePath::new(vec![b.clone(), a.clone()]), Err(Error::EndpointMismatch(_))));
        let p = PlanePath::new(vec![a, b]).unwrap();
        assert_eq!(PlanePath::compose(&[p.clone(), PlanePath::empty()]).unwrap(), p);
        assert_eq!(p.reverse().reverse(), p);
        assert!(p.then(&p.reverse()).is_ok());
    }

    #[test]
    fn loop_endpoints_coincide() {
        let l = Piece::Loop { center: c(0.5, 0.0), radius: BigFloat::from_f64(0.25, P), base_turn: ratio(1, 4), orientation: 1 };
        assert!(l.start().approx_eq(&c(0.5, 0.25), -190.0));
        assert!(l.end().approx_eq(&l.start(), -190.0));
        let arc = Piece::Arc { center: c(0.0, 0.0), radius: BigFloat::from_f64(1.0, P), start_turn: ratio(0, 1), sweep: ratio(1, 2) };
        assert!(arc.end().approx_eq(&c(-1.0, 0.0), -190.0));
        assert!(arc.reversed().end().approx_eq(&c(1.0, 0.0), -190.0));
        assert!((arc.distance_to((0.0, -1.0)) - 2f64.sqrt()).abs() < 1e-12);
        assert!((arc.distance_to((0.0, 0.5)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exclusion_violations_are_reported() {
        let s = Piece::Segment { start: c(0.0, 0.0), end: c(1.0, 0.0) };
        let p = PlanePath::new(vec![s]).unwrap();
        assert!(p.check_exclusion(&[(0.5, 0.2)], &[0.1]).is_ok());
        assert!(matches!(p.check_exclusion(&[(0.5, 0.05)], &[0.1]), Err(Error::Exclusion(_))));
    }

    #[test]
    fn contour_file_round_trip() {
        let json = r#"{"basepoint": "1/200", "pieces": [
            {"type": "segment", "start": "1/200", "end": ["1/200", "1/50"]},
            {"type": "arc", "center": "0", "radius": "1/40", "start_turn": "0", "sweep": "1/2"},
            {"type": "loop", "center": ["0", "1/3"], "radius": "1/10", "orientation": -1}
        ]}"#;
        let f = ContourFile::from_json(json).unwrap();
        let back = ContourFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(f, back);
        assert!(matches!(&f.pieces[2], PieceSpec::Loop { base_turn, .. } if base_turn == "1/4"));
        assert!(ContourFile::from_json("{\"pieces\": [{\"type\": \"spiral\"}]}").is_err());
    }
}
