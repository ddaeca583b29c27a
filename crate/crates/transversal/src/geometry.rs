//! Points, smooth segments, and piecewise-smooth paths on `[0, 1]`.
//!
//! A [`PiecewisePath`] is an ordered list of [`Segment`]s tiling `[0, 1]`
//! exactly, continuous at every interior breakpoint. Segments come in three
//! closed-form kinds (linear, polynomial, diffeomorphism-mapped), which keeps
//! every derivative exact: nothing in this crate differentiates numerically
//! outside of test oracles.
//!
//! Each segment stores its global parameter span `[t_lo, t_hi]` and is
//! evaluated in the global parameter via the affine local coordinate
//! `u = (t - t_lo) / (t_hi - t_lo)`, so reparameterizing a path (as
//! concatenation and reversal do) only moves breakpoints around.

use serde::{Deserialize, Serialize};

use crate::diffeo::{Diffeomorphism, MapDirection};
use crate::error::{Error, Result};

/// Largest endpoint gap tolerated when joining pieces into a path.
pub const JOIN_TOLERANCE: f64 = 1e-9;

/// A configuration in the ambient space `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinate lists.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point must have dimension >= 1".into()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "point coordinate {bad} is not finite"
            )));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    /// Skips validation; for coordinates already known finite.
    pub(crate) fn new_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist_slices(&self.coords, &other.coords)
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::new_unchecked(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point::new_unchecked(self.coords.iter().map(|c| c * factor).collect())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.coords
    }
}

pub(crate) fn dist_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Which one-sided limit to take at a parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The functional form of one smooth piece.
#[derive(Clone, Debug, PartialEq)]
pub enum SegmentKind {
    /// Straight interpolation from `start` to `end` over the span.
    Linear { start: Point, end: Point },
    /// One coefficient list per coordinate, low degree first, in the local
    /// parameter `u = (t - t_lo) / (t_hi - t_lo)`.
    Polynomial { coefficients: Vec<Vec<f64>> },
    /// A diffeomorphism applied pointwise to an inner segment; derivatives
    /// go through the Jacobian of the chosen direction.
    Mapped {
        inner: Box<Segment>,
        map: Diffeomorphism,
        direction: MapDirection,
    },
}

/// One smooth piece of a path, owning its global parameter span.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    t_lo: f64,
    t_hi: f64,
    kind: SegmentKind,
}

impl Segment {
    pub fn linear(t_lo: f64, t_hi: f64, start: Point, end: Point) -> Result<Self> {
        if start.dim() != end.dim() {
            return Err(Error::DimensionMismatch {
                expected: start.dim(),
                got: end.dim(),
            });
        }
        Self::with_kind(t_lo, t_hi, SegmentKind::Linear { start, end })
    }

    pub fn polynomial(t_lo: f64, t_hi: f64, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput(
                "polynomial segment needs at least one coordinate".into(),
            ));
        }
        if coefficients
            .iter()
            .any(|c| c.is_empty() || c.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::InvalidInput(
                "polynomial coefficients must be nonempty and finite".into(),
            ));
        }
        Self::with_kind(t_lo, t_hi, SegmentKind::Polynomial { coefficients })
    }

    /// Wraps `inner` so every evaluation passes through the chosen direction
    /// of `map`. The span is inherited from `inner`.
    pub fn mapped(inner: Segment, map: Diffeomorphism, direction: MapDirection) -> Result<Self> {
        if map.dimension() != inner.dimension() {
            return Err(Error::DimensionMismatch {
                expected: inner.dimension(),
                got: map.dimension(),
            });
        }
        let (t_lo, t_hi) = (inner.t_lo, inner.t_hi);
        Self::with_kind(
            t_lo,
            t_hi,
            SegmentKind::Mapped {
                inner: Box::new(inner),
                map,
                direction,
            },
        )
    }

    fn with_kind(t_lo: f64, t_hi: f64, kind: SegmentKind) -> Result<Self> {
        if !(t_lo.is_finite() && t_hi.is_finite()) || t_lo >= t_hi {
            return Err(Error::InvalidInput(format!(
                "segment span [{t_lo}, {t_hi}] must satisfy t_lo < t_hi"
            )));
        }
        Ok(Self { t_lo, t_hi, kind })
    }

    pub fn t_lo(&self) -> f64 {
        self.t_lo
    }

    pub fn t_hi(&self) -> f64 {
        self.t_hi
    }

    pub fn kind(&self) -> &SegmentKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        match &self.kind {
            SegmentKind::Linear { start, .. } => start.dim(),
            SegmentKind::Polynomial { coefficients } => coefficients.len(),
            SegmentKind::Mapped { inner, .. } => inner.dimension(),
        }
    }

    /// The same segment re-spanned onto `[t_lo, t_hi]` (affine
    /// reparameterization; the traced curve is unchanged).
    pub(crate) fn with_span(&self, t_lo: f64, t_hi: f64) -> Segment {
        let kind = match &self.kind {
            SegmentKind::Mapped {
                inner,
                map,
                direction,
            } => SegmentKind::Mapped {
                inner: Box::new(inner.with_span(t_lo, t_hi)),
                map: map.clone(),
                direction: *direction,
            },
            other => other.clone(),
        };
        Segment { t_lo, t_hi, kind }
    }

    fn local(&self, t: f64) -> f64 {
        (t - self.t_lo) / (self.t_hi - self.t_lo)
    }

    /// Value at global parameter `t` (valid on the closed span).
    pub fn eval(&self, t: f64) -> Point {
        let mut out = vec![0.0; self.dimension()];
        self.eval_into(t, &mut out);
        Point::new_unchecked(out)
    }

    /// Allocation-free evaluation kernel; `out.len()` must equal the
    /// segment dimension.
    pub(crate) fn eval_into(&self, t: f64, out: &mut [f64]) {
        let u = self.local(t);
        match &self.kind {
            SegmentKind::Linear { start, end } => {
                for ((o, s), e) in out.iter_mut().zip(start.as_slice()).zip(end.as_slice()) {
                    *o = (1.0 - u) * s + u * e;
                }
            }
            SegmentKind::Polynomial { coefficients } => {
                for (o, coeffs) in out.iter_mut().zip(coefficients) {
                    *o = horner(coeffs, u);
                }
            }
            SegmentKind::Mapped {
                inner,
                map,
                direction,
            } => with_scratch(out.len(), |tmp| {
                inner.eval_into(t, tmp);
                map.apply_into(*direction, tmp, out);
            }),
        }
    }

    /// Derivative with respect to the global parameter (valid on the closed
    /// span; segments are smooth, so no side is needed here).
    pub fn derivative(&self, t: f64) -> Point {
        let mut out = vec![0.0; self.dimension()];
        self.derivative_into(t, &mut out);
        Point::new_unchecked(out)
    }

    pub(crate) fn derivative_into(&self, t: f64, out: &mut [f64]) {
        let span = self.t_hi - self.t_lo;
        let u = self.local(t);
        match &self.kind {
            SegmentKind::Linear { start, end } => {
                for ((o, s), e) in out.iter_mut().zip(start.as_slice()).zip(end.as_slice()) {
                    *o = (e - s) / span;
                }
            }
            SegmentKind::Polynomial { coefficients } => {
                for (o, coeffs) in out.iter_mut().zip(coefficients) {
                    *o = horner_derivative(coeffs, u) / span;
                }
            }
            SegmentKind::Mapped {
                inner,
                map,
                direction,
            } => {
                let n = out.len();
                with_scratch(2 * n, |tmp| {
                    let (point, velocity) = tmp.split_at_mut(n);
                    inner.eval_into(t, point);
                    inner.derivative_into(t, velocity);
                    map.pushforward_into(*direction, point, velocity, out);
                });
            }
        }
    }

    /// The segment traced backwards: the reversal evaluated at `u` equals
    /// the original at `1 - u`, re-spanned onto `[t_lo, t_hi]`.
    fn reversed(&self, t_lo: f64, t_hi: f64) -> Segment {
        let kind = match &self.kind {
            SegmentKind::Linear { start, end } => SegmentKind::Linear {
                start: end.clone(),
                end: start.clone(),
            },
            SegmentKind::Polynomial { coefficients } => SegmentKind::Polynomial {
                coefficients: coefficients.iter().map(|c| compose_one_minus_u(c)).collect(),
            },
            SegmentKind::Mapped {
                inner,
                map,
                direction,
            } => SegmentKind::Mapped {
                inner: Box::new(inner.reversed(t_lo, t_hi)),
                map: map.clone(),
                direction: *direction,
            },
        };
        Segment { t_lo, t_hi, kind }
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

fn horner_derivative(coeffs: &[f64], u: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, c)| acc * u + k as f64 * c)
}

/// Coefficients of `p(1 - u)` given those of `p(u)` (binomial expansion).
fn compose_one_minus_u(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut out = vec![0.0; n];
    for (k, &c) in coeffs.iter().enumerate() {
        // (1 - u)^k = sum_j C(k, j) (-u)^j
        let mut binom = 1.0f64;
        for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *slot += c * binom * sign;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

fn with_scratch<R>(len: usize, f: impl FnOnce(&mut [f64]) -> R) -> R {
    if len <= 16 {
        let mut buf = [0.0f64; 16];
        f(&mut buf[..len])
    } else {
        let mut buf = vec![0.0f64; len];
        f(&mut buf)
    }
}

/// A piecewise-smooth path `[0, 1] -> R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePath {
    dimension: usize,
    segments: Vec<Segment>,
}

impl PiecewisePath {
    /// Validates tiling (spans abut exactly, covering `[0, 1]`) and
    /// continuity (endpoint gaps at interior breakpoints within
    /// [`JOIN_TOLERANCE`]).
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidInput("path needs at least one segment".into()))?;
        let dimension = first.dimension();
        for seg in &segments {
            if seg.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: seg.dimension(),
                });
            }
        }
        if first.t_lo != 0.0 || segments.last().unwrap().t_hi != 1.0 {
            return Err(Error::InvalidInput(
                "path segments must cover [0, 1] exactly".into(),
            ));
        }
        for pair in segments.windows(2) {
            if pair[0].t_hi != pair[1].t_lo {
                return Err(Error::InvalidInput(format!(
                    "segment spans do not tile: {} != {}",
                    pair[0].t_hi, pair[1].t_lo
                )));
            }
            let gap = pair[0].eval(pair[0].t_hi).dist(&pair[1].eval(pair[1].t_lo));
            if gap.is_nan() || gap > JOIN_TOLERANCE {
                return Err(Error::DiscontinuousJoin {
                    gap,
                    tolerance: JOIN_TOLERANCE,
                });
            }
        }
        Ok(Self {
            dimension,
            segments,
        })
    }

    /// Single constant piece at `p`.
    pub fn constant(p: Point) -> Self {
        let seg = Segment::linear(0.0, 1.0, p.clone(), p).unwrap();
        Self {
            dimension: seg.dimension(),
            segments: vec![seg],
        }
    }

    /// Single straight piece from `start` to `end`.
    pub fn line(start: Point, end: Point) -> Result<Self> {
        let seg = Segment::linear(0.0, 1.0, start, end)?;
        Ok(Self {
            dimension: seg.dimension(),
            segments: vec![seg],
        })
    }

    /// Straight pieces through the given waypoints at the given breakpoints
    /// (`breakpoints.len() == waypoints.len()`, starting at 0 and ending
    /// at 1).
    pub fn polyline(waypoints: &[Point], breakpoints: &[f64]) -> Result<Self> {
        if waypoints.len() < 2 || waypoints.len() != breakpoints.len() {
            return Err(Error::InvalidInput(
                "polyline needs matching waypoint and breakpoint lists".into(),
            ));
        }
        let mut segments = Vec::with_capacity(waypoints.len() - 1);
        for i in 0..waypoints.len() - 1 {
            segments.push(Segment::linear(
                breakpoints[i],
                breakpoints[i + 1],
                waypoints[i].clone(),
                waypoints[i + 1].clone(),
            )?);
        }
        Self::from_segments(segments)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// The induced strictly increasing list `0 = t_0 < ... < t_k = 1`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bps = Vec::with_capacity(self.segments.len() + 1);
        bps.push(0.0);
        bps.extend(self.segments.iter().map(|s| s.t_hi));
        bps
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfDomain {
                t,
                reason: "[0, 1]",
            });
        }
        Ok(())
    }

    /// Index of the active segment; at a shared breakpoint, `Right` picks
    /// the later segment and `Left` the earlier one.
    pub(crate) fn segment_index(&self, t: f64, side: Side) -> usize {
        let k = self.segments.len();
        match side {
            Side::Right => {
                let i = self.segments.partition_point(|s| s.t_hi <= t);
                i.min(k - 1)
            }
            Side::Left => {
                let i = self.segments.partition_point(|s| s.t_hi < t);
                i.min(k - 1)
            }
        }
    }

    /// `path(t)`. At interior breakpoints the right segment's value is used;
    /// the continuity invariant makes the choice immaterial up to
    /// [`JOIN_TOLERANCE`].
    pub fn eval(&self, t: f64) -> Result<Point> {
        self.check_t(t)?;
        Ok(self.segments[self.segment_index(t, Side::Right)].eval(t))
    }

    /// One-sided derivative at `t`.
    pub fn derivative(&self, t: f64, side: Side) -> Result<Point> {
        self.check_t(t)?;
        if (t == 0.0 && side == Side::Left) || (t == 1.0 && side == Side::Right) {
            return Err(Error::OutOfDomain {
                t,
                reason: "one-sided derivative points outside [0, 1]",
            });
        }
        Ok(self.segments[self.segment_index(t, side)].derivative(t))
    }

    pub fn start(&self) -> Point {
        self.segments[0].eval(0.0)
    }

    pub fn end(&self) -> Point {
        self.segments.last().unwrap().eval(1.0)
    }

    /// Traverses `self` on `[0, 1/2]` and `second` on `[1/2, 1]`.
    pub fn concat(&self, second: &PiecewisePath) -> Result<PiecewisePath> {
        if self.dimension != second.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: second.dimension,
            });
        }
        let gap = self.end().dist(&second.start());
        if gap.is_nan() || gap > JOIN_TOLERANCE {
            return Err(Error::DiscontinuousJoin {
                gap,
                tolerance: JOIN_TOLERANCE,
            });
        }
        let mut segments = Vec::with_capacity(self.segments.len() + second.segments.len());
        for seg in &self.segments {
            segments.push(seg.with_span(seg.t_lo / 2.0, seg.t_hi / 2.0));
        }
        for seg in &second.segments {
            segments.push(seg.with_span(0.5 + seg.t_lo / 2.0, 0.5 + seg.t_hi / 2.0));
        }
        Ok(PiecewisePath {
            dimension: self.dimension,
            segments,
        })
    }

    /// The path traced backwards: `reverse(path)(t) = path(1 - t)`.
    pub fn reverse(&self) -> PiecewisePath {
        let bps = self.breakpoints();
        let k = self.segments.len();
        // Share each reflected breakpoint between adjacent segments so the
        // tiling stays bitwise exact; pin the outer ends to 0 and 1.
        let mut reflected: Vec<f64> = bps.iter().rev().map(|b| 1.0 - b).collect();
        reflected[0] = 0.0;
        reflected[k] = 1.0;
        let segments = self
            .segments
            .iter()
            .rev()
            .enumerate()
            .map(|(i, seg)| seg.reversed(reflected[i], reflected[i + 1]))
            .collect();
        PiecewisePath {
            dimension: self.dimension,
            segments,
        }
    }

    /// Wraps every segment in the chosen direction of `map` (pointwise
    /// composition; derivatives pick up the Jacobian).
    pub fn mapped(&self, map: &Diffeomorphism, direction: MapDirection) -> Result<PiecewisePath> {
        if map.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: map.dimension(),
            });
        }
        let segments = self
            .segments
            .iter()
            .map(|seg| Segment::mapped(seg.clone(), map.clone(), direction))
            .collect::<Result<Vec<_>>>()?;
        Ok(PiecewisePath {
            dimension: self.dimension,
            segments,
        })
    }

    /// The same curve on a new strictly increasing breakpoint list of the
    /// same length (per-segment affine reparameterization).
    pub fn retimed(&self, breakpoints: &[f64]) -> Result<PiecewisePath> {
        if breakpoints.len() != self.segments.len() + 1 {
            return Err(Error::InvalidInput(
                "retiming needs one breakpoint per segment boundary".into(),
            ));
        }
        if breakpoints[0] != 0.0
            || *breakpoints.last().unwrap() != 1.0
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidInput(
                "breakpoints must increase strictly from 0 to 1".into(),
            ));
        }
        let segments = self
            .segments
            .iter()
            .zip(breakpoints.windows(2))
            .map(|(seg, w)| seg.with_span(w[0], w[1]))
            .collect();
        Ok(PiecewisePath {
            dimension: self.dimension,
            segments,
        })
    }

    /// `n` evenly spaced `(t, point)` samples, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<(f64, Point)> {
        assert!(n >= 2, "need at least the two endpoints");
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                (t, self.eval(t).unwrap())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    /// Two straight legs through a fixed apex, the standard vertical-detour
    /// route used throughout the crate's tests.
    fn detour_path(start: &[f64], goal: &[f64], apex: &[f64]) -> PiecewisePath {
        PiecewisePath::polyline(&[pt(start), pt(apex), pt(goal)], &[0.0, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn eval_detour_route() {
        let path = detour_path(&[-4.0, -1.0], &[3.0, 0.0], &[0.0, 1.0]);
        assert_eq!(path.eval(0.0).unwrap(), pt(&[-4.0, -1.0]));
        assert_eq!(path.eval(0.5).unwrap(), pt(&[0.0, 1.0]));
        // First leg: (1-2t)(-4,-1) + 2t(0,1); its second coordinate 4t-1
        // vanishes at t = 1/4 where the first is -2.
        assert!(path.eval(0.25).unwrap().dist(&pt(&[-2.0, 0.0])) <= 1e-12);
        assert_eq!(path.eval(1.0).unwrap(), pt(&[3.0, 0.0]));
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let path = PiecewisePath::constant(pt(&[0.0]));
        assert!(matches!(
            path.eval(1.5).unwrap_err(),
            Error::OutOfDomain { .. }
        ));
        assert!(matches!(
            path.eval(-0.1).unwrap_err(),
            Error::OutOfDomain { .. }
        ));
    }

    #[test]
    fn derivative_picks_the_active_leg() {
        let path = detour_path(&[-4.0, -1.0], &[3.0, 0.0], &[0.0, 1.0]);
        // t = 0.3 lies on the first leg, slope 2 * (apex - start).
        let d = path.derivative(0.3, Side::Right).unwrap();
        assert_eq!(d, pt(&[8.0, 4.0]));
        // Past the apex the slope is 2 * (goal - apex).
        let d = path.derivative(0.7, Side::Right).unwrap();
        assert_eq!(d, pt(&[6.0, -2.0]));
        // Constant paths have zero velocity everywhere.
        let still = PiecewisePath::constant(pt(&[0.0, 0.0]));
        assert_eq!(still.derivative(0.37, Side::Left).unwrap(), pt(&[0.0, 0.0]));
    }

    #[test]
    fn one_sided_derivative_domain() {
        let path = PiecewisePath::constant(pt(&[1.0]));
        assert!(path.derivative(0.0, Side::Left).is_err());
        assert!(path.derivative(1.0, Side::Right).is_err());
        assert!(path.derivative(0.0, Side::Right).is_ok());
        assert!(path.derivative(1.0, Side::Left).is_ok());
    }

    #[test]
    fn mapped_segment_derivative_uses_chain_rule() {
        // Vertical detour from (-1,0) to (1,0) in sheared coordinates,
        // pushed back through the inverse shear. Closed form of the first
        // leg is (-(1-2t), (1-2t)^2 + 4t - 1) with derivative
        // (2, -4(1-2t) + 4); at t = 1/4 that is (2, 2).
        let sheared = detour_path(&[-1.0, -1.0], &[1.0, -1.0], &[0.0, 1.0]);
        let path = sheared
            .mapped(&Diffeomorphism::vertical_shear(), MapDirection::Inverse)
            .unwrap();
        let d = path.derivative(0.25, Side::Right).unwrap();
        assert!(d.dist(&pt(&[2.0, 2.0])) <= 1e-12);
    }

    #[test]
    fn mapped_path_matches_closed_form() {
        let sheared = detour_path(&[-1.0, -1.0], &[1.0, -1.0], &[0.0, 1.0]);
        let path = sheared
            .mapped(&Diffeomorphism::vertical_shear(), MapDirection::Inverse)
            .unwrap();
        // Closed forms per leg, as polynomials in the local parameter.
        let leg1 = Segment::polynomial(0.0, 0.5, vec![vec![-1.0, 1.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let leg2 = Segment::polynomial(0.5, 1.0, vec![vec![0.0, 1.0], vec![1.0, -2.0, 1.0]]).unwrap();
        let closed = PiecewisePath::from_segments(vec![leg1, leg2]).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let a = path.eval(t).unwrap();
            let b = closed.eval(t).unwrap();
            assert!(a.dist(&b) <= 1e-9, "mismatch at t = {t}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn map_under_identity_is_pointwise_equal() {
        let path = detour_path(&[-4.0, -1.0], &[3.0, 0.0], &[0.0, 1.0]);
        let mapped = path
            .mapped(&Diffeomorphism::identity(2), MapDirection::Forward)
            .unwrap();
        for i in 0..=64 {
            let t = i as f64 / 64.0;
            assert!(path.eval(t).unwrap().dist(&mapped.eval(t).unwrap()) <= 1e-15);
        }
    }

    #[test]
    fn map_fixes_shear_fixed_points() {
        let path = PiecewisePath::constant(pt(&[0.0, 1.0]));
        let mapped = path
            .mapped(&Diffeomorphism::vertical_shear(), MapDirection::Inverse)
            .unwrap();
        assert_eq!(mapped.eval(0.5).unwrap(), pt(&[0.0, 1.0]));
    }

    #[test]
    fn map_rejects_dimension_mismatch() {
        let path = PiecewisePath::constant(pt(&[0.0, 0.0, 0.0]));
        let err = path
            .mapped(&Diffeomorphism::vertical_shear(), MapDirection::Forward)
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn concat_halves_parameters() {
        let p = PiecewisePath::line(pt(&[-1.0, 0.0]), pt(&[0.0, 1.0])).unwrap();
        let q = PiecewisePath::line(pt(&[0.0, 1.0]), pt(&[1.0, 0.0])).unwrap();
        let joined = p.concat(&q).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let expect = if t <= 0.5 {
                p.eval(2.0 * t).unwrap()
            } else {
                q.eval(2.0 * t - 1.0).unwrap()
            };
            assert!(joined.eval(t).unwrap().dist(&expect) <= 1e-12);
        }
        assert_eq!(joined.breakpoints(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn concat_of_constants_is_constant() {
        let c = PiecewisePath::constant(pt(&[2.0, -3.0]));
        let joined = c.concat(&c).unwrap();
        for i in 0..=16 {
            let t = i as f64 / 16.0;
            assert_eq!(joined.eval(t).unwrap(), pt(&[2.0, -3.0]));
        }
    }

    #[test]
    fn concat_rejects_gaps() {
        let p = PiecewisePath::constant(pt(&[0.0, 0.0]));
        let q = PiecewisePath::constant(pt(&[0.0, 1.0]));
        assert!(matches!(
            p.concat(&q).unwrap_err(),
            Error::DiscontinuousJoin { .. }
        ));
    }

    #[test]
    fn reverse_reflects_parameter() {
        let path = detour_path(&[-4.0, -1.0], &[3.0, 0.0], &[0.0, 1.0]);
        let rev = path.reverse();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!(rev.eval(t).unwrap().dist(&path.eval(1.0 - t).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn reverse_linear_swaps_endpoints() {
        let p = PiecewisePath::line(pt(&[1.0, 2.0]), pt(&[3.0, 4.0])).unwrap();
        let rev = p.reverse();
        assert_eq!(rev.start(), pt(&[3.0, 4.0]));
        assert_eq!(rev.end(), pt(&[1.0, 2.0]));
        let c = PiecewisePath::constant(pt(&[5.0]));
        assert_eq!(c.reverse().eval(0.3).unwrap(), pt(&[5.0]));
    }

    #[test]
    fn reverse_is_an_involution() {
        let sheared = detour_path(&[-1.0, -1.0], &[1.0, -1.0], &[0.0, 1.0]);
        let path = sheared
            .mapped(&Diffeomorphism::vertical_shear(), MapDirection::Inverse)
            .unwrap();
        let back = path.reverse().reverse();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!(back.eval(t).unwrap().dist(&path.eval(t).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn reverse_polynomial_recomposes_coefficients() {
        // u^2 reversed is (1 - u)^2.
        let seg = Segment::polynomial(0.0, 1.0, vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let path = PiecewisePath::from_segments(vec![seg]).unwrap();
        let rev = path.reverse();
        match rev.segments()[0].kind() {
            SegmentKind::Polynomial { coefficients } => {
                assert_eq!(coefficients[0], vec![1.0, -2.0, 1.0]);
            }
            other => panic!("unexpected kind {other:?}"),
        }
    }

    #[test]
    fn retimed_preserves_the_curve() {
        let path = detour_path(&[0.0, 0.0], &[4.0, 0.0], &[2.0, 2.0]);
        let retimed = path.retimed(&[0.0, 0.125, 1.0]).unwrap();
        assert_eq!(retimed.eval(0.125).unwrap(), pt(&[2.0, 2.0]));
        assert_eq!(retimed.start(), path.start());
        assert_eq!(retimed.end(), path.end());
    }

    #[test]
    fn from_segments_validates_tiling_and_continuity() {
        let a = Segment::linear(0.0, 0.5, pt(&[0.0]), pt(&[1.0])).unwrap();
        let gapped = Segment::linear(0.5, 1.0, pt(&[2.0]), pt(&[3.0])).unwrap();
        assert!(matches!(
            PiecewisePath::from_segments(vec![a.clone(), gapped]).unwrap_err(),
            Error::DiscontinuousJoin { .. }
        ));
        let misaligned = Segment::linear(0.6, 1.0, pt(&[1.0]), pt(&[3.0])).unwrap();
        assert!(PiecewisePath::from_segments(vec![a, misaligned]).is_err());
        assert!(Segment::linear(0.7, 0.7, pt(&[0.0]), pt(&[1.0])).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let sheared = detour_path(&[-1.0, 2.0], &[1.5, -1.0], &[0.0, 1.0]);
        let paths = [
            detour_path(&[-4.0, -1.0], &[3.0, 0.0], &[0.0, 1.0]),
            sheared
                .mapped(&Diffeomorphism::vertical_shear(), MapDirection::Inverse)
                .unwrap(),
            PiecewisePath::from_segments(vec![
                Segment::polynomial(0.0, 1.0, vec![vec![0.5, -1.0, 2.0, 0.25], vec![0.0, 1.0, -3.0]])
                    .unwrap(),
            ])
            .unwrap(),
        ];
        let h = 1e-6;
        for path in &paths {
            for i in 0..32 {
                let t = 0.01 + 0.98 * (i as f64 + 0.5) / 32.0;
                let d = path.derivative(t, Side::Right).unwrap();
                let fwd = path.eval(t + h).unwrap();
                let back = path.eval(t - h).unwrap();
                let fd = fwd.sub(&back).scale(1.0 / (2.0 * h));
                let scale = d.norm().max(1.0);
                assert!(
                    d.dist(&fd) <= 1e-5 * scale,
                    "derivative mismatch at t = {t}: {d:?} vs {fd:?}"
                );
            }
        }
    }
}
