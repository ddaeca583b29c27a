//! Crossing detection and the semi-transversality certificate.
//!
//! A path is semi-transversal to a hypersurface when every interior hit
//! `path(t)` on the surface happens where the path is smooth and the velocity
//! leaves the surface's tangent space. The certifier locates hits of
//! `g(t) = f_c(path(t))` per component, then grades each one by the
//! scale-invariant crossing margin
//!
//! ```text
//! margin = |grad f . velocity| / (|grad f| * |velocity|)
//! ```
//!
//! which is dimensionless, invariant under positive reparameterization of the
//! path and under rescaling of `f`. Hits are located by uniform sampling per
//! segment: sign changes are sharpened by bisection, and sampled minima of
//! `|g|` with no adjacent sign change are sharpened by golden-section search
//! to catch tangential touches (and crossing pairs closer together than the
//! sample spacing). Hits within the endpoint window of 0 or 1 are exempt:
//! the certificate constrains interior parameters only.
//!
//! Sampling cannot prove completeness for adversarial inputs; crossings
//! closer together than the sample spacing may still merge. The segments in
//! scope are low-degree, and the tests double-check event counts against an
//! independent dense-sampling oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PiecewisePath, Point, Side};
use crate::hypersurface::{HypersurfaceComponent, ImplicitHypersurface};

/// Velocities shorter than this count as stationary; the zero vector lies in
/// every tangent space, so a stationary hit always fails.
pub const STATIONARY_SPEED: f64 = 1e-12;

/// Relative agreement required of one-sided derivatives at a breakpoint for
/// the path to count as smooth there.
pub const SMOOTH_REL_TOLERANCE: f64 = 1e-9;

/// Tunable knobs of the crossing detector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionConfig {
    /// Uniform samples of `g` per segment (and per component).
    pub samples_per_segment: usize,
    /// Width of the parameter bracket at which root refinement stops.
    pub bisection_tolerance: f64,
    /// `|f|` below this counts as on the surface.
    pub on_surface_tolerance: f64,
    /// Margins at or below this grade a hit tangential.
    pub margin_tolerance: f64,
    /// Hits within this distance of a breakpoint are graded at the
    /// breakpoint itself.
    pub breakpoint_window: f64,
    /// Hits within this distance of 0 or 1 are exempt.
    pub endpoint_window: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            samples_per_segment: 1024,
            bisection_tolerance: 1e-13,
            on_surface_tolerance: 1e-9,
            margin_tolerance: 1e-6,
            breakpoint_window: 1e-9,
            endpoint_window: 1e-9,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_segment < 16 {
            return Err(Error::InvalidConfig(
                "samples_per_segment must be at least 16".into(),
            ));
        }
        let positive = [
            self.bisection_tolerance,
            self.on_surface_tolerance,
            self.margin_tolerance,
            self.breakpoint_window,
            self.endpoint_window,
        ];
        if positive.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidConfig(
                "detection tolerances must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// How a single hit on the surface grades.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Smooth hit with margin above tolerance: the good case.
    TransversalCrossing,
    /// The velocity lies in the surface tangent space (margin at or below
    /// tolerance).
    TangentialTouch,
    /// One-sided derivatives disagree at the hit.
    NonsmoothHit,
    /// The velocity vanishes at the hit.
    StationaryHit,
}

/// One detected intersection of the path with a surface component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub t: f64,
    pub point: Point,
    pub component: String,
    pub margin: f64,
    pub kind: EventKind,
}

impl CrossingEvent {
    pub fn is_transversal(&self) -> bool {
        self.kind == EventKind::TransversalCrossing
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass,
    Fail,
}

/// The semi-transversality certificate for one (path, surface) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub events: Vec<CrossingEvent>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == VerdictStatus::Pass
    }

    /// Events that break the certificate (everything not transversal).
    pub fn violations(&self) -> impl Iterator<Item = &CrossingEvent> {
        self.events.iter().filter(|e| !e.is_transversal())
    }

    pub fn transversal_count(&self) -> usize {
        self.events.iter().filter(|e| e.is_transversal()).count()
    }
}

/// A root or touch candidate found while scanning one component.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    t: f64,
    g_abs: f64,
    /// Whether `t` was sharpened by bisection/golden-section rather than
    /// taken straight from the sample grid.
    refined: bool,
}

/// Evaluates `g(t) = f_c(segment(t))` and its derivative
/// `g'(t) = grad f . segment'(t)` without allocating per call. Refinement
/// brackets never leave one segment, so segment-level evaluation suffices.
struct SegEval<'a> {
    segment: &'a crate::geometry::Segment,
    component: &'a HypersurfaceComponent,
    point: Vec<f64>,
    gradient: Vec<f64>,
    velocity: Vec<f64>,
}

impl<'a> SegEval<'a> {
    fn new(segment: &'a crate::geometry::Segment, component: &'a HypersurfaceComponent) -> Self {
        let dim = segment.dimension();
        Self {
            segment,
            component,
            point: vec![0.0; dim],
            gradient: vec![0.0; dim],
            velocity: vec![0.0; dim],
        }
    }

    fn g(&mut self, t: f64) -> f64 {
        self.segment.eval_into(t, &mut self.point);
        self.component.value_slice(&self.point)
    }

    /// `g'` resolves the location of a tangential touch far more sharply
    /// than `|g|` can: near a touch `g` itself is quadratically flat and its
    /// tiny values get absorbed against the surface function's scale, while
    /// `g'` crosses zero linearly.
    fn g_prime(&mut self, t: f64) -> f64 {
        self.segment.eval_into(t, &mut self.point);
        self.segment.derivative_into(t, &mut self.velocity);
        self.component.gradient_into(&self.point, &mut self.gradient);
        self.gradient
            .iter()
            .zip(&self.velocity)
            .map(|(a, b)| a * b)
            .sum()
    }
}

fn check_dims(path: &PiecewisePath, surface: &ImplicitHypersurface) -> Result<()> {
    if path.dimension() != surface.dimension() {
        return Err(Error::DimensionMismatch {
            expected: surface.dimension(),
            got: path.dimension(),
        });
    }
    Ok(())
}

/// Locates and grades every interior intersection of the path with the
/// surface, sorted by parameter.
pub fn find_crossings(
    path: &PiecewisePath,
    surface: &ImplicitHypersurface,
    cfg: &DetectionConfig,
) -> Result<Vec<CrossingEvent>> {
    check_dims(path, surface)?;
    cfg.validate()?;

    let dim = path.dimension();
    let n = cfg.samples_per_segment;
    let components = surface.components();
    let mut candidates: Vec<Vec<Candidate>> = vec![Vec::new(); components.len()];

    let mut ts = vec![0.0; n];
    let mut points = vec![0.0; n * dim];
    let mut gs = vec![0.0; n];
    let mut max_spacing = 0.0f64;

    for seg_index in 0..path.segments().len() {
        let seg = &path.segments()[seg_index];
        let (lo, hi) = (seg.t_lo(), seg.t_hi());
        let spacing = (hi - lo) / (n - 1) as f64;
        max_spacing = max_spacing.max(spacing);
        for (j, t) in ts.iter_mut().enumerate() {
            *t = if j == n - 1 { hi } else { lo + spacing * j as f64 };
        }
        for (j, &t) in ts.iter().enumerate() {
            seg.eval_into(t, &mut points[j * dim..(j + 1) * dim]);
        }
        for (ci, component) in components.iter().enumerate() {
            for j in 0..n {
                gs[j] = component.value_slice(&points[j * dim..(j + 1) * dim]);
            }
            let mut eval = SegEval::new(seg, component);
            scan_samples(&mut eval, &ts, &gs, cfg, &mut candidates[ci]);
        }
    }

    let mut graded: Vec<(usize, CrossingEvent)> = Vec::new();
    for (ci, mut cands) in candidates.into_iter().enumerate() {
        // Interior parameters only.
        cands.retain(|c| c.t > cfg.endpoint_window && c.t < 1.0 - cfg.endpoint_window);
        cands.sort_by(|a, b| a.t.total_cmp(&b.t));
        for group in group_candidates(&cands, max_spacing, cfg) {
            let best = group
                .iter()
                .min_by(|a, b| {
                    (!a.refined, a.g_abs, a.t)
                        .partial_cmp(&(!b.refined, b.g_abs, b.t))
                        .unwrap()
                })
                .unwrap();
            graded.push((ci, grade_hit(path, &components[ci], best.t, cfg)));
        }
    }
    graded.sort_by(|(ca, a), (cb, b)| a.t.total_cmp(&b.t).then(ca.cmp(cb)));
    Ok(graded.into_iter().map(|(_, e)| e).collect())
}

/// Scans one segment's samples of one component for candidates.
fn scan_samples(
    eval: &mut SegEval,
    ts: &[f64],
    gs: &[f64],
    cfg: &DetectionConfig,
    out: &mut Vec<Candidate>,
) {
    let n = ts.len();
    let tol = cfg.on_surface_tolerance;
    let strict_change = |j: usize| gs[j] * gs[j + 1] < 0.0;

    // On-surface samples are hits as they stand (this is what catches hits
    // landing exactly on breakpoints, and segments riding the surface).
    // Samples next to a sign change are skipped: bisection of that interval
    // already owns the hit, and flat high-multiplicity roots would otherwise
    // shed duplicates onto the neighboring samples.
    for j in 0..n {
        let near_change =
            (j > 0 && strict_change(j - 1)) || (j < n - 1 && strict_change(j));
        if gs[j].abs() <= tol && !near_change {
            out.push(Candidate {
                t: ts[j],
                g_abs: gs[j].abs(),
                refined: false,
            });
        }
    }

    // Sign changes sharpen to simple roots.
    for j in 0..n - 1 {
        if strict_change(j) {
            let (t, g) = bisect(
                &mut |t| eval.g(t),
                ts[j],
                ts[j + 1],
                gs[j],
                cfg.bisection_tolerance,
            );
            out.push(Candidate {
                t,
                g_abs: g.abs(),
                refined: true,
            });
        }
    }

    // Interior minima of |g| with no adjacent sign change: candidate
    // tangential touches, or crossing pairs inside one sample interval.
    for j in 1..n - 1 {
        if gs[j].abs() <= tol || strict_change(j - 1) || strict_change(j) {
            continue;
        }
        let le = gs[j].abs() <= gs[j - 1].abs() && gs[j].abs() <= gs[j + 1].abs();
        let strict = gs[j].abs() < gs[j - 1].abs() || gs[j].abs() < gs[j + 1].abs();
        if !(le && strict) {
            continue;
        }
        let (t_m, g_m) = refine_extremum(eval, ts[j - 1], ts[j + 1], -gs[j].signum(), cfg);
        if g_m.abs() <= tol {
            out.push(Candidate {
                t: t_m,
                g_abs: g_m.abs(),
                refined: true,
            });
        } else if g_m * gs[j] < 0.0 {
            // The dip crosses zero twice between samples.
            let g_lo = gs[j - 1];
            let (t1, g1) = bisect(&mut |t| eval.g(t), ts[j - 1], t_m, g_lo, cfg.bisection_tolerance);
            let (t2, g2) = bisect(&mut |t| eval.g(t), t_m, ts[j + 1], g_m, cfg.bisection_tolerance);
            out.push(Candidate {
                t: t1,
                g_abs: g1.abs(),
                refined: true,
            });
            out.push(Candidate {
                t: t2,
                g_abs: g2.abs(),
                refined: true,
            });
        }
    }
}

/// Bisection on a sign-changing bracket of `f`; returns the midpoint of the
/// final bracket and `f` there.
fn bisect(
    f: &mut impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    f_lo: f64,
    tol: f64,
) -> (f64, f64) {
    let sign_lo = f_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return (mid, 0.0);
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let ft = f(t);
    (t, ft)
}

/// Locates the extremum of `g` on `[a, b]` (`direction` +1 for a maximum,
/// -1 for a minimum). Prefers bisecting `g'`, which pins flat tangencies to
/// machine precision; falls back to golden-section on `g` when the sampled
/// derivative does not bracket zero.
fn refine_extremum(
    eval: &mut SegEval,
    a: f64,
    b: f64,
    direction: f64,
    cfg: &DetectionConfig,
) -> (f64, f64) {
    let da = eval.g_prime(a);
    let db = eval.g_prime(b);
    let t_m = if da == 0.0 {
        a
    } else if db == 0.0 {
        b
    } else if da.signum() != db.signum() {
        bisect(&mut |t| eval.g_prime(t), a, b, da, cfg.bisection_tolerance).0
    } else {
        golden_extremum(eval, a, b, direction, cfg)
    };
    let g_m = eval.g(t_m);
    (t_m, g_m)
}

/// Golden-section search for the extremum of `g` on `[a, b]` (`direction`
/// +1 to maximize, -1 to minimize).
fn golden_extremum(
    eval: &mut SegEval,
    mut a: f64,
    mut b: f64,
    direction: f64,
    cfg: &DetectionConfig,
) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    // Minimize -direction * g.
    let mut fc = -direction * eval.g(c);
    let mut fd = -direction * eval.g(d);
    while b - a > cfg.bisection_tolerance {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = -direction * eval.g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = -direction * eval.g(d);
        }
        if c >= d {
            break;
        }
    }
    0.5 * (a + b)
}

/// Chains sorted candidates into groups that describe the same hit. Two
/// sharpened roots only merge when essentially identical; grid-resolution
/// candidates merge more eagerly so a segment riding the surface collapses
/// to one event.
fn group_candidates<'a>(
    cands: &'a [Candidate],
    max_spacing: f64,
    cfg: &DetectionConfig,
) -> Vec<&'a [Candidate]> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=cands.len() {
        if i == cands.len() {
            groups.push(&cands[start..i]);
            break;
        }
        let (prev, cur) = (&cands[i - 1], &cands[i]);
        let window = match (prev.refined, cur.refined) {
            (true, true) => 8.0 * cfg.bisection_tolerance,
            (false, false) => 2.0 * max_spacing,
            _ => 1.25 * max_spacing,
        };
        if cur.t - prev.t > window {
            groups.push(&cands[start..i]);
            start = i;
        }
    }
    groups
}

/// One-sided derivatives at `t`, snapped to the nearest breakpoint when `t`
/// falls inside the breakpoint window.
fn sided_derivatives(
    path: &PiecewisePath,
    t: f64,
    cfg: &DetectionConfig,
) -> (Point, Point) {
    let bps = path.breakpoints();
    let snapped = bps[1..bps.len() - 1]
        .iter()
        .copied()
        .find(|b| (t - b).abs() <= cfg.breakpoint_window)
        .unwrap_or(t);
    let left = path.derivative(snapped, Side::Left).unwrap();
    let right = path.derivative(snapped, Side::Right).unwrap();
    (left, right)
}

fn derivatives_agree(left: &Point, right: &Point) -> bool {
    let diff = left.dist(right);
    diff <= SMOOTH_REL_TOLERANCE * left.norm().max(right.norm())
}

/// Whether the path is smooth at interior parameter `t`: either `t` is away
/// from every breakpoint, or the one-sided derivatives at the breakpoint
/// agree to [`SMOOTH_REL_TOLERANCE`].
pub fn smooth_at(path: &PiecewisePath, t: f64, cfg: &DetectionConfig) -> Result<bool> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfDomain {
            t,
            reason: "(0, 1)",
        });
    }
    let (left, right) = sided_derivatives(path, t, cfg);
    Ok(derivatives_agree(&left, &right))
}

/// Grades one located hit.
fn grade_hit(
    path: &PiecewisePath,
    component: &HypersurfaceComponent,
    t: f64,
    cfg: &DetectionConfig,
) -> CrossingEvent {
    let point = path.eval(t).unwrap();
    let (left, right) = sided_derivatives(path, t, cfg);
    let smooth = derivatives_agree(&left, &right);
    let velocity = right;
    let speed = velocity.norm();
    let gradient = component.gradient(&point).unwrap();
    let grad_norm = gradient.norm();
    let margin = if speed < STATIONARY_SPEED || grad_norm < STATIONARY_SPEED {
        0.0
    } else {
        (gradient.dot(&velocity)).abs() / (grad_norm * speed)
    };
    let kind = if !smooth {
        EventKind::NonsmoothHit
    } else if speed < STATIONARY_SPEED {
        EventKind::StationaryHit
    } else if margin <= cfg.margin_tolerance {
        EventKind::TangentialTouch
    } else {
        EventKind::TransversalCrossing
    };
    CrossingEvent {
        t,
        point,
        component: component.label.clone(),
        margin,
        kind,
    }
}

/// Runs crossing detection and grades the whole path: pass means every
/// interior hit is a transversal crossing.
pub fn certify_semi_transversal(
    path: &PiecewisePath,
    surface: &ImplicitHypersurface,
    cfg: &DetectionConfig,
) -> Result<Verdict> {
    let events = find_crossings(path, surface, cfg)?;
    let status = if events.iter().all(CrossingEvent::is_transversal) {
        VerdictStatus::Pass
    } else {
        VerdictStatus::Fail
    };
    Ok(Verdict { status, events })
}

/// Independent brute-force crossing count: strict sign changes of `g` over a
/// dense uniform grid, endpoint windows excluded. Deliberately blind to
/// tangential touches; used to cross-check [`find_crossings`].
pub fn crossing_count_oracle(
    path: &PiecewisePath,
    surface: &ImplicitHypersurface,
    dense_samples: usize,
) -> usize {
    assert!(dense_samples >= 4096, "oracle needs at least 4096 samples");
    let ew = DetectionConfig::default().endpoint_window;
    let dim = path.dimension();
    let mut count = 0;
    let mut point = vec![0.0; dim];
    let mut prev = vec![0.0f64; surface.components().len()];
    for seg in path.segments() {
        let lo = seg.t_lo().max(ew);
        let hi = seg.t_hi().min(1.0 - ew);
        for j in 0..dense_samples {
            let t = lo + (hi - lo) * j as f64 / (dense_samples - 1) as f64;
            seg.eval_into(t, &mut point);
            for (ci, comp) in surface.components().iter().enumerate() {
                let g = comp.value_slice(&point);
                if j > 0 && prev[ci] * g < 0.0 {
                    count += 1;
                }
                prev[ci] = g;
            }
        }
    }
    count
}
