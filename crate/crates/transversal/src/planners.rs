//! Motion planners whose routes stay transversal to a hypersurface, plus the
//! combinators that build new planners from old ones.
//!
//! A [`Planner`] is an ordered open cover of query space with one local
//! algorithm per cover entry. Dispatch is first-match in the stored order,
//! which keeps overlapping covers deterministic. Every local algorithm
//! satisfies the endpoint contract `plan(q)(0) = q.start`,
//! `plan(q)(1) = q.goal`.

use std::sync::Arc;

use crate::diffeo::{Diffeomorphism, MapDirection};
use crate::error::{Error, Result};
use crate::geometry::{PiecewisePath, Point};
use crate::hypersurface::ImplicitHypersurface;
use crate::transversality::DetectionConfig;

/// A start/goal configuration pair.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Query {
    pub start: Point,
    pub goal: Point,
}

impl Query {
    pub fn new(start: Point, goal: Point) -> Result<Self> {
        if start.dim() != goal.dim() {
            return Err(Error::DimensionMismatch {
                expected: start.dim(),
                got: goal.dim(),
            });
        }
        Ok(Self { start, goal })
    }

    pub fn dimension(&self) -> usize {
        self.start.dim()
    }
}

type QueryPredicate = dyn Fn(&Query) -> bool + Send + Sync;
type PlanFn = dyn Fn(&Query) -> PiecewisePath + Send + Sync;

/// One open set of the cover together with its local algorithm.
pub struct PlannerEntry {
    label: String,
    predicate: Box<QueryPredicate>,
    plan: Box<PlanFn>,
}

impl PlannerEntry {
    pub fn new(
        label: impl Into<String>,
        predicate: impl Fn(&Query) -> bool + Send + Sync + 'static,
        plan: impl Fn(&Query) -> PiecewisePath + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            predicate: Box::new(predicate),
            plan: Box::new(plan),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, q: &Query) -> bool {
        (self.predicate)(q)
    }
}

/// An ordered cover of query space with one local algorithm per entry.
pub struct Planner {
    name: String,
    dimension: usize,
    entries: Vec<PlannerEntry>,
}

impl Planner {
    /// A planner from explicit cover entries; an empty cover is permitted
    /// and rejects every query.
    pub fn new(name: impl Into<String>, dimension: usize, entries: Vec<PlannerEntry>) -> Self {
        Self {
            name: name.into(),
            dimension,
            entries,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[PlannerEntry] {
        &self.entries
    }

    pub fn domain_labels(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.label()).collect()
    }

    fn check_query(&self, q: &Query) -> Result<()> {
        if q.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: q.dimension(),
            });
        }
        Ok(())
    }

    /// Label of the first cover entry containing the query, if any.
    pub fn domain_of(&self, q: &Query) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.contains(q))
            .map(|e| e.label())
    }

    pub fn contains(&self, q: &Query) -> bool {
        self.entries.iter().any(|e| e.contains(q))
    }

    /// Plans the query through the first matching cover entry.
    pub fn plan(&self, q: &Query) -> Result<PiecewisePath> {
        self.plan_with_domain(q).map(|(_, path)| path)
    }

    /// Like [`Planner::plan`], also reporting which entry dispatched.
    pub fn plan_with_domain(&self, q: &Query) -> Result<(&str, PiecewisePath)> {
        self.check_query(q)?;
        for entry in &self.entries {
            if entry.contains(q) {
                return Ok((entry.label(), (entry.plan)(q)));
            }
        }
        Err(Error::QueryOutsideAllDomains {
            start: q.start.as_slice().to_vec(),
            goal: q.goal.as_slice().to_vec(),
        })
    }

    fn entry_contains(&self, index: usize, q: &Query) -> bool {
        self.entries[index].contains(q)
    }

    fn plan_entry(&self, index: usize, q: &Query) -> PiecewisePath {
        (self.entries[index].plan)(q)
    }
}

impl std::fmt::Debug for Planner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Planner")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("domains", &self.domain_labels())
            .finish()
    }
}

/// A contraction of an open set to a basepoint along certified tracks:
/// `contract(x)` runs from `x` at 0 to the basepoint at 1.
pub struct Contraction {
    label: String,
    basepoint: Point,
    predicate: Box<dyn Fn(&Point) -> bool + Send + Sync>,
    contract: Box<dyn Fn(&Point) -> PiecewisePath + Send + Sync>,
}

impl Contraction {
    pub fn new(
        label: impl Into<String>,
        basepoint: Point,
        predicate: impl Fn(&Point) -> bool + Send + Sync + 'static,
        contract: impl Fn(&Point) -> PiecewisePath + Send + Sync + 'static,
    ) -> Result<Self> {
        let predicate = Box::new(predicate);
        if !predicate(&basepoint) {
            return Err(Error::InvalidInput(
                "contraction basepoint must lie inside its own domain".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            basepoint,
            predicate,
            contract: Box::new(contract),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.predicate)(p)
    }

    pub fn contract(&self, p: &Point) -> PiecewisePath {
        (self.contract)(p)
    }
}

/// Unit vector along the last axis.
fn last_axis_unit(dimension: usize) -> Point {
    let mut coords = vec![0.0; dimension];
    coords[dimension - 1] = 1.0;
    Point::new(coords).unwrap()
}

/// Global planner that detours through the point `e_n = (0, ..., 0, 1)`:
/// two straight legs `start -> e_n -> goal`. Every interior hit on the
/// hyperplane `x_n = 0` happens with velocity `2(e_n - start)` or
/// `2(goal - e_n)`, whose last component never vanishes there.
pub fn hyperplane_planner(dimension: usize) -> Planner {
    assert!(dimension >= 1);
    let apex = last_axis_unit(dimension);
    Planner::new(
        "hyperplane",
        dimension,
        vec![PlannerEntry::new(
            "global",
            |_| true,
            move |q| {
                PiecewisePath::polyline(
                    &[q.start.clone(), apex.clone(), q.goal.clone()],
                    &[0.0, 0.5, 1.0],
                )
                .unwrap()
            },
        )],
    )
}

/// Global planner for spheres centered at the origin: straight in to the
/// origin, straight back out. Radial legs cross every centered sphere with
/// margin 1. The radii are only used to confirm the origin itself is off
/// the surface.
pub fn concentric_spheres_planner(sphere_dim: usize, radii: &[f64]) -> Result<Planner> {
    let dimension = sphere_dim + 1;
    if let Some(&r) = radii.iter().find(|r| r.is_nan() || **r <= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sphere radius {r} must be positive so the origin stays off the surface"
        )));
    }
    let origin = Point::new(vec![0.0; dimension]).unwrap();
    Ok(Planner::new(
        "spheres",
        dimension,
        vec![PlannerEntry::new(
            "global",
            |_| true,
            move |q| {
                PiecewisePath::polyline(
                    &[q.start.clone(), origin.clone(), q.goal.clone()],
                    &[0.0, 0.5, 1.0],
                )
                .unwrap()
            },
        )],
    ))
}

/// The single straight segment from start to goal. Not transversal in
/// general (a chord can graze a surface); kept as the negative control.
pub fn straight_line_planner(dimension: usize) -> Planner {
    assert!(dimension >= 1);
    Planner::new(
        "straight_line",
        dimension,
        vec![PlannerEntry::new(
            "global",
            |_| true,
            |q| PiecewisePath::line(q.start.clone(), q.goal.clone()).unwrap(),
        )],
    )
}

/// Where the two unit circles centered at `(-2, 0)` and `(2, 0)` meet the
/// horizontal axis. Vertical drops onto the axis at these abscissas would
/// graze a circle, so the cover treats them specially.
pub const TWO_CIRCLES_AXIS_HITS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];

/// Half-width of the guard strips around the axis hits.
pub const TWO_CIRCLES_STRIP_HALF_WIDTH: f64 = 0.25;

fn strip_index(x: f64) -> Option<usize> {
    TWO_CIRCLES_AXIS_HITS
        .iter()
        .position(|a| x > a - TWO_CIRCLES_STRIP_HALF_WIDTH && x < a + TWO_CIRCLES_STRIP_HALF_WIDTH)
}

fn off_axis_hits(x: f64) -> bool {
    TWO_CIRCLES_AXIS_HITS.iter().all(|a| x != *a)
}

/// The circle center a guard strip routes through: strips around the left
/// circle's hits go to `(-2, 0)`, the right ones to `(2, 0)`. Legs ending at
/// a center cross its circle radially.
fn strip_anchor(index: usize) -> Point {
    if index < 2 {
        Point::new(vec![-2.0, 0.0]).unwrap()
    } else {
        Point::new(vec![2.0, 0.0]).unwrap()
    }
}

fn drop_to_axis(p: &Point) -> Point {
    Point::new(vec![p[0], 0.0]).unwrap()
}

fn thirds_route(a: &Point, b: &Point, c: &Point, d: &Point) -> PiecewisePath {
    PiecewisePath::polyline(
        &[a.clone(), b.clone(), c.clone(), d.clone()],
        &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
    )
    .unwrap()
}

/// Four-domain planner for the plane with two disjoint unit circles at
/// `(-2, 0)` and `(2, 0)`.
///
/// A point is "plain" (`A`) when its abscissa differs from every axis hit,
/// and "guarded" (`B`) when it lies in an open strip of half-width 1/4
/// around one. Plain endpoints drop vertically onto the axis; guarded ones
/// run straight to their strip's circle center. The middle leg always runs
/// along the axis, crossing circles at their widest points. Since the strips
/// are open and `A` misses only four abscissas, the four products cover the
/// whole query space.
pub fn two_circles_planner() -> Planner {
    let route_aa = |q: &Query| {
        thirds_route(&q.start, &drop_to_axis(&q.start), &drop_to_axis(&q.goal), &q.goal)
    };
    let route_ab = |q: &Query| {
        let j = strip_index(q.goal[0]).expect("goal inside a guard strip");
        thirds_route(&q.start, &drop_to_axis(&q.start), &strip_anchor(j), &q.goal)
    };
    let route_ba = |q: &Query| {
        let i = strip_index(q.start[0]).expect("start inside a guard strip");
        thirds_route(&q.start, &strip_anchor(i), &drop_to_axis(&q.goal), &q.goal)
    };
    let route_bb = |q: &Query| {
        let i = strip_index(q.start[0]).expect("start inside a guard strip");
        let j = strip_index(q.goal[0]).expect("goal inside a guard strip");
        thirds_route(&q.start, &strip_anchor(i), &strip_anchor(j), &q.goal)
    };
    Planner::new(
        "two_circles",
        2,
        vec![
            PlannerEntry::new(
                "AxA",
                |q: &Query| off_axis_hits(q.start[0]) && off_axis_hits(q.goal[0]),
                route_aa,
            ),
            PlannerEntry::new(
                "AxB",
                |q: &Query| off_axis_hits(q.start[0]) && strip_index(q.goal[0]).is_some(),
                route_ab,
            ),
            PlannerEntry::new(
                "BxA",
                |q: &Query| strip_index(q.start[0]).is_some() && off_axis_hits(q.goal[0]),
                route_ba,
            ),
            PlannerEntry::new(
                "BxB",
                |q: &Query| {
                    strip_index(q.start[0]).is_some() && strip_index(q.goal[0]).is_some()
                },
                route_bb,
            ),
        ],
    )
}

/// Conjugates a planner by a diffeomorphism: queries are pushed forward
/// through `h`, planned in the source space, and the route is pulled back
/// through `h^{-1}`. Transversality survives because the route's velocity
/// pulls back through the Jacobian of `h^{-1}`, which carries tangent
/// spaces of the image surface onto tangent spaces of its preimage.
pub fn diffeo_transport(
    source: Planner,
    map: Diffeomorphism,
    surface_preimage: &ImplicitHypersurface,
) -> Result<Planner> {
    if map.dimension() != source.dimension() {
        return Err(Error::DimensionMismatch {
            expected: source.dimension(),
            got: map.dimension(),
        });
    }
    if surface_preimage.dimension() != source.dimension() {
        return Err(Error::DimensionMismatch {
            expected: source.dimension(),
            got: surface_preimage.dimension(),
        });
    }
    let dimension = source.dimension();
    let name = format!("{}_transported", source.name());
    let source = Arc::new(source);
    let map = Arc::new(map);
    let push = {
        let map = Arc::clone(&map);
        move |q: &Query| -> Query {
            Query {
                start: map.forward(&q.start).unwrap(),
                goal: map.forward(&q.goal).unwrap(),
            }
        }
    };
    let entries = (0..source.entries().len())
        .map(|i| {
            let label = source.entries()[i].label().to_string();
            let (source_p, source_r) = (Arc::clone(&source), Arc::clone(&source));
            let (push_p, push_r) = (push.clone(), push.clone());
            let map = Arc::clone(&map);
            PlannerEntry::new(
                label,
                move |q: &Query| source_p.entry_contains(i, &push_p(q)),
                move |q: &Query| {
                    source_r
                        .plan_entry(i, &push_r(q))
                        .mapped(&map, MapDirection::Inverse)
                        .unwrap()
                },
            )
        })
        .collect();
    Ok(Planner::new(name, dimension, entries))
}

/// The vertical-detour planner carried onto the parabola `y = x^2` by the
/// shear `(x, y) -> (x, y - x^2)`.
pub fn parabola_planner() -> Planner {
    diffeo_transport(
        hyperplane_planner(2),
        Diffeomorphism::vertical_shear(),
        &crate::hypersurface::parabola(),
    )
    .unwrap()
    .with_name("parabola")
}

/// Builds a planner from a contraction: run the start's contraction track
/// forward, then the goal's backward. The basepoint must be off the surface,
/// since the route lingers there at its halfway kink.
pub fn planner_from_contraction(
    contraction: Contraction,
    surface: &ImplicitHypersurface,
) -> Result<Planner> {
    let tolerance = DetectionConfig::default().on_surface_tolerance;
    for component in surface.components() {
        let value = component.value(contraction.basepoint())?;
        if value.abs() <= tolerance {
            return Err(Error::BasepointOnSurface {
                label: component.label.clone(),
                value: value.abs(),
            });
        }
    }
    let dimension = contraction.basepoint().dim();
    let name = format!("contraction_{}", contraction.label());
    let entry_label = format!("{0}x{0}", contraction.label());
    let contraction = Arc::new(contraction);
    let predicate = {
        let c = Arc::clone(&contraction);
        move |q: &Query| c.contains(&q.start) && c.contains(&q.goal)
    };
    let plan = {
        let c = Arc::clone(&contraction);
        move |q: &Query| {
            let outbound = c.contract(&q.start);
            let inbound = c.contract(&q.goal).reverse();
            outbound.concat(&inbound).unwrap()
        }
    };
    Ok(Planner::new(
        name,
        dimension,
        vec![PlannerEntry::new(entry_label, predicate, plan)],
    ))
}

/// The two straight-line contractions of the two-circles scene: half-plane
/// `x < 1/2` contracts onto the left circle's center, half-plane `x > -1/2`
/// onto the right one. Tracks into a circle's center cross it radially and
/// never reach the other circle.
pub fn tcat_two_circles_contractions() -> (Contraction, Contraction) {
    let line_to = |target: Point| {
        move |p: &Point| PiecewisePath::line(p.clone(), target.clone()).unwrap()
    };
    let left = Contraction::new(
        "U1",
        Point::new(vec![-2.0, 0.0]).unwrap(),
        |p: &Point| p[0] < 0.5,
        line_to(Point::new(vec![-2.0, 0.0]).unwrap()),
    )
    .unwrap();
    let right = Contraction::new(
        "U2",
        Point::new(vec![2.0, 0.0]).unwrap(),
        |p: &Point| p[0] > -0.5,
        line_to(Point::new(vec![2.0, 0.0]).unwrap()),
    )
    .unwrap();
    (left, right)
}

/// A planner from an explicit cover (alias of [`Planner::new`] kept for
/// symmetry with the other constructors).
pub fn composite(name: impl Into<String>, dimension: usize, entries: Vec<PlannerEntry>) -> Planner {
    Planner::new(name, dimension, entries)
}
