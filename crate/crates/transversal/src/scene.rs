//! Scene descriptions and the on-disk JSON formats (scenes, paths).
//!
//! A scene pairs an implicit hypersurface with a planner selector; `build`
//! turns it into live objects and checks that the pairing makes sense
//! (dimensions agree, named planners get the surfaces they assume).

use serde::{Deserialize, Serialize};

use crate::diffeo::{Diffeomorphism, MapDirection};
use crate::error::{Error, Result};
use crate::geometry::{PiecewisePath, Point, Segment, SegmentKind};
use crate::hypersurface::{ComponentKind, ImplicitHypersurface};
use crate::planners::{
    concentric_spheres_planner, diffeo_transport, hyperplane_planner, parabola_planner,
    planner_from_contraction, straight_line_planner, tcat_two_circles_contractions,
    two_circles_planner, Planner,
};

/// Planner selector as it appears in scene files: a bare name, or a detailed
/// form for planners that need parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlannerSpec {
    Named(String),
    Detailed(DetailedPlannerSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetailedPlannerSpec {
    /// One of the two straight-line contractions of the two-circles scene
    /// (`which` is 1 for the left half-plane, 2 for the right).
    FromContraction { which: usize },
}

/// A planning scene: ambient dimension, surface, planner selector, and an
/// optional diffeomorphism that transports the selected planner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub dimension: usize,
    pub surface: ImplicitHypersurface,
    pub planner: PlannerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffeo: Option<Diffeomorphism>,
}

pub const PLANNER_NAMES: [&str; 5] = [
    "hyperplane",
    "spheres",
    "two_circles",
    "parabola",
    "straight_line",
];

fn is_two_circles_surface(surface: &ImplicitHypersurface) -> bool {
    if surface.dimension() != 2 || surface.components().len() != 2 {
        return false;
    }
    let mut centers: Vec<f64> = Vec::new();
    for c in surface.components() {
        match &c.kind {
            ComponentKind::Sphere { center, radius } if *radius == 1.0 && center[1] == 0.0 => {
                centers.push(center[0]);
            }
            _ => return false,
        }
    }
    centers.sort_by(f64::total_cmp);
    centers == [-2.0, 2.0]
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("scene: {e}")))?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    /// Instantiates the scene, validating planner/surface compatibility.
    pub fn build(&self) -> Result<(Planner, ImplicitHypersurface)> {
        if self.surface.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: self.surface.dimension(),
            });
        }
        let planner = match &self.planner {
            PlannerSpec::Named(name) => self.named_planner(name)?,
            PlannerSpec::Detailed(DetailedPlannerSpec::FromContraction { which }) => {
                self.require_planar("from_contraction")?;
                let (left, right) = tcat_two_circles_contractions();
                let contraction = match which {
                    1 => left,
                    2 => right,
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "from_contraction: which must be 1 or 2, got {which}"
                        )))
                    }
                };
                planner_from_contraction(contraction, &self.surface)?
            }
        };
        let planner = match &self.diffeo {
            Some(map) => diffeo_transport(planner, map.clone(), &self.surface)?,
            None => planner,
        };
        Ok((planner, self.surface.clone()))
    }

    fn require_planar(&self, name: &str) -> Result<()> {
        if self.dimension != 2 {
            return Err(Error::InvalidInput(format!(
                "planner {name:?} requires a 2-dimensional scene, got dimension {}",
                self.dimension
            )));
        }
        Ok(())
    }

    fn named_planner(&self, name: &str) -> Result<Planner> {
        match name {
            "hyperplane" => Ok(hyperplane_planner(self.dimension)),
            "straight_line" => Ok(straight_line_planner(self.dimension)),
            "spheres" => {
                // Origin-centered sphere radii, for the origin-avoidance check.
                let radii: Vec<f64> = self
                    .surface
                    .components()
                    .iter()
                    .filter_map(|c| match &c.kind {
                        ComponentKind::Sphere { center, radius }
                            if center.as_slice().iter().all(|x| *x == 0.0) =>
                        {
                            Some(*radius)
                        }
                        _ => None,
                    })
                    .collect();
                concentric_spheres_planner(self.dimension - 1, &radii)
            }
            "parabola" => {
                self.require_planar(name)?;
                Ok(parabola_planner())
            }
            "two_circles" => {
                self.require_planar(name)?;
                if !is_two_circles_surface(&self.surface) {
                    return Err(Error::InvalidInput(
                        "two_circles planner requires the surface of two unit circles at (-2,0) and (2,0)"
                            .into(),
                    ));
                }
                Ok(two_circles_planner())
            }
            other => Err(Error::InvalidInput(format!(
                "unknown planner {other:?}; expected one of {PLANNER_NAMES:?} or {{\"kind\":\"from_contraction\",\"which\":1|2}}"
            ))),
        }
    }
}

/// Span-free segment description; spans come from the document breakpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentSpec {
    Linear {
        start: Point,
        end: Point,
    },
    Polynomial {
        coefficients: Vec<Vec<f64>>,
    },
    Mapped {
        map: Diffeomorphism,
        direction: MapDirection,
        inner: Box<SegmentSpec>,
    },
}

impl SegmentSpec {
    fn from_segment(segment: &Segment) -> Self {
        match segment.kind() {
            SegmentKind::Linear { start, end } => SegmentSpec::Linear {
                start: start.clone(),
                end: end.clone(),
            },
            SegmentKind::Polynomial { coefficients } => SegmentSpec::Polynomial {
                coefficients: coefficients.clone(),
            },
            SegmentKind::Mapped {
                inner,
                map,
                direction,
            } => SegmentSpec::Mapped {
                map: map.clone(),
                direction: *direction,
                inner: Box::new(SegmentSpec::from_segment(inner)),
            },
        }
    }

    fn to_segment(&self, t_lo: f64, t_hi: f64) -> Result<Segment> {
        match self {
            SegmentSpec::Linear { start, end } => {
                Segment::linear(t_lo, t_hi, start.clone(), end.clone())
            }
            SegmentSpec::Polynomial { coefficients } => {
                Segment::polynomial(t_lo, t_hi, coefficients.clone())
            }
            SegmentSpec::Mapped {
                map,
                direction,
                inner,
            } => Segment::mapped(inner.to_segment(t_lo, t_hi)?, map.clone(), *direction),
        }
    }
}

/// The on-disk path format: dimension, breakpoints, and span-free segments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathDocument {
    pub dimension: usize,
    pub breakpoints: Vec<f64>,
    pub segments: Vec<SegmentSpec>,
}

impl PathDocument {
    pub fn from_path(path: &PiecewisePath) -> Self {
        Self {
            dimension: path.dimension(),
            breakpoints: path.breakpoints(),
            segments: path.segments().iter().map(SegmentSpec::from_segment).collect(),
        }
    }

    /// Rebuilds the path, re-validating every structural invariant.
    pub fn to_path(&self) -> Result<PiecewisePath> {
        if self.breakpoints.len() != self.segments.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints do not delimit {} segments",
                self.breakpoints.len(),
                self.segments.len()
            )));
        }
        if self.breakpoints.first() != Some(&0.0)
            || self.breakpoints.last() != Some(&1.0)
            || self.breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidInput(
                "breakpoints must increase strictly from 0 to 1".into(),
            ));
        }
        let segments = self
            .segments
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(spec, w)| spec.to_segment(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let path = PiecewisePath::from_segments(segments)?;
        if path.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: path.dimension(),
            });
        }
        Ok(path)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("path: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }
}
