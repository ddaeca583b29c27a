//! Implicit codimension-1 hypersurfaces: disjoint unions of regular level
//! sets `f_c = 0`, with closed-form values and gradients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// One regular implicit component of a hypersurface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypersurfaceComponent {
    pub label: String,
    #[serde(flatten)]
    pub kind: ComponentKind,
}

/// Implicit kinds. Spheres use the squared-distance function
/// `|p - c|^2 - r^2`, which stays smooth through the center; planner routes
/// here routinely pass through sphere centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    /// `f(p) = normal . p - offset`.
    Hyperplane { normal: Point, offset: f64 },
    /// `f(p) = |p - center|^2 - radius^2`.
    Sphere { center: Point, radius: f64 },
    /// `f(x, y) = y - x^2` (planar only).
    Parabola,
    /// `f(x, y) = x - y` (planar only).
    DiagonalLine,
}

impl HypersurfaceComponent {
    pub fn hyperplane(label: impl Into<String>, normal: Point, offset: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::InvalidInput("hyperplane normal must be nonzero".into()));
        }
        Ok(Self {
            label: label.into(),
            kind: ComponentKind::Hyperplane { normal, offset },
        })
    }

    pub fn sphere(label: impl Into<String>, center: Point, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidInput("sphere radius must be positive".into()));
        }
        Ok(Self {
            label: label.into(),
            kind: ComponentKind::Sphere { center, radius },
        })
    }

    pub fn parabola(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            kind: ComponentKind::Parabola,
        }
    }

    pub fn diagonal_line(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            kind: ComponentKind::DiagonalLine,
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.kind {
            ComponentKind::Hyperplane { normal, .. } => normal.dim(),
            ComponentKind::Sphere { center, .. } => center.dim(),
            ComponentKind::Parabola | ComponentKind::DiagonalLine => 2,
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got,
            });
        }
        Ok(())
    }

    /// `f_c(p)`.
    pub fn value(&self, p: &Point) -> Result<f64> {
        self.check_dim(p.dim())?;
        Ok(self.value_slice(p.as_slice()))
    }

    /// Kernel behind [`HypersurfaceComponent::value`]; the dimension must
    /// already match.
    pub(crate) fn value_slice(&self, p: &[f64]) -> f64 {
        match &self.kind {
            ComponentKind::Hyperplane { normal, offset } => {
                let dot: f64 = normal.as_slice().iter().zip(p).map(|(n, x)| n * x).sum();
                dot - offset
            }
            ComponentKind::Sphere { center, radius } => {
                let d2: f64 = center
                    .as_slice()
                    .iter()
                    .zip(p)
                    .map(|(c, x)| (x - c) * (x - c))
                    .sum();
                d2 - radius * radius
            }
            ComponentKind::Parabola => p[1] - p[0] * p[0],
            ComponentKind::DiagonalLine => p[0] - p[1],
        }
    }

    /// Closed-form gradient of `f_c` at `p`. Its orthogonal complement is the
    /// tangent space of the component wherever `f_c(p) = 0`.
    pub fn gradient(&self, p: &Point) -> Result<Point> {
        self.check_dim(p.dim())?;
        let mut out = vec![0.0; p.dim()];
        self.gradient_into(p.as_slice(), &mut out);
        Ok(Point::new_unchecked(out))
    }

    pub(crate) fn gradient_into(&self, p: &[f64], out: &mut [f64]) {
        match &self.kind {
            ComponentKind::Hyperplane { normal, .. } => out.copy_from_slice(normal.as_slice()),
            ComponentKind::Sphere { center, .. } => {
                for ((o, x), c) in out.iter_mut().zip(p).zip(center.as_slice()) {
                    *o = 2.0 * (x - c);
                }
            }
            ComponentKind::Parabola => {
                out[0] = -2.0 * p[0];
                out[1] = 1.0;
            }
            ComponentKind::DiagonalLine => {
                out[0] = 1.0;
                out[1] = -1.0;
            }
        }
    }
}

/// A disjoint union of implicit components sharing one ambient dimension.
///
/// Disjointness is not verified in general; the built-in scenes are
/// manifestly disjoint and spot-checked by sampling in the tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<HypersurfaceComponent>", into = "Vec<HypersurfaceComponent>")]
pub struct ImplicitHypersurface {
    dimension: usize,
    components: Vec<HypersurfaceComponent>,
}

impl ImplicitHypersurface {
    pub fn new(components: Vec<HypersurfaceComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidInput("hypersurface needs at least one component".into()))?;
        let dimension = first.dimension();
        for c in &components {
            if c.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: c.dimension(),
                });
            }
        }
        Ok(Self {
            dimension,
            components,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[HypersurfaceComponent] {
        &self.components
    }

    /// The component minimizing `|f_c(p)|`, with its value; ties go to the
    /// earlier component.
    pub fn nearest_component_value(&self, p: &Point) -> Result<(&str, f64)> {
        let mut best: Option<(&str, f64)> = None;
        for c in &self.components {
            let v = c.value(p)?;
            match &best {
                Some((_, bv)) if v.abs() >= bv.abs() => {}
                _ => best = Some((c.label.as_str(), v)),
            }
        }
        Ok(best.unwrap())
    }

}

impl TryFrom<Vec<HypersurfaceComponent>> for ImplicitHypersurface {
    type Error = Error;
    fn try_from(components: Vec<HypersurfaceComponent>) -> Result<Self> {
        ImplicitHypersurface::new(components)
    }
}

impl From<ImplicitHypersurface> for Vec<HypersurfaceComponent> {
    fn from(s: ImplicitHypersurface) -> Self {
        s.components
    }
}

/// `R^{n-1} x {0}` inside `R^n`: the hyperplane with normal along the last
/// axis.
pub fn last_axis_hyperplane(dimension: usize, label: impl Into<String>) -> ImplicitHypersurface {
    let mut normal = vec![0.0; dimension];
    normal[dimension - 1] = 1.0;
    ImplicitHypersurface::new(vec![HypersurfaceComponent::hyperplane(
        label,
        Point::new(normal).unwrap(),
        0.0,
    )
    .unwrap()])
    .unwrap()
}

/// Concentric spheres about the origin in `R^{d+1}`, one per radius, labeled
/// `S1, S2, ...` in the given order.
pub fn concentric_spheres(sphere_dim: usize, radii: &[f64]) -> Result<ImplicitHypersurface> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("need at least one radius".into()));
    }
    let ambient = sphere_dim + 1;
    let origin = Point::new(vec![0.0; ambient]).unwrap();
    let components = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| HypersurfaceComponent::sphere(format!("S{}", i + 1), origin.clone(), r))
        .collect::<Result<Vec<_>>>()?;
    ImplicitHypersurface::new(components)
}

/// The two disjoint unit circles centered at `(-2, 0)` and `(2, 0)`.
pub fn two_unit_circles() -> ImplicitHypersurface {
    ImplicitHypersurface::new(vec![
        HypersurfaceComponent::sphere("S1", Point::new(vec![-2.0, 0.0]).unwrap(), 1.0).unwrap(),
        HypersurfaceComponent::sphere("S2", Point::new(vec![2.0, 0.0]).unwrap(), 1.0).unwrap(),
    ])
    .unwrap()
}

/// The unit circle about the origin.
pub fn unit_circle() -> ImplicitHypersurface {
    ImplicitHypersurface::new(vec![HypersurfaceComponent::sphere(
        "S1",
        Point::new(vec![0.0, 0.0]).unwrap(),
        1.0,
    )
    .unwrap()])
    .unwrap()
}

/// The parabola `y = x^2` in the plane.
pub fn parabola() -> ImplicitHypersurface {
    ImplicitHypersurface::new(vec![HypersurfaceComponent::parabola("Z")]).unwrap()
}

/// The diagonal `x = y` in the plane.
pub fn diagonal_line() -> ImplicitHypersurface {
    ImplicitHypersurface::new(vec![HypersurfaceComponent::diagonal_line("D")]).unwrap()
}
