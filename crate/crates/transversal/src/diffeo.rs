//! Closed-form diffeomorphisms with exact inverses and Jacobian actions.
//!
//! Only maps whose forward map, inverse and derivative are all available in
//! closed form are supported; nothing here is inverted numerically. That is
//! what lets planner transport preserve transversality exactly instead of up
//! to a solver tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Which of the two maps of a diffeomorphism to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapDirection {
    Forward,
    Inverse,
}

impl MapDirection {
    pub fn flipped(self) -> Self {
        match self {
            MapDirection::Forward => MapDirection::Inverse,
            MapDirection::Inverse => MapDirection::Forward,
        }
    }
}

/// A diffeomorphism of Euclidean space with evaluable forward map, inverse,
/// and derivative action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diffeomorphism {
    /// The identity on `R^n`.
    Identity { dimension: usize },
    /// `h(x, y) = (x, y - x^2)` on `R^2`, with inverse `(a, b) -> (a, a^2 + b)`.
    /// Carries vertical lines to vertical lines and the parabola `y = x^2`
    /// to the horizontal axis.
    VerticalShear,
    /// `outer . inner` (inner applied first).
    Composite {
        outer: Box<Diffeomorphism>,
        inner: Box<Diffeomorphism>,
    },
}

impl Diffeomorphism {
    pub fn identity(dimension: usize) -> Self {
        Diffeomorphism::Identity { dimension }
    }

    pub fn vertical_shear() -> Self {
        Diffeomorphism::VerticalShear
    }

    pub fn composite(outer: Diffeomorphism, inner: Diffeomorphism) -> Result<Self> {
        if outer.dimension() != inner.dimension() {
            return Err(Error::DimensionMismatch {
                expected: inner.dimension(),
                got: outer.dimension(),
            });
        }
        Ok(Diffeomorphism::Composite {
            outer: Box::new(outer),
            inner: Box::new(inner),
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            Diffeomorphism::Identity { dimension } => *dimension,
            Diffeomorphism::VerticalShear => 2,
            Diffeomorphism::Composite { inner, .. } => inner.dimension(),
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

    /// `h(p)`.
    pub fn forward(&self, p: &Point) -> Result<Point> {
        self.apply(MapDirection::Forward, p)
    }

    /// `h^{-1}(p)`.
    pub fn inverse(&self, p: &Point) -> Result<Point> {
        self.apply(MapDirection::Inverse, p)
    }

    /// The chosen map applied to `p`.
    pub fn apply(&self, direction: MapDirection, p: &Point) -> Result<Point> {
        self.check_dim(p.dim())?;
        let mut out = vec![0.0; p.dim()];
        self.apply_into(direction, p.as_slice(), &mut out);
        Ok(Point::new_unchecked(out))
    }

    /// Jacobian of the chosen map at `p`, applied to the vector `v`.
    pub fn pushforward_vector(
        &self,
        direction: MapDirection,
        p: &Point,
        v: &Point,
    ) -> Result<Point> {
        self.check_dim(p.dim())?;
        self.check_dim(v.dim())?;
        let mut out = vec![0.0; v.dim()];
        self.pushforward_into(direction, p.as_slice(), v.as_slice(), &mut out);
        Ok(Point::new_unchecked(out))
    }

    /// Slice-level kernel behind [`Diffeomorphism::apply`]; dimensions must
    /// already match. `input` and `out` must not alias.
    pub(crate) fn apply_into(&self, direction: MapDirection, input: &[f64], out: &mut [f64]) {
        match self {
            Diffeomorphism::Identity { .. } => out.copy_from_slice(input),
            Diffeomorphism::VerticalShear => {
                let (x, y) = (input[0], input[1]);
                out[0] = x;
                out[1] = match direction {
                    MapDirection::Forward => y - x * x,
                    MapDirection::Inverse => x * x + y,
                };
            }
            Diffeomorphism::Composite { outer, inner } => {
                let (first, second): (&Diffeomorphism, &Diffeomorphism) = match direction {
                    MapDirection::Forward => (inner, outer),
                    MapDirection::Inverse => (outer, inner),
                };
                let mut tmp = vec![0.0; input.len()];
                first.apply_into(direction, input, &mut tmp);
                second.apply_into(direction, &tmp, out);
            }
        }
    }

    /// Slice-level kernel behind [`Diffeomorphism::pushforward_vector`].
    pub(crate) fn pushforward_into(
        &self,
        direction: MapDirection,
        p: &[f64],
        v: &[f64],
        out: &mut [f64],
    ) {
        match self {
            Diffeomorphism::Identity { .. } => out.copy_from_slice(v),
            Diffeomorphism::VerticalShear => {
                // Jacobian [[1, 0], [-2x, 1]] forward, [[1, 0], [2a, 1]] inverse.
                let slope = match direction {
                    MapDirection::Forward => -2.0 * p[0],
                    MapDirection::Inverse => 2.0 * p[0],
                };
                out[0] = v[0];
                out[1] = slope * v[0] + v[1];
            }
            Diffeomorphism::Composite { outer, inner } => {
                let (first, second): (&Diffeomorphism, &Diffeomorphism) = match direction {
                    MapDirection::Forward => (inner, outer),
                    MapDirection::Inverse => (outer, inner),
                };
                let n = p.len();
                let mut mid_point = vec![0.0; n];
                let mut mid_vec = vec![0.0; n];
                first.apply_into(direction, p, &mut mid_point);
                first.pushforward_into(direction, p, v, &mut mid_vec);
                second.pushforward_into(direction, &mid_point, &mid_vec, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn shear_forward_drops_square() {
        let h = Diffeomorphism::vertical_shear();
        assert_eq!(h.forward(&pt(&[1.0, 1.0])).unwrap(), pt(&[1.0, 0.0]));
        // Points on the axis x = 0 are fixed.
        assert_eq!(h.forward(&pt(&[0.0, 3.5])).unwrap(), pt(&[0.0, 3.5]));
    }

    #[test]
    fn shear_inverse_restores_square() {
        let h = Diffeomorphism::vertical_shear();
        assert_eq!(h.inverse(&pt(&[1.0, 0.0])).unwrap(), pt(&[1.0, 1.0]));
    }

    #[test]
    fn identity_is_identity() {
        let id = Diffeomorphism::identity(3);
        let p = pt(&[0.5, -2.0, 7.0]);
        assert_eq!(id.forward(&p).unwrap(), p);
        assert_eq!(id.inverse(&p).unwrap(), p);
        assert_eq!(
            id.pushforward_vector(MapDirection::Forward, &p, &p).unwrap(),
            p
        );
    }

    #[test]
    fn round_trip_many_points() {
        let h = Diffeomorphism::vertical_shear();
        let mut state = 0x2545F4914F6CDD1Du64;
        for _ in 0..64 {
            let mut draw = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 20.0 - 10.0
            };
            let p = pt(&[draw(), draw()]);
            let back = h.inverse(&h.forward(&p).unwrap()).unwrap();
            assert!(back.dist(&p) <= 1e-10, "round trip drift at {p:?}");
        }
    }

    #[test]
    fn shear_jacobians() {
        let h = Diffeomorphism::vertical_shear();
        let p = pt(&[3.0, -1.0]);
        // Inverse Jacobian at (a, b) applied to e1 is (1, 2a).
        let pushed = h
            .pushforward_vector(MapDirection::Inverse, &p, &pt(&[1.0, 0.0]))
            .unwrap();
        assert_eq!(pushed, pt(&[1.0, 6.0]));
        // Forward Jacobian fixes e2.
        let pushed = h
            .pushforward_vector(MapDirection::Forward, &p, &pt(&[0.0, 1.0]))
            .unwrap();
        assert_eq!(pushed, pt(&[0.0, 1.0]));
    }

    #[test]
    fn chain_rule_inverts() {
        // Pushing forward and then back through the mapped point returns v.
        let h = Diffeomorphism::vertical_shear();
        let p = pt(&[1.25, -0.5]);
        let v = pt(&[0.3, -2.0]);
        let hp = h.forward(&p).unwrap();
        let w = h.pushforward_vector(MapDirection::Forward, &p, &v).unwrap();
        let back = h.pushforward_vector(MapDirection::Inverse, &hp, &w).unwrap();
        assert!(back.dist(&v) <= 1e-9);
    }

    #[test]
    fn composite_applies_inner_first() {
        let c = Diffeomorphism::composite(
            Diffeomorphism::vertical_shear(),
            Diffeomorphism::identity(2),
        )
        .unwrap();
        assert_eq!(c.forward(&pt(&[2.0, 4.0])).unwrap(), pt(&[2.0, 0.0]));
        let back = c.inverse(&pt(&[2.0, 0.0])).unwrap();
        assert_eq!(back, pt(&[2.0, 4.0]));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = Diffeomorphism::vertical_shear();
        let err = h.forward(&pt(&[1.0, 2.0, 3.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 3 }));
    }
}
