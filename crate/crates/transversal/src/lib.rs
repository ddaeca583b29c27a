//! Motion planning that crosses hypersurfaces transversally.
//!
//! Given a configuration space `R^n` and a codimension-1 submanifold `Z`
//! presented implicitly, this crate builds planners whose routes meet `Z`
//! only in clean transversal crossings, certifies that property numerically
//! for arbitrary piecewise-smooth paths, and stress-tests planners with
//! seeded randomized campaigns.
//!
//! The pieces:
//!
//! * [`geometry`] — points, closed-form segments, piecewise paths with exact
//!   derivatives, concatenation/reversal/mapping.
//! * [`hypersurface`] — implicit components (hyperplanes, spheres, the
//!   parabola, the diagonal) with values and gradients.
//! * [`diffeo`] — closed-form diffeomorphisms and their Jacobian actions.
//! * [`transversality`] — crossing detection and the pass/fail certificate.
//! * [`planners`] — the planner constructors and combinators (covers,
//!   contraction-to-planner, diffeomorphism transport).
//! * [`harness`] — reproducible randomized verification campaigns.
//! * [`scene`] — scene/path JSON formats shared with the command-line tool.
//!
//! Planning a query and certifying the route:
//!
//! ```
//! use transversal::hypersurface::last_axis_hyperplane;
//! use transversal::planners::{hyperplane_planner, Query};
//! use transversal::{certify_semi_transversal, DetectionConfig, Point};
//!
//! let planner = hyperplane_planner(2);
//! let surface = last_axis_hyperplane(2, "W");
//! let query = Query::new(
//!     Point::new(vec![-4.0, -1.0])?,
//!     Point::new(vec![3.0, 0.0])?,
//! )?;
//! let path = planner.plan(&query)?;
//! let verdict = certify_semi_transversal(&path, &surface, &DetectionConfig::default())?;
//! assert!(verdict.passed());
//! assert_eq!(verdict.events.len(), 1); // one clean crossing of the axis
//! # Ok::<(), transversal::Error>(())
//! ```

pub mod diffeo;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod hypersurface;
pub mod planners;
pub mod scene;
pub mod transversality;

pub use diffeo::{Diffeomorphism, MapDirection};
pub use error::{Error, Result};
pub use geometry::{PiecewisePath, Point, Segment, SegmentKind, Side};
pub use harness::{run_campaign, CampaignConfig, CampaignReport, SplitMix64};
pub use hypersurface::{ComponentKind, HypersurfaceComponent, ImplicitHypersurface};
pub use planners::{Contraction, Planner, PlannerEntry, Query};
pub use scene::{PathDocument, Scene};
pub use transversality::{
    certify_semi_transversal, crossing_count_oracle, find_crossings, smooth_at, CrossingEvent,
    DetectionConfig, EventKind, Verdict, VerdictStatus,
};
