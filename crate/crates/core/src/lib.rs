//! Comparison-geometry conditions for finite metric spaces: the four-point
//! CAT(κ) and ⊠ conditions, Wirtinger-type inequalities, gluing of model
//! polygons and convex comparison polygons for cyclic tuples.
//!
//! ```
//! use cycl::{cycl4_check, majorize, CyclicTuple, FiniteMetric, Kappa, ModelPoint};
//!
//! let pts = [(0.0, 0.0), (1.0, 0.0), (1.2, 0.9), (0.1, 1.1)].map(|(x, y)| ModelPoint::plane(x, y));
//! let m = FiniteMetric::from_points(&pts);
//! assert!(cycl4_check(&m, Kappa::FLAT).passed());
//! let cm = majorize(&m, &CyclicTuple::identity(4), Kappa::FLAT).unwrap();
//! assert!(cm.convexity_ok);
//! ```

pub mod conditions;
pub mod gluing;
pub mod majorize;
pub mod metric;
pub mod model;
pub mod oracle;
pub mod tolerance;

pub use conditions::{
    boxtimes_check, cat4_check, cycl4_check, cycl_n_verify, wir_check, ConditionReport, Verdict, Witness,
};
pub use gluing::{glued_distance, GluePoint, GluedSpace};
pub use majorize::{majorize, ComparisonMap, MajorizeError};
pub use metric::{CyclicTuple, FiniteMetric};
pub use model::{Kappa, ModelPoint};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model-geometry.md")]
    mod model_geometry {}
    #[doc = include_str!("../../../book/src/finite-metrics.md")]
    mod finite_metrics {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/gluing.md")]
    mod gluing {}
    #[doc = include_str!("../../../book/src/majorization.md")]
    mod majorization {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
