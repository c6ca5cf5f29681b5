//! Metric geometry on step-2 Carnot groups: the Heisenberg groups `H^n` and
//! H-type groups, with `d_inf`, gauge and Carnot-Caratheodory distances, ball
//! volumes, isodiametric ratios and Besicovitch density bounds.
//!
//! The numerical core is generic over the scalar type ([`scalar::Field`] for
//! exact group arithmetic, [`scalar::Real`] for anything transcendental). Monte
//! Carlo routines work in `f64`; the aliases below fix that choice.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod geodesics;
pub mod group;
pub mod isodiametric;
pub mod measures;
pub mod metrics;
pub mod optimize;
pub mod quadrature;
pub mod roots;
pub mod sampling;
pub mod scalar;
pub mod trig;

pub use error::{Error, Result};
pub use measures::{EstimateWithError, Method, SampledSet};
pub use quadrature::QuadratureConfig;

pub type Point = group::GroupPoint<f64>;
pub type Spec = group::GroupSpec<f64>;
pub type HType = group::HTypeStructure<f64>;
pub type Distance = metrics::Metric<f64>;
pub type Params = geodesics::GeodesicParams<f64>;
pub type Estimate = measures::EstimateWithError<f64>;
