//! Weighted varextropy and related uncertainty measures.
//!
//! The crate provides a distribution catalogue, closed-form and quadrature
//! evaluation of extropy-type measures, coherent-system formulas and bounds,
//! three kernel estimators of weighted varextropy, and a Monte Carlo harness
//! for a goodness-of-fit test of the reciprocal law.

pub mod bivariate;
pub mod dist;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod measures;
pub mod parse;
pub mod quad;
pub mod reliability;
pub mod rng;
pub mod sample;
pub mod special;

pub use bivariate::BivariateModel;
pub use dist::{DistributionModel, Family, Support};
pub use error::{Error, Result};
pub use estimators::{EstimatorConfig, EstimatorKind, KernelScale};
pub use inference::{SimConfig, Statistic};
pub use quad::QuadratureConfig;
pub use rng::RandomStream;
pub use sample::SampleData;
