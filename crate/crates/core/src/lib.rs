//! Spreads, distances and spanned lines over finite fields F_q^d, q odd.
//!
//! The modules build on each other bottom-up: [`ff`] for field arithmetic,
//! [`geom`] for vectors, spreads and lines, [`construct`] for isotropic
//! point sets, [`census`] for exhaustive counting, and [`expt`] for seeded
//! experiments with JSON reports.

pub mod census;
pub mod construct;
pub mod error;
pub mod expt;
pub mod ff;
pub mod geom;
pub mod linalg;
pub mod pointset;

pub use error::{Budget, Error, Result};
pub use expt::{ExperimentReport, Rational, Threshold, Verdict};
pub use ff::{FieldDesc, Felt};
pub use geom::{CanonLine, FVector, OrthoMatrix, SpreadValue};
pub use pointset::PointSet;

pub type ExactThreshold = Threshold<Rational>;
pub type FloatThreshold = Threshold<f64>;
