//! Closed-form unit normal loss integrals in one and two dimensions, and
//! expected value of perfect information (EVPI) for decisions between two
//! or three strategies.
//!
//! The two-dimensional integral `E[max(Y₁, Y₂, 0)]` of a bivariate normal is
//! the expected net benefit under perfect information when `Y₁, Y₂` are the
//! incremental net benefits of two strategies over a reference. See
//! [`unli::unli_2d`] and [`voi::evpi_three`].
//!
//! Supporting modules provide the normal kernels, a seeded Monte Carlo
//! oracle for the closed forms, and a patient-level trial pipeline with a
//! bootstrap EVPI estimator.

pub mod error;
pub mod mc;
pub mod normal;
pub mod quadrature;
pub mod rng;
pub mod trial;
pub mod unli;
pub mod voi;

pub use error::{Error, Result};
pub use mc::{mc_unli_2d, run_grid, GridRow, GridSpec, McEstimate};
pub use normal::{bvn_cdf, std_normal_cdf, std_normal_pdf, Correlation, Probability};
pub use unli::{unli_1d, unli_2d, BvnParams, TermIndex, Unli2dBreakdown};
pub use voi::{evpi_three, evpi_two, EvpiCurve, EvpiMethod};
