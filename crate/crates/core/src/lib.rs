//! Local and global sensitivity analysis with forward uncertainty propagation.
//!
//! Methods: one-at-a-time finite differences ([`local_sa`]), regression and
//! correlation coefficients ([`regression_sa`]), Morris screening
//! ([`morris`]), Sobol indices ([`sobol`]) and sandwich-rule / Monte Carlo
//! propagation ([`uq`]). [`models`] holds the benchmark functions and a
//! molten carbonate fuel cell model; [`mcfc_study`] runs the full workflow on
//! the latter. [`study`] drives everything from a TOML file.

pub mod error;
pub mod local_sa;
pub mod mcfc_study;
pub mod models;
pub mod morris;
pub mod problem;
pub mod regression_sa;
pub mod report;
pub mod sobol;
pub mod study;
pub mod uq;

pub use error::{Error, Result};
pub use models::{Model, ModelHandle};
pub use problem::{ParameterSpec, SampleMatrix};
