//! Adequacy testing for linear regression through residual partial-sum
//! bridges taken under several orderings of the observations.
//!
//! The pipeline: [`ols::fit_lse`] fits the model, [`ordering`] sorts rows by
//! each ordering regressor, [`bridge`] turns the sorted residuals into
//! piecewise-linear bridges and the omega-squared statistic, and
//! [`limitsim`] calibrates the statistic by simulating the limiting Gaussian
//! process whose covariance is estimated in [`covmodel`]. [`adequacy::run_test`]
//! chains all of it. [`mclab`] checks the limit theory by Monte Carlo.

pub mod adequacy;
pub mod bridge;
pub mod cli;
pub mod covmodel;
pub mod dataset;
pub mod error;
pub mod fixtures;
pub mod limitsim;
pub mod mclab;
pub mod ols;
pub mod ordering;
pub mod quadrature;
pub mod rng;
mod util;

pub use adequacy::{run_test, TestConfig, TestOutcome};
pub use error::{Error, Result};
