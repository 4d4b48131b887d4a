//! The full adequacy test: fit, order, build bridges, compute omega-squared,
//! and calibrate it against the simulated limit with plug-in covariance.

use crate::bridge::{omega_sq, residual_bridge, BridgeProcess};
use crate::covmodel::CovarianceModel;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::limitsim::{
    build_grid_covariance, factor_psd, p_value, simulate_null_stream, GridSpec, NullDistribution, DEFAULT_CLIP_FLOOR,
    DEFAULT_GRID, DEFAULT_REPLICATES,
};
use crate::ols::{fit_lse, FitResult};
use crate::ordering::all_orderings;

/// A fit whose `sigma2_hat` is at most this fraction of `mean(eta^2)` is
/// treated as exact: its residuals are rounding noise.
pub const DEGENERATE_RELATIVE_VARIANCE: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    /// Grid size `M` for the limit simulation.
    pub grid: usize,
    /// Null replicates `R`.
    pub replicates: usize,
    pub clip_floor: f64,
    pub level: f64,
    pub seed: u64,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            replicates: DEFAULT_REPLICATES,
            clip_floor: DEFAULT_CLIP_FLOOR,
            level: 0.05,
            seed: 0,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.level > 0.0 && self.level <= 1.0) {
            return Err(Error::InvalidArgument(format!("level must lie in (0, 1], got {}", self.level)));
        }
        GridSpec::new(self.grid)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub fit: FitResult,
    pub bridges: Vec<BridgeProcess>,
    pub omega_sq: f64,
    pub null: NullDistribution,
    pub p_value: f64,
    pub level: f64,
    pub reject: bool,
}

/// Run the test on `data` with null draws from stream family `(seed, Null, 0)`.
pub fn run_test(data: &Dataset, config: &TestConfig) -> Result<TestOutcome> {
    run_test_stream(data, config, 0)
}

pub(crate) fn run_test_stream(data: &Dataset, config: &TestConfig, null_sub: u64) -> Result<TestOutcome> {
    config.validate()?;
    if data.order_columns().is_empty() {
        return Err(Error::InvalidArgument("the test needs at least one ordering column".into()));
    }
    let fit = fit_lse(data)?;
    let scale = data.response().norm_squared() / data.n() as f64;
    if fit.sigma2_hat <= DEGENERATE_RELATIVE_VARIANCE * scale {
        return Err(Error::Degenerate {
            sigma2_hat: fit.sigma2_hat,
        });
    }
    let views = all_orderings(data, &fit)?;
    let bridges = views
        .iter()
        .map(|v| residual_bridge(v, fit.sigma2_hat))
        .collect::<Result<Vec<_>>>()?;
    let stat = omega_sq(&bridges)?;

    let grid = GridSpec::new(config.grid)?;
    let cov = CovarianceModel::empirical(data)?;
    let kernel = build_grid_covariance(&cov, &grid)?;
    let factor = factor_psd(&kernel, config.clip_floor)?;
    let null = simulate_null_stream(&factor, config.replicates, &grid, config.seed, null_sub)?;
    let p = p_value(stat, &null)?;
    Ok(TestOutcome {
        fit,
        bridges,
        omega_sq: stat,
        null,
        p_value: p,
        level: config.level,
        reject: p <= config.level,
    })
}
