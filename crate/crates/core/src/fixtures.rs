//! Shipped synthetic models with closed-form covariance ingredients, and the
//! per-experiment tolerances used to judge verification runs.

use serde::Deserialize;

use crate::dataset::{Breach, CondFn, Copula, Noise, QuantileFn, RegressorSpec, SyntheticModel};

/// `xi = (X_1, 1)`, `eta = 2 X_1 + 1 + eps`.
pub fn single_uniform(noise_var: f64) -> SyntheticModel {
    SyntheticModel::regression(
        Copula::Independence,
        &[QuantileFn::Identity],
        true,
        vec![2.0, 1.0],
        Noise::normal(noise_var),
    )
}

/// `xi = (X_1, X_2, 1)` with independent uniforms.
pub fn two_uniform(noise_var: f64) -> SyntheticModel {
    SyntheticModel::regression(
        Copula::Independence,
        &[QuantileFn::Identity, QuantileFn::Identity],
        true,
        vec![1.0, -1.0, 0.5],
        Noise::normal(noise_var),
    )
}

/// `xi = (2 X_1, 1)`.
pub fn affine_uniform(noise_var: f64) -> SyntheticModel {
    SyntheticModel::regression(
        Copula::Independence,
        &[QuantileFn::Affine { shift: 0.0, scale: 2.0 }],
        true,
        vec![1.0, 0.0],
        Noise::normal(noise_var),
    )
}

/// Intercept-only regression ordered by an unrelated latent uniform. Its
/// bridge limit is the standard Brownian bridge.
pub fn intercept_only(noise_var: f64) -> SyntheticModel {
    SyntheticModel {
        d1: 1,
        copula: Copula::Independence,
        regressors: vec![RegressorSpec::Intercept],
        theta: vec![1.0],
        noise: Noise::normal(noise_var),
        cond_mean: None,
        cond_var: None,
    }
}

/// Every fixture with a closed-form covariance model.
pub fn analytic_fixtures() -> Vec<(&'static str, SyntheticModel)> {
    vec![
        ("single-uniform", single_uniform(1.0)),
        ("two-uniform", two_uniform(1.0)),
        ("affine-uniform", affine_uniform(1.0)),
        ("intercept-only", intercept_only(1.0)),
    ]
}

/// Concomitant model on `[0,1]^2`: independence, `m = 0`, `sigma^2 = 1`.
pub fn lemma_null() -> SyntheticModel {
    SyntheticModel::concomitant(2, Copula::Independence, CondFn::Constant(0.0), CondFn::Constant(1.0))
}

/// Concomitant model with `m(u) = u_1 - 1/2` and `sigma^2 = 0`.
pub fn lemma_centered_mean() -> SyntheticModel {
    SyntheticModel::concomitant(
        2,
        Copula::Independence,
        CondFn::Linear {
            intercept: -0.5,
            slopes: vec![1.0],
        },
        CondFn::Constant(0.0),
    )
}

/// Noise variance of the power-study model.
pub const POWER_NOISE_VAR: f64 = 0.25;

/// Model and breach for power checks: `eta = 2 X + 1 + X^2 + eps`.
pub fn power_alternative() -> (SyntheticModel, Breach) {
    (
        single_uniform(POWER_NOISE_VAR),
        Breach::AddQuadratic { coef: 1.0, column: 0 },
    )
}

#[derive(Debug, Clone, Deserialize)]
pub struct ErrorTolerance {
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SizeTolerance {
    pub halfwidth_se: f64,
    pub min_halfwidth: f64,
}

impl SizeTolerance {
    /// Acceptance band for an empirical rejection rate at `level` over `replicates`.
    pub fn band(&self, level: f64, replicates: usize) -> (f64, f64) {
        let se = (level * (1.0 - level) / replicates as f64).sqrt();
        let half = (self.halfwidth_se * se).max(self.min_halfwidth);
        (level - half, level + half)
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct PowerTolerance {
    pub min_rate_over_level: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Tolerances {
    pub lemma1: ErrorTolerance,
    pub lemma2: ErrorTolerance,
    pub theorem2: ErrorTolerance,
    pub gram_identity: ErrorTolerance,
    pub size: SizeTolerance,
    pub power: PowerTolerance,
}

const TOLERANCES_JSON: &str = include_str!("../fixtures/tolerances.json");

pub fn tolerances() -> Tolerances {
    serde_json::from_str(TOLERANCES_JSON).expect("shipped tolerance file is valid")
}
