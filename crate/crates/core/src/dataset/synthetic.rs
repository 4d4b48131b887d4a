//! Copula-based generative models for Monte Carlo work.
//!
//! A row is produced by drawing latent uniforms `u` from the copula, mapping
//! selected coordinates through quantile functions to get regressors `xi`,
//! and setting `eta = xi . theta + eps` with `eps` independent of `u`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

#[derive(Debug, Clone, PartialEq)]
pub enum Copula {
    Independence,
    /// Gaussian copula with the given correlation matrix (d1 x d1).
    Gaussian { correlation: DMatrix<f64> },
}

/// Monotone map from (0,1) to the reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantileFn {
    Identity,
    Affine { shift: f64, scale: f64 },
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
}

impl QuantileFn {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            QuantileFn::Identity => u,
            QuantileFn::Affine { shift, scale } => shift + scale * u,
            QuantileFn::Normal { mean, sd } => mean + sd * standard_normal().inverse_cdf(u),
            QuantileFn::Exponential { rate } => -(-u).ln_1p() / rate,
        }
    }

    /// `int_0^x F^{-1}(u) du` when it has a closed form on [0,1].
    pub fn partial_integral(&self, x: f64) -> Option<f64> {
        match *self {
            QuantileFn::Identity => Some(0.5 * x * x),
            QuantileFn::Affine { shift, scale } => Some(shift * x + 0.5 * scale * x * x),
            _ => None,
        }
    }

    /// True when the map is finite on the closed interval, so integrals over
    /// [0,1] can be taken by ordinary quadrature.
    pub fn is_bounded(&self) -> bool {
        matches!(self, QuantileFn::Identity | QuantileFn::Affine { .. })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            QuantileFn::Identity => true,
            QuantileFn::Affine { shift, scale } => shift.is_finite() && scale.is_finite() && scale >= 0.0,
            QuantileFn::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            QuantileFn::Exponential { rate } => rate.is_finite() && rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("quantile function {self:?} is not monotone nondecreasing")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegressorSpec {
    /// `F^{-1}(u[coord])`.
    Latent { coord: usize, quantile: QuantileFn },
    /// Constant column of ones.
    Intercept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseLaw {
    Normal,
    /// Centred uniform on `[-sqrt(3 v), sqrt(3 v)]`.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub law: NoiseLaw,
    pub variance: f64,
}

impl Noise {
    pub fn normal(variance: f64) -> Self {
        Self {
            law: NoiseLaw::Normal,
            variance,
        }
    }

    pub fn uniform(variance: f64) -> Self {
        Self {
            law: NoiseLaw::Uniform,
            variance,
        }
    }

    /// One draw with mean 0 and unit variance.
    fn standard(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.law {
            NoiseLaw::Normal => rng.sample(StandardNormal),
            NoiseLaw::Uniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.variance.sqrt() * self.standard(rng)
    }
}

/// Function of the latent uniforms: `intercept + sum_k slopes[k] * u[k]`.
#[derive(Debug, Clone, PartialEq)]
pub enum CondFn {
    Constant(f64),
    Linear { intercept: f64, slopes: Vec<f64> },
}

impl CondFn {
    pub fn eval(&self, u: &[f64]) -> f64 {
        match self {
            CondFn::Constant(c) => *c,
            CondFn::Linear { intercept, slopes } => {
                intercept + slopes.iter().zip(u).map(|(b, x)| b * x).sum::<f64>()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CondFn::Constant(c) => *c == 0.0,
            CondFn::Linear { intercept, slopes } => *intercept == 0.0 && slopes.iter().all(|b| *b == 0.0),
        }
    }

    /// `int_{[0,upper]} f(v) dv` (uniform density).
    pub fn box_integral(&self, upper: &[f64]) -> f64 {
        let vol: f64 = upper.iter().product();
        match self {
            CondFn::Constant(c) => c * vol,
            CondFn::Linear { intercept, slopes } => {
                vol * (intercept + slopes.iter().zip(upper).map(|(b, u)| 0.5 * b * u).sum::<f64>())
            }
        }
    }

    /// `int_{[0,upper]} f(v)^2 dv` (uniform density).
    pub fn box_integral_sq(&self, upper: &[f64]) -> f64 {
        let vol: f64 = upper.iter().product();
        match self {
            CondFn::Constant(c) => c * c * vol,
            CondFn::Linear { intercept, slopes } => {
                let mean = intercept + slopes.iter().zip(upper).map(|(b, u)| 0.5 * b * u).sum::<f64>();
                let var: f64 = slopes.iter().zip(upper).map(|(b, u)| b * b * u * u / 12.0).sum();
                vol * (mean * mean + var)
            }
        }
    }

    /// Smallest value on the unit cube (attained at a corner).
    fn min_on_cube(&self) -> f64 {
        match self {
            CondFn::Constant(c) => *c,
            CondFn::Linear { intercept, slopes } => intercept + slopes.iter().map(|b| b.min(0.0)).sum::<f64>(),
        }
    }
}

/// Generative model for synthetic data.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel {
    /// Number of latent uniform coordinates.
    pub d1: usize,
    pub copula: Copula,
    /// Regressor columns, in model order.
    pub regressors: Vec<RegressorSpec>,
    pub theta: Vec<f64>,
    pub noise: Noise,
    /// Conditional mean of a generic response (concomitant mode only).
    pub cond_mean: Option<CondFn>,
    /// Conditional variance of a generic response (concomitant mode only).
    pub cond_var: Option<CondFn>,
}

impl SyntheticModel {
    /// `xi = (F_1^{-1}(u_1), ..., F_d^{-1}(u_d) [, 1])` with `d = quantiles.len()`.
    pub fn regression(
        copula: Copula,
        quantiles: &[QuantileFn],
        intercept: bool,
        theta: Vec<f64>,
        noise: Noise,
    ) -> Self {
        let mut regressors: Vec<RegressorSpec> = quantiles
            .iter()
            .enumerate()
            .map(|(coord, &quantile)| RegressorSpec::Latent { coord, quantile })
            .collect();
        if intercept {
            regressors.push(RegressorSpec::Intercept);
        }
        Self {
            d1: quantiles.len(),
            copula,
            regressors,
            theta,
            noise,
            cond_mean: None,
            cond_var: None,
        }
    }

    /// Generic `(X, Y)` model with `Y = m(X) + sigma(X) * e`, `e` standardised noise.
    pub fn concomitant(d1: usize, copula: Copula, cond_mean: CondFn, cond_var: CondFn) -> Self {
        Self {
            d1,
            copula,
            regressors: Vec::new(),
            theta: Vec::new(),
            noise: Noise::normal(1.0),
            cond_mean: Some(cond_mean),
            cond_var: Some(cond_var),
        }
    }

    pub fn p(&self) -> usize {
        self.regressors.len()
    }

    pub fn has_intercept(&self) -> bool {
        self.regressors.contains(&RegressorSpec::Intercept)
    }

    pub fn validate(&self) -> Result<()> {
        if let Copula::Gaussian { correlation } = &self.copula {
            check_correlation(correlation, self.d1)?;
        }
        for spec in &self.regressors {
            if let RegressorSpec::Latent { coord, quantile } = spec {
                if *coord >= self.d1 {
                    return Err(Error::InvalidArgument(format!(
                        "regressor uses latent coordinate {coord} but d1 = {}",
                        self.d1
                    )));
                }
                quantile.validate()?;
            }
        }
        if self.theta.len() != self.regressors.len() {
            return Err(Error::DimensionMismatch(format!(
                "theta has {} entries for {} regressors",
                self.theta.len(),
                self.regressors.len()
            )));
        }
        if !(self.noise.variance.is_finite() && self.noise.variance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be finite and nonnegative, got {}",
                self.noise.variance
            )));
        }
        if let Some(var) = &self.cond_var {
            if var.min_on_cube() < 0.0 {
                return Err(Error::InvalidArgument("conditional variance is negative somewhere on the cube".into()));
            }
        }
        Ok(())
    }

    fn regressor_names(&self) -> (Vec<String>, Vec<usize>, Option<usize>) {
        let mut names = Vec::with_capacity(self.p());
        let mut order = Vec::new();
        let mut seen = vec![0usize; self.d1];
        let mut intercept = None;
        for (col, spec) in self.regressors.iter().enumerate() {
            match spec {
                RegressorSpec::Latent { coord, .. } => {
                    seen[*coord] += 1;
                    if seen[*coord] == 1 {
                        names.push(format!("x{}", coord + 1));
                        order.push(col);
                    } else {
                        names.push(format!("x{}_{}", coord + 1, seen[*coord]));
                    }
                }
                RegressorSpec::Intercept => {
                    if intercept.is_none() {
                        intercept = Some(col);
                        names.push("const".into());
                    } else {
                        names.push(format!("const_{col}"));
                    }
                }
            }
        }
        (names, order, intercept)
    }
}

fn check_correlation(c: &DMatrix<f64>, d1: usize) -> Result<()> {
    if c.nrows() != d1 || c.ncols() != d1 {
        return Err(Error::DimensionMismatch(format!(
            "correlation matrix is {}x{} but d1 = {d1}",
            c.nrows(),
            c.ncols()
        )));
    }
    for i in 0..d1 {
        if c[(i, i)] != 1.0 {
            return Err(Error::InvalidArgument("correlation matrix must have unit diagonal".into()));
        }
        for j in 0..i {
            if c[(i, j)] != c[(j, i)] {
                return Err(Error::InvalidArgument("correlation matrix must be symmetric".into()));
            }
        }
    }
    if c.clone().cholesky().is_none() {
        return Err(Error::InvalidArgument("correlation matrix must be positive definite".into()));
    }
    Ok(())
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Draws latent uniform vectors from a copula.
struct CopulaSampler {
    d1: usize,
    factor: Option<DMatrix<f64>>,
    normal: Normal,
    scratch: Vec<f64>,
}

impl CopulaSampler {
    fn new(model: &SyntheticModel) -> Self {
        let factor = match &model.copula {
            Copula::Independence => None,
            Copula::Gaussian { correlation } => Some(
                correlation
                    .clone()
                    .cholesky()
                    .expect("validated positive definite")
                    .unpack(),
            ),
        };
        Self {
            d1: model.d1,
            factor,
            normal: standard_normal(),
            scratch: vec![0.0; model.d1],
        }
    }

    fn draw(&mut self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match &self.factor {
            None => out.iter_mut().for_each(|u| *u = rng.sample(Open01)),
            Some(lower) => {
                for g in self.scratch.iter_mut() {
                    *g = rng.sample(StandardNormal);
                }
                for i in 0..self.d1 {
                    let z: f64 = (0..=i).map(|k| lower[(i, k)] * self.scratch[k]).sum();
                    // Keep u strictly inside (0,1) so unbounded quantiles stay finite.
                    out[i] = self.normal.cdf(z).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                }
            }
        }
    }
}

/// Violation of the linear model injected into the response.
#[derive(Debug, Clone, PartialEq)]
pub enum Breach {
    /// `eta += coef * xi[column]^2` (0-based regressor column).
    AddQuadratic { coef: f64, column: usize },
    /// Noise multiplied by `scale(u)` at the row's latent uniforms.
    Heteroscedastic { scale: CondFn },
}

fn sample_rows(model: &SyntheticModel, breach: Option<&Breach>, n: usize, seed: u64) -> Result<Dataset> {
    sample_rows_with(model, breach, n, &mut rng::stream(seed, Domain::Sample, 0, 0))
}

pub(crate) fn sample_rows_with(
    model: &SyntheticModel,
    breach: Option<&Breach>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    model.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n ≥ 1 required".into()));
    }
    if let Some(Breach::AddQuadratic { column, .. }) = breach {
        if *column >= model.p() {
            return Err(Error::InvalidArgument(format!(
                "quadratic breach column {column} out of range (p = {})",
                model.p()
            )));
        }
    }
    let p = model.p();
    let mut copula = CopulaSampler::new(model);
    let mut u = vec![0.0; model.d1];
    let mut values = Vec::with_capacity(n * p);
    let mut response = Vec::with_capacity(n);
    let mut xi = vec![0.0; p];
    for _ in 0..n {
        copula.draw(rng, &mut u);
        for (x, spec) in xi.iter_mut().zip(&model.regressors) {
            *x = match spec {
                RegressorSpec::Latent { coord, quantile } => quantile.eval(u[*coord]),
                RegressorSpec::Intercept => 1.0,
            };
        }
        let mut eps = model.noise.draw(rng);
        let mut eta: f64 = xi.iter().zip(&model.theta).map(|(x, t)| x * t).sum();
        match breach {
            None => {}
            Some(Breach::AddQuadratic { coef, column }) => eta += coef * xi[*column] * xi[*column],
            Some(Breach::Heteroscedastic { scale }) => eps *= scale.eval(&u),
        }
        values.extend_from_slice(&xi);
        response.push(eta + eps);
    }
    let (names, order, intercept) = model.regressor_names();
    Dataset::new(
        names,
        "y",
        DMatrix::from_row_slice(n, p, &values),
        DVector::from_vec(response),
        order,
        intercept,
    )
}

/// Dataset from the linear model `eta = xi . theta + eps`; a pure function of `(model, n, seed)`.
pub fn sample_h0(model: &SyntheticModel, n: usize, seed: u64) -> Result<Dataset> {
    sample_rows(model, None, n, seed)
}

/// As [`sample_h0`], with `breach` injected into the response. Uses the same
/// random draws as `sample_h0` for the same seed.
pub fn sample_alternative(model: &SyntheticModel, breach: &Breach, n: usize, seed: u64) -> Result<Dataset> {
    sample_rows(model, Some(breach), n, seed)
}

/// Latent copula draws `X` (n x d1, not quantile transformed) and
/// `Y = m(X) + sqrt(sigma^2(X)) * e` with `e` drawn from the model's noise law
/// standardised to unit variance.
pub fn sample_concomitant(model: &SyntheticModel, n: usize, seed: u64) -> Result<(DMatrix<f64>, DVector<f64>)> {
    sample_concomitant_with(model, n, &mut rng::stream(seed, Domain::Sample, 1, 0))
}

pub(crate) fn sample_concomitant_with(
    model: &SyntheticModel,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (Some(mean), Some(var)) = (&model.cond_mean, &model.cond_var) else {
        return Err(Error::InvalidArgument(
            "concomitant sampling needs both cond_mean and cond_var".into(),
        ));
    };
    model.validate()?;
    let mut copula = CopulaSampler::new(model);
    let mut x = DMatrix::zeros(n, model.d1);
    let mut y = DVector::zeros(n);
    let mut u = vec![0.0; model.d1];
    for i in 0..n {
        copula.draw(rng, &mut u);
        let e = model.noise.standard(rng);
        for (k, &v) in u.iter().enumerate() {
            x[(i, k)] = v;
        }
        let sd = var.eval(&u).max(0.0).sqrt();
        y[i] = mean.eval(&u) + sd * e;
    }
    Ok((x, y))
}
