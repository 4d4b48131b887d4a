//! Monte Carlo checks of the limit theorems and of test size and power.
//!
//! Each covariance experiment runs `R` independent replicates (replicate `r`
//! draws from stream `r` of `(seed, Experiment)`), records the process values
//! at fixed query points, and compares the across-replicate sample covariance
//! with the analytic limit. Reductions run in replicate order, so reports do
//! not depend on thread scheduling.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adequacy::{run_test_stream, TestConfig};
use crate::bridge::{concomitant_sum_process, residual_bridge, EmpiricalField};
use crate::covmodel::analytic_covariance;
use crate::dataset::{sample_concomitant_with, sample_rows_with, Breach, Copula, SyntheticModel};
use crate::error::{Error, Result};
use crate::ols::fit_lse;
use crate::ordering::all_orderings;
use crate::rng::{self, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub label: String,
    pub target: f64,
    pub empirical: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub replicates: usize,
    pub rejections: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionTable {
    pub level: f64,
    /// Null replicates simulated inside each outer replicate.
    pub inner_replicates: usize,
    pub grid: usize,
    pub rows: Vec<RateRow>,
}

impl RejectionTable {
    pub fn rate_at(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment: String,
    pub n: usize,
    pub replicates: usize,
    /// Query points (one-dimensional grids) or a flattened description of them.
    pub grid: Vec<f64>,
    pub seed: u64,
    pub max_abs_error: f64,
    pub cells: Vec<CellError>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RejectionTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl VerificationReport {
    fn new(experiment: &str, n: usize, replicates: usize, grid: Vec<f64>, seed: u64, cells: Vec<CellError>, started: Instant) -> Self {
        let max_abs_error = cells.iter().map(|c| c.abs_error).fold(0.0, f64::max);
        Self {
            experiment: experiment.into(),
            n,
            replicates,
            grid,
            seed,
            max_abs_error,
            cells,
            rates: None,
            elapsed_seconds: Some(started.elapsed().as_secs_f64()),
        }
    }

    /// CSV `label,target,empirical,abs_error`.
    pub fn write_cells_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["label", "target", "empirical", "abs_error"])?;
        for c in &self.cells {
            wtr.write_record([
                c.label.clone(),
                c.target.to_string(),
                c.empirical.to_string(),
                c.abs_error.to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<cells csv>", e))?;
        Ok(())
    }
}

/// Sample covariance (divisor `R - 1`) between columns of a replicate table.
fn sample_covariance(rows: &[Vec<f64>], a: usize, b: usize) -> f64 {
    let r = rows.len() as f64;
    let (ma, mb) = rows.iter().fold((0.0, 0.0), |(x, y), v| (x + v[a], y + v[b]));
    let (ma, mb) = (ma / r, mb / r);
    rows.iter().map(|v| (v[a] - ma) * (v[b] - mb)).sum::<f64>() / (r - 1.0)
}

fn check_sizes(n: usize, replicates: usize) -> Result<()> {
    if n == 0 || replicates < 2 {
        return Err(Error::InvalidArgument(format!(
            "need n ≥ 1 and at least 2 replicates, got n = {n}, R = {replicates}"
        )));
    }
    Ok(())
}

fn require_independence(model: &SyntheticModel) -> Result<()> {
    if model.copula != Copula::Independence {
        return Err(Error::Unsupported("analytic targets need the independence copula".into()));
    }
    Ok(())
}

fn fmt_point(u: &[f64]) -> String {
    let parts: Vec<String> = u.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}

/// Covariance of the centred field `(Q_n(u) - n f(u)) / sqrt(n)` against
/// `K(u1,u2) = int_{[0,u1 ^ u2]} (sigma^2 + m^2) - int_{[0,u1]} m int_{[0,u2]} m`.
pub fn verify_lemma1(model: &SyntheticModel, n: usize, replicates: usize, queries: &[Vec<f64>], seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    check_sizes(n, replicates)?;
    require_independence(model)?;
    let (Some(mean), Some(var)) = (&model.cond_mean, &model.cond_var) else {
        return Err(Error::Unsupported("the empirical-field check needs cond_mean and cond_var".into()));
    };
    if let Some(q) = queries.iter().find(|q| q.len() != model.d1) {
        return Err(Error::DimensionMismatch(format!("query {q:?} does not have {} coordinates", model.d1)));
    }
    let f: Vec<f64> = queries.iter().map(|u| mean.box_integral(u)).collect();
    let rows: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, Domain::Experiment, 1, r as u64);
            let (x, y) = sample_concomitant_with(model, n, &mut rng)?;
            let field = EmpiricalField::new(x, y)?;
            queries.iter().zip(&f).map(|(u, &fu)| field.centered(u, fu)).collect()
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for a in 0..queries.len() {
        for b in a..queries.len() {
            let lo: Vec<f64> = queries[a].iter().zip(&queries[b]).map(|(x, y)| x.min(*y)).collect();
            let target = var.box_integral(&lo) + mean.box_integral_sq(&lo) - f[a] * f[b];
            let empirical = sample_covariance(&rows, a, b);
            cells.push(CellError {
                label: format!("{} x {}", fmt_point(&queries[a]), fmt_point(&queries[b])),
                target,
                empirical,
                abs_error: (empirical - target).abs(),
            });
        }
    }
    let flat = queries.iter().flatten().copied().collect();
    Ok(VerificationReport::new("lemma1", n, replicates, flat, seed, cells, started))
}

/// Cross-covariances of the concomitant partial-sum processes (m = 0) against
/// `K = int sigma^2` over the box `[0, e_{k1,t1} ^ e_{k2,t2}]`.
pub fn verify_lemma2(
    model: &SyntheticModel,
    n: usize,
    replicates: usize,
    grid: &[f64],
    pairs: &[(usize, usize)],
    seed: u64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    check_sizes(n, replicates)?;
    require_independence(model)?;
    let (Some(mean), Some(var)) = (&model.cond_mean, &model.cond_var) else {
        return Err(Error::Unsupported("the concomitant-sum check needs cond_mean and cond_var".into()));
    };
    if !mean.is_zero() {
        return Err(Error::InvalidArgument("the concomitant-sum check requires cond_mean ≡ 0".into()));
    }
    let d1 = model.d1;
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= d1 || *b >= d1) {
        return Err(Error::InvalidArgument(format!("coordinate pair ({a}, {b}) out of range (d1 = {d1})")));
    }
    let m = grid.len();
    let rows: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, Domain::Experiment, 2, r as u64);
            let (x, y) = sample_concomitant_with(model, n, &mut rng)?;
            let mut row = Vec::with_capacity(d1 * m);
            for k in 0..d1 {
                row.extend(concomitant_sum_process(&x, &y, k, grid)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for &(k1, k2) in pairs {
        for (a, &t1) in grid.iter().enumerate() {
            for (b, &t2) in grid.iter().enumerate() {
                let mut upper = vec![1.0; d1];
                upper[k1] = t1;
                upper[k2] = if k1 == k2 { t1.min(t2) } else { t2 };
                let target = var.box_integral(&upper);
                let empirical = sample_covariance(&rows, k1 * m + a, k2 * m + b);
                cells.push(CellError {
                    label: format!("Z{}({t1}) x Z{}({t2})", k1 + 1, k2 + 1),
                    target,
                    empirical,
                    abs_error: (empirical - target).abs(),
                });
            }
        }
    }
    Ok(VerificationReport::new("lemma2", n, replicates, grid.to_vec(), seed, cells, started))
}

/// Cross-covariances of the residual bridges under the linear model against
/// the analytic kernel `K_ij(s,t)`, for every ordering pair on `grid x grid`.
pub fn verify_theorem2(model: &SyntheticModel, n: usize, replicates: usize, grid: &[f64], seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    check_sizes(n, replicates)?;
    let cov = analytic_covariance(model)?;
    let d = cov.d_order();
    let m = grid.len();
    let rows: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, Domain::Experiment, 3, r as u64);
            let data = sample_rows_with(model, None, n, &mut rng)?;
            if data.order_columns().len() != d {
                return Err(Error::Unsupported("every latent coordinate needs its own regressor".into()));
            }
            let fit = fit_lse(&data)?;
            let mut row = Vec::with_capacity(d * m);
            for view in all_orderings(&data, &fit)? {
                let bridge = residual_bridge(&view, fit.sigma2_hat)?;
                for &t in grid {
                    row.push(bridge.evaluate(t)?);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for i in 0..d {
        for j in i..d {
            for (a, &s) in grid.iter().enumerate() {
                for (b, &t) in grid.iter().enumerate() {
                    if i == j && b < a {
                        continue;
                    }
                    let target = cov.khat(i, j, s, t)?;
                    let empirical = sample_covariance(&rows, i * m + a, j * m + b);
                    cells.push(CellError {
                        label: format!("Z{}({s}) x Z{}({t})", i + 1, j + 1),
                        target,
                        empirical,
                        abs_error: (empirical - target).abs(),
                    });
                }
            }
        }
    }
    Ok(VerificationReport::new("theorem2", n, replicates, grid.to_vec(), seed, cells, started))
}

/// Settings for [`size_power_study`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub level: f64,
    /// Outer replicates per sample size.
    pub replicates: usize,
    /// Null replicates inside each outer replicate.
    pub inner_replicates: usize,
    pub grid: usize,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            level: 0.05,
            replicates: 2000,
            inner_replicates: 2000,
            grid: crate::limitsim::DEFAULT_GRID,
            seed: 0,
        }
    }
}

/// Rejection rates of the full plug-in test. Outer replicate `r` uses the same
/// data stream for every `n` and its own null stream.
pub fn size_power_study(model: &SyntheticModel, breach: Option<&Breach>, ns: &[usize], config: &StudyConfig) -> Result<RejectionTable> {
    if !(config.level > 0.0 && config.level <= 1.0) {
        return Err(Error::InvalidArgument(format!("level must lie in (0, 1], got {}", config.level)));
    }
    if config.replicates == 0 {
        return Err(Error::InvalidArgument("need at least one outer replicate".into()));
    }
    let test = TestConfig {
        grid: config.grid,
        replicates: config.inner_replicates,
        clip_floor: crate::limitsim::DEFAULT_CLIP_FLOOR,
        level: config.level,
        seed: config.seed,
    };
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let decisions: Vec<bool> = (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng::stream(config.seed, Domain::Experiment, 4, r as u64);
                let data = sample_rows_with(model, breach, n, &mut rng)?;
                Ok(run_test_stream(&data, &test, r as u64 + 1)?.reject)
            })
            .collect::<Result<_>>()?;
        let rejections = decisions.iter().filter(|&&d| d).count();
        rows.push(RateRow {
            n,
            replicates: config.replicates,
            rejections,
            rate: rejections as f64 / config.replicates as f64,
        });
    }
    Ok(RejectionTable {
        level: config.level,
        inner_replicates: config.inner_replicates,
        grid: config.grid,
        rows,
    })
}

/// Wrap a rejection table as a report; cells compare each rate with the level.
pub fn rates_report(experiment: &str, table: RejectionTable, seed: u64, started: Instant) -> VerificationReport {
    let cells = table
        .rows
        .iter()
        .map(|row| CellError {
            label: format!("n={}", row.n),
            target: table.level,
            empirical: row.rate,
            abs_error: (row.rate - table.level).abs(),
        })
        .collect();
    let n = table.rows.iter().map(|r| r.n).max().unwrap_or(0);
    let replicates = table.rows.first().map_or(0, |r| r.replicates);
    let grid = table.rows.iter().map(|r| r.n as f64).collect();
    let mut report = VerificationReport::new(experiment, n, replicates, grid, seed, cells, started);
    report.rates = Some(table);
    report
}

/// Convenience for interior query grids `{k/(m+1)}`.
pub fn interior_points(m: usize) -> Vec<f64> {
    (1..=m).map(|k| k as f64 / (m + 1) as f64).collect()
}

/// All points of `points^d`.
pub fn product_grid(points: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                points.iter().map(move |&p| {
                    let mut v = prefix.clone();
                    v.push(p);
                    v
                })
            })
            .collect();
    }
    out
}
