//! Null distribution of the omega-squared statistic by direct simulation of
//! the limiting Gaussian process on a grid.
//!
//! The kernel is tabulated at `t_m = m/M`, factored through a clipped
//! eigendecomposition, and each replicate draws `z = F g` with `g` standard
//! normal. The discretised statistic is `sum_j sum_m z_{j,m}^2 / M`
//! (right-endpoint rule; the process vanishes at 0).

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::covmodel::CovarianceModel;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

pub const DEFAULT_GRID: usize = 100;
pub const DEFAULT_REPLICATES: usize = 10_000;
pub const DEFAULT_CLIP_FLOOR: f64 = 1e-10;
pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    m: usize,
}

impl GridSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("grid needs M ≥ 2 points, got {m}")));
        }
        Ok(Self { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `t_m = m / M` for `m = 1..=M`.
    pub fn points(&self) -> Vec<f64> {
        (1..=self.m).map(|k| k as f64 / self.m as f64).collect()
    }
}

/// Covariance of the stacked vector `(Z_i(t_a))`, index `i * M + a`.
pub fn build_grid_covariance(cov: &CovarianceModel, grid: &GridSpec) -> Result<DMatrix<f64>> {
    let (d, m) = (cov.d_order(), grid.len());
    let pts = grid.points();
    let mut out = DMatrix::zeros(d * m, d * m);
    for i in 0..d {
        for j in i..d {
            let block = cov.khat_block(i, j, &pts, &pts)?;
            out.view_mut((i * m, j * m), (m, m)).copy_from(&block);
            if i != j {
                out.view_mut((j * m, i * m), (m, m)).copy_from(&block.transpose());
            }
        }
    }
    Ok((&out + out.transpose()) * 0.5)
}

/// `F` with `F F^T` approximating a symmetric PSD matrix.
#[derive(Debug, Clone)]
pub struct PsdFactor {
    /// `V diag(sqrt(lambda))` restricted to the retained eigenpairs.
    pub factor: DMatrix<f64>,
    /// Number of eigenvalues below the clip floor (set to zero).
    pub clip_count: usize,
    /// Eigenvalues after clipping, in the solver's order.
    pub eigenvalues: Vec<f64>,
}

impl PsdFactor {
    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.factor * self.factor.transpose()
    }
}

pub fn factor_psd(matrix: &DMatrix<f64>, clip_floor: f64) -> Result<PsdFactor> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{}, not square", matrix.nrows(), matrix.ncols())));
    }
    if !(clip_floor >= 0.0) {
        return Err(Error::InvalidArgument(format!("clip floor must be nonnegative, got {clip_floor}")));
    }
    let scale = matrix.amax();
    let asym = (matrix - matrix.transpose()).amax();
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!("matrix is not symmetric (max |A - A^T| = {asym:e})")));
    }
    let n = matrix.nrows();
    if n == 0 {
        return Ok(PsdFactor {
            factor: DMatrix::zeros(0, 0),
            clip_count: 0,
            eigenvalues: Vec::new(),
        });
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let mut clip_count = 0;
    let eigenvalues: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            if l < clip_floor || l <= 0.0 {
                clip_count += 1;
                0.0
            } else {
                l
            }
        })
        .collect();
    let kept: Vec<usize> = (0..n).filter(|&k| eigenvalues[k] > 0.0).collect();
    let mut factor = DMatrix::zeros(n, kept.len());
    for (c, &k) in kept.iter().enumerate() {
        let root = eigenvalues[k].sqrt();
        factor.set_column(c, &(eig.eigenvectors.column(k) * root));
    }
    Ok(PsdFactor {
        factor,
        clip_count,
        eigenvalues,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    /// Simulated statistics, sorted nondecreasing.
    pub samples: Vec<f64>,
    pub replicates: usize,
    pub grid: GridSpec,
    pub clip_count: usize,
}

impl NullDistribution {
    /// Smallest sample `x` with at least a fraction `q` of samples `<= x`.
    pub fn quantile(&self, q: f64) -> f64 {
        let r = self.samples.len();
        let k = ((q * r as f64).ceil() as usize).clamp(1, r);
        self.samples[k - 1]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// One-column CSV `omega_sq`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["omega_sq"])?;
        for s in &self.samples {
            wtr.write_record([s.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::io("<null csv>", e))?;
        Ok(())
    }
}

/// Simulate `replicates` draws of the discretised limit statistic. Replicate
/// `r` uses random stream `r` of `(seed, Null)`.
pub fn simulate_null(factor: &PsdFactor, replicates: usize, grid: &GridSpec, seed: u64) -> Result<NullDistribution> {
    simulate_null_stream(factor, replicates, grid, seed, 0)
}

pub(crate) fn simulate_null_stream(
    factor: &PsdFactor,
    replicates: usize,
    grid: &GridSpec,
    seed: u64,
    sub: u64,
) -> Result<NullDistribution> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidArgument(format!(
            "null simulation needs at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    let m = grid.len();
    if !factor.dim().is_multiple_of(m) {
        return Err(Error::DimensionMismatch(format!(
            "factor has {} rows, not a multiple of the grid size {m}",
            factor.dim()
        )));
    }
    let f = &factor.factor;
    let rank = f.ncols();
    let weight = 1.0 / m as f64;
    let mut samples: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map_init(
            || (DVector::zeros(rank), DVector::zeros(f.nrows())),
            |(g, z), r| {
                let mut rng = rng::stream(seed, Domain::Null, sub, r as u64);
                g.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                z.gemv(1.0, f, g, 0.0);
                z.norm_squared() * weight
            },
        )
        .collect();
    samples.sort_by(f64::total_cmp);
    Ok(NullDistribution {
        samples,
        replicates,
        grid: *grid,
        clip_count: factor.clip_count,
    })
}

/// Monte Carlo p-value `(1 + #{samples >= stat}) / (R + 1)`.
pub fn p_value(stat: f64, null: &NullDistribution) -> Result<f64> {
    if null.samples.is_empty() {
        return Err(Error::InvalidArgument("empty null distribution".into()));
    }
    let below = null.samples.partition_point(|&s| s < stat);
    let at_least = null.samples.len() - below;
    Ok((1 + at_least) as f64 / (null.samples.len() + 1) as f64)
}
