//! Least squares fit by Householder QR.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Largest accepted 2-norm condition number of `xi^T xi`.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: DVector<f64>,
    /// `eta - xi theta_hat`, in the dataset's row order.
    pub residuals: DVector<f64>,
    /// `RSS / (n - p)`.
    pub sigma2_hat: f64,
    /// `xi^T xi / n`.
    pub gram: DMatrix<f64>,
    /// Condition number of `xi^T xi` (squared condition number of `R`).
    pub condition: f64,
}

pub fn fit_lse(data: &Dataset) -> Result<FitResult> {
    let (n, p) = (data.n(), data.p());
    if n <= p {
        return Err(Error::InvalidArgument(format!("least squares needs n > p, got n = {n}, p = {p}")));
    }
    let x = data.regressors();
    let y = data.response();

    let qr = x.clone().qr();
    let r = qr.r();
    let sv = r.clone().singular_values();
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if smin > 0.0 { (smax / smin).powi(2) } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::Singular {
            condition,
            limit: CONDITION_LIMIT,
        });
    }

    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, p).into_owned();
    let theta_hat = r
        .solve_upper_triangular(&rhs)
        .ok_or(Error::Singular {
            condition,
            limit: CONDITION_LIMIT,
        })?;

    let residuals = y - x * &theta_hat;
    let sigma2_hat = residuals.norm_squared() / (n - p) as f64;
    let gram = x.tr_mul(x) / n as f64;
    Ok(FitResult {
        theta_hat,
        residuals,
        sigma2_hat,
        gram,
        condition,
    })
}

/// Dataset whose row `k` is row `perm[k]` of `data` (0-based).
pub fn permute_rows(data: &Dataset, perm: &[usize]) -> Result<Dataset> {
    let n = data.n();
    if perm.len() != n {
        return Err(Error::InvalidArgument(format!(
            "permutation has {} entries for {n} rows",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument(format!("not a permutation of 0..{n}: {perm:?}")));
        }
    }
    Ok(data.reorder_unchecked(perm))
}
