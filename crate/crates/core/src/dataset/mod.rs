//! Observation data: a regressor matrix, a response vector, and the roles
//! its columns play (ordering columns, intercept).

mod csv_io;
mod synthetic;

pub use csv_io::{load_csv, read_csv, write_csv, write_csv_to, Schema};
pub use synthetic::{
    sample_alternative, sample_concomitant, sample_h0, Breach, CondFn, Copula, Noise, NoiseLaw,
    QuantileFn, RegressorSpec, SyntheticModel,
};
pub(crate) use synthetic::{sample_concomitant_with, sample_rows_with};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `n` observation rows `(xi_i, eta_i)` with column roles.
///
/// Column indices (`order_columns`, `intercept_column`) refer to columns of
/// the regressor matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    regressor_names: Vec<String>,
    response_name: String,
    regressors: DMatrix<f64>,
    response: DVector<f64>,
    order_columns: Vec<usize>,
    intercept_column: Option<usize>,
}

impl Dataset {
    pub fn new(
        regressor_names: Vec<String>,
        response_name: impl Into<String>,
        regressors: DMatrix<f64>,
        response: DVector<f64>,
        order_columns: Vec<usize>,
        intercept_column: Option<usize>,
    ) -> Result<Self> {
        let n = regressors.nrows();
        let p = regressors.ncols();
        if n == 0 {
            return Err(Error::Validation("n ≥ 1 required: the dataset has no rows".into()));
        }
        if response.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "response has {} entries but the regressor matrix has {n} rows",
                response.len()
            )));
        }
        if regressor_names.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} regressor names for {p} columns",
                regressor_names.len()
            )));
        }
        if let Some((idx, _)) = regressors.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite regressor value at row {}, column `{}`",
                idx % n + 1,
                regressor_names[idx / n]
            )));
        }
        if let Some(i) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite response value at row {}", i + 1)));
        }
        if let Some(c) = intercept_column {
            if c >= p {
                return Err(Error::Schema(format!("intercept column {c} out of range (p = {p})")));
            }
            if let Some(i) = regressors.column(c).iter().position(|&v| v != 1.0) {
                return Err(Error::Validation(format!(
                    "intercept column `{}` must be identically 1, found {} at row {}",
                    regressor_names[c],
                    regressors[(i, c)],
                    i + 1
                )));
            }
        }
        for (k, &c) in order_columns.iter().enumerate() {
            if c >= p {
                return Err(Error::Schema(format!("ordering column {c} out of range (p = {p})")));
            }
            if Some(c) == intercept_column {
                return Err(Error::Schema(format!(
                    "column `{}` cannot be both the intercept and an ordering column",
                    regressor_names[c]
                )));
            }
            if order_columns[..k].contains(&c) {
                return Err(Error::Schema(format!(
                    "ordering column `{}` listed twice",
                    regressor_names[c]
                )));
            }
        }
        Ok(Self {
            regressor_names,
            response_name: response_name.into(),
            regressors,
            response,
            order_columns,
            intercept_column,
        })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.regressors.nrows()
    }

    /// Number of regressor columns.
    pub fn p(&self) -> usize {
        self.regressors.ncols()
    }

    pub fn regressors(&self) -> &DMatrix<f64> {
        &self.regressors
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn order_columns(&self) -> &[usize] {
        &self.order_columns
    }

    pub fn intercept_column(&self) -> Option<usize> {
        self.intercept_column
    }

    pub fn regressor_names(&self) -> &[String] {
        &self.regressor_names
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    /// Regressor row `i` together with its response.
    pub fn row(&self, i: usize) -> (Vec<f64>, f64) {
        (self.regressors.row(i).iter().copied().collect(), self.response[i])
    }

    /// Rebuild the dataset with rows reordered so that new row `k` is old row `perm[k]`.
    pub(crate) fn reorder_unchecked(&self, perm: &[usize]) -> Self {
        let regressors = self.regressors.select_rows(perm);
        let response = DVector::from_iterator(perm.len(), perm.iter().map(|&i| self.response[i]));
        Self {
            regressors,
            response,
            ..self.clone()
        }
    }
}
