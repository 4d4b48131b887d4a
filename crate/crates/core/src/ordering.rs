//! Rows sorted by one regressor, with the other columns and the residuals
//! carried along as concomitants.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ols::FitResult;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderedView {
    /// Regressor column the rows are sorted by.
    pub column: usize,
    /// Sorted row `k` is original row `perm[k]`.
    pub perm: Vec<usize>,
    pub sorted_regressors: DMatrix<f64>,
    pub sorted_response: DVector<f64>,
    pub sorted_residuals: DVector<f64>,
}

impl OrderedView {
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Values of the ordering column, nondecreasing.
    pub fn sorted_column(&self) -> Vec<f64> {
        self.sorted_regressors.column(self.column).iter().copied().collect()
    }
}

/// Stable sorting permutation of `values` (ties keep their original order).
pub fn sorting_permutation(values: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    perm
}

pub fn order_by(data: &Dataset, fit: &FitResult, column: usize) -> Result<OrderedView> {
    if !data.order_columns().contains(&column) {
        return Err(Error::InvalidArgument(format!(
            "column {column} is not an ordering column (ordering columns: {:?})",
            data.order_columns()
        )));
    }
    if fit.residuals.len() != data.n() {
        return Err(Error::DimensionMismatch(format!(
            "fit has {} residuals for {} rows",
            fit.residuals.len(),
            data.n()
        )));
    }
    let values: Vec<f64> = data.regressors().column(column).iter().copied().collect();
    let perm = sorting_permutation(&values);
    Ok(OrderedView {
        column,
        sorted_regressors: data.regressors().select_rows(&perm),
        sorted_response: DVector::from_iterator(perm.len(), perm.iter().map(|&i| data.response()[i])),
        sorted_residuals: DVector::from_iterator(perm.len(), perm.iter().map(|&i| fit.residuals[i])),
        perm,
    })
}

/// One view per ordering column, in the dataset's ordering-column order.
pub fn all_orderings(data: &Dataset, fit: &FitResult) -> Result<Vec<OrderedView>> {
    data.order_columns().iter().map(|&c| order_by(data, fit, c)).collect()
}
