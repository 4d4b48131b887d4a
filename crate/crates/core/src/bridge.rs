//! Residual bridges and the omega-squared statistic.
//!
//! For an ordering view with sorted residuals `e_1..e_n` the bridge is the
//! piecewise-linear function through the nodes
//!
//! ```text
//! (k/n, (e_1 + ... + e_k) / sqrt(n * sigma2_hat)),  k = 0..n
//! ```
//!
//! Its squared integral is computed exactly, segment by segment:
//! `int_{(k-1)/n}^{k/n} z^2 = (a^2 + a b + b^2) / (3n)` for end values `a`, `b`.
//!
//! The module also evaluates the multivariate field `Q_n(u) = sum_j Y_j 1(X_j <= u)`
//! and the concomitant partial-sum processes that the verification lab checks.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ordering::{sorting_permutation, OrderedView};
use crate::util::{check_unit, floor_index};

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeProcess {
    /// Ordering column the bridge was built from.
    pub column: usize,
    values: Vec<f64>,
}

impl BridgeProcess {
    /// Bridge through nodes `(k/n, values[k])`; `values[0]` must be 0.
    pub fn from_nodes(column: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("a bridge needs at least two nodes".into()));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidArgument(format!("bridge must start at 0, got {}", values[0])));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("bridge nodes must be finite".into()));
        }
        Ok(Self { column, values })
    }

    /// Number of segments.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Node values `z_0..z_n`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn endpoint(&self) -> f64 {
        self.values[self.n()]
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        check_unit(t, "t")?;
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        let n = self.n();
        let x = t * n as f64;
        let r = x.round();
        if (x - r).abs() <= 8.0 * f64::EPSILON * r.max(1.0) {
            return self.values[r as usize];
        }
        let k = (x.floor() as usize).min(n - 1);
        let frac = x - k as f64;
        let (a, b) = (self.values[k], self.values[k + 1]);
        a + frac * (b - a)
    }

    /// Exact `int_0^1 z(t)^2 dt`.
    pub fn integral_sq(&self) -> f64 {
        let s: f64 = self
            .values
            .windows(2)
            .map(|w| w[0] * w[0] + w[0] * w[1] + w[1] * w[1])
            .sum();
        s / (3.0 * self.n() as f64)
    }

    /// Two-column CSV `t,value` of the nodes.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["t", "value"])?;
        let n = self.n() as f64;
        for (k, v) in self.values.iter().enumerate() {
            wtr.write_record([(k as f64 / n).to_string(), v.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::io("<bridge csv>", e))?;
        Ok(())
    }
}

/// Normalised residual partial sums along one ordering.
pub fn residual_bridge(view: &OrderedView, sigma2_hat: f64) -> Result<BridgeProcess> {
    if !(sigma2_hat > 0.0 && sigma2_hat.is_finite()) {
        return Err(Error::Degenerate { sigma2_hat });
    }
    let n = view.sorted_residuals.len();
    if n == 0 {
        return Err(Error::InvalidArgument("view has no residuals".into()));
    }
    let scale = 1.0 / (n as f64 * sigma2_hat).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for e in view.sorted_residuals.iter() {
        acc += e;
        values.push(acc * scale);
    }
    Ok(BridgeProcess {
        column: view.column,
        values,
    })
}

/// `sum_j int_0^1 z_j(t)^2 dt` over bridges sharing the same `n`.
pub fn omega_sq(bridges: &[BridgeProcess]) -> Result<f64> {
    if let Some(first) = bridges.first() {
        if let Some(b) = bridges.iter().find(|b| b.n() != first.n()) {
            return Err(Error::DimensionMismatch(format!(
                "bridges have different node counts ({} vs {})",
                first.n(),
                b.n()
            )));
        }
    }
    Ok(bridges.iter().map(BridgeProcess::integral_sq).sum())
}

/// Points `X_j` in `[0,1]^d` with scalar marks `Y_j`.
#[derive(Debug, Clone)]
pub struct EmpiricalField {
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl EmpiricalField {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!("{} points but {} marks", x.nrows(), y.len())));
        }
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// `Q_n(u) = sum_j Y_j 1(X_j <= u)` coordinatewise.
    pub fn q(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "query has {} coordinates, field has {}",
                u.len(),
                self.dim()
            )));
        }
        Ok((0..self.n())
            .filter(|&j| u.iter().enumerate().all(|(k, &uk)| self.x[(j, k)] <= uk))
            .map(|j| self.y[j])
            .sum())
    }

    /// `(Q_n(u) - n f(u)) / sqrt(n)`.
    pub fn centered(&self, u: &[f64], f_u: f64) -> Result<f64> {
        let n = self.n() as f64;
        Ok((self.q(u)? - n * f_u) / n.sqrt())
    }
}

/// `(Q_n(u_m) - n f_m) / sqrt(n)` for each query `u_m`, with `f_m` the caller's
/// value of `int_0^{u_m} m c`.
pub fn empirical_field(x: &DMatrix<f64>, y: &DVector<f64>, queries: &[Vec<f64>], f: &[f64]) -> Result<Vec<f64>> {
    if queries.len() != f.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} queries but {} centring values",
            queries.len(),
            f.len()
        )));
    }
    let field = EmpiricalField::new(x.clone(), y.clone())?;
    queries.iter().zip(f).map(|(u, &fu)| field.centered(u, fu)).collect()
}

/// `Z_n^{(k)}(t) / sqrt(n)`: sum of the first `[n t]` marks after sorting
/// the points by coordinate `k`, divided by `sqrt(n)`.
pub fn concomitant_sum_process(x: &DMatrix<f64>, y: &DVector<f64>, k: usize, grid: &[f64]) -> Result<Vec<f64>> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!("{} points but {} marks", x.nrows(), y.len())));
    }
    if k >= x.ncols() {
        return Err(Error::InvalidArgument(format!("coordinate {k} out of range (d = {})", x.ncols())));
    }
    for &t in grid {
        check_unit(t, "t")?;
    }
    let n = y.len();
    let col: Vec<f64> = x.column(k).iter().copied().collect();
    let perm = sorting_permutation(&col);
    let mut partial = Vec::with_capacity(n + 1);
    partial.push(0.0);
    let mut acc = 0.0;
    for &i in &perm {
        acc += y[i];
        partial.push(acc);
    }
    let root = (n as f64).sqrt();
    Ok(grid.iter().map(|&t| partial[floor_index(n, t)] / root).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(residuals: &[f64]) -> OrderedView {
        let n = residuals.len();
        OrderedView {
            column: 0,
            perm: (0..n).collect(),
            sorted_regressors: DMatrix::zeros(n, 1),
            sorted_response: DVector::zeros(n),
            sorted_residuals: DVector::from_row_slice(residuals),
        }
    }

    #[test]
    fn two_residual_bridge() {
        let b = residual_bridge(&view(&[1.0, -1.0]), 1.0).unwrap();
        assert_eq!(b.values()[0], 0.0);
        assert!((b.values()[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(b.values()[2].abs() < 1e-15);
    }

    #[test]
    fn degenerate_variance_rejected() {
        for s in [0.0, -1.0, f64::NAN] {
            assert!(matches!(residual_bridge(&view(&[0.0, 0.0]), s), Err(Error::Degenerate { .. })));
        }
    }

    #[test]
    fn rescaling_leaves_bridge_unchanged() {
        let e = [0.4, -1.3, 2.2, -0.1, -1.2];
        let s2: f64 = e.iter().map(|v| v * v).sum::<f64>() / 3.0;
        let b = residual_bridge(&view(&e), s2).unwrap();
        let c = 7.5;
        let scaled: Vec<f64> = e.iter().map(|v| c * v).collect();
        let s2c: f64 = scaled.iter().map(|v| v * v).sum::<f64>() / 3.0;
        let bc = residual_bridge(&view(&scaled), s2c).unwrap();
        for (a, b) in b.values().iter().zip(bc.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluation() {
        let b = BridgeProcess::from_nodes(0, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(b.evaluate(0.25).unwrap(), 0.5);
        assert_eq!(b.evaluate(0.0).unwrap(), 0.0);
        assert_eq!(b.evaluate(0.5).unwrap(), 1.0);
        assert!(b.evaluate(1.5).is_err());
        assert!(b.evaluate(-0.1).is_err());
        let nodes: Vec<f64> = (0..=10).map(|k| if k == 0 { 0.0 } else { (k as f64).sin() }).collect();
        let b = BridgeProcess::from_nodes(0, nodes.clone()).unwrap();
        for k in 0..=10 {
            assert_eq!(b.evaluate(k as f64 / 10.0).unwrap(), nodes[k]);
        }
    }

    #[test]
    fn omega_sq_closed_forms() {
        let b = BridgeProcess::from_nodes(0, vec![0.0, 1.0, 0.0]).unwrap();
        assert!((omega_sq(&[b.clone()]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(omega_sq(&[b.clone(), b.clone()]).unwrap(), 2.0 * omega_sq(&[b.clone()]).unwrap());
        let zero = BridgeProcess::from_nodes(0, vec![0.0; 5]).unwrap();
        assert_eq!(omega_sq(&[zero]).unwrap(), 0.0);
        let other = BridgeProcess::from_nodes(1, vec![0.0; 4]).unwrap();
        assert!(omega_sq(&[b, other]).is_err());
    }

    #[test]
    fn bridge_csv() {
        let b = BridgeProcess::from_nodes(0, vec![0.0, 1.0, 0.0]).unwrap();
        let mut out = Vec::new();
        b.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "t,value\n0,0\n0.5,1\n1,0\n");
    }

    #[test]
    fn field_boundaries() {
        let x = DMatrix::from_row_slice(3, 2, &[0.2, 0.9, 0.5, 0.1, 0.7, 0.7]);
        let y = DVector::from_row_slice(&[1.0, -2.0, 4.0]);
        let out = empirical_field(&x, &y, &[vec![1.0, 1.0], vec![0.0, 0.5]], &[0.0, 0.0]).unwrap();
        assert!((out[0] - 3.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(out[1], 0.0);
        assert!(empirical_field(&x, &y, &[vec![1.0]], &[0.0]).is_err());
    }

    #[test]
    fn concomitant_process_ends() {
        let x = DMatrix::from_row_slice(3, 2, &[0.2, 0.9, 0.5, 0.1, 0.7, 0.7]);
        let y = DVector::from_row_slice(&[1.0, -2.0, 4.0]);
        for k in 0..2 {
            let z = concomitant_sum_process(&x, &y, k, &[0.0, 1.0]).unwrap();
            assert_eq!(z[0], 0.0);
            assert!((z[1] - 3.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        assert!(concomitant_sum_process(&x, &y, 2, &[0.5]).is_err());
    }
}
