//! Ingredients of the limiting covariance of the residual bridges,
//!
//! ```text
//! K_ij(s, t) = P(X_i <= s, X_j <= t) - L_i(s) G^{-1} L_j(t)^T
//! ```
//!
//! where `L_j(x) = int_0^x E[xi | X_j = v] dv` is the induced generalised
//! Lorentz curve of ordering `j` and `G = E xi^T xi`. A [`CovarianceModel`]
//! is either estimated from a dataset (empirical Lorentz curves, `xi^T xi / n`,
//! and the rank-threshold estimator of the joint distribution of the latent
//! ranks) or built in closed form from a synthetic model.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dataset::{Copula, Dataset, QuantileFn, RegressorSpec, SyntheticModel};
use crate::error::{Error, Result};
use crate::ols::CONDITION_LIMIT;
use crate::ordering::{sorting_permutation, OrderedView};
use crate::quadrature::adaptive_simpson;
use crate::util::{check_unit, floor_index};

/// Absolute tolerance for quadrature on analytic fixtures.
pub const QUAD_TOL: f64 = 1e-12;

/// One component of an exact Lorentz curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LorentzPart {
    /// Regressor driven by the ordering coordinate itself: `int_0^x F^{-1}`.
    Own(QuantileFn),
    /// Regressor independent of the ordering coordinate: `mean * x`.
    Mean(f64),
}

impl LorentzPart {
    fn eval(&self, x: f64) -> f64 {
        match self {
            LorentzPart::Own(q) => q
                .partial_integral(x)
                .unwrap_or_else(|| adaptive_simpson(&|u| q.eval(u), 0.0, x, QUAD_TOL)),
            LorentzPart::Mean(m) => m * x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LorentzCurve {
    /// Values at `k/n`, `k = 0..n` (rows), linearly interpolated.
    Nodes(DMatrix<f64>),
    Exact(Vec<LorentzPart>),
}

impl LorentzCurve {
    pub fn p(&self) -> usize {
        match self {
            LorentzCurve::Nodes(v) => v.ncols(),
            LorentzCurve::Exact(parts) => parts.len(),
        }
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        match self {
            LorentzCurve::Nodes(v) => {
                let n = v.nrows() - 1;
                let x = t * n as f64;
                let r = x.round();
                if (x - r).abs() <= 8.0 * f64::EPSILON * r.max(1.0) {
                    return v.row(r as usize).transpose();
                }
                let k = (x.floor() as usize).min(n - 1);
                let w = x - k as f64;
                (v.row(k) * (1.0 - w) + v.row(k + 1) * w).transpose()
            }
            LorentzCurve::Exact(parts) => DVector::from_iterator(parts.len(), parts.iter().map(|p| p.eval(t))),
        }
    }
}

/// `P(X_i <= s, X_j <= t)` for ordering positions `i`, `j`.
#[derive(Clone)]
pub enum JointCdf {
    /// Rank-threshold estimator. `min_ranks[i][k]` is one plus the number of
    /// rows whose `i`-th ordering value is strictly below row `k`'s, so that
    /// `xi_ki <= (a-th order statistic)` iff `min_ranks[i][k] <= a`.
    Empirical { n: usize, min_ranks: Vec<Vec<u32>> },
    /// Product copula: `min(s,t)` on the diagonal, `s t` off it.
    Independence,
    Custom(Arc<dyn Fn(usize, usize, f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for JointCdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JointCdf::Empirical { n, min_ranks } => f
                .debug_struct("Empirical")
                .field("n", n)
                .field("orderings", &min_ranks.len())
                .finish(),
            JointCdf::Independence => f.write_str("Independence"),
            JointCdf::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl JointCdf {
    fn eval(&self, i: usize, j: usize, s: f64, t: f64) -> f64 {
        match self {
            JointCdf::Empirical { n, min_ranks } => {
                let (a, b) = (floor_index(*n, s) as u32, floor_index(*n, t) as u32);
                if a == 0 || b == 0 {
                    return 0.0;
                }
                let count = min_ranks[i]
                    .iter()
                    .zip(&min_ranks[j])
                    .filter(|(&ri, &rj)| ri <= a && rj <= b)
                    .count();
                count as f64 / *n as f64
            }
            JointCdf::Independence => {
                if i == j {
                    s.min(t)
                } else {
                    s * t
                }
            }
            JointCdf::Custom(f) => f(i, j, s, t),
        }
    }

    /// Table `P(X_i <= s_a, X_j <= t_b)` over increasing `s`, `t` points.
    fn grid(&self, i: usize, j: usize, s: &[f64], t: &[f64]) -> DMatrix<f64> {
        match self {
            JointCdf::Empirical { n, min_ranks } => {
                // Bucket each row by the first grid index whose rank threshold
                // admits it, then take 2-D prefix sums: O(n + |s| |t|).
                let thresh = |pts: &[f64]| pts.iter().map(|&x| floor_index(*n, x) as u32).collect::<Vec<_>>();
                let (ta, tb) = (thresh(s), thresh(t));
                let mut hist = DMatrix::<f64>::zeros(s.len() + 1, t.len() + 1);
                for (&ri, &rj) in min_ranks[i].iter().zip(&min_ranks[j]) {
                    let a = ta.partition_point(|&x| x < ri);
                    let b = tb.partition_point(|&x| x < rj);
                    hist[(a, b)] += 1.0;
                }
                let mut out = DMatrix::zeros(s.len(), t.len());
                for a in 0..s.len() {
                    let mut row = 0.0;
                    for b in 0..t.len() {
                        row += hist[(a, b)];
                        out[(a, b)] = row + if a > 0 { out[(a - 1, b)] } else { 0.0 };
                    }
                }
                out.iter_mut().for_each(|v| *v /= *n as f64);
                out
            }
            _ => DMatrix::from_fn(s.len(), t.len(), |a, b| self.eval(i, j, s[a], t[b])),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Empirical { n: usize },
    Analytic { model: String },
    Custom,
}

#[derive(Debug, Clone)]
pub struct CovarianceModel {
    /// Dataset column (empirical) or latent coordinate (analytic) of each ordering.
    pub order_columns: Vec<usize>,
    pub lorentz: Vec<LorentzCurve>,
    pub gram: DMatrix<f64>,
    pub gram_inv: DMatrix<f64>,
    pub joint: JointCdf,
    pub source: Source,
}

/// Symmetric inverse of a Gram matrix, refusing ill-conditioned input.
pub fn invert_gram(gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sv = gram.clone().singular_values();
    let (hi, lo) = sv.iter().fold((0.0f64, f64::INFINITY), |(h, l), &s| (h.max(s), l.min(s)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::Singular {
            condition,
            limit: CONDITION_LIMIT,
        });
    }
    let inv = gram.clone().try_inverse().ok_or(Error::Singular {
        condition,
        limit: CONDITION_LIMIT,
    })?;
    Ok((&inv + inv.transpose()) * 0.5)
}

/// `x^T A y`, summed so that swapping `x` and `y` gives a bitwise-equal result
/// when `A` is symmetric.
fn bilinear(x: &DVector<f64>, a: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let p = x.len();
    let mut acc = 0.0;
    for r in 0..p {
        acc += x[r] * y[r] * a[(r, r)];
        for c in r + 1..p {
            acc += (x[r] * y[c] + x[c] * y[r]) * a[(r, c)];
        }
    }
    acc
}

impl CovarianceModel {
    /// Assemble a model from explicit ingredients. `gram_inv` is taken as given.
    pub fn from_parts(
        order_columns: Vec<usize>,
        lorentz: Vec<LorentzCurve>,
        gram: DMatrix<f64>,
        gram_inv: DMatrix<f64>,
        joint: JointCdf,
    ) -> Result<Self> {
        let p = gram.nrows();
        if gram.ncols() != p || gram_inv.shape() != (p, p) {
            return Err(Error::DimensionMismatch("Gram matrix and its inverse must be p x p".into()));
        }
        if lorentz.len() != order_columns.len() || lorentz.iter().any(|l| l.p() != p) {
            return Err(Error::DimensionMismatch(format!(
                "need one Lorentz curve of length {p} per ordering"
            )));
        }
        Ok(Self {
            order_columns,
            lorentz,
            gram,
            gram_inv,
            joint,
            source: Source::Custom,
        })
    }

    /// Plug-in model from data: empirical Lorentz curves along every ordering
    /// column, `xi^T xi / n`, and the rank-threshold joint CDF.
    pub fn empirical(data: &Dataset) -> Result<Self> {
        let n = data.n();
        if n > u32::MAX as usize {
            return Err(Error::InvalidArgument("dataset too large".into()));
        }
        let gram = estimate_gram(data);
        let gram_inv = invert_gram(&gram)?;
        let mut lorentz = Vec::with_capacity(data.order_columns().len());
        let mut min_ranks = Vec::with_capacity(data.order_columns().len());
        for &c in data.order_columns() {
            let col: Vec<f64> = data.regressors().column(c).iter().copied().collect();
            let perm = sorting_permutation(&col);
            lorentz.push(lorentz_nodes(&data.regressors().select_rows(&perm)));
            min_ranks.push(min_ranks_from_perm(&col, &perm));
        }
        Ok(Self {
            order_columns: data.order_columns().to_vec(),
            lorentz,
            gram,
            gram_inv,
            joint: JointCdf::Empirical { n, min_ranks },
            source: Source::Empirical { n },
        })
    }

    pub fn d_order(&self) -> usize {
        self.lorentz.len()
    }

    pub fn p(&self) -> usize {
        self.gram.nrows()
    }

    pub fn lorentz_at(&self, i: usize, t: f64) -> DVector<f64> {
        self.lorentz[i].eval(t)
    }

    fn check(&self, i: usize, j: usize, s: f64, t: f64) -> Result<()> {
        let d = self.d_order();
        if i >= d || j >= d {
            return Err(Error::InvalidArgument(format!("ordering index ({i}, {j}) out of range (d = {d})")));
        }
        check_unit(s, "s")?;
        check_unit(t, "t")
    }

    pub fn joint_cdf(&self, i: usize, j: usize, s: f64, t: f64) -> Result<f64> {
        self.check(i, j, s, t)?;
        Ok(self.joint.eval(i, j, s, t))
    }

    /// `K_ij(s,t) = P(X_i <= s, X_j <= t) - L_i(s) G^{-1} L_j(t)^T`.
    pub fn khat(&self, i: usize, j: usize, s: f64, t: f64) -> Result<f64> {
        self.check(i, j, s, t)?;
        let (ls, lt) = (self.lorentz_at(i, s), self.lorentz_at(j, t));
        Ok(self.joint.eval(i, j, s, t) - bilinear(&ls, &self.gram_inv, &lt))
    }

    /// `K_ij(s_a, t_b)` over point lists.
    pub fn khat_block(&self, i: usize, j: usize, s: &[f64], t: &[f64]) -> Result<DMatrix<f64>> {
        for &x in s.iter().chain(t) {
            self.check(i, j, x, x)?;
        }
        let ls: Vec<_> = s.iter().map(|&x| self.lorentz_at(i, x)).collect();
        let lt: Vec<_> = t.iter().map(|&x| self.lorentz_at(j, x)).collect();
        let mut out = self.joint.grid(i, j, s, t);
        for a in 0..s.len() {
            for b in 0..t.len() {
                out[(a, b)] -= bilinear(&ls[a], &self.gram_inv, &lt[b]);
            }
        }
        Ok(out)
    }

    /// CSV `i,j,s,t,value` of the kernel on `points x points` for every ordering pair.
    pub fn write_khat_csv<W: Write>(&self, points: &[f64], writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["i", "j", "s", "t", "value"])?;
        for i in 0..self.d_order() {
            for j in 0..self.d_order() {
                let block = self.khat_block(i, j, points, points)?;
                for (a, s) in points.iter().enumerate() {
                    for (b, t) in points.iter().enumerate() {
                        wtr.write_record([
                            i.to_string(),
                            j.to_string(),
                            s.to_string(),
                            t.to_string(),
                            block[(a, b)].to_string(),
                        ])?;
                    }
                }
            }
        }
        wtr.flush().map_err(|e| Error::io("<khat csv>", e))?;
        Ok(())
    }
}

fn lorentz_nodes(sorted_regressors: &DMatrix<f64>) -> LorentzCurve {
    let (n, p) = sorted_regressors.shape();
    let mut nodes = DMatrix::zeros(n + 1, p);
    for k in 0..n {
        for c in 0..p {
            nodes[(k + 1, c)] = nodes[(k, c)] + sorted_regressors[(k, c)];
        }
    }
    // Divide after summing so node k equals (1/n) * (partial sum) exactly.
    nodes /= n as f64;
    LorentzCurve::Nodes(nodes)
}

fn min_ranks_from_perm(values: &[f64], perm: &[usize]) -> Vec<u32> {
    let mut ranks = vec![0u32; values.len()];
    let mut run_start = 0;
    for (pos, &row) in perm.iter().enumerate() {
        if pos > 0 && values[perm[pos - 1]] != values[row] {
            run_start = pos;
        }
        ranks[row] = run_start as u32 + 1;
    }
    ranks
}

/// `L_j(k/n) = (1/n) sum_{i <= k} xi_i^{(j)}` along a sorted view.
pub fn estimate_lorentz(view: &OrderedView) -> LorentzCurve {
    lorentz_nodes(&view.sorted_regressors)
}

/// `xi^T xi / n`.
pub fn estimate_gram(data: &Dataset) -> DMatrix<f64> {
    data.regressors().tr_mul(data.regressors()) / data.n() as f64
}

/// `(1/n) sum_k 1{xi_ki <= xi_([ns]),i, xi_kj <= xi_([nt]),j}` for regressor
/// columns `i`, `j`; zero when `[ns]` or `[nt]` is zero.
pub fn estimate_joint_cdf(data: &Dataset, i: usize, j: usize, s: f64, t: f64) -> Result<f64> {
    let p = data.p();
    if i >= p || j >= p {
        return Err(Error::InvalidArgument(format!("column ({i}, {j}) out of range (p = {p})")));
    }
    check_unit(s, "s")?;
    check_unit(t, "t")?;
    let n = data.n();
    let (a, b) = (floor_index(n, s), floor_index(n, t));
    if a == 0 || b == 0 {
        return Ok(0.0);
    }
    let order_stat = |c: usize, k: usize| {
        let mut v: Vec<f64> = data.regressors().column(c).iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v[k - 1]
    };
    let (ti, tj) = (order_stat(i, a), order_stat(j, b));
    let x = data.regressors();
    let count = (0..n).filter(|&k| x[(k, i)] <= ti && x[(k, j)] <= tj).count();
    Ok(count as f64 / n as f64)
}

/// Marginal moments of an analytic fixture: regressor means and `E xi^T xi`.
struct Moments {
    means: Vec<f64>,
    gram: DMatrix<f64>,
}

fn analytic_moments(model: &SyntheticModel) -> Result<Moments> {
    model.validate()?;
    if model.copula != Copula::Independence {
        return Err(Error::Unsupported(
            "closed-form covariance is available for the independence copula only".into(),
        ));
    }
    let q = |spec: &RegressorSpec| -> Result<Option<(usize, QuantileFn)>> {
        match *spec {
            RegressorSpec::Intercept => Ok(None),
            RegressorSpec::Latent { coord, quantile } if quantile.is_bounded() => Ok(Some((coord, quantile))),
            RegressorSpec::Latent { quantile, .. } => Err(Error::Unsupported(format!(
                "closed-form covariance needs bounded quantile functions, got {quantile:?}"
            ))),
        }
    };
    let specs = model
        .regressors
        .iter()
        .map(q)
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = specs
        .iter()
        .map(|s| match s {
            None => 1.0,
            Some((_, f)) => adaptive_simpson(&|u| f.eval(u), 0.0, 1.0, QUAD_TOL),
        })
        .collect();
    let p = specs.len();
    let gram = DMatrix::from_fn(p, p, |r, c| match (&specs[r], &specs[c]) {
        (Some((kr, fr)), Some((kc, fc))) if kr == kc => {
            adaptive_simpson(&|u| fr.eval(u) * fc.eval(u), 0.0, 1.0, QUAD_TOL)
        }
        _ => means[r] * means[c],
    });
    Ok(Moments { means, gram })
}

/// Closed-form model for an independence-copula fixture with bounded
/// quantile functions. Orderings are the latent coordinates `0..d1`.
pub fn analytic_covariance(model: &SyntheticModel) -> Result<CovarianceModel> {
    let Moments { means, gram } = analytic_moments(model)?;
    let gram_inv = invert_gram(&gram)?;
    let lorentz = (0..model.d1)
        .map(|j| {
            LorentzCurve::Exact(
                model
                    .regressors
                    .iter()
                    .zip(&means)
                    .map(|(spec, &mean)| match *spec {
                        RegressorSpec::Latent { coord, quantile } if coord == j => LorentzPart::Own(quantile),
                        _ => LorentzPart::Mean(mean),
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(CovarianceModel {
        order_columns: (0..model.d1).collect(),
        lorentz,
        gram,
        gram_inv,
        joint: JointCdf::Independence,
        source: Source::Analytic {
            model: format!("independence/d1={}/p={}", model.d1, model.p()),
        },
    })
}

/// Largest entrywise gap between `int_0^1 (b_j^2(x) + h_j(x)^T h_j(x)) dx` and
/// `G`, both sides by quadrature, for latent coordinate `j`.
pub fn verify_gram_identity(model: &SyntheticModel, j: usize) -> Result<f64> {
    if j >= model.d1 {
        return Err(Error::InvalidArgument(format!("coordinate {j} out of range (d1 = {})", model.d1)));
    }
    let Moments { means, gram } = analytic_moments(model)?;
    let regs = &model.regressors;
    let p = regs.len();
    // h_j(x)_r: regressor r given X_j = x.
    let h = |r: usize, x: f64| -> f64 {
        match regs[r] {
            RegressorSpec::Latent { coord, quantile } if coord == j => quantile.eval(x),
            _ => means[r],
        }
    };
    // b_j^2(x)_{rs}: conditional covariance given X_j = x. Only regressors
    // driven by the same other coordinate co-vary.
    let b2 = |r: usize, s: usize| -> f64 {
        match (regs[r], regs[s]) {
            (
                RegressorSpec::Latent { coord: kr, quantile: qr },
                RegressorSpec::Latent { coord: ks, quantile: qs },
            ) if kr == ks && kr != j => {
                adaptive_simpson(&|u| qr.eval(u) * qs.eval(u), 0.0, 1.0, QUAD_TOL) - means[r] * means[s]
            }
            _ => 0.0,
        }
    };
    let mut worst = 0.0f64;
    for r in 0..p {
        for s in 0..p {
            let cov = b2(r, s);
            let lhs = adaptive_simpson(&|x| cov + h(r, x) * h(s, x), 0.0, 1.0, QUAD_TOL);
            worst = worst.max((lhs - gram[(r, s)]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Noise;

    fn single_uniform() -> SyntheticModel {
        SyntheticModel::regression(Copula::Independence, &[QuantileFn::Identity], true, vec![1.0, 0.0], Noise::normal(1.0))
    }

    fn two_uniform() -> SyntheticModel {
        SyntheticModel::regression(
            Copula::Independence,
            &[QuantileFn::Identity, QuantileFn::Identity],
            true,
            vec![1.0, 1.0, 0.0],
            Noise::normal(1.0),
        )
    }

    fn data(rows: &[&[f64]], order: Vec<usize>, intercept: Option<usize>) -> Dataset {
        let p = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Dataset::new(
            (0..p).map(|i| format!("c{i}")).collect(),
            "y",
            DMatrix::from_row_slice(rows.len(), p, &flat),
            DVector::zeros(rows.len()),
            order,
            intercept,
        )
        .unwrap()
    }

    #[test]
    fn khat_single_uniform_fixture() {
        let cov = analytic_covariance(&single_uniform()).unwrap();
        let ginv = DMatrix::from_row_slice(2, 2, &[12.0, -6.0, -6.0, 4.0]);
        assert!((&cov.gram_inv - ginv).amax() < 1e-9);
        assert!(cov.khat(0, 0, 1.0, 1.0).unwrap().abs() < 1e-12);
        assert!((cov.khat(0, 0, 0.5, 0.5).unwrap() - 0.0625).abs() < 1e-12);
        assert_eq!(cov.khat(0, 0, 0.0, 0.7).unwrap(), 0.0);
        assert_eq!(cov.khat(0, 0, 0.3, 0.0).unwrap(), 0.0);
        assert!(cov.khat(0, 0, 1.2, 0.5).is_err());
        assert!(cov.khat(1, 0, 0.5, 0.5).is_err());
    }

    #[test]
    fn two_uniform_fixture() {
        let cov = analytic_covariance(&two_uniform()).unwrap();
        let g = DMatrix::from_row_slice(3, 3, &[1.0 / 3.0, 0.25, 0.5, 0.25, 1.0 / 3.0, 0.5, 0.5, 0.5, 1.0]);
        assert!((&cov.gram - g).amax() < 1e-12);
        for x in [0.0, 0.3, 1.0] {
            let l = cov.lorentz_at(0, x);
            assert!((l[0] - x * x / 2.0).abs() < 1e-15);
            assert!((l[1] - x / 2.0).abs() < 1e-12);
            assert!((l[2] - x).abs() < 1e-12);
        }
        assert_eq!(cov.joint_cdf(0, 1, 0.3, 0.6).unwrap(), 0.3 * 0.6);
        assert_eq!(cov.joint_cdf(1, 1, 0.3, 0.6).unwrap(), 0.3);
        let prod = &cov.gram * &cov.gram_inv;
        assert!((prod - DMatrix::identity(3, 3)).amax() < 1e-8);
        // khat symmetry is exact on analytic fixtures.
        for (s, t) in [(0.2, 0.7), (0.55, 0.1), (1.0, 0.4)] {
            assert_eq!(cov.khat(0, 1, s, t).unwrap(), cov.khat(1, 0, t, s).unwrap());
        }
    }

    #[test]
    fn diagonal_reduction() {
        let cov = analytic_covariance(&two_uniform()).unwrap();
        for (s, t) in [(0.2f64, 0.7), (0.5, 0.5), (0.9, 0.3)] {
            let direct = s.min(t) - cov.lorentz_at(1, s).dot(&(&cov.gram_inv * cov.lorentz_at(1, t)));
            assert!((cov.khat(1, 1, s, t).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_identity_fixtures() {
        assert!(verify_gram_identity(&two_uniform(), 0).unwrap() < 1e-8);
        assert!(verify_gram_identity(&two_uniform(), 1).unwrap() < 1e-8);
        let affine = SyntheticModel::regression(
            Copula::Independence,
            &[QuantileFn::Affine { shift: 0.0, scale: 2.0 }],
            true,
            vec![0.0, 0.0],
            Noise::normal(1.0),
        );
        assert!(verify_gram_identity(&affine, 0).unwrap() < 1e-8);
        let g = analytic_covariance(&affine).unwrap().gram;
        assert!((g[(0, 0)] - 4.0 / 3.0).abs() < 1e-12);
        let mut intercept_only = single_uniform();
        intercept_only.regressors = vec![RegressorSpec::Intercept];
        intercept_only.theta = vec![0.0];
        assert_eq!(verify_gram_identity(&intercept_only, 0).unwrap(), 0.0);
        assert!(verify_gram_identity(&two_uniform(), 2).is_err());
    }

    #[test]
    fn unsupported_models() {
        let mut m = single_uniform();
        m.copula = Copula::Gaussian {
            correlation: DMatrix::identity(1, 1),
        };
        assert!(matches!(analytic_covariance(&m), Err(Error::Unsupported(_))));
        let m = SyntheticModel::regression(
            Copula::Independence,
            &[QuantileFn::Normal { mean: 0.0, sd: 1.0 }],
            true,
            vec![0.0, 0.0],
            Noise::normal(1.0),
        );
        assert!(matches!(verify_gram_identity(&m, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn empirical_lorentz_and_gram() {
        let d = data(&[&[0.9, 1.0], &[0.2, 1.0], &[0.4, 1.0]], vec![0], Some(1));
        let cov = CovarianceModel::empirical(&d).unwrap();
        let expect = [(1.0 / 3.0, 0.2 / 3.0), (2.0 / 3.0, 0.2), (1.0, 0.5)];
        for (t, v) in expect {
            let l = cov.lorentz_at(0, t);
            assert!((l[0] - v).abs() < 1e-4);
            assert!((l[1] - t).abs() < 1e-15);
        }
        assert_eq!(cov.lorentz_at(0, 0.0), DVector::zeros(2));

        let d = data(&[&[0.0, 1.0], &[1.0, 1.0]], vec![0], Some(1));
        let g = estimate_gram(&d);
        assert_eq!(g, DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 1.0]));
        let d = data(&[&[2.0, 3.0]], vec![0, 1], None);
        assert_eq!(estimate_gram(&d), DMatrix::from_row_slice(2, 2, &[4.0, 6.0, 6.0, 9.0]));
    }

    #[test]
    fn joint_cdf_estimator_basics() {
        let d = data(
            &[&[0.5, 0.1, 1.0], &[0.1, 0.7, 1.0], &[0.3, 0.2, 1.0], &[0.8, 0.9, 1.0]],
            vec![0, 1],
            Some(2),
        );
        for k in 0..=4 {
            let s = k as f64 / 4.0;
            assert_eq!(estimate_joint_cdf(&d, 0, 0, s, s).unwrap(), k as f64 / 4.0);
        }
        assert_eq!(estimate_joint_cdf(&d, 0, 1, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(estimate_joint_cdf(&d, 0, 1, 0.2, 1.0).unwrap(), 0.0);
        // x <= 0.3 and z <= 0.2: rows (0.3, 0.2) only
        assert_eq!(estimate_joint_cdf(&d, 0, 1, 0.5, 0.5).unwrap(), 0.25);
        let cov = CovarianceModel::empirical(&d).unwrap();
        assert_eq!(cov.joint_cdf(0, 1, 0.5, 0.5).unwrap(), 0.25);
    }

    #[test]
    fn min_ranks_handle_ties() {
        let v = [0.5, 0.1, 0.5, 0.2];
        let perm = sorting_permutation(&v);
        assert_eq!(min_ranks_from_perm(&v, &perm), vec![3, 1, 3, 2]);
    }
}
