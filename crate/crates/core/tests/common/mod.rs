//! Reference computations shared by the integration tests. Nothing here calls
//! into the numerical core of the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Linear interpolation of nodes `z_k` at `k / n`.
fn interp(nodes: &[f64], t: f64) -> f64 {
    let n = nodes.len() - 1;
    let x = t * n as f64;
    let k = (x.floor() as usize).min(n - 1);
    let w = x - k as f64;
    nodes[k] * (1.0 - w) + nodes[k + 1] * w
}

/// Midpoint Riemann sum of `z(t)^2` with `points` cells.
pub fn riemann_integral_sq(nodes: &[f64], points: usize) -> f64 {
    let h = 1.0 / points as f64;
    (0..points)
        .map(|m| {
            let z = interp(nodes, (m as f64 + 0.5) * h);
            z * z
        })
        .sum::<f64>()
        * h
}

/// Pinned random walk scaled so that `max |z| <= bound`.
pub fn random_bridge_nodes<R: Rng>(rng: &mut R, n: usize, bound: f64) -> Vec<f64> {
    let mut walk = vec![0.0];
    let mut acc = 0.0;
    for _ in 0..n {
        acc += rng.sample::<f64, _>(StandardNormal) / (n as f64).sqrt();
        walk.push(acc);
    }
    let end = acc;
    let mut nodes: Vec<f64> = walk.iter().enumerate().map(|(k, w)| w - end * k as f64 / n as f64).collect();
    let amp: f64 = rng.random_range(0.1..3.0);
    let peak = nodes.iter().fold(0.0f64, |m, z| m.max(z.abs())) * amp;
    let s = if peak > bound { amp * bound / peak } else { amp };
    nodes.iter_mut().for_each(|z| *z *= s);
    nodes
}

/// Monte Carlo of `int_0^1 B(t)^2 dt` for a Brownian bridge built from a
/// random walk with `steps` increments (trapezoid rule). Returns sorted draws.
pub fn brownian_bridge_omega_draws(steps: usize, reps: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let h = 1.0 / steps as f64;
    let mut w = vec![0.0; steps + 1];
    let mut out: Vec<f64> = (0..reps)
        .map(|_| {
            for k in 1..=steps {
                w[k] = w[k - 1] + rng.sample::<f64, _>(StandardNormal) * h.sqrt();
            }
            let end = w[steps];
            let b = |k: usize| w[k] - end * k as f64 * h;
            (0..steps).map(|k| (b(k).powi(2) + b(k + 1).powi(2)) * 0.5 * h).sum()
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let k = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

/// Inverse of a 3x3 matrix by cofactors.
pub fn inverse3(a: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let c = |r: usize, s: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (s1, s2) = ((s + 1) % 3, (s + 2) % 3);
        a[r1][s1] * a[r2][s2] - a[r1][s2] * a[r2][s1]
    };
    let det = a[0][0] * c(0, 0) + a[0][1] * c(0, 1) + a[0][2] * c(0, 2);
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for s in 0..3 {
            inv[s][r] = c(r, s) / det;
        }
    }
    inv
}

/// Normal-equation solution `(X^T X)^{-1} X^T y` for three regressors.
pub fn normal_equations3(x: &[[f64; 3]], y: &[f64]) -> [f64; 3] {
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for (row, &yi) in x.iter().zip(y) {
        for r in 0..3 {
            xty[r] += row[r] * yi;
            for s in 0..3 {
                xtx[r][s] += row[r] * row[s];
            }
        }
    }
    let inv = inverse3(xtx);
    let mut theta = [0.0; 3];
    for r in 0..3 {
        theta[r] = (0..3).map(|s| inv[r][s] * xty[s]).sum();
    }
    theta
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level 0.01.
pub fn ks_critical_01(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n * m) as f64).sqrt()
}
