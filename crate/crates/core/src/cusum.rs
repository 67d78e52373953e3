//! CUSUM of the link estimate over time.
//!
//! For a grid point `x` the normalized CUSUM path is
//!
//! ```text
//! B_n(k/n, x) = ( Σ_{t<=k} ĥ_t(x) - (k/n) Σ_{t<=n} ĥ_t(x) ) / (σ̂_n(x) √n),   k = 1..n
//! ```
//!
//! It is a step function of `τ = k/n`, so its sup over `τ ∈ [0, 1]` is the
//! max over `k`. That sup is `A(x)`; the aggregate statistic averages it over
//! the grid, `S_M = (1/M) Σ w_i A(x_i)`.

use serde::Serialize;

use crate::estimator::LinkEstimate;
use crate::panel::EvaluationGrid;
use crate::{Error, Result};

/// Normalized CUSUM path `B_n(k/n, x)` for `k = 1..n`.
///
/// A zero `sigma_hat` (constant `h_col`) yields the zero path. The last
/// entry is exactly 0.
pub fn cusum_path(h_col: &[f64], sigma_hat: f64) -> Vec<f64> {
    let n = h_col.len();
    if sigma_hat == 0.0 {
        return vec![0.0; n];
    }
    let total: f64 = h_col.iter().sum();
    let scale = sigma_hat * (n as f64).sqrt();
    let mut partial = 0.0;
    h_col
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            partial += h;
            let frac = (k + 1) as f64 / n as f64;
            (partial - frac * total) / scale
        })
        .collect()
}

/// `max_k |path_k|`; 0 for an empty path.
pub fn sup_statistic(path: &[f64]) -> f64 {
    path.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CusumResult {
    /// `A(x_i)` per grid point.
    pub a_values: Vec<f64>,
    /// `S_M(w)`.
    pub s_m: f64,
    /// Grid indices with `σ̂_n(x_i) = 0`; they contribute `A = 0`.
    pub degenerate_points: Vec<usize>,
}

impl CusumResult {
    pub fn all_degenerate(&self) -> bool {
        self.degenerate_points.len() == self.a_values.len()
    }
}

pub fn s_m_statistic(estimate: &LinkEstimate, grid: &EvaluationGrid) -> Result<CusumResult> {
    if estimate.grid_len() != grid.len() {
        return Err(Error::Dimension(format!(
            "estimate has {} grid points, grid has {}",
            estimate.grid_len(),
            grid.len()
        )));
    }
    let a_values: Vec<f64> = (0..grid.len())
        .map(|i| sup_statistic(&cusum_path(&estimate.grid_column(i), estimate.sigma_hat[i])))
        .collect();
    let degenerate_points = (0..grid.len()).filter(|&i| estimate.degenerate[i]).collect();
    Ok(CusumResult {
        s_m: weighted_mean(&a_values, grid.weights()),
        a_values,
        degenerate_points,
    })
}

/// `(1/M) Σ w_i a_i`. The divisor is `M`, not the weight total.
pub(crate) fn weighted_mean(a_values: &[f64], weights: &[f64]) -> f64 {
    let sum: f64 = a_values.iter().zip(weights).map(|(a, w)| a * w).sum();
    sum / a_values.len() as f64
}
