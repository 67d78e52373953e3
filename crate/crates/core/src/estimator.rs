//! Empirical CDF, sample quantiles and the link estimator.
//!
//! At each time `t` the link is estimated by composing the empirical CDF of
//! the Y column with the sample quantile of the X column:
//!
//! ```text
//! ĥ_t(x) = X_(r),t    with    r = clamp(ceil(N_x Ĝ_t(x)), 1, N_x)
//! ```
//!
//! The ceiling agrees with the textbook `floor(N p) + 1` rank whenever
//! `N p` is not an integer, and returns `X_(N p)` when it is. With that
//! choice `ĥ_t` is exactly the identity on any value observed in the Y
//! column whenever the two columns coincide.

use crate::panel::{EvaluationGrid, PanelPair};
use crate::{Error, Result};

/// `#{i : sample_i <= x} / N`. An empty sample yields 0.
pub fn empirical_cdf(sample: &[f64], x: f64) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let count = sample.iter().filter(|&&v| v <= x).count();
    count as f64 / sample.len() as f64
}

/// Order statistic `X_(r)` with `r = clamp(ceil(N p), 1, N)`.
///
/// `N p` within a few ulps of an integer is treated as that integer, so that
/// e.g. `p = 2/3, N = 3` selects rank 2 rather than 3.
pub fn sample_quantile(sorted_sample: &[f64], p: f64) -> Result<f64> {
    if sorted_sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", p, "[0, 1]"));
    }
    let n = sorted_sample.len();
    let np = n as f64 * p;
    let nearest = np.round();
    let rank = if (np - nearest).abs() <= 4.0 * f64::EPSILON * np.max(1.0) {
        nearest
    } else {
        np.ceil()
    } as usize;
    Ok(sorted_sample[rank.clamp(1, n) - 1])
}

/// Rank `clamp(ceil(n_x * count / n_y), 1, n_x)` in exact integer arithmetic.
fn link_rank(count: usize, n_y: usize, n_x: usize) -> usize {
    (n_x * count).div_ceil(n_y).clamp(1, n_x)
}

/// `ĥ(x)` for one time point: the X order statistic at the rank given by the
/// Y empirical CDF at `x`.
pub fn link_at(x_column: &[f64], y_column: &[f64], x: f64) -> Result<f64> {
    if x_column.is_empty() || y_column.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = x_column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = y_column.iter().filter(|&&v| v <= x).count();
    Ok(sorted[link_rank(count, y_column.len(), x_column.len()) - 1])
}

/// Link estimates over all time points and grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkEstimate {
    /// `h_hat[t][i] = ĥ_t(x_i)`, `n` rows of `M` values.
    pub h_hat: Vec<Vec<f64>>,
    /// Time average of each grid column.
    pub h_bar: Vec<f64>,
    /// Root mean squared deviation of each grid column around `h_bar`.
    pub sigma_hat: Vec<f64>,
    /// `ĥ_t(x_i)` constant in `t`; `sigma_hat[i]` is then exactly 0.
    pub degenerate: Vec<bool>,
}

impl LinkEstimate {
    /// Computes the time summaries from a filled `n × M` matrix.
    pub fn from_h_hat(h_hat: Vec<Vec<f64>>) -> Self {
        let n = h_hat.len();
        let m = h_hat.first().map_or(0, Vec::len);
        let mut h_bar = vec![0.0; m];
        let mut sigma_hat = vec![0.0; m];
        let mut degenerate = vec![false; m];
        for i in 0..m {
            let col = h_hat.iter().map(|row| row[i]);
            let first = h_hat[0][i];
            if col.clone().all(|v| v == first) {
                h_bar[i] = first;
                degenerate[i] = true;
                continue;
            }
            let mean = col.clone().sum::<f64>() / n as f64;
            let var = col.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            h_bar[i] = mean;
            sigma_hat[i] = var.sqrt();
        }
        LinkEstimate {
            h_hat,
            h_bar,
            sigma_hat,
            degenerate,
        }
    }

    pub fn times(&self) -> usize {
        self.h_hat.len()
    }

    pub fn grid_len(&self) -> usize {
        self.h_bar.len()
    }

    /// `ĥ_t(x_i)` for `t = 1..n`.
    pub fn grid_column(&self, i: usize) -> Vec<f64> {
        self.h_hat.iter().map(|row| row[i]).collect()
    }
}

pub fn estimate_links(pair: &PanelPair, grid: &EvaluationGrid) -> LinkEstimate {
    estimate_from_columns(pair.x().columns(), pair.y().columns(), grid.points())
}

/// Link estimates from raw columns; the bootstrap feeds resampled columns
/// through here without building panels.
pub(crate) fn estimate_from_columns(x_cols: &[Vec<f64>], y_cols: &[Vec<f64>], points: &[f64]) -> LinkEstimate {
    let mut x_sorted = Vec::new();
    let mut y_sorted = Vec::new();
    let h_hat = x_cols
        .iter()
        .zip(y_cols)
        .map(|(xc, yc)| {
            x_sorted.clone_from(xc);
            y_sorted.clone_from(yc);
            x_sorted.sort_unstable_by(f64::total_cmp);
            y_sorted.sort_unstable_by(f64::total_cmp);
            let (n_x, n_y) = (x_sorted.len(), y_sorted.len());
            points
                .iter()
                .map(|&x| {
                    let count = y_sorted.partition_point(|&v| v <= x);
                    x_sorted[link_rank(count, n_y, n_x) - 1]
                })
                .collect()
        })
        .collect();
    LinkEstimate::from_h_hat(h_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{Pairing, Panel};
    use proptest::prelude::*;

    #[test]
    fn ecdf_examples() {
        let s = [1.0, 2.0, 3.0];
        assert_eq!(empirical_cdf(&s, 2.0), 2.0 / 3.0);
        assert_eq!(empirical_cdf(&s, 0.5), 0.0);
        assert_eq!(empirical_cdf(&s, 3.0), 1.0);
    }

    #[test]
    fn quantile_examples() {
        let s = [10.0, 20.0, 30.0, 40.0];
        assert_eq!(sample_quantile(&s, 0.6).unwrap(), 30.0);
        assert_eq!(sample_quantile(&s, 0.0).unwrap(), 10.0);
        assert_eq!(sample_quantile(&s, 1.0).unwrap(), 40.0);
        assert_eq!(sample_quantile(&s, 0.5).unwrap(), 20.0);
        assert_eq!(sample_quantile(&[1.0, 2.0, 3.0], 2.0 / 3.0).unwrap(), 2.0);
        assert!(matches!(sample_quantile(&[], 0.5), Err(Error::EmptySample)));
        assert!(sample_quantile(&s, 1.5).is_err());
    }

    #[test]
    fn quantile_matches_floor_plus_one_off_integers() {
        let s: Vec<f64> = (1..=7).map(f64::from).collect();
        for k in 1..100 {
            let p = k as f64 / 100.0;
            let np = 7.0 * p;
            if (np - np.round()).abs() > 1e-9 {
                let r = np.floor() as usize + 1;
                assert_eq!(sample_quantile(&s, p).unwrap(), s[r - 1]);
            }
        }
    }

    #[test]
    fn link_examples() {
        let c = [1.0, 2.0, 3.0];
        assert_eq!(link_at(&c, &c, 2.0).unwrap(), 2.0);
        assert_eq!(
            link_at(&[0.0, 10.0, 20.0, 30.0], &[1.0, 2.0, 3.0, 4.0], 2.5).unwrap(),
            10.0
        );
        assert_eq!(link_at(&[5.0, -1.0, 3.0], &c, -10.0).unwrap(), -1.0);
        assert!(link_at(&[], &c, 0.0).is_err());
    }

    #[test]
    fn link_rank_agrees_with_composition() {
        for n_x in 1..12 {
            for n_y in 1..12 {
                for count in 0..=n_y {
                    let x: Vec<f64> = (1..=n_x).map(|v| v as f64).collect();
                    let direct = sample_quantile(&x, count as f64 / n_y as f64).unwrap();
                    assert_eq!(direct, x[link_rank(count, n_y, n_x) - 1], "{n_x} {n_y} {count}");
                }
            }
        }
    }

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn identical_panels_give_identity_and_degenerate_points() {
        // every column holds the same multiset, in a different order
        let rows = vec![vec![1.0, 3.0, 2.0], vec![2.0, 1.0, 3.0], vec![3.0, 2.0, 1.0]];
        let p = Panel::from_rows("x", ids(3), rows).unwrap();
        let pair = PanelPair::new(p.clone(), p, Pairing::Paired).unwrap();
        let grid = EvaluationGrid::uniform(vec![1.0, 2.0, 3.0]).unwrap();
        let est = estimate_links(&pair, &grid);
        for row in &est.h_hat {
            assert_eq!(row, &vec![1.0, 2.0, 3.0]);
        }
        assert_eq!(est.sigma_hat, vec![0.0; 3]);
        assert_eq!(est.degenerate, vec![true; 3]);
    }

    #[test]
    fn two_term_summary() {
        let est = LinkEstimate::from_h_hat(vec![vec![0.0], vec![2.0]]);
        assert_eq!(est.h_bar, vec![1.0]);
        assert_eq!(est.sigma_hat, vec![1.0]);
        assert_eq!(est.degenerate, vec![false]);
    }

    #[test]
    fn constant_column_is_exactly_degenerate() {
        let est = LinkEstimate::from_h_hat(vec![vec![0.1]; 3]);
        assert_eq!(est.sigma_hat, vec![0.0]);
        assert!(est.degenerate[0]);
    }

    fn column() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0..100.0f64, 1..40)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn monotone_in_x(xc in column(), yc in column(), a in -120.0..120.0f64, b in -120.0..120.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(link_at(&xc, &yc, lo).unwrap() <= link_at(&xc, &yc, hi).unwrap());
        }

        #[test]
        fn within_x_range(xc in column(), yc in column(), x in -120.0..120.0f64) {
            let h = link_at(&xc, &yc, x).unwrap();
            let min = xc.iter().copied().fold(f64::INFINITY, f64::min);
            let max = xc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(min <= h && h <= max);
            prop_assert!(xc.contains(&h));
        }

        #[test]
        fn equivariant_under_increasing_maps(xc in column(), yc in column(), x in -120.0..120.0f64) {
            let phi = |v: f64| v.powi(3) + 2.0 * v + 1.0;
            let mapped: Vec<f64> = xc.iter().map(|&v| phi(v)).collect();
            prop_assert_eq!(link_at(&mapped, &yc, x).unwrap(), phi(link_at(&xc, &yc, x).unwrap()));
        }

        #[test]
        fn identity_on_equal_samples(c in column(), pick in any::<prop::sample::Index>()) {
            let x = c[pick.index(c.len())];
            prop_assert_eq!(link_at(&c, &c, x).unwrap(), x);
        }
    }
}
