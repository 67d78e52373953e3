//! Naive bootstrap of `S_M` and the test decision.
//!
//! Each replication draws a new pair of panels with the original sizes
//! (`N_x` and `N_y`, or `N` jointly drawn pairs for paired panels),
//! recomputes `S_M`, and the observed `S_M` is compared with the empirical
//! distribution of the replicates. The statistic itself is not recentered.
//!
//! The draw scheme is set by [`Resampling`]. The default rotates each
//! resampled trajectory by a random cyclic time shift, which makes every
//! column of the replicate a draw from all time points at once: the link in
//! the bootstrap world is time-constant, as under the null, and the serial
//! dependence inside trajectories survives. Resampling trajectories as
//! observed reproduces the data's own time variation in every replicate and
//! gives a test with almost no power; it is kept for comparison.
//!
//! Replication `b` draws from its own stream keyed by `(seed, b)`, so the
//! bootstrap vector does not depend on how replications are scheduled.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{size_ratio, SIZE_RATIO_WARN_THRESHOLD};
use crate::cusum::{s_m_statistic, CusumResult};
use crate::estimator::{estimate_from_columns, estimate_links, sample_quantile};
use crate::panel::{EvaluationGrid, Pairing, Panel, PanelPair};
use crate::rng::{purpose_stream, BOOTSTRAP};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    /// Number of bootstrap replications `B`.
    pub replications: usize,
    pub alpha: f64,
    pub seed: u64,
    /// `size_ratio` above which the report carries a warning.
    pub size_ratio_threshold: f64,
    pub resampling: Resampling,
}

/// What a bootstrap draw resamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resampling {
    /// Each time column gets `N_x` X values and `N_y` Y values (or `N`
    /// pairs) drawn with replacement from the cells pooled over all time
    /// points. The resampled link is then constant in time.
    PooledCells,
    /// Whole subject trajectories drawn with replacement, each rotated in
    /// time by its own uniformly drawn cyclic shift. Every column mixes all
    /// time points, so the resampled link is constant in time, while the
    /// serial dependence within a trajectory is kept (up to the wrap).
    #[default]
    RotatedTrajectories,
    /// Whole subject trajectories drawn with replacement, as observed.
    Trajectories,
}

impl Resampling {
    pub const ALL: [Resampling; 3] = [
        Resampling::PooledCells,
        Resampling::RotatedTrajectories,
        Resampling::Trajectories,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Resampling::PooledCells => "pooled",
            Resampling::RotatedTrajectories => "rotated",
            Resampling::Trajectories => "trajectories",
        }
    }
}

impl std::str::FromStr for Resampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Resampling::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "resampling scheme",
                value: s.to_string(),
            })
    }
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replications: 200,
            alpha: 0.05,
            seed: 0,
            size_ratio_threshold: SIZE_RATIO_WARN_THRESHOLD,
            resampling: Resampling::default(),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("bootstrap replications must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain("alpha", self.alpha, "(0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `n (N_x + N_y) / (N_x N_y)`.
    #[serde(rename = "assumption4_ratio")]
    pub size_ratio: f64,
    pub degenerate_points: Vec<usize>,
    pub pairing: Pairing,
    pub resampling: &'static str,
    #[serde(rename = "N_x")]
    pub n_x: usize,
    #[serde(rename = "N_y")]
    pub n_y: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub s_m: f64,
    pub a_values: Vec<f64>,
    pub boot_stats: Vec<f64>,
    /// `(1 + #{b : S*_b >= S_M}) / (B + 1)`.
    pub p_value: f64,
    /// `S_M` strictly above the empirical `(1 - alpha)` quantile of the
    /// replicates.
    pub reject: bool,
    pub alpha: f64,
    pub diagnostics: Diagnostics,
}

/// Row indices for one trajectory resample: `(x_rows, y_rows)`.
fn draw_rows<R: Rng + ?Sized>(pair: &PanelPair, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let n_x = pair.x().subjects();
    let x_rows: Vec<usize> = (0..n_x).map(|_| rng.random_range(0..n_x)).collect();
    match pair.pairing() {
        Pairing::Paired => {
            let y_rows = x_rows.clone();
            (x_rows, y_rows)
        }
        Pairing::Independent => {
            let n_y = pair.y().subjects();
            let y_rows = (0..n_y).map(|_| rng.random_range(0..n_y)).collect();
            (x_rows, y_rows)
        }
    }
}

/// `times` columns of `size` cells drawn from the whole panel.
fn pooled_columns<R: Rng + ?Sized>(panel: &Panel, rng: &mut R) -> Vec<Vec<f64>> {
    let (size, times) = (panel.subjects(), panel.times());
    (0..times)
        .map(|_| {
            (0..size)
                .map(|_| panel.column(rng.random_range(0..times))[rng.random_range(0..size)])
                .collect()
        })
        .collect()
}

/// Resampled `(x_columns, y_columns)`.
fn draw_columns<R: Rng + ?Sized>(pair: &PanelPair, scheme: Resampling, rng: &mut R) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    match (scheme, pair.pairing()) {
        (Resampling::Trajectories, _) => {
            let (x_rows, y_rows) = draw_rows(pair, rng);
            (pair.x().gather_columns(&x_rows), pair.y().gather_columns(&y_rows))
        }
        (Resampling::RotatedTrajectories, pairing) => {
            let times = pair.times();
            let draw = |size: usize, rng: &mut R| -> Vec<(usize, usize)> {
                (0..size)
                    .map(|_| (rng.random_range(0..size), rng.random_range(0..times)))
                    .collect()
            };
            let rotate = |panel: &Panel, draws: &[(usize, usize)]| -> Vec<Vec<f64>> {
                (0..times)
                    .map(|t| {
                        draws
                            .iter()
                            .map(|&(i, shift)| panel.value(i, (t + shift) % times))
                            .collect()
                    })
                    .collect()
            };
            let x_draws = draw(pair.x().subjects(), rng);
            let y_draws = match pairing {
                Pairing::Paired => x_draws.clone(),
                Pairing::Independent => draw(pair.y().subjects(), rng),
            };
            (rotate(pair.x(), &x_draws), rotate(pair.y(), &y_draws))
        }
        (Resampling::PooledCells, Pairing::Independent) => {
            let x = pooled_columns(pair.x(), rng);
            (x, pooled_columns(pair.y(), rng))
        }
        (Resampling::PooledCells, Pairing::Paired) => {
            let (size, times) = (pair.x().subjects(), pair.times());
            let mut x_cols = Vec::with_capacity(times);
            let mut y_cols = Vec::with_capacity(times);
            for _ in 0..times {
                let cells: Vec<(usize, usize)> = (0..size)
                    .map(|_| (rng.random_range(0..times), rng.random_range(0..size)))
                    .collect();
                x_cols.push(cells.iter().map(|&(t, i)| pair.x().value(i, t)).collect());
                y_cols.push(cells.iter().map(|&(t, i)| pair.y().value(i, t)).collect());
            }
            (x_cols, y_cols)
        }
    }
}

/// One bootstrap resample.
///
/// Resampled subjects are named `<id>#<draw>` for trajectory draws and
/// `#<draw>` for pooled draws, so ids stay unique and paired panels share
/// them.
pub fn resample_pair<R: Rng + ?Sized>(pair: &PanelPair, scheme: Resampling, rng: &mut R) -> PanelPair {
    let ids = |panel: &Panel, rows: Option<&[usize]>| -> Vec<String> {
        (0..panel.subjects())
            .map(|k| match rows {
                Some(rows) => format!("{}#{}", panel.subject_ids()[rows[k]], k + 1),
                None => format!("#{}", k + 1),
            })
            .collect()
    };
    let (x_ids, y_ids, x_cols, y_cols) = match scheme {
        Resampling::Trajectories => {
            let (x_rows, y_rows) = draw_rows(pair, rng);
            (
                ids(pair.x(), Some(&x_rows)),
                ids(pair.y(), Some(&y_rows)),
                pair.x().gather_columns(&x_rows),
                pair.y().gather_columns(&y_rows),
            )
        }
        Resampling::PooledCells | Resampling::RotatedTrajectories => {
            let (x_cols, y_cols) = draw_columns(pair, scheme, rng);
            (ids(pair.x(), None), ids(pair.y(), None), x_cols, y_cols)
        }
    };
    let x = Panel::from_columns(pair.x().name(), x_ids, x_cols).expect("resampled cells form a valid panel");
    let y = Panel::from_columns(pair.y().name(), y_ids, y_cols).expect("resampled cells form a valid panel");
    PanelPair::new(x, y, pair.pairing()).expect("resample keeps pair invariants")
}

/// `S*_b` for `b = 1..B`, in replication order.
pub fn bootstrap_distribution(pair: &PanelPair, grid: &EvaluationGrid, cfg: &BootstrapConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let stats = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = purpose_stream(cfg.seed, BOOTSTRAP, b);
            let (x_cols, y_cols) = draw_columns(pair, cfg.resampling, &mut rng);
            let est = estimate_from_columns(&x_cols, &y_cols, grid.points());
            s_m_statistic(&est, grid).map(|r| r.s_m)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(stats)
}

/// `(1 + #{b : boot_b >= s_m}) / (B + 1)`.
pub fn bootstrap_p_value(s_m: f64, boot_stats: &[f64]) -> f64 {
    let exceed = boot_stats.iter().filter(|&&s| s >= s_m).count();
    (1 + exceed) as f64 / (boot_stats.len() + 1) as f64
}

/// Reject iff `s_m` is strictly above the empirical `(1 - alpha)` quantile
/// of the replicates; ties retain.
pub fn bootstrap_reject(s_m: f64, boot_stats: &[f64], alpha: f64) -> Result<bool> {
    let mut sorted = boot_stats.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(s_m > sample_quantile(&sorted, 1.0 - alpha)?)
}

/// Full procedure: `S_M` on the data, the bootstrap vector, p-value,
/// decision and diagnostics.
pub fn run_test(pair: &PanelPair, grid: &EvaluationGrid, cfg: &BootstrapConfig) -> Result<TestReport> {
    cfg.validate()?;
    let observed: CusumResult = s_m_statistic(&estimate_links(pair, grid), grid)?;
    let boot_stats = bootstrap_distribution(pair, grid, cfg)?;
    let p_value = bootstrap_p_value(observed.s_m, &boot_stats);
    let reject = bootstrap_reject(observed.s_m, &boot_stats, cfg.alpha)?;

    let (n_x, n_y, n) = (pair.x().subjects(), pair.y().subjects(), pair.times());
    let ratio = size_ratio(n, n_x, n_y);
    let mut warnings = Vec::new();
    if grid.is_collapsed() {
        warnings.push("pooled Y values are all identical; grid collapsed to a single point".to_string());
    }
    if observed.all_degenerate() {
        warnings.push("every grid point is degenerate (link estimate constant in time); S_M = 0".to_string());
    } else if !observed.degenerate_points.is_empty() {
        warnings.push(format!(
            "{} of {} grid points are degenerate and contribute A = 0",
            observed.degenerate_points.len(),
            grid.len()
        ));
    }
    if ratio > cfg.size_ratio_threshold {
        warnings.push(format!(
            "n(N_x+N_y)/(N_x N_y) = {ratio:.4} exceeds {}; time series long relative to panel size",
            cfg.size_ratio_threshold
        ));
    }

    Ok(TestReport {
        s_m: observed.s_m,
        a_values: observed.a_values,
        boot_stats,
        p_value,
        reject,
        alpha: cfg.alpha,
        diagnostics: Diagnostics {
            size_ratio: ratio,
            degenerate_points: observed.degenerate_points,
            pairing: pair.pairing(),
            resampling: cfg.resampling.as_str(),
            n_x,
            n_y,
            n,
            m: grid.len(),
            seed: cfg.seed,
            warnings,
        },
    })
}
