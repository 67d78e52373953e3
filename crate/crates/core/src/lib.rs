//! Nonparametric test for a time-varying monotone link between two panels.
//!
//! Two panels `X` (`N_x` subjects) and `Y` (`N_y` subjects) are observed over
//! the same `n` time points. At each time `t` the marginals are assumed to be
//! related by an increasing map, `X_t =d h_t(Y_t)`. This crate tests
//!
//! ```text
//! H0: h_t = h for every t    against    H1: h_t1 != h_t2 for some t1, t2
//! ```
//!
//! The pieces, bottom up:
//!
//! - [`panel`]: panel data, CSV ingestion and the evaluation grid.
//! - [`estimator`]: empirical CDF, sample quantile and the link estimate
//!   `ĥ_t(x) = X_(r),t` with `r = ceil(N_x Ĝ_t(x))`.
//! - [`cusum`]: the normalized CUSUM path of `ĥ_t(x)` over time, its sup
//!   `A(x)` and the grid average `S_M`.
//! - [`asymptotics`]: the law of the sup of a Brownian bridge, critical
//!   values and the variance diagnostics.
//! - [`bootstrap`]: the naive subject bootstrap and the full decision rule.
//! - [`simulation`]: generative models, alternatives and power studies.
//!
//! ```
//! use linkcusum::bootstrap::{run_test, BootstrapConfig};
//! use linkcusum::panel::default_grid;
//! use linkcusum::simulation::{make_scenario_pair, Alternative, Model, ScenarioConfig};
//!
//! let mut sc = ScenarioConfig::new(Model::PairedGaussian, Alternative::A1, 50, 20);
//! sc.bootstrap.replications = 100;
//! let pair = make_scenario_pair(&sc, &mut linkcusum::rng::stream(7, 0)).unwrap();
//! let grid = default_grid(&pair, 25).unwrap();
//! let report = run_test(&pair, &grid, &sc.bootstrap).unwrap();
//! assert!(report.s_m > 0.0);
//! assert!(report.p_value > 0.0 && report.p_value <= 1.0);
//! ```

pub mod asymptotics;
pub mod bootstrap;
pub mod cusum;
pub mod error;
pub mod estimator;
pub mod panel;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};
