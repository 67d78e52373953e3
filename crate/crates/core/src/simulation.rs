//! Generative models, alternatives and Monte Carlo power studies.
//!
//! Three models:
//!
//! - `iid_gaussian`: Y and Z are independent panels of i.i.d. N(0, 1) cells,
//!   `X_{i,t} = h_t(Z_{i,t})`.
//! - `ar1`: as above but every subject trajectory of Y and Z is a stationary
//!   Gaussian AR(1) with unit innovation variance.
//! - `paired_gaussian`: Y is i.i.d. N(0, 1) and `X_{i,t} = h_t(Y_{i,t})` on
//!   the same subjects.
//!
//! The alternatives `A1..A5` choose `h_t`; `null` is the identity.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bootstrap::{run_test, BootstrapConfig};
use crate::panel::{default_grid, Pairing, Panel, PanelPair, DEFAULT_GRID_SIZE};
use crate::rng::{derive_seed, purpose_stream, REPLICATION_SEED, SCENARIO};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    IidGaussian,
    Ar1,
    PairedGaussian,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::IidGaussian, Model::Ar1, Model::PairedGaussian];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::IidGaussian => "iid_gaussian",
            Model::Ar1 => "ar1",
            Model::PairedGaussian => "paired_gaussian",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "model",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    Null,
    /// Change in the mean, `2t²/(1+t²) + x`.
    A1,
    /// Change in the variance, `2t²/(1+t²) · x`.
    A2,
    /// Jump, `x + 0.05 t 1{t < n/2} + 0.005 (n-t) 1{t >= n/2}`.
    A3,
    /// Smooth change in the mean at the slow rate.
    A4,
    /// Smooth change in the mean at the fast rate.
    A5,
}

impl Alternative {
    pub const ALL: [Alternative; 6] = [
        Alternative::Null,
        Alternative::A1,
        Alternative::A2,
        Alternative::A3,
        Alternative::A4,
        Alternative::A5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Alternative::Null => "null",
            Alternative::A1 => "A1",
            Alternative::A2 => "A2",
            Alternative::A3 => "A3",
            Alternative::A4 => "A4",
            Alternative::A5 => "A5",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Alternative::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                kind: "alternative",
                value: s.to_string(),
            })
    }
}

/// Shape of the logistic drift in A4/A5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothForm {
    /// `(1 + exp(-r (t-1)))^-1`
    #[default]
    Linear,
    /// `(1 + exp(-r (t-1)²))^-1`
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternativeRates {
    pub a4: f64,
    pub a5: f64,
    pub smooth_form: SmoothForm,
}

impl Default for AlternativeRates {
    fn default() -> Self {
        AlternativeRates {
            a4: 0.01,
            a5: 0.05,
            smooth_form: SmoothForm::Linear,
        }
    }
}

/// `h_t(x)` under `alt`, for `t` in `1..=n`.
pub fn apply_alternative(alt: Alternative, t: usize, n: usize, x: f64, rates: &AlternativeRates) -> f64 {
    let tf = t as f64;
    let rise = 2.0 * tf * tf / (1.0 + tf * tf);
    let logistic = |r: f64| {
        let lag = tf - 1.0;
        let arg = match rates.smooth_form {
            SmoothForm::Linear => lag,
            SmoothForm::Squared => lag * lag,
        };
        1.0 / (1.0 + (-r * arg).exp())
    };
    match alt {
        Alternative::Null => x,
        Alternative::A1 => rise + x,
        Alternative::A2 => rise * x,
        Alternative::A3 => {
            if tf < n as f64 / 2.0 {
                x + 0.05 * tf
            } else {
                x + 0.005 * (n as f64 - tf)
            }
        }
        Alternative::A4 => x + logistic(rates.a4),
        Alternative::A5 => x + logistic(rates.a5),
    }
}

fn subject_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("s{i}")).collect()
}

/// `N × n` panel of i.i.d. standard normal cells.
pub fn gen_iid_gaussian<R: Rng + ?Sized>(name: &str, subjects: usize, times: usize, rng: &mut R) -> Result<Panel> {
    let rows = (0..subjects)
        .map(|_| (0..times).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    Panel::from_rows(name, subject_ids(subjects), rows)
}

/// Stationary Gaussian AR(1) trajectories, one per subject.
///
/// `Y_1 ~ N(0, 1/(1-ρ²))`, `Y_t = ρ Y_{t-1} + ε_t`, `ε_t ~ N(0, 1)`.
pub fn gen_ar1<R: Rng + ?Sized>(name: &str, subjects: usize, times: usize, rho: f64, rng: &mut R) -> Result<Panel> {
    if rho.is_nan() || rho.abs() >= 1.0 {
        return Err(Error::domain("rho", rho, "(-1, 1)"));
    }
    let start_sd = (1.0 - rho * rho).sqrt().recip();
    let rows = (0..subjects)
        .map(|_| {
            let mut prev: f64 = start_sd * rng.sample::<f64, _>(StandardNormal);
            let mut row = Vec::with_capacity(times);
            row.push(prev);
            for _ in 1..times {
                prev = rho * prev + rng.sample::<f64, _>(StandardNormal);
                row.push(prev);
            }
            row
        })
        .collect();
    Panel::from_rows(name, subject_ids(subjects), rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub model: Model,
    pub alternative: Alternative,
    /// Subjects per panel `N`.
    pub subjects: usize,
    /// Time length `n`.
    pub times: usize,
    pub rho: f64,
    pub rates: AlternativeRates,
    pub replications: usize,
    pub bootstrap: BootstrapConfig,
    pub grid_size: usize,
}

impl ScenarioConfig {
    /// Defaults: `ρ = 0.5`, 500 replications, `B = 200`, `α = 0.05`,
    /// `M = 25`, seed 0.
    pub fn new(model: Model, alternative: Alternative, subjects: usize, times: usize) -> Self {
        ScenarioConfig {
            model,
            alternative,
            subjects,
            times,
            rho: 0.5,
            rates: AlternativeRates::default(),
            replications: 500,
            bootstrap: BootstrapConfig::default(),
            grid_size: DEFAULT_GRID_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.subjects < 2 {
            return Err(Error::Config(format!("N must be at least 2, got {}", self.subjects)));
        }
        if self.times < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.times)));
        }
        if self.rho.is_nan() || self.rho.abs() >= 1.0 {
            return Err(Error::domain("rho", self.rho, "(-1, 1)"));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.grid_size == 0 {
            return Err(Error::Config("grid size must be at least 1".into()));
        }
        self.bootstrap.validate()
    }
}

fn transform(panel: &Panel, sc: &ScenarioConfig) -> Result<Panel> {
    let n = panel.times();
    let columns = panel
        .columns()
        .iter()
        .enumerate()
        .map(|(t, col)| {
            col.iter()
                .map(|&z| apply_alternative(sc.alternative, t + 1, n, z, &sc.rates))
                .collect()
        })
        .collect();
    Panel::from_columns("x", panel.subject_ids().to_vec(), columns)
}

/// One draw of the scenario's panels.
pub fn make_scenario_pair<R: Rng + ?Sized>(sc: &ScenarioConfig, rng: &mut R) -> Result<PanelPair> {
    sc.validate()?;
    let (big_n, n) = (sc.subjects, sc.times);
    match sc.model {
        Model::IidGaussian => {
            let y = gen_iid_gaussian("y", big_n, n, rng)?;
            let z = gen_iid_gaussian("z", big_n, n, rng)?;
            PanelPair::new(transform(&z, sc)?, y, Pairing::Independent)
        }
        Model::Ar1 => {
            let y = gen_ar1("y", big_n, n, sc.rho, rng)?;
            let z = gen_ar1("z", big_n, n, sc.rho, rng)?;
            PanelPair::new(transform(&z, sc)?, y, Pairing::Independent)
        }
        Model::PairedGaussian => {
            let y = gen_iid_gaussian("y", big_n, n, rng)?;
            PanelPair::new(transform(&y, sc)?, y, Pairing::Paired)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub scenario: ScenarioConfig,
    pub rejections: usize,
    /// Rejection fraction over the replications.
    pub power: f64,
    /// `sqrt(power (1 - power) / replications)`.
    pub mc_stderr: f64,
    pub runtime_seconds: f64,
}

/// Runs `sc.replications` independent scenario draws through the bootstrap
/// test. Replication `r` draws its data and its bootstrap seed from streams
/// keyed by `(sc.bootstrap.seed, r)`.
pub fn power_study(sc: &ScenarioConfig) -> Result<PowerResult> {
    sc.validate()?;
    let started = Instant::now();
    let master = sc.bootstrap.seed;
    let decisions = (0..sc.replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = purpose_stream(master, SCENARIO, r);
            let pair = make_scenario_pair(sc, &mut rng)?;
            let grid = default_grid(&pair, sc.grid_size)?;
            let cfg = BootstrapConfig {
                seed: derive_seed(master, REPLICATION_SEED, r),
                ..sc.bootstrap
            };
            Ok(run_test(&pair, &grid, &cfg)?.reject)
        })
        .collect::<Result<Vec<bool>>>()?;
    let rejections = decisions.iter().filter(|&&d| d).count();
    let power = rejections as f64 / sc.replications as f64;
    Ok(PowerResult {
        scenario: *sc,
        rejections,
        power,
        mc_stderr: (power * (1.0 - power) / sc.replications as f64).sqrt(),
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

#[derive(Serialize)]
struct PowerRow<'a> {
    model: &'a str,
    alternative: &'a str,
    #[serde(rename = "N")]
    big_n: usize,
    n: usize,
    #[serde(rename = "B")]
    b: usize,
    alpha: f64,
    replications: usize,
    power: f64,
    stderr: f64,
    seed: u64,
}

/// CSV `model,alternative,N,n,B,alpha,replications,power,stderr,seed`.
pub fn write_power_csv<W: Write>(results: &[PowerResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if results.is_empty() {
        w.write_record([
            "model",
            "alternative",
            "N",
            "n",
            "B",
            "alpha",
            "replications",
            "power",
            "stderr",
            "seed",
        ])?;
    }
    for res in results {
        let sc = &res.scenario;
        w.serialize(PowerRow {
            model: sc.model.as_str(),
            alternative: sc.alternative.as_str(),
            big_n: sc.subjects,
            n: sc.times,
            b: sc.bootstrap.replications,
            alpha: sc.bootstrap.alpha,
            replications: sc.replications,
            power: res.power,
            stderr: res.mc_stderr,
            seed: sc.bootstrap.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}
