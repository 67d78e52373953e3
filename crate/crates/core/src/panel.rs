//! Panel data, CSV ingestion and the evaluation grid.
//!
//! A panel holds `N` subjects observed at `n` common time points. Values are
//! stored column-major since every statistic in the crate works one time
//! point at a time.
//!
//! Two CSV layouts are read and written:
//!
//! - long (canonical): one file, header `panel,subject,t,value`, with
//!   `panel` either `x` or `y`;
//! - wide: one file per panel, header `subject,t1,...,tn`.
//!
//! Time labels are ordinal. Whatever integers (long) or column names (wide)
//! the file uses, the test only sees their order `1..n`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    name: String,
    subject_ids: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Panel {
    /// Builds a panel from per-subject trajectories.
    pub fn from_rows(name: &str, subject_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(invalid(
                name,
                format!("subject row {} has {} values, expected {n}", bad + 1, rows[bad].len()),
            ));
        }
        let columns = (0..n).map(|t| rows.iter().map(|r| r[t]).collect()).collect();
        Self::from_columns(name, subject_ids, columns)
    }

    /// Builds a panel from per-time columns, each of length `N`.
    pub fn from_columns(name: &str, subject_ids: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let panel = Panel {
            name: name.to_string(),
            subject_ids,
            columns,
        };
        panel.validate()?;
        Ok(panel)
    }

    fn validate(&self) -> Result<()> {
        let big_n = self.subject_ids.len();
        if big_n < 2 {
            return Err(invalid(&self.name, format!("need at least 2 subjects, got {big_n}")));
        }
        if self.columns.len() < 2 {
            return Err(invalid(
                &self.name,
                format!("need at least 2 time points, got {}", self.columns.len()),
            ));
        }
        for (t, col) in self.columns.iter().enumerate() {
            if col.len() != big_n {
                return Err(invalid(
                    &self.name,
                    format!("time {} has {} values for {big_n} subjects", t + 1, col.len()),
                ));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(invalid(
                    &self.name,
                    format!("non-finite value for subject {} at t={}", self.subject_ids[i], t + 1),
                ));
            }
        }
        let mut seen = HashSet::with_capacity(big_n);
        for id in &self.subject_ids {
            if !seen.insert(id.as_str()) {
                return Err(invalid(&self.name, format!("duplicate subject id '{id}'")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of subjects `N`.
    pub fn subjects(&self) -> usize {
        self.subject_ids.len()
    }

    /// Number of time points `n`.
    pub fn times(&self) -> usize {
        self.columns.len()
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    /// Observations at time index `t` (zero-based), one per subject.
    pub fn column(&self, t: usize) -> &[f64] {
        &self.columns[t]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn value(&self, subject: usize, t: usize) -> f64 {
        self.columns[t][subject]
    }

    pub fn row(&self, subject: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[subject]).collect()
    }

    /// Columns of the panel restricted to (and repeating) the given rows.
    pub(crate) fn gather_columns(&self, rows: &[usize]) -> Vec<Vec<f64>> {
        self.columns
            .iter()
            .map(|c| rows.iter().map(|&i| c[i]).collect())
            .collect()
    }

    fn reorder(&self, order: &[usize]) -> Panel {
        Panel {
            name: self.name.clone(),
            subject_ids: order.iter().map(|&i| self.subject_ids[i].clone()).collect(),
            columns: self.gather_columns(order),
        }
    }
}

fn invalid(panel: &str, reason: String) -> Error {
    Error::InvalidPanel {
        panel: panel.to_string(),
        reason,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    Independent,
    Paired,
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::Independent => "independent",
            Pairing::Paired => "paired",
        })
    }
}

/// The two panels under comparison.
///
/// In paired mode the Y rows are reordered on construction so that row `i`
/// of both panels belongs to the same subject.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelPair {
    x: Panel,
    y: Panel,
    pairing: Pairing,
}

impl PanelPair {
    pub fn new(x: Panel, y: Panel, pairing: Pairing) -> Result<Self> {
        if x.times() != y.times() {
            return Err(Error::TimeMismatch {
                x: x.times(),
                y: y.times(),
            });
        }
        let y = match pairing {
            Pairing::Independent => y,
            Pairing::Paired => {
                if x.subjects() != y.subjects() {
                    return Err(Error::Pairing(format!(
                        "x has {} subjects but y has {}",
                        x.subjects(),
                        y.subjects()
                    )));
                }
                let index: HashMap<&str, usize> = y
                    .subject_ids
                    .iter()
                    .enumerate()
                    .map(|(i, id)| (id.as_str(), i))
                    .collect();
                let order = x
                    .subject_ids
                    .iter()
                    .map(|id| {
                        index
                            .get(id.as_str())
                            .copied()
                            .ok_or_else(|| Error::Pairing(format!("subject '{id}' has no y panel row")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                y.reorder(&order)
            }
        };
        Ok(PanelPair { x, y, pairing })
    }

    pub fn x(&self) -> &Panel {
        &self.x
    }

    pub fn y(&self) -> &Panel {
        &self.y
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    /// Common number of time points.
    pub fn times(&self) -> usize {
        self.x.times()
    }
}

/// Points `x_1 < ... < x_M` at which the link is estimated, with weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
    #[serde(skip)]
    collapsed: bool,
}

impl EvaluationGrid {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("need at least one point".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidGrid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid("points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidGrid("weights must be finite and nonnegative".into()));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidGrid("weights are all zero".into()));
        }
        Ok(EvaluationGrid {
            points,
            weights,
            collapsed: false,
        })
    }

    /// Grid with constant weight 1.
    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; points.len()];
        Self::new(points, weights)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when [`default_grid`] found the pooled Y sample constant and
    /// fell back to a single point.
    pub fn is_collapsed(&self) -> bool {
        self.collapsed
    }
}

pub const DEFAULT_GRID_SIZE: usize = 25;
const GRID_LOW_LEVEL: f64 = 0.05;
const GRID_HIGH_LEVEL: f64 = 0.95;

/// `m` points at equally spaced quantile levels in `[0.05, 0.95]` of the
/// pooled Y values, deduplicated, unit weights.
///
/// The tails are avoided because the estimator's variance blows up where the
/// densities approach zero. Quantiles interpolate linearly between order
/// statistics.
pub fn default_grid(pair: &PanelPair, m: usize) -> Result<EvaluationGrid> {
    if m == 0 {
        return Err(Error::InvalidGrid("grid size must be at least 1".into()));
    }
    let mut pooled: Vec<f64> = pair.y().columns().iter().flatten().copied().collect();
    pooled.sort_by(f64::total_cmp);

    let levels: Vec<f64> = if m == 1 {
        vec![0.5]
    } else {
        (0..m)
            .map(|i| GRID_LOW_LEVEL + (GRID_HIGH_LEVEL - GRID_LOW_LEVEL) * i as f64 / (m - 1) as f64)
            .collect()
    };
    let mut points: Vec<f64> = levels.iter().map(|&p| interpolated_quantile(&pooled, p)).collect();
    points.dedup();

    let collapsed = pooled.first() == pooled.last();
    let mut grid = EvaluationGrid::uniform(points)?;
    grid.collapsed = collapsed;
    Ok(grid)
}

fn interpolated_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let v = sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]);
    // Interpolation can round just outside the bracketing pair.
    v.clamp(sorted[lo], sorted[hi])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelFormat {
    Long,
    Wide,
}

impl FromStr for PanelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long" => Ok(PanelFormat::Long),
            "wide" => Ok(PanelFormat::Wide),
            _ => Err(Error::Unknown {
                kind: "panel format",
                value: s.to_string(),
            }),
        }
    }
}

/// Where to read a pair of panels from.
#[derive(Debug, Clone)]
pub enum PanelSource {
    Long(PathBuf),
    Wide { x: PathBuf, y: PathBuf },
}

pub fn load_panels(source: &PanelSource, pairing: Pairing) -> Result<PanelPair> {
    match source {
        PanelSource::Long(path) => read_long(open(path)?, pairing),
        PanelSource::Wide { x, y } => read_wide(open(x)?, open(y)?, pairing),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

const LONG_HEADER: [&str; 4] = ["panel", "subject", "t", "value"];

#[derive(Debug, Deserialize)]
struct LongRecord {
    panel: String,
    subject: String,
    t: u64,
    value: f64,
}

#[derive(Default)]
struct PanelCells {
    subjects: Vec<String>,
    times: BTreeSet<u64>,
    cells: HashMap<(String, u64), f64>,
}

/// Reads the long layout `panel,subject,t,value`.
pub fn read_long<R: Read>(reader: R, pairing: Pairing) -> Result<PanelPair> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(LONG_HEADER) {
        return Err(Error::Parse {
            line: 1,
            reason: format!("expected header '{}'", LONG_HEADER.join(",")),
        });
    }

    let mut x = PanelCells::default();
    let mut y = PanelCells::default();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let rec: LongRecord = record.deserialize(Some(&header)).map_err(|e| Error::Parse {
            line,
            reason: e.to_string(),
        })?;
        let cells = match rec.panel.as_str() {
            "x" => &mut x,
            "y" => &mut y,
            other => {
                return Err(Error::Parse {
                    line,
                    reason: format!("panel must be 'x' or 'y', got '{other}'"),
                })
            }
        };
        if rec.t == 0 {
            return Err(Error::Parse {
                line,
                reason: "t must be a positive integer".into(),
            });
        }
        if !rec.value.is_finite() {
            return Err(Error::Parse {
                line,
                reason: format!("non-finite value {}", rec.value),
            });
        }
        let key = (rec.subject, rec.t);
        if cells.cells.contains_key(&key) {
            return Err(Error::DuplicateCell {
                panel: rec.panel,
                subject: key.0,
                t: key.1.to_string(),
            });
        }
        if !cells.subjects.contains(&key.0) {
            cells.subjects.push(key.0.clone());
        }
        cells.times.insert(rec.t);
        cells.cells.insert(key, rec.value);
    }

    let x = assemble_long("x", x)?;
    let y = assemble_long("y", y)?;
    PanelPair::new(x, y, pairing)
}

fn assemble_long(name: &str, cells: PanelCells) -> Result<Panel> {
    if cells.subjects.is_empty() {
        return Err(invalid(name, "no observations".into()));
    }
    let mut columns = Vec::with_capacity(cells.times.len());
    for &t in &cells.times {
        let mut col = Vec::with_capacity(cells.subjects.len());
        for s in &cells.subjects {
            match cells.cells.get(&(s.clone(), t)) {
                Some(&v) => col.push(v),
                None => {
                    return Err(Error::MissingCell {
                        panel: name.to_string(),
                        subject: s.clone(),
                        t: t.to_string(),
                    })
                }
            }
        }
        columns.push(col);
    }
    Panel::from_columns(name, cells.subjects, columns)
}

/// Reads the wide layout, one file per panel.
pub fn read_wide<R: Read, S: Read>(x: R, y: S, pairing: Pairing) -> Result<PanelPair> {
    let x = read_wide_panel("x", x)?;
    let y = read_wide_panel("y", y)?;
    PanelPair::new(x, y, pairing)
}

fn read_wide_panel<R: Read>(name: &str, reader: R) -> Result<Panel> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("subject") {
        return Err(Error::Parse {
            line: 1,
            reason: "expected header 'subject,t1,...,tn'".into(),
        });
    }
    let labels: Vec<&str> = header.iter().skip(1).collect();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let subject = record[0].to_string();
        let mut row = Vec::with_capacity(labels.len());
        for (field, label) in record.iter().skip(1).zip(&labels) {
            if field.is_empty() {
                return Err(Error::MissingCell {
                    panel: name.to_string(),
                    subject,
                    t: label.to_string(),
                });
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                reason: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    reason: format!("non-finite value {v}"),
                });
            }
            row.push(v);
        }
        ids.push(subject);
        rows.push(row);
    }
    Panel::from_rows(name, ids, rows)
}

/// Writes both panels in the long layout. Time labels are `1..n`.
pub fn write_long<W: Write>(pair: &PanelPair, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(LONG_HEADER)?;
    for panel in [pair.x(), pair.y()] {
        for (i, id) in panel.subject_ids().iter().enumerate() {
            for t in 0..panel.times() {
                w.write_record([panel.name(), id, &(t + 1).to_string(), &panel.value(i, t).to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes one panel in the wide layout with columns `t1..tn`.
pub fn write_wide<W: Write>(panel: &Panel, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["subject".to_string()];
    header.extend((1..=panel.times()).map(|t| format!("t{t}")));
    w.write_record(&header)?;
    for (i, id) in panel.subject_ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(panel.row(i).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
