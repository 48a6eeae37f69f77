//! Experiment drivers: `s`-sweeps of the eigenvalue limit, BBM tables, the
//! inequality harness and report serialization.
//!
//! Reports are plain data. CSV output writes floats with 12 significant
//! digits; JSON output is one object with a `rows` array and a `meta`
//! object, and reloads to an equal report.

mod checks;
mod suites;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{FracError, Function, Grid, Result, ARTIFACT_VERSION};

pub use checks::{
    check_hardy, check_interpolation, check_linfty, check_poincare, check_sobolev, check_stima,
    hardy_weighted_integral, PoincareVariant,
};
pub use suites::{run_suite, SuiteOptions, SUITES};
pub use sweep::{check_dual_limit, run_bbm_table, run_sweep};

/// Floats that may be non-finite are written as the strings `"NaN"`,
/// `"inf"` and `"-inf"`, which plain JSON numbers cannot express.
mod lenient {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    fn parse<E: serde::de::Error>(raw: Raw) -> Result<f64, E> {
        match raw {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(E::custom(format!("not a number: {t}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&format!("{x}"))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        parse(Raw::deserialize(d)?)
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                if x.is_finite() {
                    seq.serialize_element(x)?;
                } else {
                    seq.serialize_element(&format!("{x}"))?;
                }
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<super::Raw>::deserialize(d)?
                .into_iter()
                .map(super::parse)
                .collect()
        }
    }
}

/// Provenance written with every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub seed: Option<u64>,
    pub p: Option<f64>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Resolved configuration, one entry per setting.
    pub config: BTreeMap<String, String>,
}

impl Default for Meta {
    fn default() -> Self {
        Meta {
            version: ARTIFACT_VERSION.to_string(),
            seed: None,
            p: None,
            m: None,
            n: None,
            a: None,
            b: None,
            config: BTreeMap::new(),
        }
    }
}

impl Meta {
    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: f64,
    #[serde(with = "lenient")]
    pub lambda: f64,
    /// `(1 - s) lambda^s_{m,p}`.
    #[serde(with = "lenient")]
    pub scaled_lambda: f64,
    /// `K(p, 1) lambda^1_{m,p}`.
    pub target: f64,
    #[serde(with = "lenient")]
    pub rel_err: f64,
    /// `L^p` distance to the local eigenfunction after sign alignment.
    #[serde(with = "lenient")]
    pub lp_dist: f64,
    /// `[u_s - u]_{W^{t,q}}`, one entry per configured `(t, q)`.
    #[serde(with = "lenient::vec")]
    pub wtq_dist: Vec<f64>,
    pub iterations: usize,
    #[serde(with = "lenient")]
    pub residual: f64,
    /// `ok`, or the error that stopped this row.
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub tq_pairs: Vec<(f64, f64)>,
    pub meta: Meta,
}

impl SweepReport {
    pub fn rel_errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.rel_err).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckCase {
    pub label: String,
    pub inputs: BTreeMap<String, f64>,
    #[serde(with = "lenient")]
    pub lhs: f64,
    #[serde(with = "lenient")]
    pub rhs: f64,
    #[serde(with = "lenient")]
    pub ratio: f64,
    pub pass: bool,
}

impl CheckCase {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64, pass: bool) -> Self {
        CheckCase {
            label: label.into(),
            inputs: BTreeMap::new(),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            pass,
        }
    }

    pub fn input(mut self, key: &str, value: f64) -> Self {
        self.inputs.insert(key.to_string(), value);
        self
    }
}

/// `lhs / rhs`, with `0 / 0 = 1`.
pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        1.0
    } else {
        lhs / rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(with = "lenient")]
    pub max_ratio: f64,
    #[serde(with = "lenient")]
    pub min_ratio: f64,
    /// `max_ratio / min_ratio`.
    #[serde(with = "lenient")]
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub passed: bool,
    pub summary: Summary,
    pub rows: Vec<CheckCase>,
    pub meta: Meta,
}

impl CheckReport {
    /// A suite passes only if every case passes.
    pub fn new(suite: impl Into<String>, rows: Vec<CheckCase>, meta: Meta) -> Self {
        let finite: Vec<f64> = rows
            .iter()
            .map(|c| c.ratio)
            .filter(|r| r.is_finite())
            .collect();
        let max_ratio = finite.iter().copied().fold(f64::NAN, f64::max);
        let min_ratio = finite.iter().copied().fold(f64::NAN, f64::min);
        CheckReport {
            suite: suite.into(),
            passed: !rows.is_empty() && rows.iter().all(|c| c.pass),
            summary: Summary {
                max_ratio,
                min_ratio,
                spread: max_ratio / min_ratio,
            },
            rows,
            meta,
        }
    }

    /// Merges reports into one suite, prefixing case labels.
    pub fn merge(suite: &str, parts: Vec<(String, CheckReport)>, extra: Vec<CheckCase>, meta: Meta) -> Self {
        let mut rows = Vec::new();
        for (prefix, part) in parts {
            for mut c in part.rows {
                c.label = format!("{prefix}/{}", c.label);
                rows.push(c);
            }
        }
        rows.extend(extra);
        CheckReport::new(suite, rows, meta)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|c| !c.pass).count()
    }
}

/// Output format of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = FracError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(FracError::InvalidInput(format!("unknown format {s:?}"))),
        }
    }
}

/// Something `emit_report` can write.
pub trait Report {
    fn to_csv(&self) -> String;
    fn to_json(&self) -> String;
}

/// 12 significant digits.
pub(crate) fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

fn csv_text(header: &[String], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn json_text<R: Serialize>(r: &R) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

impl Report for SweepReport {
    fn to_csv(&self) -> String {
        let mut header: Vec<String> = ["s", "lambda", "scaled_lambda", "target", "rel_err", "lp_dist"]
            .iter()
            .map(|h| h.to_string())
            .collect();
        header.extend(self.tq_pairs.iter().map(|(t, q)| format!("wtq_dist_t{t}_q{q}")));
        header.extend(["iterations", "residual", "status"].iter().map(|h| h.to_string()));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut f: Vec<String> = [r.s, r.lambda, r.scaled_lambda, r.target, r.rel_err, r.lp_dist]
                    .iter()
                    .map(|&x| fmt_float(x))
                    .collect();
                f.extend(r.wtq_dist.iter().map(|&x| fmt_float(x)));
                f.push(r.iterations.to_string());
                f.push(fmt_float(r.residual));
                f.push(r.status.clone());
                f
            })
            .collect();
        csv_text(&header, rows)
    }

    fn to_json(&self) -> String {
        json_text(self)
    }
}

impl Report for CheckReport {
    fn to_csv(&self) -> String {
        let header: Vec<String> = ["label", "inputs", "lhs", "rhs", "ratio", "pass"]
            .iter()
            .map(|h| h.to_string())
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|c| {
                let inputs: Vec<String> = c
                    .inputs
                    .iter()
                    .map(|(k, v)| format!("{k}={}", fmt_float(*v)))
                    .collect();
                vec![
                    c.label.clone(),
                    inputs.join(";"),
                    fmt_float(c.lhs),
                    fmt_float(c.rhs),
                    fmt_float(c.ratio),
                    c.pass.to_string(),
                ]
            })
            .collect();
        csv_text(&header, rows)
    }

    fn to_json(&self) -> String {
        json_text(self)
    }
}

impl SweepReport {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FracError::Format {
            path: "<string>".into(),
            message: e.to_string(),
        })
    }
}

impl CheckReport {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FracError::Format {
            path: "<string>".into(),
            message: e.to_string(),
        })
    }
}

/// Writes a report. Emitting the same report twice gives identical bytes.
pub fn emit_report<R: Report>(report: &R, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    std::fs::write(path, text).map_err(|source| FracError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FracError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn reframe(e: FracError, path: &Path) -> FracError {
    match e {
        FracError::Format { message, .. } => FracError::Format {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    }
}

pub fn load_sweep_report(path: &Path) -> Result<SweepReport> {
    SweepReport::from_json(&read(path)?).map_err(|e| reframe(e, path))
}

pub fn load_check_report(path: &Path) -> Result<CheckReport> {
    CheckReport::from_json(&read(path)?).map_err(|e| reframe(e, path))
}

/// A smooth random test function: 3 to 6 Gaussian bumps in reference
/// coordinates, minus the linear interpolant of their endpoint values so the
/// sum vanishes on the boundary.
pub fn random_bumps(grid: &Grid, rng: &mut ChaCha8Rng) -> Function {
    let k = rng.gen_range(3..=6);
    let bumps: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            let amp = rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (amp, rng.gen_range(0.15..0.85), rng.gen_range(0.05..0.2))
        })
        .collect();
    let g = |xi: f64| -> f64 {
        bumps
            .iter()
            .map(|&(a, c, w)| a * (-((xi - c) / w).powi(2)).exp())
            .sum()
    };
    let (g0, g1) = (g(0.0), g(1.0));
    let (a, len) = (grid.domain.a, grid.domain.diam());
    Function::from_fn(*grid, |x| {
        let xi = (x - a) / len;
        g(xi) - (1.0 - xi) * g0 - xi * g1
    })
}

/// `true` when every entry is strictly below its predecessor (two zeros
/// count as decreasing).
pub(crate) fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2)
        .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
}
