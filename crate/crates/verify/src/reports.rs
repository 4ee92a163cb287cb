//! Report rows, the run summary, and atomic CSV/JSON output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trigapprox::LebesgueExponent;

use crate::campaign::CampaignOutput;
use crate::config::{RunConfig, StatementId};
use crate::fit::{fit_constant, is_anomaly, Fit};
use crate::{HarnessError, Result};

/// One evaluated grid point of one statement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub statement: StatementId,
    pub corpus: String,
    pub n: usize,
    pub m: usize,
    pub x: Option<f64>,
    pub p: Option<LebesgueExponent>,
    /// Extra indices (`q`, `μ`, radius) and sub-check labels.
    pub extra: String,
    pub lhs: f64,
    pub rhs_without_k: f64,
    /// Terms added outside the constant, such as `E(f, x; 0)`.
    pub tail: f64,
    /// Numerical allowance granted on top of the tolerance.
    pub allowance: f64,
    /// `(lhs - tail) / rhs_without_K`, absent when the right side vanishes.
    pub ratio: Option<f64>,
    pub pass: bool,
}

impl InequalityReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        statement: StatementId,
        corpus: &str,
        n: usize,
        m: usize,
        x: Option<f64>,
        p: Option<LebesgueExponent>,
        extra: String,
        lhs: f64,
        rhs_without_k: f64,
        tail: f64,
    ) -> Self {
        let ratio = (rhs_without_k > 0.0).then(|| (lhs - tail) / rhs_without_k);
        InequalityReport {
            statement,
            corpus: corpus.to_string(),
            n,
            m,
            x,
            p,
            extra,
            lhs,
            rhs_without_k,
            tail,
            allowance: 0.0,
            ratio,
            pass: true,
        }
    }

    pub fn label(&self) -> String {
        let mut s = format!("{} f={} n={} m={}", self.statement, self.corpus, self.n, self.m);
        if let Some(x) = self.x {
            s.push_str(&format!(" x={x}"));
        }
        if let Some(p) = self.p {
            s.push_str(&format!(" p={p}"));
        }
        if !self.extra.is_empty() {
            s.push_str(&format!(" {}", self.extra));
        }
        s
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    corpus: &'a str,
    n: usize,
    m: usize,
    x: Option<f64>,
    p: Option<String>,
    extra: &'a str,
    lhs: f64,
    #[serde(rename = "rhs_without_K")]
    rhs_without_k: f64,
    ratio: Option<f64>,
    pass: bool,
    tail: f64,
    allowance: f64,
}

impl<'a> From<&'a InequalityReport> for CsvRow<'a> {
    fn from(r: &'a InequalityReport) -> Self {
        CsvRow {
            corpus: &r.corpus,
            n: r.n,
            m: r.m,
            x: r.x,
            p: r.p.map(|p| p.to_string()),
            extra: &r.extra,
            lhs: r.lhs,
            rhs_without_k: r.rhs_without_k,
            ratio: r.ratio,
            pass: r.pass,
            tail: r.tail,
            allowance: r.allowance,
        }
    }
}

/// A window where the global minimiser and the direct windowed minimiser disagree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterSample {
    pub corpus: String,
    pub n: usize,
    pub p: String,
    pub x: f64,
    pub delta: f64,
    pub variant: String,
    pub via_global: f64,
    pub direct: f64,
    pub gap: f64,
    pub relative_gap: f64,
}

/// `r(n) = |σ_{n,n/4} f(x) - f(x)| / (1 + ln((n+1)/(n/4+1)))` along the doubling schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub corpus: String,
    pub x: f64,
    /// A jump point, where decay is not expected.
    pub control: bool,
    pub n: Vec<usize>,
    pub r: Vec<f64>,
    pub r_lo: f64,
    pub r_hi: f64,
    /// `r_hi <= factor · r_lo`.
    pub decays: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StatementSummary {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub anomalies: usize,
    pub max_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub windows: usize,
    pub agree: usize,
    pub share: f64,
    pub direct_failures: usize,
    pub counter_samples: usize,
    pub failure_messages: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub samples: usize,
    pub corpus: Vec<String>,
    pub statements: BTreeMap<String, StatementSummary>,
    pub fitted_constants: BTreeMap<String, Fit>,
    pub oracle: Option<OracleSummary>,
    pub decay: Vec<DecaySeries>,
    pub explicit_failures: Vec<InequalityReport>,
    pub anomalies: Vec<InequalityReport>,
}

/// How a campaign ended, in decreasing severity of the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ExplicitFailure,
    Anomaly,
}

impl Summary {
    pub fn build(out: &CampaignOutput, cfg: &RunConfig) -> Summary {
        let tol = &cfg.tolerances;
        let mut statements = BTreeMap::new();
        let mut fitted_constants = BTreeMap::new();
        let mut explicit_failures = Vec::new();
        let mut anomalies = Vec::new();
        for (key, rows) in &out.reports {
            let mut s = StatementSummary { rows: rows.len(), ..Default::default() };
            let fitted = rows.first().map_or(false, |r| r.statement.is_fitted());
            for r in rows {
                if r.pass {
                    s.passed += 1;
                } else {
                    s.failed += 1;
                    if r.statement.is_explicit() {
                        explicit_failures.push(r.clone());
                    }
                }
                if fitted && is_anomaly(r, tol.rhs_floor, tol.lhs_floor) {
                    s.anomalies += 1;
                    anomalies.push(r.clone());
                }
                if let Some(q) = r.ratio {
                    s.max_ratio = Some(s.max_ratio.map_or(q, |m: f64| m.max(q)));
                }
            }
            if fitted {
                fitted_constants.insert(key.clone(), fit_constant(rows, tol.rhs_floor));
            }
            statements.insert(key.clone(), s);
        }
        let oracle = out.oracle_windows.map(|windows| {
            let agree = windows - out.counter_samples.len();
            let share = if windows == 0 { 1.0 } else { agree as f64 / windows as f64 };
            OracleSummary {
                windows,
                agree,
                share,
                direct_failures: out.direct_failures.len(),
                counter_samples: out.counter_samples.len(),
                failure_messages: out.direct_failures.clone(),
                pass: share >= tol.oracle_share,
            }
        });
        Summary {
            samples: cfg.samples,
            corpus: out.corpus.clone(),
            statements,
            fitted_constants,
            oracle,
            decay: out.decay.clone(),
            explicit_failures,
            anomalies,
        }
    }

    pub fn outcome(&self) -> Outcome {
        if !self.anomalies.is_empty() {
            Outcome::Anomaly
        } else if !self.explicit_failures.is_empty() {
            Outcome::ExplicitFailure
        } else {
            Outcome::Ok
        }
    }
}

/// Write `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| HarnessError::Io { path: path.to_path_buf(), source };
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("report");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::Encode(e.to_string()))?;
    }
    w.into_inner().map_err(|e| HarnessError::Encode(e.to_string()))
}

/// Write one CSV per statement (plus the ln-only record and the oracle
/// counter-samples) and `summary.json`. Returns the paths written.
pub fn write_reports(dir: &Path, out: &CampaignOutput, summary: &Summary) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for (key, rows) in &out.reports {
        let path = dir.join(format!("{key}.csv"));
        write_atomic(&path, &csv_bytes(rows.iter().map(CsvRow::from))?)?;
        written.push(path);
    }
    if out.oracle_windows.is_some() {
        let path = dir.join("L1_counter_samples.csv");
        let mut bytes = csv_bytes(&out.counter_samples)?;
        if out.counter_samples.is_empty() {
            bytes = b"corpus,n,p,x,delta,variant,via_global,direct,gap,relative_gap\n".to_vec();
        }
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    let path = dir.join("summary.json");
    let mut json = serde_json::to_vec_pretty(summary).map_err(|e| HarnessError::Encode(e.to_string()))?;
    json.push(b'\n');
    write_atomic(&path, &json)?;
    written.push(path);
    Ok(written)
}
