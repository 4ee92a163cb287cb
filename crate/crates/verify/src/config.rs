//! Run configuration: corpus, grids, statements and tolerances, read from TOML.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use trigapprox::LebesgueExponent;

use crate::corpus::{self, CorpusFunction};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown corpus function {0:?}")]
    UnknownFunction(String),
    #[error("unknown statement id {0:?}")]
    UnknownStatement(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StatementId {
    T1a,
    T1b,
    T2,
    T3,
    C1,
    L1,
    L2,
    L3,
    L4,
    L5,
    #[serde(rename = "CMP")]
    Cmp,
}

impl StatementId {
    pub const ALL: [StatementId; 11] = [
        StatementId::T1a,
        StatementId::T1b,
        StatementId::T2,
        StatementId::T3,
        StatementId::C1,
        StatementId::L1,
        StatementId::L2,
        StatementId::L3,
        StatementId::L4,
        StatementId::L5,
        StatementId::Cmp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatementId::T1a => "T1a",
            StatementId::T1b => "T1b",
            StatementId::T2 => "T2",
            StatementId::T3 => "T3",
            StatementId::C1 => "C1",
            StatementId::L1 => "L1",
            StatementId::L2 => "L2",
            StatementId::L3 => "L3",
            StatementId::L4 => "L4",
            StatementId::L5 => "L5",
            StatementId::Cmp => "CMP",
        }
    }

    /// Statements checked with the constant 1.
    pub fn is_explicit(self) -> bool {
        matches!(self, StatementId::T1a | StatementId::T1b)
    }

    /// Statements whose constant is fitted.
    pub fn is_fitted(self) -> bool {
        matches!(self, StatementId::T2 | StatementId::T3 | StatementId::L3 | StatementId::L4 | StatementId::L5)
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatementId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatementId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConfigError::UnknownStatement(s.to_string()))
    }
}

/// How `m` is derived from `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MRule {
    Zero,
    Quarter,
    Half,
    Full,
}

impl MRule {
    pub fn apply(self, n: usize) -> usize {
        match self {
            MRule::Zero => 0,
            MRule::Quarter => n / 4,
            MRule::Half => n / 2,
            MRule::Full => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: Vec<usize>,
    pub m_rule: Vec<MRule>,
    pub x_count: usize,
    pub p: Vec<LebesgueExponent>,
    /// Degrees for the windowed-best oracle comparison.
    pub l1_n: Vec<usize>,
    pub l1_p: Vec<LebesgueExponent>,
    /// Window radii `π/(k+1)` for the oracle comparison.
    pub l1_k: Vec<usize>,
    /// Bound on `n` and `m` in the monotonicity suite.
    pub l2_max: usize,
    /// Number of radii `iπ/count` in the monotonicity suite.
    pub l2_deltas: usize,
    pub c1_n: Vec<usize>,
    /// Decay is judged between these two entries of `c1_n`.
    pub c1_lo: usize,
    pub c1_hi: usize,
    /// Radii `π/(k+1)`, `k = 0..=cmp_k`, in the comparison block.
    pub cmp_k: usize,
    /// Grid size for the comparison block; every node is a centre.
    pub cmp_samples: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: vec![4, 8, 16, 32, 64, 128],
            m_rule: vec![MRule::Zero, MRule::Quarter, MRule::Half, MRule::Full],
            x_count: 17,
            p: vec![LebesgueExponent::ONE, LebesgueExponent::TWO, LebesgueExponent::INF],
            l1_n: (0..=8).collect(),
            l1_p: vec![LebesgueExponent::TWO, LebesgueExponent::INF],
            l1_k: vec![0, 1, 3, 7],
            l2_max: 32,
            l2_deltas: 20,
            c1_n: vec![8, 16, 32, 64, 128, 256, 512],
            c1_lo: 16,
            c1_hi: 256,
            cmp_k: 16,
            cmp_samples: 1024,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute slack for the explicit-constant statements.
    pub explicit: f64,
    /// Relative slack for monotonicity, `tol (1 + value)`.
    pub monotone: f64,
    /// Relative slack in the comparison block.
    pub comparison: f64,
    /// Windowed oracle agreement, `gap <= tol (1 + value)`.
    pub oracle_gap: f64,
    /// Share of oracle windows that must agree.
    pub oracle_share: f64,
    /// `rhs_without_K` at or below this is treated as zero.
    pub rhs_floor: f64,
    /// `lhs` at or below this is treated as zero.
    pub lhs_floor: f64,
    /// Trapezoid nodes (in `ln t`) for the integral term.
    pub integral_points: usize,
    /// Required decay factor `r(n_hi) <= factor · r(n_lo)`.
    pub decay_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            explicit: 1e-6,
            monotone: 1e-9,
            comparison: 1e-6,
            oracle_gap: 0.02,
            oracle_share: 0.95,
            rhs_floor: 1e-12,
            lhs_floor: 1e-9,
            integral_points: 64,
            decay_factor: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus names, or `["all"]` for the default corpus.
    pub corpus: Vec<String>,
    pub statements: Vec<StatementId>,
    pub out: PathBuf,
    /// Samples per function (power of two).
    pub samples: usize,
    /// Reserved; nothing is randomized.
    pub seed: u64,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub solver: trigapprox::SolverOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: vec!["all".to_string()],
            statements: StatementId::ALL.to_vec(),
            out: PathBuf::from("reports"),
            samples: 16384,
            seed: 0,
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            solver: trigapprox::SolverOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The canonical serialization; parsing it gives back an equal config.
    pub fn to_canonical(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.functions()?;
        if !self.samples.is_power_of_two() || self.samples < 64 {
            return Err(ConfigError::Invalid(format!("samples = {} must be a power of two >= 64", self.samples)));
        }
        let kmax = self.samples / 4;
        let nmax = self.grid.n.iter().copied().max().unwrap_or(0);
        let cmax = self.grid.c1_n.iter().copied().max().unwrap_or(0);
        if 2 * nmax + 1 > kmax || cmax > kmax {
            return Err(ConfigError::Invalid(format!("samples = {} cannot resolve the requested degrees", self.samples)));
        }
        if !self.grid.c1_n.contains(&self.grid.c1_lo) || !self.grid.c1_n.contains(&self.grid.c1_hi) {
            return Err(ConfigError::Invalid("c1_lo and c1_hi must be entries of c1_n".into()));
        }
        if self.grid.x_count == 0 {
            return Err(ConfigError::Invalid("x_count must be positive".into()));
        }
        if !self.grid.cmp_samples.is_power_of_two() || self.grid.cmp_samples < 16 {
            return Err(ConfigError::Invalid("cmp_samples must be a power of two >= 16".into()));
        }
        if self.tolerances.integral_points < 2 || self.tolerances.integral_points % 2 != 0 {
            return Err(ConfigError::Invalid("integral_points must be even and >= 2".into()));
        }
        Ok(())
    }

    pub fn functions(&self) -> Result<Vec<&'static CorpusFunction>, ConfigError> {
        if self.corpus.iter().any(|c| c == "all") {
            return Ok(corpus::default_corpus());
        }
        self.corpus
            .iter()
            .map(|name| corpus::lookup(name).ok_or_else(|| ConfigError::UnknownFunction(name.clone())))
            .collect()
    }

    /// Grid pairs `(n, m)` with distinct `m`, in rule order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.grid.n {
            let mut seen = Vec::new();
            for rule in &self.grid.m_rule {
                let m = rule.apply(n);
                if !seen.contains(&m) {
                    seen.push(m);
                    out.push((n, m));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let text = cfg.to_canonical();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_canonical(), text);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = RunConfig::from_toml("corpus = [\"abs\"]\nstatements = [\"L2\", \"CMP\"]\n[grid]\nn = [4, 8]\n").unwrap();
        assert_eq!(cfg.statements, vec![StatementId::L2, StatementId::Cmp]);
        assert_eq!(cfg.grid.n, vec![4, 8]);
        assert_eq!(cfg.grid.x_count, 17);
        assert_eq!(cfg.functions().unwrap()[0].name, "abs");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::from_toml("colour = 1\n"), Err(ConfigError::Parse(_))));
        assert!(matches!(RunConfig::from_toml("[grid]\nnn = [1]\n"), Err(ConfigError::Parse(_))));
        assert!(matches!(RunConfig::from_toml("corpus = [\"nope\"]\n"), Err(ConfigError::UnknownFunction(_))));
        assert!(matches!(RunConfig::from_toml("samples = 1000\n"), Err(ConfigError::Invalid(_))));
        assert!(RunConfig::from_toml("statements = [\"T9\"]\n").is_err());
    }

    #[test]
    fn exponents_parse_from_strings() {
        let cfg = RunConfig::from_toml("[grid]\np = [\"inf\", \"1.5\"]\n").unwrap();
        assert_eq!(cfg.grid.p, vec![LebesgueExponent::INF, LebesgueExponent::finite(1.5).unwrap()]);
    }

    #[test]
    fn pairs_drop_duplicate_m() {
        let mut cfg = RunConfig::default();
        cfg.grid.n = vec![2];
        assert_eq!(cfg.pairs(), vec![(2, 0), (2, 1), (2, 2)]);
    }

    #[test]
    fn statement_ids_parse() {
        assert_eq!("cmp".parse::<StatementId>().unwrap(), StatementId::Cmp);
        assert_eq!("T1a".parse::<StatementId>().unwrap(), StatementId::T1a);
        assert!("X".parse::<StatementId>().is_err());
    }
}
