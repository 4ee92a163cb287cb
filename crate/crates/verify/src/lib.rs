//! Verification harness: evaluates both sides of the pointwise approximation
//! inequalities over a corpus of test functions and a grid of `(n, m, x, p)`,
//! fits the unspecified constants and writes CSV/JSON reports.

pub mod campaign;
pub mod checks;
pub mod config;
pub mod context;
pub mod corpus;
pub mod fit;
pub mod reports;

use std::path::PathBuf;

use thiserror::Error;

pub use campaign::{run, run_scaled, CampaignOutput};
pub use config::{ConfigError, MRule, RunConfig, StatementId};
pub use corpus::CorpusFunction;
pub use fit::{fit_constant, Fit};
pub use reports::{InequalityReport, Summary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: trigapprox::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report encoding: {0}")]
    Encode(String),
}

impl HarnessError {
    pub(crate) fn numeric(context: impl Into<String>) -> impl FnOnce(trigapprox::Error) -> HarnessError {
        let context = context.into();
        move |source| HarnessError::Numeric { context, source }
    }

    /// True when the failure came from a solver rather than a bad request.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, HarnessError::Numeric { source: trigapprox::Error::Solve(_), .. })
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
