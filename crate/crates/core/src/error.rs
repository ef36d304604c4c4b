use std::path::PathBuf;

use crate::protocols::Constraint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the function it was passed to.
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),

    #[error("allocation violates the {0} constraint")]
    Infeasible(Constraint),

    /// A D-C inner solver was called for a `tau1` outside its case.
    #[error("tau1 = {tau1} is outside the range handled by D-C case {case}")]
    CaseDispatch { case: u8, tau1: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed CSV record: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}
