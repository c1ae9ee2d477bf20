use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid graph map: {0}")]
    InvalidMap(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid fold: {0}")]
    InvalidFold(String),
    #[error("not a train track map: {0}")]
    NotTrainTrack(String),
    #[error("map admits no proper full fold decomposition: {0}")]
    NotPffFactorable(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid ltt structure: {0}")]
    InvalidLtt(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("invalid automaton input: {0}")]
    Automaton(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
