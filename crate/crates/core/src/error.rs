use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),
    #[error("grid is not symmetric about 0")]
    AsymmetricGrid,
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("outside real Lambert domain: x = {0}")]
    LambertDomain(f64),
    #[error("excluded parameter line a*alpha = -1")]
    ExcludedParameterLine,
    #[error("degenerate scattering data at sigma = 0, lambda = 0")]
    DegenerateScattering,
    #[error("kernel propagators are singular at t = 0")]
    ZeroTime,
    #[error("method {method} is not available for {interaction}")]
    UnsupportedMethod { method: String, interaction: String },
    #[error("outside global regime rho <= rho0 (zeta = {zeta}, theta*rho = {theta_rho})")]
    OutsideGlobalRegime { zeta: f64, theta_rho: f64 },
    #[error("contraction failed after {iterations} iterations (last ratio {ratio})")]
    ContractionFailed { iterations: usize, ratio: f64 },
    #[error("conjugate power requires odd rho >= 3, got {0}")]
    EvenConjugatePower(u32),
    #[error("support explosion: {count} atoms exceed cap {cap}")]
    SupportExplosion { count: usize, cap: usize },
    #[error("missing time coverage: {0}")]
    MissingTimeCoverage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
