use thiserror::Error;

use crate::lattice::Site;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{path}: parse error at line {line}, column {column}: {msg}")]
    Parse { path: String, line: usize, column: usize, msg: String },

    #[error("site ({}, {}) lies outside the l1 ball of radius {m}", .site.n1, .site.n2)]
    SupportRadius { site: Site, m: i64 },

    #[error("site ({}, {}) listed twice", .0.n1, .0.n2)]
    DuplicateSite(Site),

    #[error("non-finite value at site ({}, {})", .0.n1, .0.n2)]
    NonFinite(Site),

    #[error("singular linear system (condition estimate {cond:e})")]
    Singular { cond: f64 },

    #[error("series does not converge for |z| = {abs_z} (needs |z| > 3)")]
    NoConvergence { abs_z: f64 },

    #[error("singular denominator z^2 - r(xi) on the quadrature grid")]
    SingularDenominator,

    #[error("branch resolution failed: {0}")]
    Branch(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("stage order violated: {0}")]
    StageOrder(String),

    #[error("ill-conditioned row system (condition estimate {cond:e} exceeds cap {cap:e})")]
    Conditioning { cond: f64, cap: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
