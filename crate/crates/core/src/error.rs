use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} is not inside the unit disk")]
    OutsideDisk(String),

    #[error("transform is not normalized: |a|^2 - |b|^2 = {det}")]
    NotNormalized { det: f64 },

    #[error("finite-difference stencil of radius {reach:e} leaves the domain at {point}")]
    StencilOutOfDomain { point: String, reach: f64 },

    #[error("non-finite value produced while differentiating at {0}")]
    NonFinite(String),

    #[error("reduction to the fundamental domain stalled after {iterations} steps at {point}")]
    ReductionStall { point: String, iterations: usize },

    #[error("closed form for {tag} is singular at delta = {delta} (within 1e-6 of the totally real core)")]
    NearCore { tag: String, delta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
