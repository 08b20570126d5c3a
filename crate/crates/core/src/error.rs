use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid must have a power-of-two node count of at least 8 per axis, got {0}")]
    GridSize(usize),

    #[error("field holds {got} samples but the grid expects {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),

    #[error("negative density {value} at flat index {index}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("initial wavefunction has norm {0}, expected 1 within 1e-10")]
    NotNormalized(f64),

    #[error("fields are sampled on different grids")]
    GridMismatch,

    #[error("rigid-body fit needs at least 4x4 usable interior nodes, found {0}")]
    GridTooSmall(usize),

    #[error("grid does not cover 8 sigma around the packet center (tail mass {0:e})")]
    InsufficientCoverage(f64),

    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),

    #[error("velocity direction is undefined at the origin")]
    AtOrigin,

    #[error("velocity unavailable at ({x}, {y}), t = {t}")]
    UnresolvedVelocity { t: f64, x: f64, y: f64 },

    #[error("tracer path too short: {samples} samples spanning {span}, need 16 samples over {period}")]
    ShortPath { samples: usize, span: f64, period: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
