use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("potential evaluated at pole {pole_index} (position {position:?})")]
    AtPole { pole_index: usize, position: Vec<f64> },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("undefined quotient: trial field is identically zero")]
    ZeroField,

    #[error("spherical basis too small: residual energy fraction {residual:.3e} exceeds {limit:.1e}")]
    BasisTooSmall { residual: f64, limit: f64 },

    #[error("degenerate ODE basis: |z-| fell to {value:.3e} on the integration path")]
    DegenerateBasis { value: f64 },

    #[error("field is not a solution: relative residual {residual:.3e} exceeds {limit:.1e}")]
    NotASolution { residual: f64, limit: f64 },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("grid too coarse for h = {h}: spacing {spacing:.3e} exceeds h/10; need at least {needed} points")]
    Resolution { h: f64, spacing: f64, needed: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("operator is singular or factorization failed: {0}")]
    SingularOperator(String),

    #[error("power iteration did not converge after {iters} iterations; last Ritz values {tail:?}")]
    NonConvergence { iters: usize, tail: Vec<f64> },

    #[error("power-law fit needs at least {needed} records in the window, got {got}")]
    Fit { needed: usize, got: usize },

    #[error("sweep failed: {failed} of {total} frequency points failed")]
    Sweep { failed: usize, total: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
