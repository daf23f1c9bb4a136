use thiserror::Error;

/// Errors produced by the solvers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid units: {0}")]
    InvalidUnits(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error(
        "no turning points: epsilon {epsilon} does not exceed 1 + min potential = {threshold}"
    )]
    NoTurningPoints { epsilon: f64, threshold: f64 },

    #[error(
        "constraint violation: {roots} turning points at epsilon {epsilon} (exactly 2 required)"
    )]
    TooManyTurningPoints { epsilon: f64, roots: usize },

    #[error("constraint violation: 1 + min potential = {0} is negative")]
    Inadmissible(f64),

    #[error("potential does not confine epsilon {epsilon} within distance {reach} of the minimum")]
    NotConfining { epsilon: f64, reach: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("segment {index} touches a turning point (lambda = 0)")]
    SingularSegment { index: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("step size underflow at xi = {at}")]
    Stiffness { at: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("level {n} is not bracketed by [{lo}, {hi}]")]
    LevelBracket { n: usize, lo: f64, hi: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("flat turning point at xi = {0}: potential derivative vanishes")]
    FlatTurningPoint(f64),

    #[error("sign property violated: {0}")]
    SignProperty(String),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("gamma function pole at {0}")]
    GammaPole(f64),

    #[error("series did not converge within {terms} terms")]
    Convergence { terms: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for violations of the two-turning-point / admissibility restrictions.
    pub fn is_constraint_violation(&self) -> bool {
        matches!(
            self,
            Error::TooManyTurningPoints { .. }
                | Error::Inadmissible(_)
                | Error::NotConfining { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
