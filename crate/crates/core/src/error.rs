use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),

    #[error("invalid wave packet: {0}")]
    InvalidPacket(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("matrix dimension {0} is not even")]
    OddDimension(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operation requires a zero potential")]
    PotentialNotZero,

    #[error("grid of {n_points} points exceeds the limit of {limit} for this oracle")]
    GridTooLarge { n_points: usize, limit: usize },

    #[error("wave function touches the boundary: tail amplitude {amplitude:.3e} > {threshold:.1e} at t = {time}")]
    BoundaryContact { amplitude: f64, threshold: f64, time: f64 },

    #[error("packet is {sigmas:.2} standard deviations from the boundary at t = {time}, below the required {required}")]
    InsufficientClearance { sigmas: f64, required: f64, time: f64 },

    #[error("time step {dt} does not resolve the rest-energy oscillation: dt*2mc^2 = {ratio:.4} > {limit}")]
    OscillationUnresolved { dt: f64, ratio: f64, limit: f64 },

    #[error("time step {dt} is outside the explicit stability range of the kinetic term: dt*k_max^2/m = {ratio:.4} > {limit}")]
    KineticUnstable { dt: f64, ratio: f64, limit: f64 },

    #[error("quadrature did not converge: relative change {change:.3e} under node doubling (tolerance {tolerance:.1e})")]
    QuadratureNotConverged { change: f64, tolerance: f64 },

    #[error("invalid time: {0}")]
    InvalidTime(String),

    #[error("eigendecomposition failed")]
    Eigendecomposition,
}

impl Error {
    /// True for errors raised by a numerical guard during a run, as opposed
    /// to a malformed input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::BoundaryContact { .. }
                | Error::InsufficientClearance { .. }
                | Error::OscillationUnresolved { .. }
                | Error::KineticUnstable { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::GridTooLarge { .. }
                | Error::Eigendecomposition
        )
    }
}
