use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside the domain of the chart")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration step failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("max integration time {max_time} reached after {found} of {wanted} crossings")]
    MaxTime { max_time: f64, found: usize, wanted: usize },

    #[error("section angle is not monotone at t = {t}")]
    NonMonotoneSection { t: f64 },

    #[error("ray from ({cx}, {cy}) at angle {angle} does not meet the level set Psi = {psi}")]
    RayMiss { cx: f64, cy: f64, angle: f64, psi: f64 },

    #[error("Psi = {psi} is not inside the {region} region interval")]
    OutsideRegion { psi: f64, region: String },

    #[error("Newton iteration for critical points did not converge from any seed")]
    NoCriticalPoints,

    #[error("degenerate contour: nodes {0} and its neighbours coincide")]
    DegenerateContour(usize),

    #[error("non-finite sample at Psi = {0}")]
    NonFinite(f64),

    #[error("{0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
