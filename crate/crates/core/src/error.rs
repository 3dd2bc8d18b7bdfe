use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its allowed range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("underdetermined fit: {points} data points for {params} free parameters")]
    Underdetermined { points: usize, params: usize },

    #[error("data point {index} has non-positive value {value}")]
    NonPositiveData { index: usize, value: f64 },

    #[error("data series is malformed: {0}")]
    MalformedData(String),

    #[error("no crossing of level {level} in [{t_lo}, {t_hi}]")]
    NoCrossing { level: f64, t_lo: f64, t_hi: f64 },

    #[error("{0} did not converge")]
    NotConverged(String),

    #[error("fits were computed on different data series")]
    MismatchedData,

    #[error("unknown model {0:?} (expected pasy, p3 or exp)")]
    UnknownModel(String),

    #[error("config field `{field}`: {message}")]
    Config { field: &'static str, message: String },

    #[error("schema check failed: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}

pub(crate) fn check_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, 0.0, f64::INFINITY, "[0, inf)")
}
