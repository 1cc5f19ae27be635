use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while designing or simulating a plate.
///
/// Variants are grouped by [`ErrorKind`] so front ends can map them onto
/// exit codes without matching every case.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("{what} = {value} is outside the valid interval [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("order pair (m={m}, j={j}) rejected: {reason}")]
    InvalidOrderPair { m: u32, j: i32, reason: String },
    #[error(
        "component orders must strictly increase outward, got m={previous} followed by m={next}"
    )]
    Ordering { previous: u32, next: u32 },
    #[error(
        "fabrication limit: half-zone n={zone} of component {component} is {width_um:.4} um wide, \
         below the minimum feature size {min_um:.4} um"
    )]
    FabricationLimit {
        component: usize,
        zone: u64,
        width_um: f64,
        min_um: f64,
    },
    #[error(
        "sampling too coarse for {what}: spacing {given:.4e} m, need at most {required:.4e} m"
    )]
    Sampling {
        what: &'static str,
        given: f64,
        required: f64,
    },
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
    #[error("malformed optical-constants table: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or missing input files and settings.
    Config,
    /// A value outside a formula's domain, or a rejected design.
    Domain,
    /// Sampling or fabrication limits.
    Limit,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Format(_) | Error::Io(_) | Error::Csv(_) => ErrorKind::Config,
            Error::Domain { .. }
            | Error::OutOfRange { .. }
            | Error::InvalidOrderPair { .. }
            | Error::Ordering { .. }
            | Error::Consistency(_) => ErrorKind::Domain,
            Error::FabricationLimit { .. } | Error::Sampling { .. } => ErrorKind::Limit,
        }
    }
}

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            what,
            requirement: "finite and positive",
            value,
        })
    }
}

pub(crate) fn ensure_non_negative(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            what,
            requirement: "finite and non-negative",
            value,
        })
    }
}
