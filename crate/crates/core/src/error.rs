use thiserror::Error;

use crate::optimizer::InfeasibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("{quantity} = {value} is outside the valid range {valid}")]
    Domain {
        quantity: &'static str,
        value: f64,
        valid: &'static str,
    },

    /// Bisection for a maximum link length could not bracket the target outage.
    #[error(
        "no bracket for outage target {target}: outage is {outage_low} at {l_low_m} m \
         and {outage_high} at {l_high_m} m"
    )]
    NoBracket {
        target: f64,
        l_low_m: f64,
        l_high_m: f64,
        outage_low: f64,
        outage_high: f64,
    },

    /// Outage estimate decreased with link length while bracketing.
    #[error("outage is not monotone in link length: {outage_low} at {l_low_m} m > {outage_high} at {l_high_m} m")]
    NonMonotoneOutage {
        l_low_m: f64,
        l_high_m: f64,
        outage_low: f64,
        outage_high: f64,
    },

    /// Every candidate of a design search violated at least one constraint.
    #[error("no feasible design among {} evaluated candidates", .0.evaluated)]
    NoFeasibleDesign(Box<InfeasibilityReport>),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, valid: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            valid,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } => 2,
            Error::NoFeasibleDesign(_) => 3,
            Error::NoBracket { .. } | Error::NonMonotoneOutage { .. } => 4,
        }
    }

    /// Short machine-readable tag for error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::NoBracket { .. } => "no_bracket",
            Error::NonMonotoneOutage { .. } => "non_monotone_outage",
            Error::NoFeasibleDesign(_) => "no_feasible_design",
        }
    }
}
