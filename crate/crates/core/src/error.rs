use thiserror::Error;

/// Errors raised by schedule construction, curve evaluation, pricing and replication.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid payment frequency {0}; expected one of 1, 2, 4, 12")]
    InvalidFrequency(u32),

    #[error("({maturity} - {t0}) * {frequency} is not an integral number of periods")]
    NonIntegralPeriods { t0: f64, maturity: f64, frequency: u32 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("maturity {0} does not coincide with any schedule date")]
    MaturityNotOnGrid(f64),

    #[error("time {t} lies before the curve anchor {anchor}")]
    TimeBeforeAnchor { t: f64, anchor: f64 },

    #[error("invalid interval ({start}, {end})")]
    InvalidInterval { start: f64, end: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("schedule starts at {schedule_t0} but the curves are anchored at {curve_t0}")]
    AnchorMismatch { schedule_t0: f64, curve_t0: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("annuity is not positive ({0})")]
    DegenerateAnnuity(f64),

    #[error("CDS quote {quote} is not attainable with a flat hazard in [0, {max_hazard}] (ceiling {ceiling})")]
    QuoteUnattainable { quote: f64, max_hazard: f64, ceiling: f64 },

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("crossed market: {name} bid {bid} exceeds ask {ask}")]
    CrossedMarket { name: &'static str, bid: f64, ask: f64 },

    #[error("inconsistent specs: {0}")]
    InconsistentSpecs(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}
