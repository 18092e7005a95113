//! Deterministic discount and issuer survival curves.
//!
//! Both curves integrate a piecewise-constant intensity: node `i` closes the
//! segment `(node_{i-1}, node_i]` (the first segment starts at the anchor) and
//! the last value extends flat beyond the final node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pricers;
use crate::schedule::Schedule;
use crate::solver;

/// Upper end of the flat-hazard calibration bracket.
pub const MAX_CALIBRATION_HAZARD: f64 = 10.0;
/// Spread residual tolerance for calibration.
pub const CALIBRATION_TOL: f64 = 1e-12;
/// Iteration cap for calibration.
pub const CALIBRATION_MAX_ITER: usize = 200;

const ANCHOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PiecewiseConstant {
    anchor: f64,
    node_times: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    fn new(anchor: f64, node_times: Vec<f64>, values: Vec<f64>, what: &str) -> Result<Self> {
        if !anchor.is_finite() {
            return Err(Error::InvalidCurve(format!("{what}: anchor {anchor} is not finite")));
        }
        if node_times.is_empty() || node_times.len() != values.len() {
            return Err(Error::InvalidCurve(format!(
                "{what}: need matching non-empty node and value lists, got {} and {}",
                node_times.len(),
                values.len()
            )));
        }
        let mut prev = anchor;
        for &t in &node_times {
            if !t.is_finite() || t <= prev {
                return Err(Error::InvalidCurve(format!(
                    "{what}: node {t} is not strictly after {prev}"
                )));
            }
            prev = t;
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve(format!("{what}: value {v} is not finite")));
        }
        Ok(Self { anchor, node_times, values })
    }

    /// Integral of the intensity over `[anchor, t]`.
    fn integral(&self, t: f64) -> Result<f64> {
        if !(t >= self.anchor) {
            return Err(Error::TimeBeforeAnchor { t, anchor: self.anchor });
        }
        let mut acc = 0.0;
        let mut start = self.anchor;
        for (&end, &v) in self.node_times.iter().zip(&self.values) {
            if t <= end {
                return Ok(acc + v * (t - start));
            }
            acc += v * (end - start);
            start = end;
        }
        let last = *self.values.last().expect("non-empty");
        Ok(acc + last * (t - start))
    }
}

/// Zero-coupon bond prices `P(t0, t)` from a piecewise-constant short rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    inner: PiecewiseConstant,
}

impl DiscountCurve {
    pub fn new(anchor: f64, node_times: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        Ok(Self {
            inner: PiecewiseConstant::new(anchor, node_times, rates, "discount curve")?,
        })
    }

    pub fn flat(anchor: f64, rate: f64) -> Result<Self> {
        Self::new(anchor, vec![anchor + 1.0], vec![rate])
    }

    pub fn anchor(&self) -> f64 {
        self.inner.anchor
    }

    pub fn node_times(&self) -> &[f64] {
        &self.inner.node_times
    }

    pub fn rates(&self) -> &[f64] {
        &self.inner.values
    }

    /// `P(t0, t)`.
    pub fn discount_factor(&self, t: f64) -> Result<f64> {
        Ok((-self.inner.integral(t)?).exp())
    }

    /// `∫ r` over `[t1, t2]`.
    pub fn integrated_rate(&self, t1: f64, t2: f64) -> Result<f64> {
        Ok(self.inner.integral(t2)? - self.inner.integral(t1)?)
    }

    /// Simple-compounded forward rate over `(t_start, t_end]`.
    pub fn forward_rate(&self, t_start: f64, t_end: f64) -> Result<f64> {
        if !(t_start < t_end) || !t_end.is_finite() {
            return Err(Error::InvalidInterval { start: t_start, end: t_end });
        }
        let p_start = self.discount_factor(t_start)?;
        let p_end = self.discount_factor(t_end)?;
        Ok((p_start / p_end - 1.0) / (t_end - t_start))
    }
}

/// Issuer survival probabilities `Q(t0, t)` from a piecewise-constant hazard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    inner: PiecewiseConstant,
}

impl SurvivalCurve {
    pub fn new(anchor: f64, node_times: Vec<f64>, hazards: Vec<f64>) -> Result<Self> {
        if let Some(h) = hazards.iter().find(|h| !(**h >= 0.0)) {
            return Err(Error::InvalidCurve(format!(
                "survival curve: hazard {h} is negative"
            )));
        }
        Ok(Self {
            inner: PiecewiseConstant::new(anchor, node_times, hazards, "survival curve")?,
        })
    }

    pub fn flat(anchor: f64, hazard: f64) -> Result<Self> {
        Self::new(anchor, vec![anchor + 1.0], vec![hazard])
    }

    pub fn anchor(&self) -> f64 {
        self.inner.anchor
    }

    pub fn node_times(&self) -> &[f64] {
        &self.inner.node_times
    }

    pub fn hazards(&self) -> &[f64] {
        &self.inner.values
    }

    /// `Q(t0, t)`.
    pub fn survival_prob(&self, t: f64) -> Result<f64> {
        Ok((-self.inner.integral(t)?).exp())
    }

    /// `∫ λ` over `[t1, t2]`.
    pub fn integrated_hazard(&self, t1: f64, t2: f64) -> Result<f64> {
        Ok(self.inner.integral(t2)? - self.inner.integral(t1)?)
    }
}

/// Law of the default bucket on a schedule: default in `(t_{k-1}, t_k]` is
/// effective at `t_k^-`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefaultDistribution {
    /// `p_k = Q(t_{k-1}) - Q(t_k)` for `k = 1..=N` (index `k - 1`).
    pub bucket_probs: Vec<f64>,
    /// `Q(t_N)`.
    pub survival_prob: f64,
}

impl DefaultDistribution {
    pub fn total(&self) -> f64 {
        self.bucket_probs.iter().sum::<f64>() + self.survival_prob
    }
}

pub(crate) fn check_anchor(schedule: &Schedule, curve_anchor: f64) -> Result<()> {
    if (schedule.t0() - curve_anchor).abs() > ANCHOR_TOL {
        return Err(Error::AnchorMismatch {
            schedule_t0: schedule.t0(),
            curve_t0: curve_anchor,
        });
    }
    Ok(())
}

pub fn discount_factor(curve: &DiscountCurve, t: f64) -> Result<f64> {
    curve.discount_factor(t)
}

pub fn survival_prob(curve: &SurvivalCurve, t: f64) -> Result<f64> {
    curve.survival_prob(t)
}

pub fn forward_rate(curve: &DiscountCurve, t_start: f64, t_end: f64) -> Result<f64> {
    curve.forward_rate(t_start, t_end)
}

/// Bucket probabilities of the default time on `schedule`.
pub fn default_distribution(curve: &SurvivalCurve, schedule: &Schedule) -> Result<DefaultDistribution> {
    check_anchor(schedule, curve.anchor())?;
    let mut q_prev = curve.survival_prob(schedule.t0())?;
    let mut bucket_probs = Vec::with_capacity(schedule.len());
    for &t in schedule.dates() {
        let q = curve.survival_prob(t)?;
        bucket_probs.push(q_prev - q);
        q_prev = q;
    }
    Ok(DefaultDistribution {
        bucket_probs,
        survival_prob: q_prev,
    })
}

/// Flat hazard whose par CDS spread on `schedule` reproduces `quote`.
pub fn calibrate_flat_hazard(
    discount: &DiscountCurve,
    schedule: &Schedule,
    quote: f64,
    recovery: f64,
) -> Result<SurvivalCurve> {
    if !(0.0..1.0).contains(&recovery) {
        return Err(Error::InvalidParameter {
            name: "recovery",
            reason: format!("must lie in [0, 1), got {recovery}"),
        });
    }
    if !(quote >= 0.0) || !quote.is_finite() {
        return Err(Error::InvalidParameter {
            name: "cds_quote",
            reason: format!("must be a finite non-negative spread, got {quote}"),
        });
    }
    let anchor = schedule.t0();
    let spread_at = |hazard: f64| -> Result<f64> {
        let q = SurvivalCurve::flat(anchor, hazard)?;
        Ok(pricers::par_cds_spread(discount, &q, schedule, recovery)?.spread)
    };
    let ceiling = spread_at(MAX_CALIBRATION_HAZARD)?;
    if quote > ceiling {
        return Err(Error::QuoteUnattainable {
            quote,
            max_hazard: MAX_CALIBRATION_HAZARD,
            ceiling,
        });
    }
    let mut failure = None;
    let root = solver::find_root(
        |h| match spread_at(h) {
            Ok(s) => s - quote,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        MAX_CALIBRATION_HAZARD,
        CALIBRATION_TOL,
        CALIBRATION_MAX_ITER,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let hazard = root.ok_or(Error::QuoteUnattainable {
        quote,
        max_hazard: MAX_CALIBRATION_HAZARD,
        ceiling,
    })?;
    SurvivalCurve::flat(anchor, hazard)
}
