//! Payment grid shared by every instrument.
//!
//! Times are year fractions anchored at `t0`; each accrual is the exact
//! distance between consecutive dates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ACCRUAL_TOL: f64 = 1e-12;
const GRID_TOL: f64 = 1e-9;

/// Supported payments-per-year.
pub const FREQUENCIES: [u32; 4] = [1, 2, 4, 12];

/// Ordered payment dates `t_1 < ... < t_N` after an anchor `t0`, with accruals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    t0: f64,
    dates: Vec<f64>,
    accruals: Vec<f64>,
}

impl Schedule {
    /// Validates and wraps an explicit grid.
    pub fn new(t0: f64, dates: Vec<f64>, accruals: Vec<f64>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidSchedule(format!("anchor {t0} is not finite")));
        }
        if dates.is_empty() {
            return Err(Error::InvalidSchedule("no payment dates".into()));
        }
        if dates.len() != accruals.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} dates but {} accruals",
                dates.len(),
                accruals.len()
            )));
        }
        let mut prev = t0;
        for (k, (&t, &theta)) in dates.iter().zip(&accruals).enumerate() {
            if !t.is_finite() || t <= prev {
                return Err(Error::InvalidSchedule(format!(
                    "date {} ({t}) is not strictly after {prev}",
                    k + 1
                )));
            }
            if !(theta > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "accrual {} ({theta}) is not positive",
                    k + 1
                )));
            }
            if (theta - (t - prev)).abs() > ACCRUAL_TOL {
                return Err(Error::InvalidSchedule(format!(
                    "accrual {} ({theta}) differs from the date gap {}",
                    k + 1,
                    t - prev
                )));
            }
            prev = t;
        }
        Ok(Self { t0, dates, accruals })
    }

    /// Regular grid from `t0` to `maturity` with `frequency` payments per year.
    pub fn build(t0: f64, maturity: f64, frequency: u32) -> Result<Self> {
        if !FREQUENCIES.contains(&frequency) {
            return Err(Error::InvalidFrequency(frequency));
        }
        if !t0.is_finite() || !maturity.is_finite() || maturity <= t0 {
            return Err(Error::InvalidSchedule(format!(
                "maturity {maturity} must be finite and after t0 = {t0}"
            )));
        }
        let periods = (maturity - t0) * f64::from(frequency);
        let n = periods.round();
        if (periods - n).abs() > GRID_TOL || n < 1.0 {
            return Err(Error::NonIntegralPeriods { t0, maturity, frequency });
        }
        let n = n as usize;
        let step = 1.0 / f64::from(frequency);
        let dates: Vec<f64> = (1..=n)
            .map(|k| {
                if k == n {
                    maturity
                } else {
                    t0 + k as f64 * step
                }
            })
            .collect();
        let accruals = dates
            .iter()
            .scan(t0, |prev, &t| {
                let theta = t - *prev;
                *prev = t;
                Some(theta)
            })
            .collect();
        Self::new(t0, dates, accruals)
    }

    /// Prefix of the grid ending at the date matching `maturity`.
    pub fn truncate(&self, maturity: f64) -> Result<Self> {
        let n = self.index_of(maturity)?;
        Ok(Self {
            t0: self.t0,
            dates: self.dates[..=n].to_vec(),
            accruals: self.accruals[..=n].to_vec(),
        })
    }

    /// Zero-based index of the date matching `t` within 1e-9.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.dates
            .iter()
            .position(|&d| (d - t).abs() <= GRID_TOL)
            .ok_or(Error::MaturityNotOnGrid(t))
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    pub fn accruals(&self) -> &[f64] {
        &self.accruals
    }

    /// Number of payment dates `N`.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn maturity(&self) -> f64 {
        *self.dates.last().expect("schedule is non-empty")
    }

    /// Date `t_k` with `t_0` the anchor, for `k` in `0..=N`.
    pub fn time(&self, k: usize) -> f64 {
        if k == 0 {
            self.t0
        } else {
            self.dates[k - 1]
        }
    }
}

/// Regular grid from `t0` to `maturity`.
pub fn build_schedule(t0: f64, maturity: f64, frequency: u32) -> Result<Schedule> {
    Schedule::build(t0, maturity, frequency)
}

/// Prefix of `schedule` ending at `maturity`.
pub fn truncate_schedule(schedule: &Schedule, maturity: f64) -> Result<Schedule> {
    schedule.truncate(maturity)
}
