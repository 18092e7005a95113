//! Replication of a stylized credit default swap with a repo and an asset
//! swap that terminates at issuer default with a zero close-out amount.
//!
//! - [`schedule`]: the payment grid shared by every instrument.
//! - [`curves`]: deterministic discounting, issuer survival and flat-hazard calibration.
//! - [`pricers`]: bonds, floaters, annuities, par spreads and the break-clause value.
//! - [`replication`]: per-scenario cashflow ledgers, the enumeration oracle and Monte Carlo.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod pricers;
pub mod replication;
pub mod schedule;
pub mod solver;

pub use curves::{
    calibrate_flat_hazard, default_distribution, DefaultDistribution, DiscountCurve, SurvivalCurve,
};
pub use error::{Error, Result};
pub use pricers::{BondSpec, ImpliedRepo, MtmProfile, RepoSpec, SpreadResult};
pub use replication::{
    CashflowLedger, DefaultScenario, Leg, McEstimate, ReplicaTerms, ReplicationReport, Row,
    ScenarioKind,
};
pub use schedule::{build_schedule, truncate_schedule, Schedule};
