//! Commands and their JSON / table reports.
//!
//! Spreads are decimals per year rounded to 12 significant digits; with
//! `--bp` they are scaled by 1e4 for display only.

use std::fmt::Write as _;

use cds_replica::pricers;
use cds_replica::replication::{self, McEstimate, ScenarioKind};
use cds_replica::{calibrate_flat_hazard, default_distribution};
use serde::{Deserialize, Serialize};

use crate::config::{MarketConfig, SurvivalSource};
use crate::{exit, CliError};

/// Replication passes when the largest reachable residual stays below this.
pub const REPLICATION_EXIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Display {
    pub bp: bool,
}

impl Display {
    fn spread(&self, x: f64) -> f64 {
        let scaled = if self.bp { x * 1e4 } else { x };
        significant(scaled)
    }

    fn unit(&self) -> &'static str {
        if self.bp {
            "bp"
        } else {
            "decimal"
        }
    }
}

/// Rounds to 12 significant digits.
pub fn significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    pub spread_unit: String,
    pub survival: SurvivalSource,
    pub risky_bond_price: f64,
    pub riskfree_bond_price: f64,
    pub risky_floater_price: f64,
    pub annuity_defaultable: f64,
    pub annuity_riskfree: f64,
    pub cds_spread: f64,
    pub asw_spread: f64,
    pub cancelable_asw_spread: f64,
    pub early_termination_pv: f64,
    pub par_repo_spread: f64,
    pub repo_maturity: f64,
    pub forward_price: f64,
    pub generalized_cancelable_asw_spread: f64,
}

pub fn cmd_price(cfg: &MarketConfig, display: Display) -> Result<PriceReport, CliError> {
    let m = cfg.market()?;
    let (d, q, b) = (&m.discount, &m.survival, &m.bond);
    let s = &b.schedule;
    let asw = pricers::par_asw_spread(d, q, b)?;
    let generalized =
        pricers::par_cancelable_asw_spread_generalized(d, q, b, m.repo.maturity, m.repo.forward_price)?;
    Ok(PriceReport {
        spread_unit: display.unit().into(),
        survival: m.source,
        risky_bond_price: pricers::price_risky_bond(d, q, b)?,
        riskfree_bond_price: pricers::price_riskfree_bond(d, s, b.coupon)?,
        risky_floater_price: pricers::price_risky_floater(d, q, s, b.recovery)?,
        annuity_defaultable: pricers::annuity_defaultable(d, q, s)?,
        annuity_riskfree: pricers::annuity_riskfree(d, s)?,
        cds_spread: display.spread(pricers::par_cds_spread(d, q, s, b.recovery)?.spread),
        asw_spread: display.spread(asw.spread),
        cancelable_asw_spread: display.spread(pricers::par_cancelable_asw_spread(d, q, b)?.spread),
        early_termination_pv: pricers::early_termination_pv(d, q, b, asw.spread)?,
        par_repo_spread: display.spread(pricers::par_repo_spread(d, q, s)?.spread),
        repo_maturity: m.repo.maturity,
        forward_price: m.repo.forward_price,
        generalized_cancelable_asw_spread: display.spread(generalized.spread),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReplicateOptions {
    pub no_clause: bool,
    pub mc_paths: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    /// `default` or `survival`.
    pub scenario: String,
    /// Default bucket `k` (payment date index), `N + 1` for survival.
    pub bucket: usize,
    pub time: f64,
    pub probability: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateReport {
    pub spread_unit: String,
    pub clause_enabled: bool,
    pub asw_spread: f64,
    pub cds_spread: f64,
    pub repo_spread: f64,
    pub repo_maturity: f64,
    pub forward_price: f64,
    pub scenarios: Vec<ScenarioRow>,
    pub expected_residual: f64,
    pub max_abs_residual: f64,
    pub replicates: bool,
    pub monte_carlo: Option<McEstimate>,
}

impl ReplicateReport {
    pub fn exit_code(&self) -> u8 {
        if self.clause_enabled && !self.replicates {
            exit::REPLICATION
        } else {
            exit::OK
        }
    }
}

pub fn cmd_replicate(
    cfg: &MarketConfig,
    opts: ReplicateOptions,
    display: Display,
) -> Result<ReplicateReport, CliError> {
    let m = cfg.market()?;
    let clause = !opts.no_clause;
    let rep = replication::replication_report(&m.discount, &m.survival, &m.bond, &m.repo, clause)?;
    let s = &m.bond.schedule;
    let scenarios = rep
        .scenarios
        .iter()
        .map(|r| {
            let (name, bucket, time) = match r.scenario.kind {
                ScenarioKind::DefaultAt(k) => ("default", k, s.time(k)),
                ScenarioKind::Survival => ("survival", s.len() + 1, s.maturity()),
            };
            ScenarioRow {
                scenario: name.into(),
                bucket,
                time,
                probability: r.scenario.probability,
                residual: r.residual,
            }
        })
        .collect();
    let monte_carlo = opts
        .mc_paths
        .map(|n| replication::mc_check(&m.discount, &m.survival, &m.bond, &m.repo, clause, n, opts.seed))
        .transpose()?;
    Ok(ReplicateReport {
        spread_unit: display.unit().into(),
        clause_enabled: clause,
        asw_spread: display.spread(rep.asw_spread),
        cds_spread: display.spread(rep.cds_spread),
        repo_spread: display.spread(rep.repo_spread),
        repo_maturity: rep.repo_maturity,
        forward_price: rep.forward_price,
        scenarios,
        expected_residual: rep.expected_residual,
        max_abs_residual: rep.max_abs_residual,
        replicates: rep.max_abs_residual < REPLICATION_EXIT_TOL,
        monte_carlo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpliedRepoReport {
    pub spread_unit: String,
    pub repo_spread: f64,
    pub reverse_repo_spread: f64,
}

pub fn cmd_implied_repo(cfg: &MarketConfig, display: Display) -> Result<ImpliedRepoReport, CliError> {
    cfg.validate()?;
    let q = cfg
        .quotes
        .as_ref()
        .ok_or(CliError::Missing("implied-repo needs a `quotes` block"))?;
    let implied = pricers::implied_repo_spreads(q.cds_bid, q.cds_ask, q.aswc_bid, q.aswc_ask)?;
    Ok(ImpliedRepoReport {
        spread_unit: display.unit().into(),
        repo_spread: display.spread(implied.repo),
        reverse_repo_spread: display.spread(implied.reverse_repo),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub spread_unit: String,
    pub cds_quote: f64,
    pub hazard: f64,
    pub reproduced_spread: f64,
    pub spread_residual: f64,
    pub survival_at_maturity: f64,
}

pub fn cmd_calibrate(cfg: &MarketConfig, display: Display) -> Result<CalibrationReport, CliError> {
    cfg.validate()?;
    let quote = cfg
        .cds_quote
        .ok_or(CliError::Missing("calibrate needs `cds_quote` instead of `hazard_nodes`"))?;
    let d = cfg.discount_curve()?;
    let b = cfg.bond_spec()?;
    let curve = calibrate_flat_hazard(&d, &b.schedule, quote, b.recovery)?;
    let reproduced = pricers::par_cds_spread(&d, &curve, &b.schedule, b.recovery)?.spread;
    let dist = default_distribution(&curve, &b.schedule)?;
    Ok(CalibrationReport {
        spread_unit: display.unit().into(),
        cds_quote: display.spread(quote),
        hazard: curve.hazards()[0],
        reproduced_spread: display.spread(reproduced),
        spread_residual: reproduced - quote,
        survival_at_maturity: dist.survival_prob,
    })
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<36} {value}");
}

impl PriceReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        line(&mut out, "spread unit", &self.spread_unit);
        if let SurvivalSource::Calibrated { cds_quote, hazard } = self.survival {
            line(&mut out, "calibrated flat hazard", format!("{hazard:.12e} (quote {cds_quote})"));
        }
        line(&mut out, "risky bond price B0", self.risky_bond_price);
        line(&mut out, "risk-free bond price", self.riskfree_bond_price);
        line(&mut out, "risky floater price F0", self.risky_floater_price);
        line(&mut out, "defaultable annuity A", self.annuity_defaultable);
        line(&mut out, "risk-free annuity", self.annuity_riskfree);
        line(&mut out, "par CDS spread", self.cds_spread);
        line(&mut out, "standard ASW spread", self.asw_spread);
        line(&mut out, "cancelable ASW spread", self.cancelable_asw_spread);
        line(&mut out, "break clause PV (standard spread)", self.early_termination_pv);
        line(&mut out, "par repo spread", self.par_repo_spread);
        line(&mut out, "repo maturity", self.repo_maturity);
        line(&mut out, "repo forward price", self.forward_price);
        line(&mut out, "generalized cancelable ASW spread", self.generalized_cancelable_asw_spread);
        out
    }
}

impl ReplicateReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        line(&mut out, "break clause", if self.clause_enabled { "on" } else { "off" });
        line(&mut out, &format!("asset swap spread ({})", self.spread_unit), self.asw_spread);
        line(&mut out, &format!("cds spread ({})", self.spread_unit), self.cds_spread);
        line(&mut out, &format!("repo spread ({})", self.spread_unit), self.repo_spread);
        line(&mut out, "repo maturity / forward price", format!("{} / {}", self.repo_maturity, self.forward_price));
        let _ = writeln!(out, "\n{:<10} {:>6} {:>10} {:>22} {:>24}", "scenario", "bucket", "time", "probability", "residual");
        for r in &self.scenarios {
            let _ = writeln!(
                out,
                "{:<10} {:>6} {:>10.4} {:>22.15e} {:>24.15e}",
                r.scenario, r.bucket, r.time, r.probability, r.residual
            );
        }
        let _ = writeln!(out);
        line(&mut out, "expected residual", format!("{:.15e}", self.expected_residual));
        line(&mut out, "max |residual|", format!("{:.15e}", self.max_abs_residual));
        line(&mut out, "replicates", self.replicates);
        if let Some(mc) = &self.monte_carlo {
            line(
                &mut out,
                "monte carlo estimate",
                format!("{:.15e} +/- {:.3e} ({} paths, seed {})", mc.estimate, mc.std_error, mc.n_paths, mc.seed),
            );
        }
        out
    }
}

impl ImpliedRepoReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        line(&mut out, "spread unit", &self.spread_unit);
        line(&mut out, "implied repo spread", self.repo_spread);
        line(&mut out, "implied reverse repo spread", self.reverse_repo_spread);
        out
    }
}

impl CalibrationReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        line(&mut out, "spread unit", &self.spread_unit);
        line(&mut out, "cds quote", self.cds_quote);
        line(&mut out, "flat hazard", format!("{:.15e}", self.hazard));
        line(&mut out, "reproduced par spread", self.reproduced_spread);
        line(&mut out, "spread residual", format!("{:.3e}", self.spread_residual));
        line(&mut out, "survival to maturity", self.survival_at_maturity);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(significant(0.012_120_804_016_053_49), 0.012_120_804_016_1);
        assert_eq!(significant(0.0), 0.0);
        assert_eq!(significant(-1.234_567_890_123_456e-7), -1.234_567_890_12e-7);
        assert_eq!(Display { bp: true }.spread(0.0012), 12.0);
    }

    #[test]
    fn residual_above_tolerance_exits_four() {
        let mut report = ReplicateReport {
            spread_unit: "decimal".into(),
            clause_enabled: true,
            asw_spread: 0.0,
            cds_spread: 0.0,
            repo_spread: 0.0,
            repo_maturity: 5.0,
            forward_price: 1.0,
            scenarios: vec![],
            expected_residual: 0.0,
            max_abs_residual: 1e-9,
            replicates: false,
            monte_carlo: None,
        };
        assert_eq!(report.exit_code(), exit::REPLICATION);
        report.clause_enabled = false;
        assert_eq!(report.exit_code(), exit::OK);
        report.clause_enabled = true;
        report.replicates = true;
        assert_eq!(report.exit_code(), exit::OK);
    }
}
