//! Scenario-level cashflow ledgers of the repo + asset swap replica versus a
//! CDS, the exhaustive default-scenario oracle and a Monte Carlo cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{default_distribution, DiscountCurve, SurvivalCurve};
use crate::error::{Error, Result};
use crate::pricers::{self, BondSpec, Grid, RepoSpec};
use crate::schedule::Schedule;

/// Tolerance on pathwise replication residuals.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Smallest accepted Monte Carlo sample.
pub const MIN_MC_PATHS: usize = 1000;

const FORWARD_PRICE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bucket", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Issuer default effective just before payment date `t_k` (1-based).
    DefaultAt(usize),
    Survival,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefaultScenario {
    pub kind: ScenarioKind,
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    Bond,
    Repo,
    AssetSwap,
    Cds,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::Bond, Leg::Repo, Leg::AssetSwap, Leg::Cds];
}

/// Table row a cashflow belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "row", content = "period", rename_all = "snake_case")]
pub enum Row {
    Inception,
    Running(usize),
    Maturity,
    Default(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub time: f64,
    pub leg: Leg,
    pub row: Row,
    pub amount: f64,
}

/// Cashflows of one scenario. Replica legs are booked from the replica
/// holder's side, the CDS leg from the protection seller's side.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CashflowLedger {
    pub entries: Vec<LedgerEntry>,
}

impl CashflowLedger {
    fn push(&mut self, time: f64, leg: Leg, row: Row, amount: f64) {
        self.entries.push(LedgerEntry { time, leg, row, amount });
    }

    /// Discounted value of the entries of `leg`.
    pub fn leg_pv(&self, d: &DiscountCurve, leg: Leg) -> Result<f64> {
        self.entries
            .iter()
            .filter(|e| e.leg == leg)
            .map(|e| Ok(e.amount * d.discount_factor(e.time)?))
            .sum()
    }

    /// Discounted replica (bond + repo + asset swap) minus CDS.
    pub fn residual(&self, d: &DiscountCurve) -> Result<f64> {
        self.entries
            .iter()
            .map(|e| {
                let sign = if e.leg == Leg::Cds { -1.0 } else { 1.0 };
                Ok(sign * e.amount * d.discount_factor(e.time)?)
            })
            .sum()
    }

    /// Undiscounted sum of one leg within one row, with the default unwind of
    /// the bond and the repo netted onto the bond column.
    pub fn table_cell(&self, row: Row, leg: Leg) -> Option<f64> {
        let netted = |e: &&LedgerEntry| match (e.row, e.leg) {
            (Row::Default(_), Leg::Repo) => leg == Leg::Bond,
            (Row::Default(_), Leg::Bond) => leg == Leg::Bond,
            _ => e.leg == leg,
        };
        let mut cells = self.entries.iter().filter(|e| e.row == row).filter(netted).peekable();
        cells.peek()?;
        Some(cells.map(|e| e.amount).sum())
    }
}

/// Spreads and clause of one replica portfolio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaTerms {
    pub asw_spread: f64,
    pub cds_spread: f64,
    pub clause_enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResidual {
    pub scenario: DefaultScenario,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub clause_enabled: bool,
    pub asw_spread: f64,
    pub cds_spread: f64,
    pub repo_spread: f64,
    pub repo_maturity: f64,
    pub forward_price: f64,
    pub scenarios: Vec<ScenarioResidual>,
    pub expected_residual: f64,
    /// Largest residual over scenarios with positive probability.
    pub max_abs_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub seed: u64,
}

/// All `N + 1` default scenarios: buckets ascending, survival last.
pub fn enumerate_scenarios(q: &SurvivalCurve, s: &Schedule) -> Result<Vec<DefaultScenario>> {
    let dist = default_distribution(q, s)?;
    let mut out: Vec<DefaultScenario> = dist
        .bucket_probs
        .iter()
        .enumerate()
        .map(|(i, &p)| DefaultScenario {
            kind: ScenarioKind::DefaultAt(i + 1),
            probability: p,
        })
        .collect();
    out.push(DefaultScenario {
        kind: ScenarioKind::Survival,
        probability: dist.survival_prob,
    });
    Ok(out)
}

/// Scenario-independent inputs of the ledger, checked once.
struct LedgerPlan {
    grid: Grid,
    /// Number of periods up to the repo maturity.
    horizon: usize,
    terminal_bond: f64,
    mtm: Vec<f64>,
}

impl LedgerPlan {
    fn new(
        d: &DiscountCurve,
        q: &SurvivalCurve,
        spec: &BondSpec,
        repo: &RepoSpec,
        terms: &ReplicaTerms,
    ) -> Result<Self> {
        let s = &spec.schedule;
        let horizon = s
            .index_of(repo.maturity)
            .map_err(|_| {
                Error::InconsistentSpecs(format!(
                    "repo maturity {} is not a bond payment date",
                    repo.maturity
                ))
            })?
            + 1;
        if horizon == s.len() && (repo.forward_price - 1.0).abs() > FORWARD_PRICE_TOL {
            return Err(Error::InconsistentSpecs(format!(
                "repo to maturity must repurchase at par, got forward price {}",
                repo.forward_price
            )));
        }
        for (name, v) in [("asw_spread", terms.asw_spread), ("cds_spread", terms.cds_spread)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        let terminal_bond = pricers::forward_bond_price(d, q, spec, repo.maturity)?;
        let head = spec.truncated(repo.maturity)?;
        let mtm = pricers::mtm_profile(d, &head, terms.asw_spread)?.values;
        Ok(Self {
            grid: Grid::new(d, q, s)?,
            horizon,
            terminal_bond,
            mtm,
        })
    }

    fn ledger(
        &self,
        spec: &BondSpec,
        repo: &RepoSpec,
        terms: &ReplicaTerms,
        b0: f64,
        scenario: &DefaultScenario,
    ) -> CashflowLedger {
        let s = &spec.schedule;
        let g = &self.grid;
        let mut ledger = CashflowLedger::default();
        let t0 = s.t0();
        let x = repo.forward_price;
        ledger.push(t0, Leg::Bond, Row::Inception, -b0);
        ledger.push(t0, Leg::Repo, Row::Inception, x);
        ledger.push(t0, Leg::AssetSwap, Row::Inception, b0 - x);

        let default_bucket = match scenario.kind {
            ScenarioKind::DefaultAt(k) if k <= self.horizon => Some(k),
            _ => None,
        };
        let last_paid = default_bucket.map_or(self.horizon, |k| k - 1);
        for k in 1..=last_paid {
            let t = s.time(k);
            let theta = g.theta[k - 1];
            let eps = g.eps[k - 1];
            ledger.push(t, Leg::Bond, Row::Running(k), spec.coupon * theta);
            ledger.push(t, Leg::Repo, Row::Running(k), (-eps + repo.spread) * theta);
            ledger.push(
                t,
                Leg::AssetSwap,
                Row::Running(k),
                (-spec.coupon + eps + terms.asw_spread) * theta,
            );
            ledger.push(t, Leg::Cds, Row::Running(k), terms.cds_spread * theta);
        }
        match default_bucket {
            Some(k) => {
                let t = s.time(k);
                ledger.push(t, Leg::Bond, Row::Default(k), spec.recovery);
                ledger.push(t, Leg::Repo, Row::Default(k), -1.0);
                if !terms.clause_enabled {
                    ledger.push(t, Leg::AssetSwap, Row::Default(k), self.mtm[k - 1]);
                }
                ledger.push(t, Leg::Cds, Row::Default(k), -spec.lgd());
            }
            None => {
                let t = s.time(self.horizon);
                ledger.push(t, Leg::Bond, Row::Maturity, self.terminal_bond);
                ledger.push(t, Leg::Repo, Row::Maturity, -x);
            }
        }
        ledger
    }
}

/// Cashflows of bond, repo, asset swap and CDS in one default scenario.
///
/// Defaults after the repo maturity leave the replica untouched: it was
/// closed out at `T_r` by selling the bond at its forward value.
#[allow(clippy::too_many_arguments)]
pub fn portfolio_ledger(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    repo: &RepoSpec,
    terms: &ReplicaTerms,
    scenario: &DefaultScenario,
) -> Result<CashflowLedger> {
    let plan = LedgerPlan::new(d, q, spec, repo, terms)?;
    let b0 = plan.grid.risky_bond(spec.coupon, spec.recovery);
    if let ScenarioKind::DefaultAt(k) = scenario.kind {
        if k == 0 || k > spec.schedule.len() {
            return Err(Error::InconsistentSpecs(format!(
                "default bucket {k} outside 1..={}",
                spec.schedule.len()
            )));
        }
    }
    Ok(plan.ledger(spec, repo, terms, b0, scenario))
}

/// Standard (non-cancelable) asset swap spread to the repo maturity, with
/// upfront `B_0 - X`.
fn par_standard_spread_to(d: &DiscountCurve, q: &SurvivalCurve, spec: &BondSpec, repo: &RepoSpec) -> Result<f64> {
    let b0 = pricers::price_risky_bond(d, q, spec)?;
    if repo.maturity == spec.schedule.maturity() && repo.forward_price == 1.0 {
        return Ok(pricers::par_asw_spread(d, q, spec)?.spread);
    }
    let g = Grid::riskfree(d, &spec.schedule.truncate(repo.maturity)?)?;
    let running: f64 = g.swap_payments(spec.coupon, 0.0).iter().sum();
    Ok(-(running + b0 - repo.forward_price) / g.annuity_riskfree())
}

/// Par spreads for the replica: cancelable (generalized when the repo ends
/// early) with the clause, standard without; CDS spread is ASW plus repo.
pub fn replica_terms(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    repo: &RepoSpec,
    clause_enabled: bool,
) -> Result<ReplicaTerms> {
    let asw_spread = if clause_enabled {
        pricers::par_cancelable_asw_spread_generalized(d, q, spec, repo.maturity, repo.forward_price)?
            .spread
    } else {
        par_standard_spread_to(d, q, spec, repo)?
    };
    Ok(ReplicaTerms {
        asw_spread,
        cds_spread: asw_spread + repo.spread,
        clause_enabled,
    })
}

/// Residuals of the replica against the CDS across every default scenario.
pub fn replication_report(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    repo: &RepoSpec,
    clause_enabled: bool,
) -> Result<ReplicationReport> {
    let terms = replica_terms(d, q, spec, repo, clause_enabled)?;
    replication_report_with(d, q, spec, repo, &terms)
}

/// As [`replication_report`] with caller-chosen spreads.
pub fn replication_report_with(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    repo: &RepoSpec,
    terms: &ReplicaTerms,
) -> Result<ReplicationReport> {
    let plan = LedgerPlan::new(d, q, spec, repo, terms)?;
    let b0 = plan.grid.risky_bond(spec.coupon, spec.recovery);
    let scenarios = enumerate_scenarios(q, &spec.schedule)?
        .into_iter()
        .map(|scenario| {
            let residual = plan.ledger(spec, repo, terms, b0, &scenario).residual(d)?;
            Ok(ScenarioResidual { scenario, residual })
        })
        .collect::<Result<Vec<_>>>()?;
    let expected_residual = scenarios
        .iter()
        .map(|s| s.scenario.probability * s.residual)
        .sum();
    let max_abs_residual = scenarios
        .iter()
        .filter(|s| s.scenario.probability > 0.0)
        .map(|s| s.residual.abs())
        .fold(0.0, f64::max);
    Ok(ReplicationReport {
        clause_enabled: terms.clause_enabled,
        asw_spread: terms.asw_spread,
        cds_spread: terms.cds_spread,
        repo_spread: repo.spread,
        repo_maturity: repo.maturity,
        forward_price: repo.forward_price,
        scenarios,
        expected_residual,
        max_abs_residual,
    })
}

/// Monte Carlo estimate of the expected replica-minus-CDS residual.
///
/// Path `i` draws its uniform from ChaCha stream `i` of `seed`, so results do
/// not depend on how paths are scheduled across threads.
#[allow(clippy::too_many_arguments)]
pub fn mc_check(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    repo: &RepoSpec,
    clause_enabled: bool,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_paths < MIN_MC_PATHS {
        return Err(Error::InvalidParameter {
            name: "n_paths",
            reason: format!("need at least {MIN_MC_PATHS}, got {n_paths}"),
        });
    }
    let report = replication_report(d, q, spec, repo, clause_enabled)?;
    let dist = default_distribution(q, &spec.schedule)?;
    let mut cdf = Vec::with_capacity(dist.bucket_probs.len());
    let mut acc = 0.0;
    for p in &dist.bucket_probs {
        acc += p;
        cdf.push(acc);
    }
    let residuals: Vec<f64> = report.scenarios.iter().map(|s| s.residual).collect();
    let base = ChaCha8Rng::seed_from_u64(seed);

    let samples: Vec<f64> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            let u: f64 = rng.gen();
            // first bucket whose cumulative probability exceeds u; survival otherwise
            let bucket = cdf.partition_point(|&c| c <= u);
            residuals[bucket]
        })
        .collect();

    let n = n_paths as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
        n_paths,
        seed,
    })
}
