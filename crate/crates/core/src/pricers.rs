//! Finite-sum pricers for the bond, floater, annuities and par spreads.
//!
//! Every value is per unit notional at the schedule anchor. Swap values are
//! quoted from the bond holder's side: pays the coupon `c`, receives the
//! floating fixing plus the spread.

use serde::{Deserialize, Serialize};

use crate::curves::{check_anchor, DiscountCurve, SurvivalCurve};
use crate::error::{check_finite, Error, Result};
use crate::schedule::Schedule;

/// Fixed-coupon issuer bond on a schedule, notional 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondSpec {
    pub coupon: f64,
    pub recovery: f64,
    pub schedule: Schedule,
}

impl BondSpec {
    pub fn new(coupon: f64, recovery: f64, schedule: Schedule) -> Result<Self> {
        check_finite("coupon", coupon)?;
        if !(0.0..1.0).contains(&recovery) {
            return Err(Error::InvalidParameter {
                name: "recovery",
                reason: format!("must lie in [0, 1), got {recovery}"),
            });
        }
        Ok(Self { coupon, recovery, schedule })
    }

    /// Loss given default, `1 - R`.
    pub fn lgd(&self) -> f64 {
        1.0 - self.recovery
    }

    /// Same bond with payments cut at `maturity` (no redemption is implied).
    pub(crate) fn truncated(&self, maturity: f64) -> Result<Self> {
        Ok(Self {
            schedule: self.schedule.truncate(maturity)?,
            ..self.clone()
        })
    }
}

/// Repo financing the bond: periodic `ε + spread` on unit notional, repurchase
/// at `forward_price` on `maturity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoSpec {
    pub spread: f64,
    pub maturity: f64,
    pub forward_price: f64,
}

impl RepoSpec {
    pub fn new(spread: f64, maturity: f64, forward_price: f64) -> Result<Self> {
        check_finite("repo spread", spread)?;
        check_finite("repo maturity", maturity)?;
        if !(forward_price > 0.0) || !forward_price.is_finite() {
            return Err(Error::InvalidParameter {
                name: "forward_price",
                reason: format!("must be positive and finite, got {forward_price}"),
            });
        }
        Ok(Self { spread, maturity, forward_price })
    }

    /// Repo to the bond's maturity at par.
    pub fn to_maturity(spread: f64, schedule: &Schedule) -> Result<Self> {
        Self::new(spread, schedule.maturity(), 1.0)
    }
}

/// A par spread together with its `numerator / annuity` decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadResult {
    pub spread: f64,
    pub numerator: f64,
    pub annuity: f64,
}

impl SpreadResult {
    fn ratio(numerator: f64, annuity: f64) -> Result<Self> {
        if !(annuity > 0.0) {
            return Err(Error::DegenerateAnnuity(annuity));
        }
        Ok(Self {
            spread: numerator / annuity,
            numerator,
            annuity,
        })
    }
}

/// Values `mtm_{t_k^-}` for `k = 1..=N` (index `k - 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtmProfile {
    pub values: Vec<f64>,
}

/// Implied financing spreads from CDS and cancelable ASW quotes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpliedRepo {
    pub repo: f64,
    pub reverse_repo: f64,
}

/// Curve values sampled on a schedule; index 0 is the anchor.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// `ε_{k-1}` at index `k - 1`.
    pub eps: Vec<f64>,
}

impl Grid {
    pub fn riskfree(d: &DiscountCurve, s: &Schedule) -> Result<Self> {
        check_anchor(s, d.anchor())?;
        let n = s.len();
        let mut p = Vec::with_capacity(n + 1);
        let mut eps = Vec::with_capacity(n);
        for k in 0..=n {
            p.push(d.discount_factor(s.time(k))?);
        }
        for k in 1..=n {
            eps.push(d.forward_rate(s.time(k - 1), s.time(k))?);
        }
        Ok(Self {
            theta: s.accruals().to_vec(),
            p,
            q: vec![1.0; n + 1],
            eps,
        })
    }

    pub fn new(d: &DiscountCurve, q: &SurvivalCurve, s: &Schedule) -> Result<Self> {
        check_anchor(s, q.anchor())?;
        let mut g = Self::riskfree(d, s)?;
        for k in 0..=s.len() {
            g.q[k] = q.survival_prob(s.time(k))?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// `Q_{k-1} - Q_k`.
    pub fn dq(&self, k: usize) -> f64 {
        self.q[k - 1] - self.q[k]
    }

    pub fn annuity(&self) -> f64 {
        (1..=self.n()).map(|k| self.theta[k - 1] * self.p[k] * self.q[k]).sum()
    }

    pub fn annuity_riskfree(&self) -> f64 {
        (1..=self.n()).map(|k| self.theta[k - 1] * self.p[k]).sum()
    }

    /// `Σ P_k (Q_{k-1} - Q_k)`.
    pub fn default_leg(&self) -> f64 {
        (1..=self.n()).map(|k| self.p[k] * self.dq(k)).sum()
    }

    pub fn risky_bond(&self, coupon: f64, recovery: f64) -> f64 {
        let n = self.n();
        coupon * self.annuity() + self.p[n] * self.q[n] + recovery * self.default_leg()
    }

    pub fn riskfree_bond(&self, coupon: f64) -> f64 {
        coupon * self.annuity_riskfree() + self.p[self.n()]
    }

    pub fn risky_floater(&self, recovery: f64) -> f64 {
        let n = self.n();
        let coupons: f64 = (1..=n)
            .map(|k| self.eps[k - 1] * self.theta[k - 1] * self.p[k] * self.q[k])
            .sum();
        coupons + self.p[n] * self.q[n] + recovery * self.default_leg()
    }

    /// Discounted asset-swap period payments `(-c + ε_{k-1} + s) θ_k P_k`.
    pub fn swap_payments(&self, coupon: f64, spread: f64) -> Vec<f64> {
        (1..=self.n())
            .map(|k| (-coupon + self.eps[k - 1] + spread) * self.theta[k - 1] * self.p[k])
            .collect()
    }
}

/// `Σ_k a_k Σ_{h≥k} b_h`.
pub fn nested_suffix_sum(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "vectors must have equal length");
    let mut tail = 0.0;
    let mut acc = 0.0;
    for (ak, bk) in a.iter().zip(b).rev() {
        tail += bk;
        acc += ak * tail;
    }
    acc
}

/// `Σ_h b_h Σ_{k≤h} a_k`.
pub fn nested_prefix_sum(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "vectors must have equal length");
    let mut head = 0.0;
    let mut acc = 0.0;
    for (ak, bk) in a.iter().zip(b) {
        head += ak;
        acc += bk * head;
    }
    acc
}

/// `Σ c θ_k P_k + P_N`.
pub fn price_riskfree_bond(d: &DiscountCurve, s: &Schedule, coupon: f64) -> Result<f64> {
    Ok(Grid::riskfree(d, s)?.riskfree_bond(coupon))
}

/// Expected discounted cashflows of the defaultable bond, recovery paid at `t_k`.
pub fn price_risky_bond(d: &DiscountCurve, q: &SurvivalCurve, spec: &BondSpec) -> Result<f64> {
    Ok(Grid::new(d, q, &spec.schedule)?.risky_bond(spec.coupon, spec.recovery))
}

/// Defaultable floater paying `ε_{k-1}` on survival, par at maturity, `R` on default.
pub fn price_risky_floater(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    s: &Schedule,
    recovery: f64,
) -> Result<f64> {
    Ok(Grid::new(d, q, s)?.risky_floater(recovery))
}

pub fn annuity_riskfree(d: &DiscountCurve, s: &Schedule) -> Result<f64> {
    Ok(Grid::riskfree(d, s)?.annuity_riskfree())
}

pub fn annuity_defaultable(d: &DiscountCurve, q: &SurvivalCurve, s: &Schedule) -> Result<f64> {
    Ok(Grid::new(d, q, s)?.annuity())
}

/// Value of the stylized protection leg, `LGD Σ P_k ΔQ_k`.
pub fn protection_leg(d: &DiscountCurve, q: &SurvivalCurve, s: &Schedule, recovery: f64) -> Result<f64> {
    Ok((1.0 - recovery) * Grid::new(d, q, s)?.default_leg())
}

/// Par spread of the stylized CDS: protection leg over the defaultable annuity.
pub fn par_cds_spread(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    s: &Schedule,
    recovery: f64,
) -> Result<SpreadResult> {
    let g = Grid::new(d, q, s)?;
    SpreadResult::ratio((1.0 - recovery) * g.default_leg(), g.annuity())
}

/// Standard asset swap par spread, `(B_rf - B_0) / A_rf`.
pub fn par_asw_spread(d: &DiscountCurve, q: &SurvivalCurve, spec: &BondSpec) -> Result<SpreadResult> {
    let g = Grid::new(d, q, &spec.schedule)?;
    SpreadResult::ratio(
        g.riskfree_bond(spec.coupon) - g.risky_bond(spec.coupon, spec.recovery),
        g.annuity_riskfree(),
    )
}

/// Par spread of the asset swap that terminates at issuer default with zero
/// close-out, `(1 - F_0) / A`.
pub fn par_cancelable_asw_spread(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
) -> Result<SpreadResult> {
    let g = Grid::new(d, q, &spec.schedule)?;
    SpreadResult::ratio(1.0 - g.risky_floater(spec.recovery), g.annuity())
}

/// Zero-value spread of a repo to maturity that pays `-ε + s` to the bond
/// holder each period and, at default, is repaid at notional 1 without the
/// running period's interest: `(F_0|_{R=1} - 1) / A`.
pub fn par_repo_spread(d: &DiscountCurve, q: &SurvivalCurve, s: &Schedule) -> Result<SpreadResult> {
    let g = Grid::new(d, q, s)?;
    SpreadResult::ratio(g.risky_floater(1.0) - 1.0, g.annuity())
}

/// PV of the standard asset swap: payments run to `t_N` whatever happens to
/// the issuer, plus the `B_0 - 1` upfront.
pub fn standard_asw_pv(d: &DiscountCurve, q: &SurvivalCurve, spec: &BondSpec, spread: f64) -> Result<f64> {
    let g = Grid::new(d, q, &spec.schedule)?;
    let running: f64 = g.swap_payments(spec.coupon, spread).iter().sum();
    Ok(running + g.risky_bond(spec.coupon, spec.recovery) - 1.0)
}

/// PV of the cancelable asset swap: payments only on survival, plus the upfront.
pub fn cancelable_asw_pv(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    spread: f64,
) -> Result<f64> {
    let g = Grid::new(d, q, &spec.schedule)?;
    let running: f64 = g
        .swap_payments(spec.coupon, spread)
        .iter()
        .zip(&g.q[1..])
        .map(|(a, qk)| a * qk)
        .sum();
    Ok(running + g.risky_bond(spec.coupon, spec.recovery) - 1.0)
}

/// Value just before each payment date of the remaining asset swap payments,
/// the period due at that date included.
pub fn mtm_profile(d: &DiscountCurve, spec: &BondSpec, spread: f64) -> Result<MtmProfile> {
    let g = Grid::riskfree(d, &spec.schedule)?;
    let n = g.n();
    let mut values = vec![0.0; n];
    for k in 1..=n {
        values[k - 1] = (k..=n)
            .map(|h| (-spec.coupon + g.eps[h - 1] + spread) * g.theta[h - 1] * g.p[h] / g.p[k])
            .sum();
    }
    Ok(MtmProfile { values })
}

/// Expected P&L of the default break clause: `-Σ p_k P_k mtm_{t_k^-}`.
pub fn early_termination_pv(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    spread: f64,
) -> Result<f64> {
    let g = Grid::new(d, q, &spec.schedule)?;
    let mtm = mtm_profile(d, spec, spread)?;
    Ok(-(1..=g.n())
        .map(|k| g.dq(k) * g.p[k] * mtm.values[k - 1])
        .sum::<f64>())
}

/// Per-period form of [`early_termination_pv`]: `-Σ (-c + ε_{k-1} + s) θ_k P_k (1 - Q_k)`.
pub fn early_termination_pv_collapsed(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    spread: f64,
) -> Result<f64> {
    let g = Grid::new(d, q, &spec.schedule)?;
    Ok(-g
        .swap_payments(spec.coupon, spread)
        .iter()
        .zip(&g.q[1..])
        .map(|(a, qk)| a * (1.0 - qk))
        .sum::<f64>())
}

/// Value at `maturity` of the bond's remaining cashflows, conditional on the
/// issuer surviving to `maturity`.
pub fn forward_bond_price(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    maturity: f64,
) -> Result<f64> {
    let m = spec.schedule.index_of(maturity)? + 1;
    let g = Grid::new(d, q, &spec.schedule)?;
    let n = g.n();
    let (pm, qm) = (g.p[m], g.q[m]);
    let mut value = g.p[n] / pm * (g.q[n] / qm);
    for k in m + 1..=n {
        let p = g.p[k] / pm;
        value += spec.coupon * g.theta[k - 1] * p * (g.q[k] / qm);
        value += spec.recovery * p * (g.dq(k) / qm);
    }
    Ok(value)
}

/// Cancelable asset swap par spread when the repo matures at `maturity` with
/// forward price `forward_price`: `(X - F_0(T_r)) / A(T_r)`.
pub fn par_cancelable_asw_spread_generalized(
    d: &DiscountCurve,
    q: &SurvivalCurve,
    spec: &BondSpec,
    maturity: f64,
    forward_price: f64,
) -> Result<SpreadResult> {
    let head = spec.schedule.truncate(maturity)?;
    let g = Grid::new(d, q, &head)?;
    SpreadResult::ratio(forward_price - g.risky_floater(spec.recovery), g.annuity())
}

/// Repo and reverse-repo spreads implied by two-way CDS and cancelable ASW quotes.
pub fn implied_repo_spreads(
    cds_bid: f64,
    cds_ask: f64,
    aswc_bid: f64,
    aswc_ask: f64,
) -> Result<ImpliedRepo> {
    for (name, v) in [
        ("cds_bid", cds_bid),
        ("cds_ask", cds_ask),
        ("aswc_bid", aswc_bid),
        ("aswc_ask", aswc_ask),
    ] {
        check_finite(name, v)?;
    }
    if cds_bid > cds_ask {
        return Err(Error::CrossedMarket { name: "cds", bid: cds_bid, ask: cds_ask });
    }
    if aswc_bid > aswc_ask {
        return Err(Error::CrossedMarket { name: "aswc", bid: aswc_bid, ask: aswc_ask });
    }
    Ok(ImpliedRepo {
        repo: cds_ask - aswc_bid,
        reverse_repo: cds_bid - aswc_ask,
    })
}
