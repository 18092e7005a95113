//! JSON market configuration.

use std::path::Path;

use cds_replica::{
    build_schedule, calibrate_flat_hazard, pricers, BondSpec, DiscountCurve, RepoSpec, SurvivalCurve,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateNode {
    pub time: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HazardNode {
    pub time: f64,
    pub hazard: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondConfig {
    pub coupon: f64,
    pub recovery: f64,
    pub maturity: f64,
    pub frequency: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fair {
    Fair,
}

/// Repo forward price: a number, or `"fair"` for the survival-conditional
/// forward bond price (par when the repo runs to the bond maturity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ForwardPrice {
    Price(f64),
    Keyword(Fair),
}

impl Default for ForwardPrice {
    fn default() -> Self {
        ForwardPrice::Keyword(Fair::Fair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepoConfig {
    #[serde(default)]
    pub spread: f64,
    /// Defaults to the bond maturity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maturity: Option<f64>,
    #[serde(default)]
    pub forward_price: ForwardPrice,
}

impl Default for RepoConfig {
    fn default() -> Self {
        Self {
            spread: 0.0,
            maturity: None,
            forward_price: ForwardPrice::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quotes {
    pub cds_bid: f64,
    pub cds_ask: f64,
    pub aswc_bid: f64,
    pub aswc_ask: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub discount_nodes: Vec<RateNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hazard_nodes: Option<Vec<HazardNode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cds_quote: Option<f64>,
    pub bond: BondConfig,
    #[serde(default)]
    pub repo: RepoConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotes: Option<Quotes>,
}

/// Where the survival curve came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum SurvivalSource {
    Nodes,
    Calibrated { cds_quote: f64, hazard: f64 },
}

/// Validated library objects built from a config.
#[derive(Debug, Clone)]
pub struct Market {
    pub discount: DiscountCurve,
    pub survival: SurvivalCurve,
    pub source: SurvivalSource,
    pub bond: BondSpec,
    pub repo: RepoSpec,
}

fn field(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Field {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be a finite decimal, got {v}")))
    }
}

impl MarketConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks field-level invariants; curve and schedule shape is checked when
    /// the market is built.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.discount_nodes.is_empty() {
            return Err(field("discount_nodes", "need at least one node"));
        }
        for (i, n) in self.discount_nodes.iter().enumerate() {
            finite(&format!("discount_nodes[{i}].time"), n.time)?;
            finite(&format!("discount_nodes[{i}].rate"), n.rate)?;
        }
        match (&self.hazard_nodes, self.cds_quote) {
            (Some(_), Some(_)) => {
                return Err(field(
                    "hazard_nodes/cds_quote",
                    "give exactly one of hazard_nodes or cds_quote, not both",
                ))
            }
            (None, None) => {
                return Err(field(
                    "hazard_nodes/cds_quote",
                    "give exactly one of hazard_nodes or cds_quote",
                ))
            }
            (Some(nodes), None) => {
                if nodes.is_empty() {
                    return Err(field("hazard_nodes", "need at least one node"));
                }
                for (i, n) in nodes.iter().enumerate() {
                    finite(&format!("hazard_nodes[{i}].time"), n.time)?;
                    finite(&format!("hazard_nodes[{i}].hazard"), n.hazard)?;
                    if n.hazard < 0.0 {
                        return Err(field(&format!("hazard_nodes[{i}].hazard"), "must be non-negative"));
                    }
                }
            }
            (None, Some(q)) => {
                finite("cds_quote", q)?;
                if q < 0.0 {
                    return Err(field("cds_quote", "must be non-negative"));
                }
            }
        }
        let b = &self.bond;
        finite("bond.coupon", b.coupon)?;
        finite("bond.recovery", b.recovery)?;
        finite("bond.maturity", b.maturity)?;
        if !(0.0..1.0).contains(&b.recovery) {
            return Err(field("bond.recovery", format!("must lie in [0, 1), got {}", b.recovery)));
        }
        if b.maturity <= 0.0 {
            return Err(field("bond.maturity", "must be positive"));
        }
        finite("repo.spread", self.repo.spread)?;
        if let Some(m) = self.repo.maturity {
            finite("repo.maturity", m)?;
            if m <= 0.0 {
                return Err(field("repo.maturity", "must be positive"));
            }
            if m > b.maturity {
                return Err(field("repo.maturity", "must not exceed bond.maturity"));
            }
        }
        if let ForwardPrice::Price(x) = self.repo.forward_price {
            finite("repo.forward_price", x)?;
            if x <= 0.0 {
                return Err(field("repo.forward_price", "must be positive"));
            }
        }
        if let Some(q) = &self.quotes {
            finite("quotes.cds_bid", q.cds_bid)?;
            finite("quotes.cds_ask", q.cds_ask)?;
            finite("quotes.aswc_bid", q.aswc_bid)?;
            finite("quotes.aswc_ask", q.aswc_ask)?;
        }
        Ok(())
    }

    pub fn discount_curve(&self) -> Result<DiscountCurve, CliError> {
        let (t, r) = self.discount_nodes.iter().map(|n| (n.time, n.rate)).unzip();
        DiscountCurve::new(0.0, t, r).map_err(|e| field("discount_nodes", e.to_string()))
    }

    pub fn bond_spec(&self) -> Result<BondSpec, CliError> {
        let b = &self.bond;
        let schedule = build_schedule(0.0, b.maturity, b.frequency)
            .map_err(|e| field("bond.maturity/bond.frequency", e.to_string()))?;
        BondSpec::new(b.coupon, b.recovery, schedule).map_err(|e| field("bond", e.to_string()))
    }

    /// Builds curves, bond and repo; calibrates a flat hazard when the config
    /// carries a CDS quote.
    pub fn market(&self) -> Result<Market, CliError> {
        self.validate()?;
        let discount = self.discount_curve()?;
        let bond = self.bond_spec()?;
        let (survival, source) = match (&self.hazard_nodes, self.cds_quote) {
            (Some(nodes), _) => {
                let (t, h) = nodes.iter().map(|n| (n.time, n.hazard)).unzip();
                let curve = SurvivalCurve::new(0.0, t, h).map_err(|e| field("hazard_nodes", e.to_string()))?;
                (curve, SurvivalSource::Nodes)
            }
            (None, Some(quote)) => {
                let curve = calibrate_flat_hazard(&discount, &bond.schedule, quote, bond.recovery)?;
                let hazard = curve.hazards()[0];
                (curve, SurvivalSource::Calibrated { cds_quote: quote, hazard })
            }
            (None, None) => unreachable!("validated"),
        };
        let maturity = self.repo.maturity.unwrap_or(bond.schedule.maturity());
        bond.schedule
            .index_of(maturity)
            .map_err(|_| field("repo.maturity", format!("{maturity} is not a bond payment date")))?;
        let forward_price = match self.repo.forward_price {
            ForwardPrice::Price(x) => x,
            ForwardPrice::Keyword(Fair::Fair) => {
                pricers::forward_bond_price(&discount, &survival, &bond, maturity)?
            }
        };
        let repo = RepoSpec::new(self.repo.spread, maturity, forward_price)
            .map_err(|e| field("repo", e.to_string()))?;
        Ok(Market {
            discount,
            survival,
            source,
            bond,
            repo,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F1: &str = r#"{
        "discount_nodes": [{"time": 1.0, "rate": 0.02}],
        "hazard_nodes": [{"time": 1.0, "hazard": 0.02}],
        "bond": {"coupon": 0.05, "recovery": 0.4, "maturity": 5.0, "frequency": 1},
        "repo": {"spread": 0.001, "forward_price": "fair"}
    }"#;

    #[test]
    fn parses_fixture() {
        let cfg = MarketConfig::from_json(F1).unwrap();
        assert_eq!(cfg.repo.forward_price, ForwardPrice::Keyword(Fair::Fair));
        let m = cfg.market().unwrap();
        assert_eq!(m.repo.forward_price, 1.0);
        assert_eq!(m.repo.maturity, 5.0);
        assert_eq!(m.source, SurvivalSource::Nodes);
    }

    #[test]
    fn both_hazard_and_quote_is_rejected() {
        let text = F1.replace(r#""bond":"#, r#""cds_quote": 0.01, "bond":"#);
        match MarketConfig::from_json(&text) {
            Err(CliError::Field { field, .. }) => assert_eq!(field, "hazard_nodes/cds_quote"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = MarketConfig::from_json("{\n  \"discount_nodes\": [,]\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = MarketConfig::from_json(&F1.replace("\"coupon\"", "\"kupon\"")).unwrap_err();
        assert!(err.to_string().contains("kupon"), "{err}");
    }

    #[test]
    fn field_errors_name_the_field() {
        let err = MarketConfig::from_json(&F1.replace("\"recovery\": 0.4", "\"recovery\": 1.2")).unwrap_err();
        assert!(err.to_string().contains("bond.recovery"), "{err}");
        let text = F1.replace(r#""spread": 0.001"#, r#""spread": 0.001, "maturity": 2.5"#);
        let err = MarketConfig::from_json(&text).unwrap().market().unwrap_err();
        assert!(err.to_string().contains("repo.maturity"), "{err}");
        let err = MarketConfig::from_json(&F1.replace("\"frequency\": 1", "\"frequency\": 3"))
            .unwrap()
            .market()
            .unwrap_err();
        assert!(err.to_string().contains("bond.maturity/bond.frequency"), "{err}");
    }

    #[test]
    fn numeric_forward_price() {
        let text = F1.replace(r#""forward_price": "fair""#, r#""maturity": 3.0, "forward_price": 1.02"#);
        let m = MarketConfig::from_json(&text).unwrap().market().unwrap();
        assert_eq!(m.repo.forward_price, 1.02);
        assert!(MarketConfig::from_json(&text.replace("1.02", "\"cheap\"")).is_err());
    }
}
