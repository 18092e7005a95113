use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cds_replica::{build_schedule, pricers, BondSpec, DiscountCurve, SurvivalCurve};
use cds_replica_cli::config::{BondConfig, ForwardPrice, HazardNode, Quotes, RateNode, RepoConfig};
use cds_replica_cli::{exit, MarketConfig};
use proptest::prelude::*;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cds-replica"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("market.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn f1_text() -> String {
    std::fs::read_to_string(data("f1.json")).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing numeric {key}"))
}

fn same_12_digits(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-11 * b.abs().max(1e-300)
}

#[test]
fn price_matches_library_calls() {
    let report = json(&run(&["price"], &data("f1.json")));
    let d = DiscountCurve::flat(0.0, 0.02).unwrap();
    let q = SurvivalCurve::flat(0.0, 0.02).unwrap();
    let b = BondSpec::new(0.05, 0.4, build_schedule(0.0, 5.0, 1).unwrap()).unwrap();
    let s = &b.schedule;
    assert_eq!(num(&report, "risky_bond_price"), pricers::price_risky_bond(&d, &q, &b).unwrap());
    assert_eq!(num(&report, "riskfree_bond_price"), pricers::price_riskfree_bond(&d, s, 0.05).unwrap());
    assert_eq!(num(&report, "risky_floater_price"), pricers::price_risky_floater(&d, &q, s, 0.4).unwrap());
    assert_eq!(num(&report, "annuity_defaultable"), pricers::annuity_defaultable(&d, &q, s).unwrap());
    assert_eq!(num(&report, "annuity_riskfree"), pricers::annuity_riskfree(&d, s).unwrap());
    let asw = pricers::par_asw_spread(&d, &q, &b).unwrap().spread;
    assert!(same_12_digits(num(&report, "cds_spread"), pricers::par_cds_spread(&d, &q, s, 0.4).unwrap().spread));
    assert!(same_12_digits(num(&report, "asw_spread"), asw));
    assert!(same_12_digits(
        num(&report, "cancelable_asw_spread"),
        pricers::par_cancelable_asw_spread(&d, &q, &b).unwrap().spread
    ));
    assert_eq!(
        num(&report, "early_termination_pv"),
        pricers::early_termination_pv(&d, &q, &b, asw).unwrap()
    );
    assert_eq!(num(&report, "repo_maturity"), 5.0);
    assert_eq!(num(&report, "forward_price"), 1.0);
}

#[test]
fn price_schema_is_stable_across_configs() {
    let a = json(&run(&["price"], &data("f1.json")));
    let b = json(&run(&["price"], &data("f1_term_repo.json")));
    let keys = |v: &Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    assert_eq!(keys(&a), keys(&b));
    // early repo: generalized spread differs from the repo-to-maturity one
    assert_ne!(b["generalized_cancelable_asw_spread"], b["cancelable_asw_spread"]);
}

#[test]
fn riskless_config_prices_zero_spreads() {
    let dir = tempfile::tempdir().unwrap();
    let text = f1_text().replace(r#""hazard": 0.02"#, r#""hazard": 0.0"#);
    let report = json(&run(&["price"], &write_config(&dir, &text)));
    for key in ["cds_spread", "asw_spread", "cancelable_asw_spread", "par_repo_spread", "generalized_cancelable_asw_spread"] {
        assert!(num(&report, key).abs() < 1e-14, "{key} = {}", report[key]);
    }
}

#[test]
fn hazard_nodes_and_quote_together_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let text = f1_text().replace(r#""bond":"#, r#""cds_quote": 0.01, "bond":"#);
    let out = run(&["price"], &write_config(&dir, &text));
    assert_eq!(out.status.code(), Some(i32::from(exit::VALIDATION)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hazard_nodes/cds_quote"));
}

#[test]
fn malformed_json_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["price"], &write_config(&dir, "{\n\"discount_nodes\": [\n  {\"time\": 1.0,}\n]}"));
    assert_eq!(out.status.code(), Some(i32::from(exit::VALIDATION)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn replicate_with_clause_holds() {
    for cfg in ["f1.json", "f1_term_repo.json"] {
        let out = run(&["replicate"], &data(cfg));
        assert_eq!(out.status.code(), Some(0));
        let report = json(&out);
        assert_eq!(report["clause_enabled"], true);
        assert_eq!(report["replicates"], true);
        for row in report["scenarios"].as_array().unwrap() {
            assert!(num(row, "residual").abs() < 1e-12);
        }
        assert!(report["monte_carlo"].is_null());
    }
}

#[test]
fn replicate_without_clause_leaks_mtm() {
    let out = run(&["replicate", "--no-clause"], &data("f1.json"));
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let d = DiscountCurve::flat(0.0, 0.02).unwrap();
    let q = SurvivalCurve::flat(0.0, 0.02).unwrap();
    let b = BondSpec::new(0.05, 0.4, build_schedule(0.0, 5.0, 1).unwrap()).unwrap();
    let asw = pricers::par_asw_spread(&d, &q, &b).unwrap().spread;
    let mtm = pricers::mtm_profile(&d, &b, asw).unwrap();
    let rows = report["scenarios"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows[..5] {
        let k = row["bucket"].as_u64().unwrap() as usize;
        let discounted = mtm.values[k - 1] * d.discount_factor(k as f64).unwrap();
        assert!(num(row, "residual") != 0.0);
        assert!((num(row, "residual") - discounted).abs() < 1e-15);
    }
    assert_eq!(rows[5]["scenario"], "survival");
    let etpv = pricers::early_termination_pv(&d, &q, &b, asw).unwrap();
    assert!((num(&report, "expected_residual") + etpv).abs() < 1e-12);
}

#[test]
fn monte_carlo_runs_are_reproducible() {
    let args = ["replicate", "--no-clause", "--mc", "100000", "--seed", "7"];
    let a = run(&args, &data("f1.json"));
    let b = run(&args, &data("f1.json"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert_eq!(report["monte_carlo"]["n_paths"], 100000);
    assert_eq!(report["monte_carlo"]["seed"], 7);
}

#[test]
fn implied_repo_examples() {
    let report = json(&run(&["implied-repo"], &data("f1.json")));
    assert!((num(&report, "repo_spread") - 0.003).abs() < 1e-15);
    assert!((num(&report, "reverse_repo_spread") + 0.001).abs() < 1e-15);

    let dir = tempfile::tempdir().unwrap();
    let flat_quotes = r#""quotes": {"cds_bid": 0.01, "cds_ask": 0.01, "aswc_bid": 0.01, "aswc_ask": 0.01}"#;
    let text = f1_text().replace(
        r#""quotes": {"cds_bid": 0.010, "cds_ask": 0.012, "aswc_bid": 0.009, "aswc_ask": 0.011}"#,
        flat_quotes,
    );
    let report = json(&run(&["implied-repo"], &write_config(&dir, &text)));
    assert_eq!(num(&report, "repo_spread"), 0.0);
    assert_eq!(num(&report, "reverse_repo_spread"), 0.0);

    let crossed = text.replace(r#""cds_bid": 0.01,"#, r#""cds_bid": 0.02,"#);
    let out = run(&["implied-repo"], &write_config(&dir, &crossed));
    assert_eq!(out.status.code(), Some(i32::from(exit::VALIDATION)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("crossed market"));
}

#[test]
fn basis_point_display() {
    let report = json(&run(&["implied-repo", "--bp"], &data("f1.json")));
    assert_eq!(report["spread_unit"], "bp");
    assert!((num(&report, "repo_spread") - 30.0).abs() < 1e-9);
    let plain = json(&run(&["price"], &data("f1.json")));
    let bp = json(&run(&["price", "--bp"], &data("f1.json")));
    assert!(same_12_digits(num(&bp, "cds_spread"), num(&plain, "cds_spread") * 1e4));
    assert_eq!(bp["risky_bond_price"], plain["risky_bond_price"]);
}

#[test]
fn calibrate_examples() {
    let report = json(&run(&["calibrate"], &data("calibrate.json")));
    assert!((num(&report, "hazard") - 0.02).abs() < 1e-10);
    assert!(num(&report, "spread_residual").abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("calibrate.json")).unwrap();
    let zero = text.replace("0.0121208040160535", "0.0");
    let report = json(&run(&["calibrate"], &write_config(&dir, &zero)));
    assert_eq!(num(&report, "hazard"), 0.0);

    let d = DiscountCurve::flat(0.0, 0.02).unwrap();
    let s = build_schedule(0.0, 5.0, 1).unwrap();
    let top = SurvivalCurve::flat(0.0, 10.0).unwrap();
    let ceiling = pricers::par_cds_spread(&d, &top, &s, 0.4).unwrap().spread;
    let huge = text.replace("0.0121208040160535", &format!("{}", 2.0 * ceiling));
    let out = run(&["calibrate"], &write_config(&dir, &huge));
    assert_eq!(out.status.code(), Some(i32::from(exit::NUMERICAL)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not attainable"));
}

#[test]
fn quote_driven_price_uses_calibrated_hazard() {
    let report = json(&run(&["price"], &data("calibrate.json")));
    assert_eq!(report["survival"]["source"], "calibrated");
    assert!((report["survival"]["hazard"].as_f64().unwrap() - 0.02).abs() < 1e-10);
    assert!(same_12_digits(num(&report, "cds_spread"), 0.0121208040160535));
}

#[test]
fn pretty_tables() {
    let out = run(&["replicate", "--pretty"], &data("f1.json"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("scenario") && text.contains("survival") && text.contains("replicates"));
    let out = run(&["price", "--pretty"], &data("f1.json"));
    assert!(String::from_utf8(out.stdout).unwrap().contains("cancelable ASW spread"));
}

#[test]
fn missing_config_is_a_validation_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_cds-replica")).arg("price").output().unwrap();
    assert_eq!(out.status.code(), Some(i32::from(exit::VALIDATION)));
}

fn finite() -> impl Strategy<Value = f64> {
    -1e3f64..1e3
}

prop_compose! {
    fn arb_config()(
        discount in prop::collection::vec((finite(), finite()), 1..4),
        hazards in prop::option::of(prop::collection::vec((finite(), finite()), 1..4)),
        quote in finite(),
        bond in (finite(), finite(), finite(), 0u32..13),
        repo in (finite(), prop::option::of(finite()), prop::option::of(finite())),
        quotes in prop::option::of((finite(), finite(), finite(), finite())),
    ) -> MarketConfig {
        let has_nodes = hazards.is_some();
        MarketConfig {
            discount_nodes: discount.into_iter().map(|(time, rate)| RateNode { time, rate }).collect(),
            hazard_nodes: hazards.map(|v| v.into_iter().map(|(time, hazard)| HazardNode { time, hazard }).collect()),
            cds_quote: if has_nodes { None } else { Some(quote) },
            bond: BondConfig { coupon: bond.0, recovery: bond.1, maturity: bond.2, frequency: bond.3 },
            repo: RepoConfig {
                spread: repo.0,
                maturity: repo.1,
                forward_price: repo.2.map_or(ForwardPrice::default(), ForwardPrice::Price),
            },
            quotes: quotes.map(|(a, b, c, d)| Quotes { cds_bid: a, cds_ask: b, aswc_bid: c, aswc_ask: d }),
        }
    }
}

proptest! {
    #[test]
    fn config_round_trips(cfg in arb_config()) {
        let text = cfg.to_json();
        let back: MarketConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
