#![allow(dead_code)]

use cds_replica::{build_schedule, BondSpec, DiscountCurve, SurvivalCurve};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One randomized market and bond.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub discount: DiscountCurve,
    pub survival: SurvivalCurve,
    pub bond: BondSpec,
}

fn nodes(rng: &mut ChaCha8Rng, horizon: f64, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let count = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=4) };
    let mut times: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..horizon.max(0.1) + 1.0)).collect();
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let values = times.iter().map(|_| rng.gen_range(lo..=hi)).collect();
    (times, values)
}

/// Flat or 2-4 node curves, r in [0, 0.08], hazard in [0, 0.10],
/// R in [0, 0.9], c in [0, 0.10], N in 1..=40, frequency in {1, 2, 4}.
pub fn random_fixture(rng: &mut ChaCha8Rng) -> Fixture {
    let frequency = [1u32, 2, 4][rng.gen_range(0..3)];
    let periods: u32 = rng.gen_range(1..=40);
    let maturity = f64::from(periods) / f64::from(frequency);
    let (dt, dr) = nodes(rng, maturity, 0.0, 0.08);
    let (qt, qh) = nodes(rng, maturity, 0.0, 0.10);
    let schedule = build_schedule(0.0, maturity, frequency).unwrap();
    Fixture {
        discount: DiscountCurve::new(0.0, dt, dr).unwrap(),
        survival: SurvivalCurve::new(0.0, qt, qh).unwrap(),
        bond: BondSpec::new(rng.gen_range(0.0..=0.10), rng.gen_range(0.0..=0.9), schedule).unwrap(),
    }
}
