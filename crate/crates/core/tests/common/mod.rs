//! Shared helpers for the integration suites: seeded random instances and
//! tolerance assertions.

use hetnet_market::{ConstraintPair, MarketParams};
use rand::rngs::StdRng;
use rand::Rng;

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[allow(dead_code)] // not every suite uses every helper
pub fn assert_rel_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        rel_gap(a, b) <= tol,
        "{what}: {a} vs {b} (rel gap {:e}, tol {tol:e})",
        rel_gap(a, b)
    );
}

/// Random market constants over the ranges the solvers must cover:
/// curvature in [0.1, 0.9], small-cell gain in (1, 8].
pub fn random_params(rng: &mut StdRng) -> MarketParams {
    let alpha = rng.gen_range(0.1..=0.9);
    let lambda_s = rng.gen_range(1.000001..=8.0);
    let n_mobile = rng.gen_range(10.0..=100.0);
    let n_fixed = rng.gen_range(10.0..=100.0);
    let r0 = rng.gen_range(5.0..=100.0);
    MarketParams::new(alpha, n_mobile, n_fixed, r0, lambda_s).unwrap()
}

pub struct DuopolyInstance {
    pub params: MarketParams,
    pub b1: f64,
    pub b2: f64,
    pub floors: ConstraintPair,
}

pub fn random_instance(rng: &mut StdRng) -> DuopolyInstance {
    let params = random_params(rng);
    let b1 = rng.gen_range(0.5..=3.0);
    let b2 = rng.gen_range(0.5..=3.0);
    let floors = ConstraintPair::new(rng.gen_range(0.0..=b1), rng.gen_range(0.0..=b2));
    DuopolyInstance {
        params,
        b1,
        b2,
        floors,
    }
}
