//! Welfare accounting for the regulator: the loss bound, the new-bandwidth
//! threshold with its no-loss partition interval, and the partition sweep
//! that compares planner and equilibrium welfare.

use rayon::prelude::*;

use crate::duopoly::{solve_ne, ConstraintPair, Region};
use crate::error::{Error, Result};
use crate::market::{clear_market_allow_empty_macro, social_welfare, CapacityPair, MarketParams};

/// A regulator holding `b_new` units of small-cell-only bandwidth to split
/// between two providers with initial endowments `b1_initial`, `b2_initial`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulatorScenario {
    pub params: MarketParams,
    pub b1_initial: f64,
    pub b2_initial: f64,
    pub b_new: f64,
}

impl RegulatorScenario {
    pub fn new(params: MarketParams, b1_initial: f64, b2_initial: f64, b_new: f64) -> Result<Self> {
        for (name, value) in [("b1_initial", b1_initial), ("b2_initial", b2_initial)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "must be nonnegative and finite",
                });
            }
        }
        if !(b_new > 0.0 && b_new.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "b_new",
                value: b_new,
                constraint: "must be positive and finite",
            });
        }
        Ok(Self {
            params,
            b1_initial,
            b2_initial,
            b_new,
        })
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.b1_initial + self.b2_initial + self.b_new
    }
}

/// One partition point of the sweep, with the three welfare benchmarks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub b1_new: f64,
    pub b2_new: f64,
    /// Planner optimum without any small-cell restriction (flat benchmark).
    pub sw_wo_star: f64,
    /// Planner optimum with the new bandwidth restricted to small-cells.
    pub sw_w_star: f64,
    /// Equilibrium welfare under the restriction.
    pub sw_w_ne: f64,
    pub region: Region,
    pub revenue_1: f64,
    pub revenue_2: f64,
}

/// Solver failure at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRowError {
    pub b1_new: f64,
    pub error: Error,
}

impl std::fmt::Display for SweepRowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "sweep point b1_new={}: {}", self.b1_new, self.error)
    }
}

impl std::error::Error for SweepRowError {}

/// Welfare when total bandwidth `b_total` is split with `small_total` units
/// in small-cells, at market-clearing prices. Pooled across providers:
/// welfare depends only on the tier totals.
pub fn welfare_of_pooled_split(params: &MarketParams, b_total: f64, small_total: f64) -> f64 {
    let caps = CapacityPair {
        c_macro: (b_total - small_total) * params.r0(),
        c_small: params.lambda_s() * small_total * params.r0(),
    };
    social_welfare(params, &clear_market_allow_empty_macro(params, &caps))
}

/// Optimal welfare with no restriction: the pooled bandwidth split at the
/// small-cell share.
pub fn sw_unconstrained_opt(params: &MarketParams, b_total: f64) -> f64 {
    welfare_of_pooled_split(params, b_total, params.small_cell_share() * b_total)
}

/// Planner optimum when `b1_new + b2_new` must stay in small-cells: the
/// small-cell total is pushed up to the restriction when it exceeds the
/// unconstrained share.
pub fn sw_constrained_opt(scenario: &RegulatorScenario, b1_new: f64, b2_new: f64) -> f64 {
    let b_total = scenario.b1_initial + scenario.b2_initial + b1_new + b2_new;
    let small_total = (scenario.params.small_cell_share() * b_total).max(b1_new + b2_new);
    welfare_of_pooled_split(&scenario.params, b_total, small_total)
}

/// Largest amount of small-cell-only bandwidth that can be absorbed with no
/// welfare loss: `(B_1^o + B_2^o) * N_f * lambda_s^(1/alpha-1) / N_m`.
pub fn threshold(scenario: &RegulatorScenario) -> f64 {
    let p = &scenario.params;
    (scenario.b1_initial + scenario.b2_initial) * p.n_fixed() * p.efficiency_weight() / p.n_mobile()
}

/// Range of `b1_new` for which the equilibrium still reaches the
/// unconstrained optimum, intersected with `[0, b_new]`; `None` when the new
/// bandwidth exceeds the threshold.
pub fn equality_interval(scenario: &RegulatorScenario) -> Option<(f64, f64)> {
    let p = &scenario.params;
    let weight = p.n_fixed() * p.efficiency_weight() / p.n_mobile();
    let lo = (scenario.b_new - scenario.b2_initial * weight).max(0.0);
    let hi = (scenario.b1_initial * weight).min(scenario.b_new);
    // small slack so the zero-width interval at the threshold survives
    // rounding in the endpoint arithmetic
    let slack = 1e-9 * (1.0 + scenario.b_new);
    if lo <= hi + slack {
        Some((lo.min(hi), hi))
    } else {
        None
    }
}

/// Guaranteed lower bound on equilibrium welfare over the unconstrained
/// optimum: the small-cell share raised to `alpha`.
pub fn sw_bound_ratio(params: &MarketParams) -> f64 {
    params.small_cell_share().powf(params.alpha())
}

/// True when the floors force strictly more small-cell bandwidth than the
/// unconstrained split supplies, i.e. a welfare loss is unavoidable.
pub fn loss_condition(params: &MarketParams, b1: f64, b2: f64, floors: &ConstraintPair) -> bool {
    params.small_cell_share() * (b1 + b2) < floors.floor1 + floors.floor2
}

/// Sweeps `b1_new` over a uniform grid on `[0, b_new]` (endpoints included),
/// solving the constrained equilibrium at each partition. Rows come back in
/// grid order; solver failures are reported per row without aborting the
/// sweep.
pub fn sweep(
    scenario: &RegulatorScenario,
    n_points: usize,
) -> Vec<std::result::Result<SweepRow, SweepRowError>> {
    assert!(n_points >= 2, "a sweep needs at least two grid points");
    let b = scenario.b_new;
    let b_total = scenario.total_bandwidth();
    let sw_wo_star = sw_unconstrained_opt(&scenario.params, b_total);
    let sw_w_star = sw_constrained_opt(scenario, b, 0.0);

    (0..n_points)
        .into_par_iter()
        .map(|k| {
            let b1_new = if k + 1 == n_points {
                b
            } else {
                b * k as f64 / (n_points - 1) as f64
            };
            let b2_new = b - b1_new;
            let b1 = scenario.b1_initial + b1_new;
            let b2 = scenario.b2_initial + b2_new;
            let floors = ConstraintPair::new(b1_new, b2_new);
            solve_ne(&scenario.params, b1, b2, &floors)
                .map(|eq| SweepRow {
                    b1_new,
                    b2_new,
                    sw_wo_star,
                    sw_w_star,
                    sw_w_ne: eq.welfare,
                    region: eq.region,
                    revenue_1: eq.revenue_1,
                    revenue_2: eq.revenue_2,
                })
                .map_err(|error| SweepRowError { b1_new, error })
        })
        .collect()
}
