//! Optimal bandwidth split for a single provider under a small-cell floor.
//!
//! Revenue and welfare share the same maximizer: put the `small_cell_share`
//! fraction of bandwidth into small-cells, clipped up to the floor when the
//! floor exceeds that share.

use crate::error::{Error, Result};
use crate::market::{
    capacities, clear_market_allow_empty_macro, social_welfare, sp_revenue, MarketParams,
    SpAllocation,
};

/// Solution of the single-provider problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonopolyResult {
    pub allocation: SpAllocation,
    pub revenue: f64,
    pub welfare: f64,
    /// True when the floor forced more small-cell bandwidth than the
    /// unconstrained optimum.
    pub clipped: bool,
}

/// Revenue- and welfare-optimal split of `b_total` with `floor` reserved for
/// small-cells. Prices implied by the result are market-clearing.
pub fn optimal_split(params: &MarketParams, b_total: f64, floor: f64) -> Result<MonopolyResult> {
    if !(b_total >= 0.0 && b_total.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "b_total",
            value: b_total,
            constraint: "must be nonnegative and finite",
        });
    }
    if !(0.0..=b_total).contains(&floor) {
        return Err(Error::InvalidFloor {
            floor,
            total: b_total,
        });
    }
    let unconstrained = params.small_cell_share() * b_total;
    let clipped = floor > unconstrained;
    let small = if clipped { floor } else { unconstrained };
    let allocation = SpAllocation::new(b_total, small, floor)?;
    let (revenue, welfare) = evaluate(params, &allocation);
    Ok(MonopolyResult {
        allocation,
        revenue,
        welfare,
        clipped,
    })
}

/// Revenue and welfare of an arbitrary split at market-clearing prices.
pub fn monopoly_objective(params: &MarketParams, b_total: f64, b_small: f64) -> Result<(f64, f64)> {
    let allocation = SpAllocation::new(b_total, b_small, 0.0)?;
    Ok(evaluate(params, &allocation))
}

fn evaluate(params: &MarketParams, allocation: &SpAllocation) -> (f64, f64) {
    let caps = capacities(params, allocation);
    let outcome = clear_market_allow_empty_macro(params, &caps);
    (
        sp_revenue(params, allocation, &outcome),
        social_welfare(params, &outcome),
    )
}
