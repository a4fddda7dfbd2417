//! Brute-force verification: exhaustive grid best responses, epsilon-Nash
//! certification of solved equilibria, and grid search for the welfare
//! optimum. These never replace the analytic solvers; they anchor them.

use crate::error::{Error, Result};
use crate::market::{
    capacities, clear_market_allow_empty_macro, sp_revenue, DuopolyAllocation, MarketParams,
    SpAllocation,
};
use crate::welfare::welfare_of_pooled_split;

/// Default points per axis for 1-D grid searches.
pub const SEARCH_RESOLUTION: usize = 10_000;

/// Default points per provider axis for equilibrium certification.
pub const CERTIFY_RESOLUTION: usize = 500;

/// Grid density and the improvement budget for epsilon-Nash checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    resolution: usize,
    epsilon: f64,
}

impl GridSpec {
    pub fn new(resolution: usize, epsilon: f64) -> Result<Self> {
        if resolution < 100 {
            return Err(Error::InvalidParameter {
                name: "resolution",
                value: resolution as f64,
                constraint: "at least 100 points per axis",
            });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                constraint: "must be positive and finite",
            });
        }
        Ok(Self {
            resolution,
            epsilon,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Grid step on an interval of the given width.
    pub fn step(&self, width: f64) -> f64 {
        width / (self.resolution - 1) as f64
    }
}

/// Outcome of an epsilon-Nash certification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonCertificate {
    /// No unilateral grid deviation improves revenue by more than epsilon.
    pub certified: bool,
    /// Largest improvement any deviation achieved (can be negative).
    pub max_improvement: f64,
}

fn grid_point(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if k + 1 == n {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

fn deviation_revenue(
    params: &MarketParams,
    opponent: &SpAllocation,
    own_total: f64,
    own_floor: f64,
    own_small: f64,
) -> f64 {
    let own = SpAllocation {
        total: own_total,
        small: own_small,
        macro_bw: own_total - own_small,
        floor: own_floor,
    };
    let duo = DuopolyAllocation::new(own, *opponent);
    let outcome = clear_market_allow_empty_macro(params, &capacities(params, &duo));
    sp_revenue(params, &own, &outcome)
}

/// Exhaustive argmax of own revenue over the discretized feasible interval.
/// Ties resolve to the lowest grid index.
pub fn grid_best_response(
    params: &MarketParams,
    opponent: &SpAllocation,
    own_total: f64,
    own_floor: f64,
    grid: &GridSpec,
) -> f64 {
    let n = grid.resolution();
    let mut best_s = own_floor;
    let mut best_rev = f64::NEG_INFINITY;
    for k in 0..n {
        let s = grid_point(own_floor, own_total, k, n);
        let rev = deviation_revenue(params, opponent, own_total, own_floor, s);
        if rev > best_rev {
            best_rev = rev;
            best_s = s;
        }
    }
    best_s
}

/// Checks that neither provider can gain more than `grid.epsilon()` by any
/// unilateral grid deviation from `alloc`.
pub fn certify_epsilon_ne(
    params: &MarketParams,
    alloc: &DuopolyAllocation,
    floors: &crate::duopoly::ConstraintPair,
    grid: &GridSpec,
) -> EpsilonCertificate {
    let n = grid.resolution();
    let mut max_improvement = f64::NEG_INFINITY;
    for sp in 0..2 {
        let own = alloc.sp(sp);
        let opponent = alloc.sp(1 - sp);
        let base = deviation_revenue(params, opponent, own.total, own.floor, own.small);
        let floor = floors.floor(sp);
        for k in 0..n {
            let s = grid_point(floor, own.total, k, n);
            let improvement = deviation_revenue(params, opponent, own.total, floor, s) - base;
            if improvement > max_improvement {
                max_improvement = improvement;
            }
        }
    }
    EpsilonCertificate {
        certified: max_improvement <= grid.epsilon(),
        max_improvement,
    }
}

/// Exhaustive welfare argmax over total small-cell bandwidth in
/// `[min_small_total, b_total]`. Returns the maximizing total and its
/// welfare; ties resolve to the lowest grid index.
pub fn grid_social_opt(
    params: &MarketParams,
    b_total: f64,
    min_small_total: f64,
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    if !(0.0..=b_total).contains(&min_small_total) {
        return Err(Error::InvalidFloor {
            floor: min_small_total,
            total: b_total,
        });
    }
    let n = grid.resolution();
    let mut best = (min_small_total, f64::NEG_INFINITY);
    for k in 0..n {
        let small = grid_point(min_small_total, b_total, k, n);
        let welfare = welfare_of_pooled_split(params, b_total, small);
        if welfare > best.1 {
            best = (small, welfare);
        }
    }
    Ok(best)
}
