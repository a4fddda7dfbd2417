//! Constrained duopoly equilibrium: best responses, projected best-response
//! iteration, first-order verification and region classification.
//!
//! Each provider maximizes revenue in its own small-cell bandwidth, subject
//! to a regulatory floor. The game is concave with a unique equilibrium, so
//! alternating best responses are run to a fixed point and the first-order
//! conditions are verified at the limit. Note the responses are not
//! globally monotone in the rival's choice; the direction can flip with the
//! parameters.

use crate::error::{Error, Result};
use crate::market::{
    capacities, clear_market_allow_empty_macro, social_welfare, sp_revenue, DuopolyAllocation,
    MarketParams, SpAllocation,
};

/// Regulatory small-cell minima for the two providers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintPair {
    pub floor1: f64,
    pub floor2: f64,
}

impl ConstraintPair {
    pub fn new(floor1: f64, floor2: f64) -> Self {
        Self { floor1, floor2 }
    }

    pub fn floor(&self, index: usize) -> f64 {
        match index {
            0 => self.floor1,
            1 => self.floor2,
            _ => panic!("SP index out of range: {index}"),
        }
    }

    pub fn feasible_for(&self, b1: f64, b2: f64) -> Result<()> {
        for (floor, total) in [(self.floor1, b1), (self.floor2, b2)] {
            if !(0.0..=total).contains(&floor) {
                return Err(Error::InvalidFloor { floor, total });
            }
        }
        Ok(())
    }
}

/// Equilibrium taxonomy by which floors exceed the unconstrained allocations
/// (none / both / one) and which floors bind at the solution (both / one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    A,
    BI,
    BII,
    CI,
    CII,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Region::A => "A",
            Region::BI => "B_I",
            Region::BII => "B_II",
            Region::CI => "C_I",
            Region::CII => "C_II",
        };
        f.write_str(s)
    }
}

/// Converged equilibrium with first-order residuals and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    pub allocation: DuopolyAllocation,
    pub region: Region,
    /// Marginal revenue of each SP at the solution (`-inf` when the floors
    /// force both providers all-small and no macro tier exists).
    pub kkt_residual_1: f64,
    pub kkt_residual_2: f64,
    pub iterations: usize,
    pub revenue_1: f64,
    pub revenue_2: f64,
    pub welfare: f64,
}

/// Max best-response rounds before the solver gives up.
pub const MAX_ITERATIONS: usize = 10_000;

/// Max-norm change between successive iterates that counts as converged.
/// The first-order residual at the returned point scales with the last step
/// times the cross-partial of the marginal revenue, so this sits well below
/// the residual tolerance; bisection resolves responses to ~1e-14, which
/// keeps the target reachable.
pub const ITERATE_TOLERANCE: f64 = 1e-13;

/// First-order residual tolerance, relative to the macro spectral efficiency.
pub fn kkt_tolerance(params: &MarketParams) -> f64 {
    1e-7 * params.r0()
}

fn binding_tolerance(total: f64) -> f64 {
    1e-9 * (1.0 + total)
}

/// Revenue derivative in own small-cell bandwidth, valid in the separated
/// regime. Both per-user rates must be positive.
fn separated_marginal(
    params: &MarketParams,
    own_small: f64,
    own_total: f64,
    total_small: f64,
    total_macro: f64,
) -> f64 {
    let a = params.alpha();
    let lam = params.lambda_s();
    let r0 = params.r0();
    let rate_s = lam * total_small * r0 / params.n_fixed();
    let rate_m = total_macro * r0 / params.n_mobile();
    r0 * (lam * rate_s.powf(-a)
        - a * lam * lam * own_small * r0 / params.n_fixed() * rate_s.powf(-a - 1.0)
        - rate_m.powf(-a)
        + a * (own_total - own_small) * r0 / params.n_mobile() * rate_m.powf(-a - 1.0))
}

/// Marginal revenue of SP `sp_index` (0 or 1) at the given profile.
pub fn marginal_revenue(
    params: &MarketParams,
    alloc: &DuopolyAllocation,
    sp_index: usize,
) -> Result<f64> {
    let total_small = alloc.total_small();
    let total_macro = alloc.total_macro();
    let rate_small = params.lambda_s() * total_small * params.r0() / params.n_fixed();
    let rate_macro = total_macro * params.r0() / params.n_mobile();
    if rate_small <= 0.0 || rate_macro <= 0.0 {
        return Err(Error::DegenerateRates {
            rate_small,
            rate_macro,
        });
    }
    let own = alloc.sp(sp_index);
    Ok(separated_marginal(
        params,
        own.small,
        own.total,
        total_small,
        total_macro,
    ))
}

/// Equilibrium split absent any floors: each provider puts the
/// `small_cell_share` fraction of its bandwidth into small-cells.
pub fn unconstrained_ne(params: &MarketParams, b1: f64, b2: f64) -> DuopolyAllocation {
    let phi = params.small_cell_share();
    DuopolyAllocation::new(
        SpAllocation::new(b1, phi * b1, 0.0).expect("share in (0,1) keeps the split feasible"),
        SpAllocation::new(b2, phi * b2, 0.0).expect("share in (0,1) keeps the split feasible"),
    )
}

/// Own small-cell bandwidth at which the market switches between the
/// overflow and separated regimes, given a fixed opponent split.
fn regime_boundary_small(params: &MarketParams, opponent: &SpAllocation, own_total: f64) -> f64 {
    let nf = params.n_fixed();
    let nm = params.n_mobile();
    let lam = params.lambda_s();
    // solve lambda (t + s) / N_f = (m_opp + B - s) / N_m for s
    (nf * (opponent.macro_bw + own_total) - lam * opponent.small * nm) / (lam * nm + nf)
}

/// Revenue-maximizing own small-cell bandwidth in `[own_floor, own_total]`
/// against a fixed opponent split.
///
/// While fixed users overflow onto macro-cells, own revenue is strictly
/// increasing in own small-cell bandwidth, so the argmax always lies in the
/// separated part of the interval (or at the top endpoint). There the
/// derivative is strictly decreasing and bisection applies, clipped to the
/// interval.
pub fn best_response(
    params: &MarketParams,
    opponent: &SpAllocation,
    own_total: f64,
    own_floor: f64,
) -> f64 {
    let lo = own_floor;
    let hi = own_total;
    if hi - lo <= f64::EPSILON * (1.0 + hi) {
        return lo;
    }

    // Marginal revenue with limit conventions at the empty-tier corners.
    let d = |s: f64| -> f64 {
        let total_small = opponent.small + s;
        let total_macro = opponent.macro_bw + (own_total - s);
        if total_small <= 0.0 {
            f64::INFINITY
        } else if total_macro <= 0.0 {
            f64::NEG_INFINITY
        } else {
            separated_marginal(params, s, own_total, total_small, total_macro)
        }
    };

    let sep_lo = lo.max(regime_boundary_small(params, opponent, own_total));
    if sep_lo >= hi {
        // The whole feasible interval clears in overflow; revenue keeps
        // rising with s.
        return hi;
    }
    if d(sep_lo) <= 0.0 {
        return sep_lo;
    }
    if d(hi) >= 0.0 {
        return hi;
    }
    let (mut a, mut b) = (sep_lo, hi);
    let width_tol = 1e-15 * (1.0 + own_total);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if d(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= width_tol {
            break;
        }
    }
    0.5 * (a + b)
}

/// Solves the constrained duopoly game from the unconstrained equilibrium
/// projected onto the floors.
pub fn solve_ne(
    params: &MarketParams,
    b1: f64,
    b2: f64,
    floors: &ConstraintPair,
) -> Result<EquilibriumResult> {
    let phi = params.small_cell_share();
    solve_ne_from(
        params,
        b1,
        b2,
        floors,
        [(phi * b1).max(floors.floor1), (phi * b2).max(floors.floor2)],
    )
}

/// [`solve_ne`] with an explicit starting profile (clamped to the feasible
/// box). Any feasible start converges to the same equilibrium.
pub fn solve_ne_from(
    params: &MarketParams,
    b1: f64,
    b2: f64,
    floors: &ConstraintPair,
    start: [f64; 2],
) -> Result<EquilibriumResult> {
    for (name, value) in [("b1", b1), ("b2", b2)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                value,
                constraint: "must be positive and finite",
            });
        }
    }
    floors.feasible_for(b1, b2)?;

    let mut s1 = start[0].clamp(floors.floor1, b1);
    let mut s2 = start[1].clamp(floors.floor2, b2);
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let opp2 = SpAllocation {
            total: b2,
            small: s2,
            macro_bw: b2 - s2,
            floor: floors.floor2,
        };
        let new1 = best_response(params, &opp2, b1, floors.floor1);
        let opp1 = SpAllocation {
            total: b1,
            small: new1,
            macro_bw: b1 - new1,
            floor: floors.floor1,
        };
        let new2 = best_response(params, &opp1, b2, floors.floor2);
        last_step = (new1 - s1).abs().max((new2 - s2).abs());
        s1 = new1;
        s2 = new2;
        if last_step < ITERATE_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations,
            last_step,
        });
    }

    let allocation = DuopolyAllocation::new(
        SpAllocation::new(b1, s1, floors.floor1)?,
        SpAllocation::new(b2, s2, floors.floor2)?,
    );
    let (d1, d2) = solution_marginals(params, &allocation);

    let tol = kkt_tolerance(params);
    for (sp, (s, floor, total, d)) in [(s1, floors.floor1, b1, d1), (s2, floors.floor2, b2, d2)]
        .into_iter()
        .enumerate()
    {
        let at_floor = s <= floor + binding_tolerance(total);
        let at_top = s >= total - binding_tolerance(total);
        let ok = (at_floor && d <= tol) || (at_top && d >= -tol) || d.abs() <= tol;
        if !ok {
            return Err(Error::KktViolation {
                sp: sp + 1,
                residual: d,
                tolerance: tol,
            });
        }
    }

    let region = classify_region(params, b1, b2, floors, &allocation)?;
    let outcome = clear_market_allow_empty_macro(params, &capacities(params, &allocation));
    Ok(EquilibriumResult {
        allocation,
        region,
        kkt_residual_1: d1,
        kkt_residual_2: d2,
        iterations,
        revenue_1: sp_revenue(params, &allocation.sp1, &outcome),
        revenue_2: sp_revenue(params, &allocation.sp2, &outcome),
        welfare: social_welfare(params, &outcome),
    })
}

/// Marginal revenues at a solution, with divergence limits at the corners.
fn solution_marginals(params: &MarketParams, alloc: &DuopolyAllocation) -> (f64, f64) {
    if alloc.total_macro() <= 0.0 {
        (f64::NEG_INFINITY, f64::NEG_INFINITY)
    } else if alloc.total_small() <= 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (
            marginal_revenue(params, alloc, 0).expect("rates positive"),
            marginal_revenue(params, alloc, 1).expect("rates positive"),
        )
    }
}

/// Whether each provider's marginal revenue is nonpositive at the point
/// where both sit exactly on their floors. Both true means the floors
/// themselves are the equilibrium (a type-I point).
pub fn type1_condition(
    params: &MarketParams,
    b1: f64,
    b2: f64,
    floors: &ConstraintPair,
) -> Result<(bool, bool)> {
    floors.feasible_for(b1, b2)?;
    let total_small = floors.floor1 + floors.floor2;
    let total_macro = (b1 - floors.floor1) + (b2 - floors.floor2);
    if total_small <= 0.0 {
        // Marginal utility of the first unit of small-cell rate is
        // unbounded, so the marginal revenue diverges upward.
        return Ok((false, false));
    }
    if total_macro <= 0.0 {
        // Mirror corner: losing the last unit of macro rate is unboundedly
        // costly, so the marginal revenue diverges downward.
        return Ok((true, true));
    }
    let d1 = separated_marginal(params, floors.floor1, b1, total_small, total_macro);
    let d2 = separated_marginal(params, floors.floor2, b2, total_small, total_macro);
    Ok((d1 <= 0.0, d2 <= 0.0))
}

/// Labels a solved equilibrium.
///
/// `A` when neither floor exceeds the unconstrained split; otherwise `B_*`
/// (both exceed) or `C_*` (one exceeds), with sub-type `I` when both floors
/// bind at the solution and `II` when exactly one does.
pub fn classify_region(
    params: &MarketParams,
    b1: f64,
    b2: f64,
    floors: &ConstraintPair,
    solution: &DuopolyAllocation,
) -> Result<Region> {
    let phi = params.small_cell_share();
    let n1 = phi * b1;
    let n2 = phi * b2;
    let s1 = solution.sp1.small;
    let s2 = solution.sp2.small;
    let exceeds1 = floors.floor1 > n1;
    let exceeds2 = floors.floor2 > n2;
    let binds1 = s1 <= floors.floor1 + binding_tolerance(b1);
    let binds2 = s2 <= floors.floor2 + binding_tolerance(b2);

    match (exceeds1, exceeds2) {
        (false, false) => {
            let tol1 = 1e-6 * (1.0 + b1);
            let tol2 = 1e-6 * (1.0 + b2);
            if (s1 - n1).abs() > tol1 || (s2 - n2).abs() > tol2 {
                return Err(Error::InconsistentResult(
                    "both floors satisfied but the solution moved off the unconstrained point",
                ));
            }
            Ok(Region::A)
        }
        (true, true) => match (binds1, binds2) {
            (true, true) => Ok(Region::BI),
            (false, false) => Err(Error::InconsistentResult(
                "both floors exceeded but neither binds at the solution",
            )),
            _ => Ok(Region::BII),
        },
        (true, false) => {
            if !binds1 {
                return Err(Error::InconsistentResult(
                    "the floor-violating provider is not at its floor",
                ));
            }
            Ok(if binds2 { Region::CI } else { Region::CII })
        }
        (false, true) => {
            if !binds2 {
                return Err(Error::InconsistentResult(
                    "the floor-violating provider is not at its floor",
                ));
            }
            Ok(if binds1 { Region::CI } else { Region::CII })
        }
    }
}
