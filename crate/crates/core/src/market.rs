//! Two-tier market model: user utilities and demand, tier capacities,
//! market-clearing prices, provider revenue and social welfare.
//!
//! Mobile users attach to macro-cells only; fixed users take whichever tier
//! is cheaper, spilling onto macro-cells when small-cell supply is short.

use crate::error::{Error, Result};

/// Global market constants.
///
/// `alpha` is the utility curvature, strictly inside (0, 1). `lambda_s` is
/// the small-cell spectral-efficiency gain over macro-cells and must exceed 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    alpha: f64,
    n_mobile: f64,
    n_fixed: f64,
    r0: f64,
    lambda_s: f64,
}

impl MarketParams {
    pub fn new(alpha: f64, n_mobile: f64, n_fixed: f64, r0: f64, lambda_s: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "0 < alpha < 1",
            });
        }
        for (name, value) in [("n_mobile", n_mobile), ("n_fixed", n_fixed), ("r0", r0)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "must be positive and finite",
                });
            }
        }
        if !(lambda_s > 1.0 && lambda_s.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda_s",
                value: lambda_s,
                constraint: "must exceed 1",
            });
        }
        Ok(Self {
            alpha,
            n_mobile,
            n_fixed,
            r0,
            lambda_s,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_mobile(&self) -> f64 {
        self.n_mobile
    }

    pub fn n_fixed(&self) -> f64 {
        self.n_fixed
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    /// Utility of a served rate, `r^(1-alpha) / (1-alpha)`; zero at `r = 0`.
    pub fn utility(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            r.powf(1.0 - self.alpha) / (1.0 - self.alpha)
        }
    }

    /// Rate demanded by one user facing price `p`, `(1/p)^(1/alpha)`.
    pub fn demand(&self, p: f64) -> f64 {
        p.powf(-1.0 / self.alpha)
    }

    /// Best achievable net payoff at price `p`.
    pub fn net_payoff(&self, p: f64) -> f64 {
        self.alpha / (1.0 - self.alpha) * p.powf(1.0 - 1.0 / self.alpha)
    }

    /// Market-clearing price for a delivered per-user rate; `+inf` for an
    /// empty tier (nobody associates).
    pub fn price_for_rate(&self, rate: f64) -> f64 {
        if rate > 0.0 {
            rate.powf(-self.alpha)
        } else {
            f64::INFINITY
        }
    }

    /// Fraction of bandwidth that goes to small-cells at the unconstrained
    /// optimum: `N_f * lambda_s^(1/alpha - 1) / (N_f * lambda_s^(1/alpha - 1) + N_m)`.
    ///
    /// The same share is optimal for a monopolist and for each provider at
    /// the unconstrained duopoly equilibrium.
    pub fn small_cell_share(&self) -> f64 {
        let weighted = self.n_fixed * self.efficiency_weight();
        weighted / (weighted + self.n_mobile)
    }

    /// `lambda_s^(1/alpha - 1)`, the efficiency gain as it enters the
    /// optimal-share and threshold formulas.
    pub fn efficiency_weight(&self) -> f64 {
        self.lambda_s.powf(1.0 / self.alpha - 1.0)
    }
}

/// Utility of rate `r` under curvature `alpha`.
pub fn utility(r: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if r < 0.0 {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            constraint: "rate must be nonnegative",
        });
    }
    if r == 0.0 {
        Ok(0.0)
    } else {
        Ok(r.powf(1.0 - alpha) / (1.0 - alpha))
    }
}

/// Per-user rate demand at price `p`.
pub fn demand(p: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_price(p)?;
    Ok(p.powf(-1.0 / alpha))
}

/// Maximum net payoff (utility minus payment) a user can reach at price `p`.
pub fn net_payoff(p: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_price(p)?;
    Ok(alpha / (1.0 - alpha) * p.powf(1.0 - 1.0 / alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "0 < alpha < 1",
        })
    }
}

fn check_price(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPrice(p))
    }
}

/// One provider's bandwidth split. `small` and `macro_bw` are stored
/// redundantly and must sum to `total` within 1e-12; callers typically set
/// one and derive the other, and the invariant catches drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpAllocation {
    pub total: f64,
    pub small: f64,
    pub macro_bw: f64,
    pub floor: f64,
}

/// Absolute tolerance on `small + macro_bw == total`.
pub const SPLIT_TOLERANCE: f64 = 1e-12;

impl SpAllocation {
    /// Builds a split from the small-cell side; macro gets the remainder.
    pub fn new(total: f64, small: f64, floor: f64) -> Result<Self> {
        let alloc = Self {
            total,
            small,
            macro_bw: total - small,
            floor,
        };
        alloc.validate()?;
        Ok(alloc)
    }

    /// Same split with a different small-cell bandwidth.
    pub fn with_small(&self, small: f64) -> Result<Self> {
        Self::new(self.total, small, self.floor)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason| Error::InvalidAllocation {
            reason,
            total: self.total,
            small: self.small,
            floor: self.floor,
        };
        if !(self.total >= 0.0 && self.total.is_finite()) {
            return Err(fail("total must be nonnegative and finite"));
        }
        if self.floor.is_nan() || self.floor < 0.0 {
            return Err(fail("floor must be nonnegative"));
        }
        if self.floor > self.total {
            return Err(Error::InvalidFloor {
                floor: self.floor,
                total: self.total,
            });
        }
        if self.small < self.floor {
            return Err(fail("small-cell bandwidth below the floor"));
        }
        if self.macro_bw < 0.0 {
            return Err(fail("macro bandwidth negative"));
        }
        if (self.small + self.macro_bw - self.total).abs() > SPLIT_TOLERANCE {
            return Err(fail("small + macro does not add up to total"));
        }
        Ok(())
    }
}

/// Bandwidth profile of both competing providers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuopolyAllocation {
    pub sp1: SpAllocation,
    pub sp2: SpAllocation,
}

impl DuopolyAllocation {
    pub fn new(sp1: SpAllocation, sp2: SpAllocation) -> Self {
        Self { sp1, sp2 }
    }

    pub fn sp(&self, index: usize) -> &SpAllocation {
        match index {
            0 => &self.sp1,
            1 => &self.sp2,
            _ => panic!("SP index out of range: {index}"),
        }
    }

    pub fn total_small(&self) -> f64 {
        self.sp1.small + self.sp2.small
    }

    pub fn total_macro(&self) -> f64 {
        self.sp1.macro_bw + self.sp2.macro_bw
    }

    pub fn validate(&self) -> Result<()> {
        self.sp1.validate()?;
        self.sp2.validate()
    }
}

/// Anything that contributes bandwidth to the two tiers.
pub trait BandwidthSplit {
    fn small_bandwidth(&self) -> f64;
    fn macro_bandwidth(&self) -> f64;
}

impl BandwidthSplit for SpAllocation {
    fn small_bandwidth(&self) -> f64 {
        self.small
    }

    fn macro_bandwidth(&self) -> f64 {
        self.macro_bw
    }
}

impl BandwidthSplit for DuopolyAllocation {
    fn small_bandwidth(&self) -> f64 {
        self.total_small()
    }

    fn macro_bandwidth(&self) -> f64 {
        self.total_macro()
    }
}

/// Total rate supply per tier: `C_M = B_M * R_0`, `C_S = lambda_s * B_S * R_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPair {
    pub c_macro: f64,
    pub c_small: f64,
}

/// Aggregate tier capacities of an allocation.
pub fn capacities(params: &MarketParams, alloc: &impl BandwidthSplit) -> CapacityPair {
    CapacityPair {
        c_macro: alloc.macro_bandwidth() * params.r0(),
        c_small: params.lambda_s() * alloc.small_bandwidth() * params.r0(),
    }
}

/// Which clearing pattern the market is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Small-cells are at least as cheap as macro-cells; every fixed user is
    /// on a small-cell.
    Separated,
    /// Small-cell supply is short; a fraction of fixed users spills onto
    /// macro-cells and both tiers settle on one common price.
    Overflow,
}

/// Market-clearing prices, rates and user masses for given tier capacities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearingOutcome {
    pub price_macro: f64,
    pub price_small: f64,
    pub rate_macro: f64,
    pub rate_small: f64,
    pub mass_macro: f64,
    pub mass_small: f64,
    /// Fraction of fixed users served on macro-cells.
    pub overflow_fraction: f64,
    pub regime: Regime,
}

/// Clears both tiers: prices equalize rate demand and rate supply.
///
/// Errors with [`Error::NoMacroCapacity`] when no macro capacity exists
/// while mobile users are present; use [`clear_market_allow_empty_macro`]
/// where that corner must evaluate (mobile users then go unserved and
/// contribute zero utility and zero revenue).
pub fn clear_market(params: &MarketParams, caps: &CapacityPair) -> Result<ClearingOutcome> {
    if caps.c_macro <= 0.0 && params.n_mobile() > 0.0 {
        return Err(Error::NoMacroCapacity);
    }
    Ok(clear_market_allow_empty_macro(params, caps))
}

/// Total version of [`clear_market`]: zero macro capacity leaves mobile users
/// unserved instead of failing.
pub fn clear_market_allow_empty_macro(
    params: &MarketParams,
    caps: &CapacityPair,
) -> ClearingOutcome {
    let n_m = params.n_mobile();
    let n_f = params.n_fixed();

    if caps.c_macro <= 0.0 {
        // Mobile users cannot be served; fixed users ride small-cells alone.
        let rate_small = if caps.c_small > 0.0 {
            caps.c_small / n_f
        } else {
            0.0
        };
        return ClearingOutcome {
            price_macro: f64::INFINITY,
            price_small: params.price_for_rate(rate_small),
            rate_macro: 0.0,
            rate_small,
            mass_macro: 0.0,
            mass_small: if caps.c_small > 0.0 { n_f } else { 0.0 },
            overflow_fraction: 0.0,
            regime: Regime::Separated,
        };
    }

    let per_fixed = caps.c_small / n_f;
    let per_mobile = caps.c_macro / n_m;
    if per_fixed >= per_mobile {
        ClearingOutcome {
            price_macro: params.price_for_rate(per_mobile),
            price_small: params.price_for_rate(per_fixed),
            rate_macro: per_mobile,
            rate_small: per_fixed,
            mass_macro: n_m,
            mass_small: n_f,
            overflow_fraction: 0.0,
            regime: Regime::Separated,
        }
    } else {
        // Fixed users spill onto macro-cells until both tiers clear at one
        // rate; x solves c_macro / (N_m + x N_f) = c_small / ((1 - x) N_f).
        let rate = (caps.c_macro + caps.c_small) / (n_m + n_f);
        let x = (n_f * caps.c_macro - n_m * caps.c_small) / (n_f * (caps.c_macro + caps.c_small));
        let price = params.price_for_rate(rate);
        ClearingOutcome {
            price_macro: price,
            price_small: price,
            rate_macro: rate,
            rate_small: rate,
            mass_macro: n_m + x * n_f,
            mass_small: (1.0 - x) * n_f,
            overflow_fraction: x,
            regime: Regime::Overflow,
        }
    }
}

/// Revenue one provider collects at a clearing outcome.
///
/// Users facing equal prices split across providers in proportion to
/// capacity, so each provider earns `price * capacity` per tier.
pub fn sp_revenue(params: &MarketParams, alloc_i: &SpAllocation, outcome: &ClearingOutcome) -> f64 {
    let own = capacities(params, alloc_i);
    let paid = |cap: f64, price: f64| if cap > 0.0 { cap * price } else { 0.0 };
    match outcome.regime {
        Regime::Separated => {
            paid(own.c_small, outcome.price_small) + paid(own.c_macro, outcome.price_macro)
        }
        Regime::Overflow => (own.c_small + own.c_macro) * outcome.price_macro,
    }
}

/// Sum utility of all users at a clearing outcome. Unserved users count zero.
pub fn social_welfare(params: &MarketParams, outcome: &ClearingOutcome) -> f64 {
    let x = outcome.overflow_fraction;
    let on_macro = params.n_mobile() + x * params.n_fixed();
    let on_small = (1.0 - x) * params.n_fixed();
    on_macro * params.utility(outcome.rate_macro) + on_small * params.utility(outcome.rate_small)
}
