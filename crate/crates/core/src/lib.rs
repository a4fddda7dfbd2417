//! Pricing and bandwidth-allocation equilibria for a two-tier wireless
//! market where regulation reserves a minimum of each provider's bandwidth
//! for small-cells.
//!
//! The crate covers the single-provider optimum, the constrained duopoly
//! Nash equilibrium with its region taxonomy, welfare bounds for the
//! regulator, and brute-force oracles used to verify all of it.

pub mod duopoly;
pub mod error;
pub mod market;
pub mod monopoly;
pub mod oracle;
pub mod welfare;

pub use duopoly::{
    best_response, classify_region, marginal_revenue, solve_ne, solve_ne_from, type1_condition,
    unconstrained_ne, ConstraintPair, EquilibriumResult, Region,
};
pub use error::{Error, Result};
pub use market::{
    capacities, clear_market, clear_market_allow_empty_macro, demand, net_payoff, social_welfare,
    sp_revenue, utility, BandwidthSplit, CapacityPair, ClearingOutcome, DuopolyAllocation,
    MarketParams, Regime, SpAllocation,
};
pub use monopoly::{monopoly_objective, optimal_split, MonopolyResult};
pub use oracle::{
    certify_epsilon_ne, grid_best_response, grid_social_opt, EpsilonCertificate, GridSpec,
};
pub use welfare::{
    equality_interval, loss_condition, sw_bound_ratio, sw_constrained_opt, sw_unconstrained_opt,
    sweep, threshold, welfare_of_pooled_split, RegulatorScenario, SweepRow, SweepRowError,
};
