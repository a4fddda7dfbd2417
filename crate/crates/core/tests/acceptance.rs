//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use common::{random_instance, random_params, rel_gap};
use hetnet_market::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(criterion: &str, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion}: {detail}");
}

fn region_map_params() -> MarketParams {
    MarketParams::new(0.5, 50.0, 50.0, 50.0, 2.0).unwrap()
}

fn regulator_params() -> MarketParams {
    MarketParams::new(0.5, 50.0, 50.0, 50.0, 4.0).unwrap()
}

/// Floor grid over [0, b1] x [0, b2], endpoints included.
fn floor_grid(b1: f64, b2: f64, n: usize) -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let f1 = if i + 1 == n {
                b1
            } else {
                b1 * i as f64 / (n - 1) as f64
            };
            let f2 = if j + 1 == n {
                b2
            } else {
                b2 * j as f64 / (n - 1) as f64
            };
            grid.push((f1, f2));
        }
    }
    grid
}

#[test]
fn criterion_01_unconstrained_duopoly_ne() {
    // Zero floors, totals (2, 1): the equilibrium puts 2/3 of each
    // provider's bandwidth into small-cells, i.e. (1.3333..., 0.6667...).
    let params = region_map_params();
    let eq = solve_ne(&params, 2.0, 1.0, &ConstraintPair::new(0.0, 0.0)).unwrap();
    let e1 = (eq.allocation.sp1.small - 4.0 / 3.0).abs();
    let e2 = (eq.allocation.sp2.small - 2.0 / 3.0).abs();
    report(
        "01",
        e1 <= 1e-6 && e2 <= 1e-6,
        &format!(
            "B_1S={:.10} (err {e1:.2e}), B_2S={:.10} (err {e2:.2e}), region {}",
            eq.allocation.sp1.small, eq.allocation.sp2.small, eq.region
        ),
    );
}

#[test]
fn criterion_02_monopoly_split_matches_grid_oracle() {
    let mut rng = StdRng::seed_from_u64(101);
    let mut max_err_steps = 0.0f64;
    for _ in 0..100 {
        let params = random_params(&mut rng);
        let b_total = rng.gen_range(0.5..=5.0);
        let floor = rng.gen_range(0.0..=b_total);
        let split = optimal_split(&params, b_total, floor).unwrap();
        // grid step 1e-4 * B
        let grid = GridSpec::new(10_001, 1e-9).unwrap();
        let (grid_small, _) = grid_social_opt(&params, b_total, floor, &grid).unwrap();
        let step = grid.step(b_total - floor).max(f64::MIN_POSITIVE);
        max_err_steps = max_err_steps.max((split.allocation.small - grid_small).abs() / step);
    }
    report(
        "02",
        max_err_steps <= 1.0,
        &format!("max |closed form - grid argmax| = {max_err_steps:.3} grid steps over 100 draws"),
    );
}

#[test]
fn criterion_03_uniqueness_and_epsilon_certificates() {
    let mut rng = StdRng::seed_from_u64(102);
    let mut max_spread = 0.0f64;
    let mut worst_improvement_ratio = f64::NEG_INFINITY;
    for _ in 0..100 {
        let inst = random_instance(&mut rng);
        let reference = solve_ne(&inst.params, inst.b1, inst.b2, &inst.floors).unwrap();
        for _ in 0..20 {
            let start = [
                rng.gen_range(inst.floors.floor1..=inst.b1),
                rng.gen_range(inst.floors.floor2..=inst.b2),
            ];
            let eq = solve_ne_from(&inst.params, inst.b1, inst.b2, &inst.floors, start).unwrap();
            let spread = (eq.allocation.sp1.small - reference.allocation.sp1.small)
                .abs()
                .max((eq.allocation.sp2.small - reference.allocation.sp2.small).abs());
            max_spread = max_spread.max(spread);
        }
        let epsilon = 1e-4 * reference.revenue_1.abs().max(reference.revenue_2.abs());
        let grid = GridSpec::new(500, epsilon).unwrap();
        let cert = certify_epsilon_ne(&inst.params, &reference.allocation, &inst.floors, &grid);
        worst_improvement_ratio = worst_improvement_ratio.max(cert.max_improvement / epsilon);
        if !cert.certified {
            report(
                "03",
                false,
                &format!(
                    "epsilon certificate failed: improvement {} vs epsilon {epsilon}",
                    cert.max_improvement
                ),
            );
        }
    }
    report(
        "03",
        max_spread <= 1e-8,
        &format!(
            "max allocation spread over 20 starts x 100 instances = {max_spread:.3e}; \
             worst grid improvement = {worst_improvement_ratio:.3} * epsilon"
        ),
    );
}

#[test]
fn criterion_04_total_small_cell_monotonicity_on_floor_grid() {
    let params = region_map_params();
    let mut min_total = f64::INFINITY;
    for (f1, f2) in floor_grid(2.0, 1.0, 50) {
        let eq = solve_ne(&params, 2.0, 1.0, &ConstraintPair::new(f1, f2)).unwrap();
        min_total = min_total.min(eq.allocation.total_small());
    }
    report(
        "04",
        min_total >= 2.0 - 1e-9,
        &format!(
            "min total small-cell bandwidth over 50x50 floor grid = {min_total:.12} (bound 2.0)"
        ),
    );
}

#[test]
fn criterion_05_region_map_structure() {
    let params = region_map_params();
    let mut counts = std::collections::HashMap::new();
    let mut mismatches = Vec::new();
    for (f1, f2) in floor_grid(2.0, 1.0, 50) {
        let eq = solve_ne(&params, 2.0, 1.0, &ConstraintPair::new(f1, f2)).unwrap();
        *counts.entry(eq.region).or_insert(0usize) += 1;
        let in_a_box = f1 <= 1.3333 + 1e-9 && f2 <= 0.6667 + 1e-9;
        let exceeds1 = f1 > 1.3333 + 1e-9;
        let exceeds2 = f2 > 0.6667 + 1e-9;
        let expected_family = match (exceeds1, exceeds2) {
            (false, false) => "A",
            (true, true) => "B",
            _ => "C",
        };
        let family = match eq.region {
            Region::A => "A",
            Region::BI | Region::BII => "B",
            Region::CI | Region::CII => "C",
        };
        if (eq.region == Region::A) != in_a_box || family != expected_family {
            mismatches.push((f1, f2, eq.region));
        }
    }
    let all_labels = [Region::A, Region::BI, Region::BII, Region::CI, Region::CII]
        .iter()
        .all(|r| counts.contains_key(r));
    let ok = all_labels && mismatches.is_empty();
    report(
        "05",
        ok,
        &format!(
            "labels {:?}; boundary mismatches: {}",
            {
                let mut c: Vec<_> = counts.iter().map(|(r, n)| (r.to_string(), *n)).collect();
                c.sort();
                c
            },
            mismatches.len()
        ),
    );
}

#[test]
fn criterion_06_welfare_bound_on_floor_grid() {
    let params = region_map_params();
    let bound = (2.0f64 / 3.0).sqrt();
    let sw_wo = sw_unconstrained_opt(&params, 3.0);
    let mut min_ratio = f64::INFINITY;
    for (f1, f2) in floor_grid(2.0, 1.0, 50) {
        let eq = solve_ne(&params, 2.0, 1.0, &ConstraintPair::new(f1, f2)).unwrap();
        min_ratio = min_ratio.min(eq.welfare / sw_wo);
    }
    let corner = solve_ne(&params, 2.0, 1.0, &ConstraintPair::new(2.0, 1.0)).unwrap();
    let corner_gap = (corner.welfare / sw_wo - bound).abs();
    report(
        "06",
        min_ratio >= bound - 1e-9 && corner_gap <= 1e-9,
        &format!(
            "min ratio {min_ratio:.12} vs bound {bound:.12}; tightness gap at full floors {corner_gap:.2e}"
        ),
    );
}

#[test]
fn criterion_07_threshold_value() {
    let scenario = RegulatorScenario::new(regulator_params(), 1.0, 1.2, 6.0).unwrap();
    let t = threshold(&scenario);
    report("07", t == 8.8, &format!("threshold = {t:.17}"));
}

/// The literal criterion: equality at 1e-6 relative inside [1.2, 4.0] and a
/// loss margin above 1e-6 relative outside. The margin clause cannot hold at
/// the grid points adjacent to the interval endpoints: the equilibrium moves
/// continuously, so the loss grows only quadratically in the distance past
/// an endpoint and stays below 1e-6 relative until roughly 0.07 past it
/// (measured loss at b1n = 4.02 is ~9.3e-8 relative). The structural claim
/// at solver precision is covered by the companion test below.
#[test]
fn criterion_08_sweep_equality_interval_as_stated() {
    let scenario = RegulatorScenario::new(regulator_params(), 1.0, 1.2, 6.0).unwrap();
    let rows: Vec<SweepRow> = sweep(&scenario, 201)
        .into_iter()
        .map(|r| r.expect("solver converges"))
        .collect();
    let mut violations = Vec::new();
    let mut flat_ok = true;
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    for row in &rows {
        flat_ok &= rel_gap(row.sw_wo_star, first.sw_wo_star) < 1e-12
            && rel_gap(row.sw_w_star, last.sw_w_star) < 1e-12;
        let inside = row.b1_new >= 1.2 - 1e-12 && row.b1_new <= 4.0 + 1e-12;
        let rel_loss = (row.sw_wo_star - row.sw_w_ne) / row.sw_wo_star;
        let ok = if inside {
            rel_loss.abs() <= 1e-6
        } else {
            rel_loss > 1e-6
        };
        if !ok {
            violations.push(format!("b1n={:.2} rel_loss={rel_loss:.2e}", row.b1_new));
        }
    }
    report(
        "08",
        violations.is_empty() && flat_ok,
        &format!(
            "equality interval [1.2, 4.0] at 1e-6 margins; violations: [{}]; flat benchmarks: {flat_ok}",
            violations.join(", ")
        ),
    );
}

/// Same sweep, judged at solver precision: equality within 1e-9 relative on
/// [1.2, 4.0] and a strictly positive loss (> 1e-9 relative) at every grid
/// point outside. This pins the structure the stated margins aim at.
#[test]
fn criterion_08_supplement_sweep_structure_at_solver_precision() {
    let scenario = RegulatorScenario::new(regulator_params(), 1.0, 1.2, 6.0).unwrap();
    let rows: Vec<SweepRow> = sweep(&scenario, 201)
        .into_iter()
        .map(|r| r.expect("solver converges"))
        .collect();
    let mut violations = Vec::new();
    for row in &rows {
        let inside = row.b1_new >= 1.2 - 1e-12 && row.b1_new <= 4.0 + 1e-12;
        let rel_loss = (row.sw_wo_star - row.sw_w_ne) / row.sw_wo_star;
        let ok = if inside {
            rel_loss.abs() <= 1e-9
        } else {
            rel_loss > 1e-9
        };
        if !ok {
            violations.push(format!("b1n={:.2} rel_loss={rel_loss:.2e}", row.b1_new));
        }
    }
    report(
        "08-supplement",
        violations.is_empty(),
        &format!(
            "equality exactly on [1.2, 4.0], strict loss outside; violations: [{}]",
            violations.join(", ")
        ),
    );
}

#[test]
fn criterion_09_sweep_above_threshold() {
    let params = regulator_params();
    let scenario = RegulatorScenario::new(params, 1.0, 1.2, 10.0).unwrap();
    let rows: Vec<SweepRow> = sweep(&scenario, 201)
        .into_iter()
        .map(|r| r.expect("solver converges"))
        .collect();
    let max_ne = rows
        .iter()
        .map(|r| r.sw_w_ne)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut failures = Vec::new();
    for row in &rows {
        if row.sw_w_star >= row.sw_wo_star * (1.0 - 1e-9) {
            failures.push(format!("b1n={:.2}: planner loss missing", row.b1_new));
        }
        let floors = ConstraintPair::new(row.b1_new, row.b2_new);
        let (c1, c2) =
            type1_condition(&params, 1.0 + row.b1_new, 1.2 + row.b2_new, &floors).unwrap();
        let eq_gap = (row.sw_w_star - row.sw_w_ne) / row.sw_w_star;
        let ok = if c1 && c2 {
            eq_gap.abs() <= 1e-9
        } else {
            eq_gap > 1e-9
        };
        if !ok {
            failures.push(format!(
                "b1n={:.2}: type1=({c1},{c2}) but gap {eq_gap:.2e}",
                row.b1_new
            ));
        }
    }
    for row in [&rows[0], &rows[rows.len() - 1]] {
        if row.sw_w_ne >= max_ne * (1.0 - 1e-9) {
            failures.push(format!(
                "endpoint b1n={:.0} not strictly below max",
                row.b1_new
            ));
        }
    }
    report(
        "09",
        failures.is_empty(),
        &format!(
            "ordering and winner-take-all penalties hold; max NE welfare {max_ne:.6}; failures: [{}]",
            failures.join(", ")
        ),
    );
}

#[test]
fn criterion_10_gradient_check_adjudicates_derivative() {
    let mut rng = StdRng::seed_from_u64(110);
    let mut checked = 0;
    let mut max_rel_err = 0.0f64;
    let mut wrong_formula_separated = 0;
    while checked < 1000 {
        let params = random_params(&mut rng);
        let b1 = rng.gen_range(0.5..=3.0);
        let b2 = rng.gen_range(0.5..=3.0);
        let s1 = rng.gen_range(0.0..=b1);
        let s2 = rng.gen_range(0.0..=b2);
        let total = b1 + b2;
        let sigma = s1 + s2;
        // keep the finite-difference stencil strictly inside the separated
        // regime and away from the empty-tier corners
        let boundary =
            params.n_fixed() * total / (params.lambda_s() * params.n_mobile() + params.n_fixed());
        if sigma < boundary + 0.02 * total || sigma > 0.98 * total {
            continue;
        }
        if s1 < 0.01 * b1 || s1 > 0.99 * b1 {
            continue;
        }
        let alloc = DuopolyAllocation::new(
            SpAllocation::new(b1, s1, 0.0).unwrap(),
            SpAllocation::new(b2, s2, 0.0).unwrap(),
        );
        let analytic = marginal_revenue(&params, &alloc, 0).unwrap();
        // near the zero crossing a relative comparison is dominated by
        // finite-difference roundoff; skip that sliver
        if analytic.abs() < 1e-3 * params.r0() {
            continue;
        }
        checked += 1;

        let h = 1e-6 * b1;
        let rev = |s: f64| {
            let own = SpAllocation::new(b1, s, 0.0).unwrap();
            let duo = DuopolyAllocation::new(own, alloc.sp2);
            let out = clear_market_allow_empty_macro(&params, &capacities(&params, &duo));
            sp_revenue(&params, &own, &out)
        };
        let fd = (rev(s1 + h) - rev(s1 - h)) / (2.0 * h);
        max_rel_err = max_rel_err.max(rel_gap(analytic, fd));

        // the same derivative without the curvature factor on the macro
        // term must sit measurably further from the finite difference
        let rate_m = alloc.total_macro() * params.r0() / params.n_mobile();
        let alpha = params.alpha();
        let no_alpha_variant = analytic
            + (1.0 - alpha) * (b1 - s1) * params.r0().powi(2) / params.n_mobile()
                * rate_m.powf(-alpha - 1.0);
        if (no_alpha_variant - fd).abs() > 1e3 * (analytic - fd).abs() {
            wrong_formula_separated += 1;
        }
    }
    let ok = max_rel_err <= 1e-6 && wrong_formula_separated >= 990;
    report(
        "10",
        ok,
        &format!(
            "max relative gap analytic vs central difference = {max_rel_err:.3e} over 1000 points; \
             curvature-factor variant rejected at {wrong_formula_separated}/1000 points"
        ),
    );
}

#[test]
fn criterion_11_market_clearing_properties() {
    let mut rng = StdRng::seed_from_u64(111);
    let mut max_dual = 0.0f64;
    let mut max_balance = 0.0f64;
    let mut max_price_jump = 0.0f64;
    for _ in 0..1000 {
        let params = random_params(&mut rng);
        let caps = CapacityPair {
            c_macro: rng.gen_range(1e-3..=1e3),
            c_small: rng.gen_range(0.0..=1e3),
        };
        let out = clear_market(&params, &caps).unwrap();
        max_dual = max_dual.max(rel_gap(params.demand(out.price_macro), out.rate_macro));
        if caps.c_small > 0.0 {
            max_dual = max_dual.max(rel_gap(params.demand(out.price_small), out.rate_small));
        }
        max_balance = max_balance.max(rel_gap(out.mass_macro * out.rate_macro, caps.c_macro));
        if caps.c_small > 0.0 {
            max_balance = max_balance.max(rel_gap(out.mass_small * out.rate_small, caps.c_small));
        }

        // regime boundary: c_small/N_f == c_macro/N_m; nudging off it flips
        // the regime but moves prices only infinitesimally
        let boundary_small = caps.c_macro * params.n_fixed() / params.n_mobile();
        let eps = 1e-9 * boundary_small;
        let up = clear_market(
            &params,
            &CapacityPair {
                c_macro: caps.c_macro,
                c_small: boundary_small + eps,
            },
        )
        .unwrap();
        let down = clear_market(
            &params,
            &CapacityPair {
                c_macro: caps.c_macro,
                c_small: boundary_small - eps,
            },
        )
        .unwrap();
        if up.regime != Regime::Separated || down.regime != Regime::Overflow {
            report("11", false, "regime did not flip across the boundary");
        }
        max_price_jump = max_price_jump
            .max(rel_gap(up.price_macro, down.price_macro))
            .max(rel_gap(up.price_small, down.price_small));
    }
    let ok = max_dual <= 1e-10 && max_balance <= 1e-10 && max_price_jump <= 1e-6;
    report(
        "11",
        ok,
        &format!(
            "duality gap {max_dual:.2e}, balance gap {max_balance:.2e}, boundary price jump {max_price_jump:.2e}"
        ),
    );
}
