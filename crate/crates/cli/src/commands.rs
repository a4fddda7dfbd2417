use hetnet_market::{
    capacities, certify_epsilon_ne, clear_market_allow_empty_macro, grid_best_response,
    grid_social_opt, optimal_split, solve_ne, sweep, ConstraintPair, GridSpec, MarketParams,
    RegulatorScenario,
};
use rayon::prelude::*;

use crate::output::{fmt_sig, resolve_format, sink, write_out};
use crate::scenario::{load, ScenarioFile};
use crate::{Cli, CliError, Command, CommonArgs, OutputFormat};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Monopoly(args) => monopoly(&args),
        Command::Duopoly(args) => duopoly(&args),
        Command::Regions(args) => regions(&args),
        Command::Sweep(args) => sweep_cmd(&args),
        Command::Verify(args) => verify(&args),
    }
}

fn floors_override(args: &CommonArgs, expected: usize) -> Result<Option<&[f64]>, CliError> {
    match &args.floors {
        None => Ok(None),
        Some(v) if v.len() == expected => Ok(Some(v)),
        Some(v) => Err(CliError::Input(format!(
            "--floors: expected {expected} comma-separated values, got {}",
            v.len()
        ))),
    }
}

fn monopoly(args: &CommonArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let params = scenario.market_params()?;
    let total = scenario.sp_total(0)?;
    let floor = match floors_override(args, 1)? {
        Some(f) => f[0],
        None => scenario.sp_floor(0)?,
    };
    let result = optimal_split(&params, total, floor)?;
    let outcome = clear_market_allow_empty_macro(&params, &capacities(&params, &result.allocation));

    let format = resolve_format(args, &scenario, OutputFormat::Human)?;
    let content = match format {
        OutputFormat::Csv => {
            let mut s = String::from(
                "total,floor,small,macro,price_macro,price_small,revenue,welfare,clipped\n",
            );
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt_sig(total),
                fmt_sig(floor),
                fmt_sig(result.allocation.small),
                fmt_sig(result.allocation.macro_bw),
                fmt_sig(outcome.price_macro),
                fmt_sig(outcome.price_small),
                fmt_sig(result.revenue),
                fmt_sig(result.welfare),
                result.clipped,
            ));
            s
        }
        OutputFormat::Human => format!(
            "monopoly optimum (total {}, floor {})\n\
             \x20 small-cell bandwidth: {}{}\n\
             \x20 macro bandwidth:      {}\n\
             \x20 prices (macro/small): {} / {}\n\
             \x20 rates (macro/small):  {} / {}\n\
             \x20 revenue:              {}\n\
             \x20 welfare:              {}\n",
            fmt_sig(total),
            fmt_sig(floor),
            fmt_sig(result.allocation.small),
            if result.clipped {
                "  (floor binding)"
            } else {
                ""
            },
            fmt_sig(result.allocation.macro_bw),
            fmt_sig(outcome.price_macro),
            fmt_sig(outcome.price_small),
            fmt_sig(outcome.rate_macro),
            fmt_sig(outcome.rate_small),
            fmt_sig(result.revenue),
            fmt_sig(result.welfare),
        ),
    };
    write_out(sink(args, &scenario).as_deref(), &content)
}

fn duopoly_inputs(
    args: &CommonArgs,
    scenario: &ScenarioFile,
) -> Result<(MarketParams, f64, f64, ConstraintPair), CliError> {
    let params = scenario.market_params()?;
    let b1 = scenario.sp_total(0)?;
    let b2 = scenario.sp_total(1)?;
    let floors = match floors_override(args, 2)? {
        Some(f) => ConstraintPair::new(f[0], f[1]),
        None => ConstraintPair::new(scenario.sp_floor(0)?, scenario.sp_floor(1)?),
    };
    Ok((params, b1, b2, floors))
}

fn duopoly(args: &CommonArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let (params, b1, b2, floors) = duopoly_inputs(args, &scenario)?;
    let eq = solve_ne(&params, b1, b2, &floors)?;

    let format = resolve_format(args, &scenario, OutputFormat::Human)?;
    let content = match format {
        OutputFormat::Csv => {
            let mut s = String::from(
                "b1,b2,floor1,floor2,b1s,b2s,region,kkt1,kkt2,iterations,rev1,rev2,welfare\n",
            );
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                fmt_sig(b1),
                fmt_sig(b2),
                fmt_sig(floors.floor1),
                fmt_sig(floors.floor2),
                fmt_sig(eq.allocation.sp1.small),
                fmt_sig(eq.allocation.sp2.small),
                eq.region,
                fmt_sig(eq.kkt_residual_1),
                fmt_sig(eq.kkt_residual_2),
                eq.iterations,
                fmt_sig(eq.revenue_1),
                fmt_sig(eq.revenue_2),
                fmt_sig(eq.welfare),
            ));
            s
        }
        OutputFormat::Human => format!(
            "duopoly equilibrium (totals {} / {}, floors {} / {})\n\
             \x20 region:           {}\n\
             \x20 small-cell split: SP1 {}  SP2 {}\n\
             \x20 macro split:      SP1 {}  SP2 {}\n\
             \x20 residuals:        SP1 {}  SP2 {}\n\
             \x20 revenues:         SP1 {}  SP2 {}\n\
             \x20 welfare:          {}\n\
             \x20 iterations:       {}\n",
            fmt_sig(b1),
            fmt_sig(b2),
            fmt_sig(floors.floor1),
            fmt_sig(floors.floor2),
            eq.region,
            fmt_sig(eq.allocation.sp1.small),
            fmt_sig(eq.allocation.sp2.small),
            fmt_sig(eq.allocation.sp1.macro_bw),
            fmt_sig(eq.allocation.sp2.macro_bw),
            fmt_sig(eq.kkt_residual_1),
            fmt_sig(eq.kkt_residual_2),
            fmt_sig(eq.revenue_1),
            fmt_sig(eq.revenue_2),
            fmt_sig(eq.welfare),
            eq.iterations,
        ),
    };
    write_out(sink(args, &scenario).as_deref(), &content)
}

fn regions(args: &CommonArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let (params, b1, b2, _) = duopoly_inputs(args, &scenario)?;
    let n = args.grid.unwrap_or(50);
    if n < 2 {
        return Err(CliError::Input(
            "--grid: need at least 2 points per axis".into(),
        ));
    }

    let grid_value = |total: f64, k: usize| {
        if k + 1 == n {
            total
        } else {
            total * k as f64 / (n - 1) as f64
        }
    };
    let results: Vec<_> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let f1 = grid_value(b1, idx / n);
            let f2 = grid_value(b2, idx % n);
            (
                f1,
                f2,
                solve_ne(&params, b1, b2, &ConstraintPair::new(f1, f2)),
            )
        })
        .collect();

    let mut content = String::from("floor1,floor2,region,b1s,b2s\n");
    let mut failures = Vec::new();
    for (f1, f2, result) in results {
        match result {
            Ok(eq) => content.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_sig(f1),
                fmt_sig(f2),
                eq.region,
                fmt_sig(eq.allocation.sp1.small),
                fmt_sig(eq.allocation.sp2.small),
            )),
            Err(e) => failures.push(format!("floors ({}, {}): {e}", fmt_sig(f1), fmt_sig(f2))),
        }
    }
    write_out(sink(args, &scenario).as_deref(), &content)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Solver(format!(
            "{} grid points failed; first: {}",
            failures.len(),
            failures[0]
        )))
    }
}

fn sweep_cmd(args: &CommonArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let params = scenario.market_params()?;
    let b1_initial = scenario.sp_initial(0)?;
    let b2_initial = scenario.sp_initial(1)?;
    let b_new = match args.b_new {
        Some(b) => b,
        None => match &scenario.regulator {
            Some(r) => r.b_new,
            None => {
                return Err(CliError::Input(
                    "regulator.b_new: missing (or pass --b-new)".into(),
                ))
            }
        },
    };
    let n = args
        .grid
        .or_else(|| scenario.regulator.as_ref().and_then(|r| r.grid))
        .unwrap_or(201);
    if n < 2 {
        return Err(CliError::Input(
            "--grid: need at least 2 sweep points".into(),
        ));
    }
    let reg = RegulatorScenario::new(params, b1_initial, b2_initial, b_new)?;

    let mut content = String::from("b1_new,b2_new,sw_wo_star,sw_w_star,sw_w_ne,region,rev1,rev2\n");
    let mut failures = Vec::new();
    for row in sweep(&reg, n) {
        match row {
            Ok(r) => content.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_sig(r.b1_new),
                fmt_sig(r.b2_new),
                fmt_sig(r.sw_wo_star),
                fmt_sig(r.sw_w_star),
                fmt_sig(r.sw_w_ne),
                r.region,
                fmt_sig(r.revenue_1),
                fmt_sig(r.revenue_2),
            )),
            Err(e) => failures.push(e.to_string()),
        }
    }
    write_out(sink(args, &scenario).as_deref(), &content)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Solver(format!(
            "{} sweep points failed; first: {}",
            failures.len(),
            failures[0]
        )))
    }
}

fn verify(args: &CommonArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let (params, b1, b2, floors) = duopoly_inputs(args, &scenario)?;
    let mut lines = Vec::new();
    let mut all_ok = true;

    // closed-form optimal split vs exhaustive welfare search on the pooled
    // bandwidth
    let pooled = b1 + b2;
    let pooled_floor = (floors.floor1 + floors.floor2).min(pooled);
    let split = optimal_split(&params, pooled, pooled_floor)?;
    let search = GridSpec::new(10_001, 1e-9).map_err(CliError::from)?;
    let (grid_small, _) = grid_social_opt(&params, pooled, pooled_floor, &search)?;
    let step = search.step(pooled - pooled_floor).max(f64::MIN_POSITIVE);
    let split_gap = (split.allocation.small - grid_small).abs();
    let ok = split_gap <= step;
    all_ok &= ok;
    lines.push(format!(
        "optimal split vs welfare grid: |{} - {}| = {} ({} grid step) [{}]",
        fmt_sig(split.allocation.small),
        fmt_sig(grid_small),
        fmt_sig(split_gap),
        fmt_sig(split_gap / step),
        if ok { "ok" } else { "MISMATCH" }
    ));

    // equilibrium certification against unilateral grid deviations
    let eq = solve_ne(&params, b1, b2, &floors)?;
    let epsilon = 1e-4 * eq.revenue_1.abs().max(eq.revenue_2.abs()).max(1e-12);
    let cert_grid = GridSpec::new(500, epsilon).map_err(CliError::from)?;
    let cert = certify_epsilon_ne(&params, &eq.allocation, &floors, &cert_grid);
    all_ok &= cert.certified;
    lines.push(format!(
        "epsilon-Nash certificate: max unilateral improvement {} vs epsilon {} [{}]",
        fmt_sig(cert.max_improvement),
        fmt_sig(epsilon),
        if cert.certified { "ok" } else { "MISMATCH" }
    ));

    // analytic best responses vs exhaustive search at the equilibrium
    for (label, own, opp, floor) in [
        ("SP1", eq.allocation.sp1, eq.allocation.sp2, floors.floor1),
        ("SP2", eq.allocation.sp2, eq.allocation.sp1, floors.floor2),
    ] {
        let analytic = hetnet_market::best_response(&params, &opp, own.total, floor);
        let gridded = grid_best_response(&params, &opp, own.total, floor, &search);
        let step = search.step(own.total - floor).max(f64::MIN_POSITIVE);
        let gap = (analytic - gridded).abs();
        let ok = gap <= 2.0 * step;
        all_ok &= ok;
        lines.push(format!(
            "best response {label} vs grid: |{} - {}| = {} [{}]",
            fmt_sig(analytic),
            fmt_sig(gridded),
            fmt_sig(gap),
            if ok { "ok" } else { "MISMATCH" }
        ));
    }

    lines.push(format!(
        "verification {}",
        if all_ok { "passed" } else { "FAILED" }
    ));
    let mut content = lines.join("\n");
    content.push('\n');
    write_out(sink(args, &scenario).as_deref(), &content)?;
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Solver(
            "oracle cross-check found mismatches".into(),
        ))
    }
}
