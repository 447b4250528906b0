//! The `hems` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data (profiles,
//! configs), 3 computation failure. Every nonzero exit prints a diagnostic
//! on standard error. All numeric output uses 4 decimal places.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{run_experiment, write_outputs, ExperimentConfig, PricingConfig};
use crate::optimizer::{solve_day_ahead, BatterySpec, DayAheadPlan, OptimizationProblem};
use crate::profiles::{load_profile, PricingScheme, ProfileKind};
use crate::sensitivity::benchmarks::{
    ishigami_indices, ishigami_unit, linear_two_input, LINEAR_FIRST_ORDER,
};
use crate::sensitivity::{estimate_indices, evaluate_design, saltelli_sample};
use crate::simulator::{cost_gap, execute_plan, RealizedOutcome};

#[derive(Parser)]
#[command(
    name = "hems",
    version,
    about = "Day-ahead battery scheduling, dispatch simulation and global sensitivity analysis for a PV home"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the day-ahead schedule and write plan.json
    Optimize(OptimizeArgs),
    /// Plan, then execute against a realized generation profile
    Simulate(SimulateArgs),
    /// Run the sensitivity experiment described by a JSON config
    Sa(SaArgs),
    /// Check the index estimators against analytic test functions
    SobolTest(SobolTestArgs),
}

#[derive(Args)]
struct OptimizeArgs {
    /// Consumption profile CSV (24 lines of `hour,watts`)
    #[arg(long)]
    consumption: PathBuf,
    /// Forecast generation profile CSV (24 lines of `hour,watts`)
    #[arg(long)]
    generation: PathBuf,
    /// System config JSON with `battery` and `pricing` sections
    #[arg(long)]
    config: PathBuf,
    /// Directory for machine-readable artifacts (default: current directory)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    plan: OptimizeArgs,
    /// Realized generation profile CSV to execute the plan against
    #[arg(long)]
    realized: PathBuf,
}

#[derive(Args)]
struct SaArgs {
    /// Experiment config JSON
    #[arg(long)]
    config: PathBuf,
    /// Worker pool size (default: available parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (falls back to $HEMS_SA_OUT_DIR, then `.`)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SobolTestArgs {
    /// Base sample count N (tolerances are calibrated for N >= 1024)
    #[arg(long, default_value_t = 4096)]
    n: usize,
}

/// Parses arguments from the environment and runs the selected command,
/// returning the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here as non-errors
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Sa(args) => cmd_sa(&args),
        Command::SobolTest(args) => cmd_sobol_test(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_data_error() {
                2
            } else {
                3
            }
        }
    }
}

/// Battery plus pricing, as stored in the system config JSON.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemConfig {
    battery: BatteryConfig,
    pricing: PricingConfig,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatteryConfig {
    capacity_wh: f64,
    max_charge_wh: f64,
    max_discharge_wh: f64,
    efficiency: f64,
    #[serde(default)]
    initial_energy_wh: f64,
}

impl SystemConfig {
    fn load(path: &Path) -> Result<(BatterySpec, PricingScheme)> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: SystemConfig =
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let battery = BatterySpec::new(
            config.battery.capacity_wh,
            config.battery.max_charge_wh,
            config.battery.max_discharge_wh,
            config.battery.efficiency,
            config.battery.initial_energy_wh,
        )?;
        let pricing = PricingScheme::fixed(
            config.pricing.buy_eur_per_kwh,
            config.pricing.sell_eur_per_kwh,
        )?;
        Ok((battery, pricing))
    }
}

fn load_problem(args: &OptimizeArgs) -> Result<OptimizationProblem> {
    let consumption = load_profile(&args.consumption, ProfileKind::Consumption)?;
    let generation = load_profile(&args.generation, ProfileKind::Generation)?;
    let (battery, pricing) = SystemConfig::load(&args.config)?;
    OptimizationProblem::new(consumption, generation, pricing, battery)
}

fn out_dir(requested: &Option<PathBuf>) -> PathBuf {
    requested.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// 4-decimal EUR formatting; values rounding to zero lose their sign.
fn fmt_eur(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn print_plan(plan: &DayAheadPlan) {
    println!("hour  purchase_wh  sold_frac  battery_wh    energy_wh");
    for (h, hp) in plan.hours.iter().enumerate() {
        println!(
            "{:>4}  {:>11.4}  {:>9.4}  {:>10.4}  {:>11.4}",
            h + 1,
            hp.grid_purchase_wh,
            hp.sold_fraction,
            hp.battery_rate_wh,
            hp.energy_wh
        );
    }
    println!("planned cost: {:.4} EUR", plan.planned_cost_eur);
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<()> {
    let problem = load_problem(args)?;
    let plan = solve_day_ahead(&problem)?;
    print_plan(&plan);
    let path = write_json(&out_dir(&args.out_dir), "plan.json", &plan)?;
    println!("plan written to {}", path.display());
    Ok(())
}

/// Everything `simulate` learned, written to outcome.json.
#[derive(Serialize)]
struct SimulationReport<'a> {
    plan: &'a DayAheadPlan,
    outcome: &'a RealizedOutcome,
    cost_gap_eur: f64,
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let problem = load_problem(&args.plan)?;
    let realized = load_profile(&args.realized, ProfileKind::Generation)?;
    let plan = solve_day_ahead(&problem)?;
    let outcome = execute_plan(
        &plan,
        &realized,
        &problem.consumption,
        &problem.pricing,
        &problem.battery,
    )?;
    let gap = cost_gap(&plan, &outcome);
    println!("planned cost:  {} EUR", fmt_eur(plan.planned_cost_eur));
    println!("realized cost: {} EUR", fmt_eur(outcome.realized_cost_eur));
    println!("cost gap:      {} EUR", fmt_eur(gap));
    let report = SimulationReport {
        plan: &plan,
        outcome: &outcome,
        cost_gap_eur: gap,
    };
    let path = write_json(&out_dir(&args.plan.out_dir), "outcome.json", &report)?;
    println!("outcome written to {}", path.display());
    Ok(())
}

fn cmd_sa(args: &SaArgs) -> Result<()> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if args.workers.is_some() {
        config.parallelism = args.workers;
    }
    let dir = args
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("HEMS_SA_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let outcome = run_experiment(&config)?;
    let files = write_outputs(&outcome, &dir)?;

    for case in &outcome.cases {
        let mut ranked: Vec<(&str, f64)> = outcome
            .labels
            .iter()
            .map(String::as_str)
            .zip(case.indices.total_order.iter().copied())
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        let top: Vec<String> = ranked
            .iter()
            .take(3)
            .map(|(label, v)| format!("{label} ({v:.4})"))
            .collect();
        println!(
            "case shift={} capacity={}-{}: top total-order inputs: {}",
            case.key.shift,
            case.key.capacity_lo,
            case.key.capacity_hi,
            top.join(", ")
        );
    }
    for flag in &outcome.flagged {
        println!(
            "case shift={} capacity={}-{}: flagged ({})",
            flag.key.shift, flag.key.capacity_lo, flag.key.capacity_hi, flag.reason
        );
    }
    println!(
        "{} evaluations in {:.4} s; {} files written to {}",
        outcome.evaluations,
        outcome.wall_time_seconds,
        files.len(),
        dir.display()
    );
    Ok(())
}

fn cmd_sobol_test(args: &SobolTestArgs) -> Result<()> {
    let n = args.n;
    let enforce = n >= 1024;
    if !enforce {
        eprintln!("warning: tolerances are not meaningful at N = {n} (need N >= 1024); reporting estimates only");
    }
    let mut all_ok = true;
    let mut check = |name: &str, estimated: f64, analytic: f64, tol: f64| {
        let ok = (estimated - analytic).abs() <= tol;
        let verdict = if !enforce {
            "skipped"
        } else if ok {
            "pass"
        } else {
            "FAIL"
        };
        println!(
            "{name:<24} estimated {estimated:>8.4}  analytic {analytic:>8.4}  tol {tol:.4}  [{verdict}]"
        );
        if enforce && !ok {
            all_ok = false;
        }
    };

    println!("linear model Y = X1 + 2*X2 at N = {n}");
    let design = saltelli_sample(2, n)?;
    let outputs = evaluate_design(&design, linear_two_input);
    let labels = vec!["x1".to_string(), "x2".to_string()];
    let result = estimate_indices(&labels, &outputs)?;
    check("  S1", result.first_order[0], LINEAR_FIRST_ORDER[0], 0.02);
    check("  S2", result.first_order[1], LINEAR_FIRST_ORDER[1], 0.02);
    check("  S12 (pure)", result.second_order[0][1], 0.0, 0.02);

    println!("Ishigami (a=7, b=0.1) at N = {n}");
    let design = saltelli_sample(3, n)?;
    let outputs = evaluate_design(&design, ishigami_unit);
    let labels = vec!["x1".to_string(), "x2".to_string(), "x3".to_string()];
    let result = estimate_indices(&labels, &outputs)?;
    let analytic = ishigami_indices();
    for i in 0..3 {
        check(
            &format!("  S{}", i + 1),
            result.first_order[i],
            analytic.first[i],
            0.03,
        );
        check(
            &format!("  ST{}", i + 1),
            result.total_order[i],
            analytic.total[i],
            0.03,
        );
    }

    if !all_ok {
        return Err(Error::SolverFailure(
            "sensitivity self-test exceeded tolerances".into(),
        ));
    }
    Ok(())
}
