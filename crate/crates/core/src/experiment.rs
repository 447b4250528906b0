//! The sensitivity study: hourly irradiance errors plus battery capacity as
//! inputs, realized daily cost as the output.
//!
//! Each (shift case, capacity class) pair is one study case. A case maps
//! unit-hypercube Saltelli rows to physical scenarios — each window hour's
//! irradiance drawn uniformly within a relative half-width `ε` of the
//! (shifted) mean curve, capacity uniformly within its class — then runs
//! plan-then-execute per scenario and estimates Sobol indices from the
//! resulting costs. All cases reuse the same Saltelli design so they differ
//! only in the scenario mapping, not sampling noise.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{solve_day_ahead, BatterySpec, OptimizationProblem};
use crate::profiles::{
    irradiance_to_power, load_profile, shift_profile, HourlyProfile, PanelSpec, PricingScheme,
    ProfileKind, HOURS_PER_DAY,
};
use crate::sensitivity::saltelli::{saltelli_sample, ModelOutputs, SaltelliDesign};
use crate::sensitivity::sobol::MAX_DIMENSION;
use crate::sensitivity::{estimate_indices, SensitivityResult};
use crate::simulator::execute_plan;

/// Inclusive range of hours whose irradiance is treated as uncertain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HourWindow {
    pub start: usize,
    pub end: usize,
}

impl HourWindow {
    pub fn len(&self) -> usize {
        if self.end < self.start {
            0
        } else {
            self.end - self.start + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn hours(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

fn default_window() -> HourWindow {
    // 5am through 7pm; irradiance is negligible outside
    HourWindow { start: 5, end: 19 }
}

fn default_error_halfwidth() -> f64 {
    0.3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilePaths {
    pub consumption: PathBuf,
    pub irradiance: PathBuf,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelConfig {
    pub area_m2: f64,
    pub performance_ratio: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingConfig {
    pub buy_eur_per_kwh: f64,
    pub sell_eur_per_kwh: f64,
}

/// Battery parameters shared by every scenario; capacity comes from the
/// sampled class.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryRatesConfig {
    pub max_charge_wh: f64,
    pub max_discharge_wh: f64,
    pub efficiency: f64,
    #[serde(default)]
    pub initial_energy_wh: f64,
}

/// How each scenario is turned into a daily cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    /// Plan once on the shifted mean forecast, then execute the committed
    /// plan against the scenario's realized generation (default).
    #[default]
    FixedPlan,
    /// Re-solve the optimizer with the scenario's generation as the
    /// forecast; planned and realized cost coincide.
    Replan,
}

/// Full study description, deserialized from a JSON document with
/// snake_case keys. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base_sample_count: usize,
    #[serde(default = "default_window")]
    pub irradiance_hours: HourWindow,
    #[serde(default = "default_error_halfwidth")]
    pub error_halfwidth: f64,
    pub capacity_classes: Vec<(f64, f64)>,
    pub shift_cases: Vec<i64>,
    pub profiles: ProfilePaths,
    pub panel: PanelConfig,
    pub pricing: PricingConfig,
    pub battery: BatteryRatesConfig,
    #[serde(default)]
    pub mode: EvaluationMode,
    #[serde(default)]
    pub parallelism: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file; profile paths are resolved relative to the
    /// config file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json_str(&text)?;
        if let Some(dir) = path.parent() {
            if config.profiles.consumption.is_relative() {
                config.profiles.consumption = dir.join(&config.profiles.consumption);
            }
            if config.profiles.irradiance.is_relative() {
                config.profiles.irradiance = dir.join(&config.profiles.irradiance);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidConfig(reason));
        if self.base_sample_count < 2 {
            return bad(format!(
                "base_sample_count must be at least 2, got {}",
                self.base_sample_count
            ));
        }
        let w = &self.irradiance_hours;
        if w.start < 1 || w.end > HOURS_PER_DAY || w.start > w.end {
            return bad(format!(
                "irradiance_hours {}..{} outside 1..=24",
                w.start, w.end
            ));
        }
        if !(0.0..=1.0).contains(&self.error_halfwidth) {
            return bad(format!(
                "error_halfwidth must be in [0, 1], got {}",
                self.error_halfwidth
            ));
        }
        if self.capacity_classes.is_empty() {
            return bad("at least one capacity class is required".into());
        }
        for &(lo, hi) in &self.capacity_classes {
            if !(0.0 <= lo && lo <= hi) {
                return bad(format!("capacity class ({lo}, {hi}) must satisfy 0 <= lo <= hi"));
            }
            if self.battery.initial_energy_wh > lo {
                return bad(format!(
                    "initial battery energy {} exceeds class lower bound {lo}",
                    self.battery.initial_energy_wh
                ));
            }
        }
        if self.shift_cases.is_empty() {
            return bad("at least one shift case is required".into());
        }
        for &s in &self.shift_cases {
            if s.abs() > 12 {
                return bad(format!("shift case {s} exceeds +/-12 hours"));
            }
        }
        let d = self.input_count();
        if 2 * d > MAX_DIMENSION {
            return bad(format!(
                "window yields {d} inputs; the Sobol table supports at most {}",
                MAX_DIMENSION / 2
            ));
        }
        PanelSpec::new(self.panel.area_m2, self.panel.performance_ratio)?;
        if self.pricing.buy_eur_per_kwh < 0.0 || self.pricing.sell_eur_per_kwh < 0.0 {
            return bad("prices must be nonnegative".into());
        }
        // capacity is validated per scenario; check the shared rate fields here
        BatterySpec::new(
            f64::MAX,
            self.battery.max_charge_wh,
            self.battery.max_discharge_wh,
            self.battery.efficiency,
            self.battery.initial_energy_wh,
        )?;
        Ok(())
    }

    /// Number of sensitivity inputs: one per window hour plus capacity.
    pub fn input_count(&self) -> usize {
        self.irradiance_hours.len() + 1
    }

    /// Column labels: `h05..h19` for the default window, then `capacity`.
    pub fn labels(&self) -> Vec<String> {
        self.irradiance_hours
            .hours()
            .map(|h| format!("h{h:02}"))
            .chain(std::iter::once("capacity".to_string()))
            .collect()
    }
}

/// One sampled model input: irradiance per window hour plus a capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioVector {
    pub irradiance: Vec<f64>,
    pub capacity_wh: f64,
}

/// Maps a unit-hypercube point to a physical scenario.
///
/// Window hour j gets `max(0, μ_j·(1 + ε·(2u_j − 1)))` — a uniform relative
/// perturbation of half-width ε around the mean — and the last coordinate
/// selects the capacity uniformly within its class.
pub fn map_unit_to_scenario(
    u: &[f64],
    mean_irradiance: &HourlyProfile,
    window: &HourWindow,
    class: (f64, f64),
    error_halfwidth: f64,
) -> ScenarioVector {
    assert_eq!(u.len(), window.len() + 1);
    let irradiance = window
        .hours()
        .zip(u)
        .map(|(h, &uj)| {
            let mean = mean_irradiance.value_at(h);
            (mean * (1.0 + error_halfwidth * (2.0 * uj - 1.0))).max(0.0)
        })
        .collect();
    let (lo, hi) = class;
    ScenarioVector {
        irradiance,
        capacity_wh: lo + (hi - lo) * u[u.len() - 1],
    }
}

/// Precomputed per-case inputs shared by every scenario evaluation.
#[derive(Debug, Clone)]
pub struct CaseContext {
    pub consumption: HourlyProfile,
    /// Shifted mean irradiance; scenarios perturb this curve.
    pub mean_irradiance: HourlyProfile,
    /// Generation forecast handed to the planner (shifted mean through panel).
    pub forecast_generation: HourlyProfile,
    pub window: HourWindow,
    pub panel: PanelSpec,
    pub pricing: PricingScheme,
    pub battery: BatteryRatesConfig,
    pub mode: EvaluationMode,
}

impl CaseContext {
    fn battery_with(&self, capacity_wh: f64) -> Result<BatterySpec> {
        BatterySpec::new(
            capacity_wh,
            self.battery.max_charge_wh,
            self.battery.max_discharge_wh,
            self.battery.efficiency,
            self.battery.initial_energy_wh,
        )
    }

    /// Realized generation profile: scenario irradiance through the panel
    /// inside the window, zero outside it.
    fn realized_generation(&self, scenario: &ScenarioVector) -> Result<HourlyProfile> {
        let factor = self.panel.area_m2 * self.panel.performance_ratio;
        let mut values = [0.0; HOURS_PER_DAY];
        for (h, irr) in self.window.hours().zip(&scenario.irradiance) {
            values[h - 1] = irr * factor;
        }
        HourlyProfile::new(ProfileKind::Generation, values)
    }
}

/// Runs one scenario through the pipeline and returns the daily cost in EUR.
pub fn evaluate_scenario(scenario: &ScenarioVector, ctx: &CaseContext) -> Result<f64> {
    let battery = ctx.battery_with(scenario.capacity_wh)?;
    let realized = ctx.realized_generation(scenario)?;
    match ctx.mode {
        EvaluationMode::FixedPlan => {
            let problem = OptimizationProblem::new(
                ctx.consumption.clone(),
                ctx.forecast_generation.clone(),
                ctx.pricing.clone(),
                battery,
            )?;
            let plan = solve_day_ahead(&problem)?;
            let outcome = execute_plan(&plan, &realized, &ctx.consumption, &ctx.pricing, &battery)?;
            Ok(outcome.realized_cost_eur)
        }
        EvaluationMode::Replan => {
            let problem = OptimizationProblem::new(
                ctx.consumption.clone(),
                realized,
                ctx.pricing.clone(),
                battery,
            )?;
            Ok(solve_day_ahead(&problem)?.planned_cost_eur)
        }
    }
}

/// Identifies one study case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseKey {
    pub shift: i64,
    pub capacity_lo: f64,
    pub capacity_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub key: CaseKey,
    pub indices: SensitivityResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaggedCase {
    pub key: CaseKey,
    pub reason: String,
}

/// Everything a study run produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub labels: Vec<String>,
    pub base_sample_count: usize,
    pub input_count: usize,
    pub error_halfwidth: f64,
    pub mode: EvaluationMode,
    pub cases: Vec<CaseResult>,
    pub flagged: Vec<FlaggedCase>,
    pub evaluations: usize,
    pub wall_time_seconds: f64,
}

/// Runs the full study: one Saltelli design, evaluated per case, estimated
/// into index tables. Scenario evaluations fan out over a worker pool sized
/// by `config.parallelism` (default: available parallelism); outputs are
/// gathered in design-row order, so results are identical for any pool size.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let started = Instant::now();

    let consumption = load_profile(&config.profiles.consumption, ProfileKind::Consumption)?;
    let base_irradiance = load_profile(&config.profiles.irradiance, ProfileKind::Irradiance)?;
    let panel = PanelSpec::new(config.panel.area_m2, config.panel.performance_ratio)?;
    let pricing = PricingScheme::fixed(
        config.pricing.buy_eur_per_kwh,
        config.pricing.sell_eur_per_kwh,
    )?;

    let d = config.input_count();
    let design = saltelli_sample(d, config.base_sample_count)?;
    let labels = config.labels();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;

    let mut cases = Vec::new();
    let mut flagged = Vec::new();
    let mut evaluations = 0usize;

    for &shift in &config.shift_cases {
        let mean_irradiance = shift_profile(&base_irradiance, shift)?;
        let forecast_generation = irradiance_to_power(&mean_irradiance, &panel)?;
        for &class in &config.capacity_classes {
            let key = CaseKey {
                shift,
                capacity_lo: class.0,
                capacity_hi: class.1,
            };
            let ctx = CaseContext {
                consumption: consumption.clone(),
                mean_irradiance: mean_irradiance.clone(),
                forecast_generation: forecast_generation.clone(),
                window: config.irradiance_hours,
                panel,
                pricing: pricing.clone(),
                battery: config.battery,
                mode: config.mode,
            };

            let scenarios: Vec<ScenarioVector> = design
                .iter_rows()
                .map(|u| {
                    map_unit_to_scenario(
                        u,
                        &ctx.mean_irradiance,
                        &ctx.window,
                        class,
                        config.error_halfwidth,
                    )
                })
                .collect();

            let outputs: Result<Vec<f64>> = pool.install(|| {
                scenarios
                    .par_iter()
                    .map(|s| evaluate_scenario(s, &ctx))
                    .collect()
            });
            let outputs = outputs?;
            evaluations += outputs.len();

            let blocks = ModelOutputs::from_flat(&design, outputs);
            match estimate_indices(&labels, &blocks) {
                Ok(indices) => cases.push(CaseResult { key, indices }),
                Err(Error::VarianceZero) => flagged.push(FlaggedCase {
                    key,
                    reason: "VarianceZero: constant cost over the sampled scenarios".into(),
                }),
                Err(e) => return Err(e),
            }
        }
    }

    Ok(ExperimentOutcome {
        labels,
        base_sample_count: config.base_sample_count,
        input_count: d,
        error_halfwidth: config.error_halfwidth,
        mode: config.mode,
        cases,
        flagged,
        evaluations,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Returns the design used by [`run_experiment`] for the given config;
/// exposed so callers can reason about the evaluation budget up front.
pub fn design_for(config: &ExperimentConfig) -> Result<SaltelliDesign> {
    saltelli_sample(config.input_count(), config.base_sample_count)
}

fn format_cell(v: f64) -> String {
    format!("{v:.4}")
}

fn index_table_csv(labels: &[String], cases: &[CaseResult], pick: impl Fn(&SensitivityResult) -> &[f64]) -> String {
    let mut out = String::from("shift,capacity_lo,capacity_hi");
    for label in labels {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for case in cases {
        out.push_str(&format!(
            "{},{},{}",
            case.key.shift, case.key.capacity_lo, case.key.capacity_hi
        ));
        for v in pick(&case.indices) {
            out.push(',');
            out.push_str(&format_cell(*v));
        }
        out.push('\n');
    }
    out
}

fn second_order_csv(labels: &[String], result: &SensitivityResult) -> String {
    let mut out = String::new();
    for label in labels {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for v in &result.second_order[i] {
            out.push(',');
            out.push_str(&format_cell(*v));
        }
        out.push('\n');
    }
    out
}

fn case_file_stem(key: &CaseKey) -> String {
    format!("{}_{}-{}", key.shift, key.capacity_lo, key.capacity_hi)
}

/// Writes the CSV tables and `summary.json` into `out_dir`, returning the
/// paths written. Re-running with identical inputs overwrites the CSV files
/// byte for byte.
pub fn write_outputs(outcome: &ExperimentOutcome, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut emit = |name: String, content: String| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };

    emit(
        "first_order.csv".into(),
        index_table_csv(&outcome.labels, &outcome.cases, |r| &r.first_order),
    )?;
    emit(
        "total_order.csv".into(),
        index_table_csv(&outcome.labels, &outcome.cases, |r| &r.total_order),
    )?;
    for case in &outcome.cases {
        emit(
            format!("second_order_{}.csv", case_file_stem(&case.key)),
            second_order_csv(&outcome.labels, &case.indices),
        )?;
    }
    emit("summary.json".into(), serde_json::to_string_pretty(outcome)? + "\n")?;
    Ok(written)
}
