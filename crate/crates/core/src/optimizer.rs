//! Day-ahead cost minimization.
//!
//! Given consumption and generation forecasts, prices and a battery, finds
//! the 24-hour schedule of grid purchases, PV sold fractions and battery
//! charge/discharge rates that minimizes the daily bill:
//!
//! ```text
//! min Σ_h  q_h·buy(h) − p_h·P(h)·sell(h)      (prices per kWh, energy in Wh)
//! s.t. q_h = Y(h) + B_h − (1 − p_h)·P(h)       hourly energy balance
//!      q_h ≥ 0,  p_h ∈ [0,1],  B_h ∈ [−max_discharge, max_charge]
//!      0 ≤ E_h ≤ capacity
//! ```
//!
//! The conditional battery dynamic (charging is lossy, discharging is not)
//! is linearized by splitting `B_h` into a charge part `c_h ≥ 0` and a
//! discharge part `d_h ≥ 0` with `E_h = E_{h−1} + η·c_h − d_h`. Because
//! η ≤ 1 and prices are nonnegative, optimal solutions avoid simultaneous
//! charge and discharge except in degenerate zero-price cases, which a
//! post-solve repair pass cancels without changing the cost.
//!
//! Stored energy may never be exported: discharge is capped by the hourly
//! consumption (`d_h ≤ Y(h)`), so the battery only ever displaces purchases.
//! Charging from the grid is allowed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::{HourlyProfile, PricingScheme, ProfileKind, HOURS_PER_DAY};
use crate::simplex::{solve_from_basis, LinearProgram};

/// Tolerance on constraint residuals, in Wh.
pub const BALANCE_TOLERANCE_WH: f64 = 1e-6;

/// Battery parameters. Rates are energy moved per hour (Wh); `efficiency`
/// is the charging efficiency η, so storing `c` Wh drawn from the bus yields
/// `η·c` Wh of battery content.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatterySpec {
    pub capacity_wh: f64,
    pub max_charge_wh: f64,
    pub max_discharge_wh: f64,
    pub efficiency: f64,
    pub initial_energy_wh: f64,
}

impl BatterySpec {
    pub fn new(
        capacity_wh: f64,
        max_charge_wh: f64,
        max_discharge_wh: f64,
        efficiency: f64,
        initial_energy_wh: f64,
    ) -> Result<Self> {
        let spec = Self {
            capacity_wh,
            max_charge_wh,
            max_discharge_wh,
            efficiency,
            initial_energy_wh,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidInput {
            what: "battery spec",
            reason,
        };
        if !(self.capacity_wh >= 0.0 && self.capacity_wh.is_finite()) {
            return Err(bad(format!("capacity must be >= 0, got {}", self.capacity_wh)));
        }
        if self.max_charge_wh < 0.0 || self.max_discharge_wh < 0.0 {
            return Err(bad("charge/discharge rates must be >= 0".into()));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(bad(format!(
                "efficiency must be in (0, 1], got {}",
                self.efficiency
            )));
        }
        if self.initial_energy_wh < 0.0 || self.initial_energy_wh > self.capacity_wh {
            return Err(bad(format!(
                "initial energy {} outside [0, {}]",
                self.initial_energy_wh, self.capacity_wh
            )));
        }
        Ok(())
    }

    /// Battery with no storage at all.
    pub fn none() -> Self {
        Self {
            capacity_wh: 0.0,
            max_charge_wh: 0.0,
            max_discharge_wh: 0.0,
            efficiency: 1.0,
            initial_energy_wh: 0.0,
        }
    }
}

/// Battery energy content after one hour at `rate` (Wh, positive = charge).
///
/// Charging stores `η·rate`; discharging removes exactly the delivered
/// energy, so a negative rate depletes the content one for one.
pub fn battery_step(e_prev: f64, rate: f64, efficiency: f64) -> f64 {
    debug_assert!(e_prev >= 0.0);
    if rate >= 0.0 {
        e_prev + efficiency * rate
    } else {
        e_prev + rate
    }
}

/// Optimizer decisions for one hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourPlan {
    /// Grid purchase q_h (Wh).
    pub grid_purchase_wh: f64,
    /// Fraction p_h of the hour's PV power sold to the grid.
    pub sold_fraction: f64,
    /// Net battery rate B_h (Wh, positive = charge).
    pub battery_rate_wh: f64,
    /// Battery content E_h at the end of the hour (Wh).
    pub energy_wh: f64,
}

/// A committed day-ahead schedule plus its planned cost in EUR.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayAheadPlan {
    pub hours: Vec<HourPlan>,
    pub planned_cost_eur: f64,
}

impl DayAheadPlan {
    pub fn horizon(&self) -> usize {
        self.hours.len()
    }
}

/// A full day-ahead instance.
#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    pub consumption: HourlyProfile,
    pub forecast_generation: HourlyProfile,
    pub pricing: PricingScheme,
    pub battery: BatterySpec,
}

impl OptimizationProblem {
    pub fn new(
        consumption: HourlyProfile,
        forecast_generation: HourlyProfile,
        pricing: PricingScheme,
        battery: BatterySpec,
    ) -> Result<Self> {
        if consumption.kind() != ProfileKind::Consumption {
            return Err(Error::InvalidInput {
                what: "optimization problem",
                reason: format!("consumption profile has kind {:?}", consumption.kind()),
            });
        }
        if forecast_generation.kind() != ProfileKind::Generation {
            return Err(Error::InvalidInput {
                what: "optimization problem",
                reason: format!(
                    "generation profile has kind {:?}",
                    forecast_generation.kind()
                ),
            });
        }
        battery.validate()?;
        Ok(Self {
            consumption,
            forecast_generation,
            pricing,
            battery,
        })
    }
}

/// Solves the 24-hour day-ahead problem to global LP optimality.
pub fn solve_day_ahead(problem: &OptimizationProblem) -> Result<DayAheadPlan> {
    solve_schedule(
        problem.consumption.values(),
        problem.forecast_generation.values(),
        problem.pricing.buy.values(),
        problem.pricing.sell.values(),
        &problem.battery,
    )
}

/// Evaluates the planned objective: Σ q·buy − p·P·sell, converted Wh → kWh.
pub fn plan_cost(plan: &DayAheadPlan, pricing: &PricingScheme, generation: &HourlyProfile) -> f64 {
    assert_eq!(plan.horizon(), HOURS_PER_DAY, "plan_cost expects a 24-hour plan");
    plan.hours
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let buy = pricing.buy.values()[i];
            let sell = pricing.sell.values()[i];
            let gen = generation.values()[i];
            (h.grid_purchase_wh * buy - h.sold_fraction * gen * sell) / 1000.0
        })
        .sum()
}

/// Solves the scheduling LP over an arbitrary horizon (one slot per entry).
///
/// `solve_day_ahead` delegates here with the 24-hour profiles; shorter
/// horizons are useful for exhaustive cross-checks.
pub fn solve_schedule(
    consumption: &[f64],
    generation: &[f64],
    buy_price: &[f64],
    sell_price: &[f64],
    battery: &BatterySpec,
) -> Result<DayAheadPlan> {
    let horizon = consumption.len();
    assert!(horizon > 0);
    assert_eq!(generation.len(), horizon);
    assert_eq!(buy_price.len(), horizon);
    assert_eq!(sell_price.len(), horizon);
    battery.validate()?;

    let eta = battery.efficiency;
    // Variable layout: q | p | c | d | e, each a block of `horizon`.
    let (q0, p0, c0, d0, e0) = (0, horizon, 2 * horizon, 3 * horizon, 4 * horizon);
    let n = 5 * horizon;

    let mut objective = vec![0.0; n];
    let lower = vec![0.0; n];
    let mut upper = vec![f64::INFINITY; n];
    for h in 0..horizon {
        objective[q0 + h] = buy_price[h] / 1000.0;
        objective[p0 + h] = -generation[h] * sell_price[h] / 1000.0;
        upper[p0 + h] = 1.0;
        upper[c0 + h] = battery.max_charge_wh;
        // stored energy may only serve local consumption, never exports
        upper[d0 + h] = battery.max_discharge_wh.min(consumption[h]);
        upper[e0 + h] = battery.capacity_wh;
    }

    let mut rows = Vec::with_capacity(2 * horizon);
    let mut rhs = Vec::with_capacity(2 * horizon);
    // Energy balance: q − c + d − P·p = Y − P.
    for h in 0..horizon {
        let mut row = vec![0.0; n];
        row[q0 + h] = 1.0;
        row[c0 + h] = -1.0;
        row[d0 + h] = 1.0;
        row[p0 + h] = -generation[h];
        rows.push(row);
        rhs.push(consumption[h] - generation[h]);
    }
    // Battery dynamics: e_h − e_{h−1} − η·c_h + d_h = 0 (e_{−1} is a constant).
    for h in 0..horizon {
        let mut row = vec![0.0; n];
        row[e0 + h] = 1.0;
        if h > 0 {
            row[e0 + h - 1] = -1.0;
        }
        row[c0 + h] = -eta;
        row[d0 + h] = 1.0;
        rows.push(row);
        rhs.push(if h == 0 { battery.initial_energy_wh } else { 0.0 });
    }

    // Feasible warm start: buy everything (p at 1, battery idle), so each
    // balance row is carried by its q and each dynamics row by its e.
    let mut basis = Vec::with_capacity(2 * horizon);
    basis.extend((0..horizon).map(|h| q0 + h));
    basis.extend((0..horizon).map(|h| e0 + h));
    let at_upper: Vec<usize> = (0..horizon).map(|h| p0 + h).collect();

    let lp = LinearProgram {
        objective,
        rows,
        rhs,
        lower,
        upper,
    };
    let sol = solve_from_basis(&lp, &basis, &at_upper)?;

    // Extract decisions, clamped onto their boxes to shed solver roundoff.
    let mut hours = Vec::with_capacity(horizon);
    let mut energy = battery.initial_energy_wh;
    let mut cost = 0.0;
    for h in 0..horizon {
        let mut sold = sol.x[p0 + h].clamp(0.0, 1.0);
        if generation[h] == 0.0 {
            sold = 0.0; // no power to sell; normalize the free variable
        }
        let mut charge = sol.x[c0 + h].clamp(0.0, battery.max_charge_wh);
        let mut discharge = sol.x[d0 + h].clamp(0.0, battery.max_discharge_wh.min(consumption[h]));

        // Repair pass: cancel overlapping charge/discharge, which the LP can
        // produce only in degenerate zero-price cases. Reducing charge by t
        // and discharge by η·t keeps every E_h unchanged; the grid purchase
        // drops by t·(1−η), so it must stay nonnegative.
        if charge > 0.0 && discharge > 0.0 {
            let q_pre =
                (consumption[h] + charge - discharge - (1.0 - sold) * generation[h]).max(0.0);
            let mut t = charge.min(discharge / eta);
            if eta < 1.0 {
                t = t.min(q_pre / (1.0 - eta));
            }
            charge -= t;
            discharge -= eta * t;
            if charge < BALANCE_TOLERANCE_WH {
                charge = 0.0;
            }
            if discharge < BALANCE_TOLERANCE_WH {
                discharge = 0.0;
            }
        }

        let rate = charge - discharge;
        energy += eta * charge - discharge;
        if energy < -BALANCE_TOLERANCE_WH || energy > battery.capacity_wh + BALANCE_TOLERANCE_WH {
            return Err(Error::SolverFailure(format!(
                "battery trajectory violates capacity at hour {}: {energy}",
                h + 1
            )));
        }
        energy = energy.clamp(0.0, battery.capacity_wh);

        let q = consumption[h] + rate - (1.0 - sold) * generation[h];
        if q < -BALANCE_TOLERANCE_WH {
            return Err(Error::SolverFailure(format!(
                "negative grid purchase {q} at hour {}",
                h + 1
            )));
        }
        let q = q.max(0.0);

        cost += (q * buy_price[h] - sold * generation[h] * sell_price[h]) / 1000.0;
        hours.push(HourPlan {
            grid_purchase_wh: q,
            sold_fraction: sold,
            battery_rate_wh: rate,
            energy_wh: energy,
        });
    }

    Ok(DayAheadPlan {
        hours,
        planned_cost_eur: cost,
    })
}
