//! Executes a committed day-ahead plan against realized generation.
//!
//! The planned battery schedule is held (clamped to physical feasibility)
//! and grid exchange is settled ex-post from the hourly energy balance,
//! rather than holding the planned sold fraction: holding the fraction
//! against a different realized generation could force buying and selling
//! in the same hour, while a single net settlement cannot. The realized
//! daily cost is the black-box output of the sensitivity study.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimizer::{battery_step, BatterySpec, DayAheadPlan};
use crate::profiles::{HourlyProfile, PricingScheme, HOURS_PER_DAY};

/// Settlement of one hour of execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourOutcome {
    /// Energy bought from the grid (Wh).
    pub bought_wh: f64,
    /// Energy sold to the grid (Wh).
    pub sold_wh: f64,
    /// Battery rate actually executed after clamping (Wh, positive = charge).
    pub executed_battery_rate_wh: f64,
    /// Battery content at the end of the hour (Wh).
    pub energy_wh: f64,
}

/// Result of running a plan against realized conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizedOutcome {
    pub hours: Vec<HourOutcome>,
    pub realized_cost_eur: f64,
}

/// Runs `plan` hour by hour against `realized_generation`.
///
/// Each hour: (1) clamp the planned battery rate to what the battery can
/// physically do — charging is limited by the rate bound and the remaining
/// headroom `(capacity − E)/η`, discharging by the rate bound, the stored
/// energy and the hour's consumption; (2) advance the battery; (3) settle
/// the net energy balance with the grid, buying a positive net at the buy
/// price or selling a negative net at the sell price.
pub fn execute_plan(
    plan: &DayAheadPlan,
    realized_generation: &HourlyProfile,
    consumption: &HourlyProfile,
    pricing: &PricingScheme,
    battery: &BatterySpec,
) -> Result<RealizedOutcome> {
    if plan.horizon() != HOURS_PER_DAY {
        return Err(Error::PlanMismatch {
            expected: HOURS_PER_DAY,
            actual: plan.horizon(),
        });
    }
    let eta = battery.efficiency;
    let mut energy = battery.initial_energy_wh;
    let mut cost = 0.0;
    let mut hours = Vec::with_capacity(HOURS_PER_DAY);

    for (h, hour_plan) in plan.hours.iter().enumerate() {
        let demand = consumption.values()[h];
        let generation = realized_generation.values()[h];

        let planned = hour_plan.battery_rate_wh;
        let executed = if planned >= 0.0 {
            let headroom = (battery.capacity_wh - energy).max(0.0) / eta;
            planned.min(battery.max_charge_wh).min(headroom)
        } else {
            let limit = battery.max_discharge_wh.min(energy).min(demand);
            -((-planned).min(limit))
        };
        energy = battery_step(energy, executed, eta).clamp(0.0, battery.capacity_wh);

        // Charging draws the full `c` from the bus (the η loss stays inside
        // the battery); discharging contributes the delivered energy.
        let net = demand + executed - generation;
        let (bought, sold) = if net >= 0.0 { (net, 0.0) } else { (0.0, -net) };
        cost += (bought * pricing.buy.values()[h] - sold * pricing.sell.values()[h]) / 1000.0;

        hours.push(HourOutcome {
            bought_wh: bought,
            sold_wh: sold,
            executed_battery_rate_wh: executed,
            energy_wh: energy,
        });
    }

    Ok(RealizedOutcome {
        hours,
        realized_cost_eur: cost,
    })
}

/// Realized minus planned cost, in EUR.
pub fn cost_gap(plan: &DayAheadPlan, outcome: &RealizedOutcome) -> f64 {
    outcome.realized_cost_eur - plan.planned_cost_eur
}
