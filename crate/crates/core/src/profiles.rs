//! Hourly time-series data: consumption, irradiance, generation and prices.
//!
//! All quantities live on a fixed 24-hour grid (hours 1..=24). A power value
//! is treated as constant over its hour, so 1 W sustained for one hour is
//! 1 Wh; energy bookkeeping throughout the crate is in Wh.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Hours in the planning horizon.
pub const HOURS_PER_DAY: usize = 24;

/// Positive netload (Wh) after hour 16 of the bundled synthetic profiles
/// (`data/consumption.csv`, `data/irradiance.csv`, 20 m² panel at 15%
/// performance ratio). Frozen once from direct summation; capacity classes
/// above this value never bind in the day-ahead plan.
pub const BUNDLED_NETLOAD_AFTER_16_WH: f64 = 10_870.0;

/// What physical quantity a profile holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Consumption,
    Irradiance,
    Generation,
    BuyPrice,
    SellPrice,
}

impl ProfileKind {
    pub fn unit(self) -> &'static str {
        match self {
            ProfileKind::Consumption | ProfileKind::Generation => "W",
            ProfileKind::Irradiance => "W/m2",
            ProfileKind::BuyPrice | ProfileKind::SellPrice => "EUR/kWh",
        }
    }
}

/// 24 hourly values of one physical quantity.
///
/// Invariants enforced at construction: exactly 24 entries, all finite and
/// nonnegative. Immutable afterwards, so values can be shared freely across
/// concurrent evaluations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HourlyProfile {
    kind: ProfileKind,
    values: [f64; HOURS_PER_DAY],
}

impl HourlyProfile {
    pub fn new(kind: ProfileKind, values: [f64; HOURS_PER_DAY]) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidInput {
                    what: "hourly profile",
                    reason: format!("non-finite value at hour {}", i + 1),
                });
            }
            if *v < 0.0 {
                return Err(Error::InvalidInput {
                    what: "hourly profile",
                    reason: format!("negative value {v} at hour {}", i + 1),
                });
            }
        }
        Ok(Self { kind, values })
    }

    /// Profile holding the same value at every hour.
    pub fn flat(kind: ProfileKind, value: f64) -> Result<Self> {
        Self::new(kind, [value; HOURS_PER_DAY])
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn values(&self) -> &[f64; HOURS_PER_DAY] {
        &self.values
    }

    /// Value at `hour` in 1..=24.
    pub fn value_at(&self, hour: usize) -> f64 {
        assert!((1..=HOURS_PER_DAY).contains(&hour), "hour {hour} out of 1..=24");
        self.values[hour - 1]
    }
}

/// PV installation: collector area and overall irradiance-to-AC conversion
/// factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PanelSpec {
    pub area_m2: f64,
    pub performance_ratio: f64,
}

impl PanelSpec {
    pub fn new(area_m2: f64, performance_ratio: f64) -> Result<Self> {
        if !(area_m2 > 0.0 && area_m2.is_finite()) {
            return Err(Error::InvalidInput {
                what: "panel spec",
                reason: format!("area must be positive, got {area_m2}"),
            });
        }
        if !(performance_ratio > 0.0 && performance_ratio <= 1.0) {
            return Err(Error::InvalidInput {
                what: "panel spec",
                reason: format!("performance ratio must be in (0, 1], got {performance_ratio}"),
            });
        }
        Ok(Self {
            area_m2,
            performance_ratio,
        })
    }
}

/// Buying and selling price profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricingScheme {
    pub buy: HourlyProfile,
    pub sell: HourlyProfile,
}

impl PricingScheme {
    pub fn new(buy: HourlyProfile, sell: HourlyProfile) -> Result<Self> {
        if buy.kind() != ProfileKind::BuyPrice || sell.kind() != ProfileKind::SellPrice {
            return Err(Error::InvalidInput {
                what: "pricing scheme",
                reason: format!(
                    "expected buy_price/sell_price profiles, got {:?}/{:?}",
                    buy.kind(),
                    sell.kind()
                ),
            });
        }
        Ok(Self { buy, sell })
    }

    /// Flat tariff: one buying and one selling price for the whole day.
    pub fn fixed(buy_eur_per_kwh: f64, sell_eur_per_kwh: f64) -> Result<Self> {
        Self::new(
            HourlyProfile::flat(ProfileKind::BuyPrice, buy_eur_per_kwh)?,
            HourlyProfile::flat(ProfileKind::SellPrice, sell_eur_per_kwh)?,
        )
    }
}

/// Parses a profile CSV: header-less, exactly 24 `hour,value` lines with the
/// hour ascending 1..24.
pub fn load_profile(path: &Path, kind: ProfileKind) -> Result<HourlyProfile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_profile(&text, kind).map_err(|reason| match reason {
        ParseFailure::Malformed(reason) => Error::MalformedFile {
            path: path.to_path_buf(),
            reason,
        },
        ParseFailure::Negative { hour, value } => Error::NegativeValue {
            path: path.to_path_buf(),
            hour,
            value,
        },
    })
}

enum ParseFailure {
    Malformed(String),
    Negative { hour: usize, value: f64 },
}

fn parse_profile(text: &str, kind: ProfileKind) -> std::result::Result<HourlyProfile, ParseFailure> {
    let mut values = [0.0; HOURS_PER_DAY];
    let mut count = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            return Err(ParseFailure::Malformed(format!("empty line {}", lineno + 1)));
        }
        if count == HOURS_PER_DAY {
            return Err(ParseFailure::Malformed(format!(
                "expected {HOURS_PER_DAY} rows, found more"
            )));
        }
        let (hour_str, value_str) = line.split_once(',').ok_or_else(|| {
            ParseFailure::Malformed(format!("line {}: missing comma", lineno + 1))
        })?;
        let hour: usize = hour_str.trim().parse().map_err(|_| {
            ParseFailure::Malformed(format!("line {}: bad hour {hour_str:?}", lineno + 1))
        })?;
        if hour != count + 1 {
            return Err(ParseFailure::Malformed(format!(
                "line {}: expected hour {}, found {hour}",
                lineno + 1,
                count + 1
            )));
        }
        let value: f64 = value_str.trim().parse().map_err(|_| {
            ParseFailure::Malformed(format!("line {}: bad value {value_str:?}", lineno + 1))
        })?;
        if !value.is_finite() {
            return Err(ParseFailure::Malformed(format!(
                "line {}: non-finite value",
                lineno + 1
            )));
        }
        if value < 0.0 {
            return Err(ParseFailure::Negative { hour, value });
        }
        values[count] = value;
        count += 1;
    }
    if count != HOURS_PER_DAY {
        return Err(ParseFailure::Malformed(format!(
            "expected {HOURS_PER_DAY} rows, found {count}"
        )));
    }
    // invariants already checked line by line
    Ok(HourlyProfile { kind, values })
}

/// Converts irradiance (W/m²) to AC generation (W) through a panel.
pub fn irradiance_to_power(irr: &HourlyProfile, panel: &PanelSpec) -> Result<HourlyProfile> {
    if irr.kind() != ProfileKind::Irradiance {
        return Err(Error::InvalidInput {
            what: "irradiance profile",
            reason: format!("expected irradiance kind, got {:?}", irr.kind()),
        });
    }
    let factor = panel.area_m2 * panel.performance_ratio;
    let mut values = [0.0; HOURS_PER_DAY];
    for (out, v) in values.iter_mut().zip(irr.values()) {
        *out = v * factor;
    }
    HourlyProfile::new(ProfileKind::Generation, values)
}

/// Shifts a profile in time. Negative offsets move the curve left (peak
/// earlier), positive offsets right (peak later); hours whose source falls
/// outside the day are filled with 0 rather than wrapping, since irradiance
/// outside the day is physically zero.
pub fn shift_profile(p: &HourlyProfile, offset: i64) -> Result<HourlyProfile> {
    if offset.abs() > 12 {
        return Err(Error::OffsetTooLarge(offset));
    }
    let mut values = [0.0; HOURS_PER_DAY];
    for h in 1..=HOURS_PER_DAY as i64 {
        let src = h - offset;
        if (1..=HOURS_PER_DAY as i64).contains(&src) {
            values[(h - 1) as usize] = p.values[(src - 1) as usize];
        }
    }
    Ok(HourlyProfile {
        kind: p.kind,
        values,
    })
}

/// Total consumption after `cutoff_hour` that generation cannot cover:
/// sum over hours h > cutoff of max(0, Y(h) − P(h)), in Wh.
///
/// `cutoff_hour` 0 sums the whole day; 24 yields 0.
pub fn positive_netload_after(
    consumption: &HourlyProfile,
    generation: &HourlyProfile,
    cutoff_hour: usize,
) -> f64 {
    assert!(cutoff_hour <= HOURS_PER_DAY, "cutoff hour {cutoff_hour} out of 0..=24");
    consumption
        .values()
        .iter()
        .zip(generation.values())
        .skip(cutoff_hour)
        .map(|(y, p)| (y - p).max(0.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile_from(kind: ProfileKind, vals: &[(usize, f64)]) -> HourlyProfile {
        let mut values = [0.0; HOURS_PER_DAY];
        for &(h, v) in vals {
            values[h - 1] = v;
        }
        HourlyProfile::new(kind, values).unwrap()
    }

    fn csv_24(f: impl Fn(usize) -> f64) -> String {
        (1..=24).map(|h| format!("{h},{}\n", f(h))).collect()
    }

    #[test]
    fn parse_all_zero_profile() {
        let text = csv_24(|_| 0.0);
        let p = parse_profile(&text, ProfileKind::Consumption).ok().unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn parse_plain_values() {
        let text: String = (1..=24).map(|h| format!("{h},{}\n", 400 + 100 * h)).collect();
        let p = parse_profile(&text, ProfileKind::Consumption).ok().unwrap();
        assert_eq!(p.value_at(1), 500.0);
        assert_eq!(p.value_at(2), 600.0);
        assert_eq!(p.value_at(24), 2800.0);
    }

    #[test]
    fn parse_rejects_short_file() {
        let text: String = (1..=23).map(|h| format!("{h},0\n")).collect();
        assert!(matches!(
            parse_profile(&text, ProfileKind::Consumption),
            Err(ParseFailure::Malformed(_))
        ));
    }

    #[test]
    fn parse_rejects_extra_rows_and_bad_hours() {
        let long: String = (1..=25).map(|h| format!("{h},0\n")).collect();
        assert!(parse_profile(&long, ProfileKind::Consumption).is_err());

        let dup = csv_24(|_| 0.0).replacen("5,0", "4,0", 1);
        assert!(parse_profile(&dup, ProfileKind::Consumption).is_err());

        let nonnum = csv_24(|_| 0.0).replacen("7,0", "7,abc", 1);
        assert!(parse_profile(&nonnum, ProfileKind::Consumption).is_err());
    }

    #[test]
    fn parse_rejects_negative_value() {
        let text = csv_24(|h| if h == 13 { -1.5 } else { 0.0 });
        assert!(matches!(
            parse_profile(&text, ProfileKind::Consumption),
            Err(ParseFailure::Negative { hour: 13, .. })
        ));
    }

    #[test]
    fn load_profile_missing_file() {
        let err = load_profile(Path::new("/nonexistent/p.csv"), ProfileKind::Consumption);
        assert!(matches!(err, Err(Error::Io { .. })));
    }

    #[test]
    fn irradiance_conversion() {
        let panel = PanelSpec::new(10.0, 0.15).unwrap();
        let irr = HourlyProfile::flat(ProfileKind::Irradiance, 1000.0).unwrap();
        let p = irradiance_to_power(&irr, &panel).unwrap();
        assert!(p.values().iter().all(|&v| v == 1500.0));
        assert_eq!(p.kind(), ProfileKind::Generation);

        let zero = HourlyProfile::flat(ProfileKind::Irradiance, 0.0).unwrap();
        assert!(irradiance_to_power(&zero, &panel)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));

        let irr800 = HourlyProfile::flat(ProfileKind::Irradiance, 800.0).unwrap();
        assert_eq!(irradiance_to_power(&irr800, &panel).unwrap().value_at(3), 1200.0);
    }

    #[test]
    fn irradiance_conversion_rejects_wrong_kind() {
        let panel = PanelSpec::new(10.0, 0.15).unwrap();
        let cons = HourlyProfile::flat(ProfileKind::Consumption, 100.0).unwrap();
        assert!(irradiance_to_power(&cons, &panel).is_err());
    }

    #[test]
    fn shift_identity_and_left() {
        let p = profile_from(ProfileKind::Generation, &[(12, 1000.0)]);
        assert_eq!(shift_profile(&p, 0).unwrap(), p);

        let left = shift_profile(&p, -2).unwrap();
        assert_eq!(left.value_at(10), 1000.0);
        assert_eq!(left.value_at(12), 0.0);
    }

    #[test]
    fn shift_right_fills_with_zero() {
        let p = profile_from(ProfileKind::Generation, &[(1, 7.0)]);
        let right = shift_profile(&p, 1).unwrap();
        assert_eq!(right.value_at(1), 0.0);
        assert_eq!(right.value_at(2), 7.0);
    }

    #[test]
    fn shift_rejects_large_offsets() {
        let p = HourlyProfile::flat(ProfileKind::Generation, 1.0).unwrap();
        assert!(matches!(shift_profile(&p, 13), Err(Error::OffsetTooLarge(13))));
        assert!(matches!(shift_profile(&p, -13), Err(Error::OffsetTooLarge(-13))));
        assert!(shift_profile(&p, 12).is_ok());
    }

    #[test]
    fn netload_examples() {
        let y = profile_from(ProfileKind::Consumption, &[(1, 500.0), (2, 500.0), (3, 500.0)]);
        let p = profile_from(ProfileKind::Generation, &[(1, 600.0), (2, 400.0)]);
        assert_eq!(positive_netload_after(&y, &p, 0), 600.0);

        let big = HourlyProfile::flat(ProfileKind::Generation, 1000.0).unwrap();
        assert_eq!(positive_netload_after(&y, &big, 0), 0.0);
    }

    /// The reference constant is the direct summation over the bundled
    /// profiles; recompute it from the shipped CSV files.
    #[test]
    fn bundled_profiles_reproduce_frozen_netload() {
        let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        let consumption =
            load_profile(&data.join("consumption.csv"), ProfileKind::Consumption).unwrap();
        let irradiance =
            load_profile(&data.join("irradiance.csv"), ProfileKind::Irradiance).unwrap();
        let panel = PanelSpec::new(20.0, 0.15).unwrap();
        let generation = irradiance_to_power(&irradiance, &panel).unwrap();
        assert_eq!(
            positive_netload_after(&consumption, &generation, 16),
            BUNDLED_NETLOAD_AFTER_16_WH
        );
    }

    #[test]
    fn panel_spec_validation() {
        assert!(PanelSpec::new(0.0, 0.15).is_err());
        assert!(PanelSpec::new(10.0, 0.0).is_err());
        assert!(PanelSpec::new(10.0, 1.5).is_err());
        assert!(PanelSpec::new(10.0, 1.0).is_ok());
    }

    #[test]
    fn profile_invariants() {
        assert!(HourlyProfile::flat(ProfileKind::Consumption, -1.0).is_err());
        assert!(HourlyProfile::flat(ProfileKind::Consumption, f64::NAN).is_err());
    }

    fn arb_values() -> impl Strategy<Value = [f64; HOURS_PER_DAY]> {
        prop::array::uniform24(0.0f64..5000.0)
    }

    proptest! {
        #[test]
        fn shift_preserves_surviving_values(values in arb_values(), offset in -12i64..=12) {
            let p = HourlyProfile::new(ProfileKind::Generation, values).unwrap();
            let shifted = shift_profile(&p, offset).unwrap();
            // every nonzero output value must occur at least as often in the input
            for v in shifted.values().iter().filter(|v| **v != 0.0) {
                let in_count = p.values().iter().filter(|w| *w == v).count();
                let out_count = shifted.values().iter().filter(|w| *w == v).count();
                prop_assert!(out_count <= in_count);
            }
        }

        #[test]
        fn shift_roundtrip_outside_fill(values in arb_values(), k in 0i64..=12) {
            let p = HourlyProfile::new(ProfileKind::Generation, values).unwrap();
            let back = shift_profile(&shift_profile(&p, -k).unwrap(), k).unwrap();
            for h in (k as usize + 1)..=HOURS_PER_DAY {
                prop_assert_eq!(back.value_at(h), p.value_at(h));
            }
        }

        #[test]
        fn netload_non_increasing_in_cutoff(y in arb_values(), p in arb_values()) {
            let y = HourlyProfile::new(ProfileKind::Consumption, y).unwrap();
            let p = HourlyProfile::new(ProfileKind::Generation, p).unwrap();
            let mut prev = positive_netload_after(&y, &p, 0);
            for cutoff in 1..=HOURS_PER_DAY {
                let cur = positive_netload_after(&y, &p, cutoff);
                prop_assert!(cur <= prev + 1e-9);
                prev = cur;
            }
            prop_assert_eq!(positive_netload_after(&y, &p, HOURS_PER_DAY), 0.0);
        }

        #[test]
        fn irradiance_to_power_is_linear(values in arb_values(), c in 0.0f64..4.0) {
            let panel = PanelSpec::new(12.5, 0.15).unwrap();
            let irr = HourlyProfile::new(ProfileKind::Irradiance, values).unwrap();
            let scaled_vals = values.map(|v| v * c);
            let scaled = HourlyProfile::new(ProfileKind::Irradiance, scaled_vals).unwrap();
            let base = irradiance_to_power(&irr, &panel).unwrap();
            let out = irradiance_to_power(&scaled, &panel).unwrap();
            for h in 1..=HOURS_PER_DAY {
                let expect = base.value_at(h) * c;
                prop_assert!((out.value_at(h) - expect).abs() <= 1e-9 * expect.abs().max(1.0));
            }
        }
    }
}
