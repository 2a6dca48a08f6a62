//! Calculator-style energy and carbon estimate of a campaign's run time.
//!
//! The defaults describe a generic 4-core machine; they are configuration,
//! not measurements.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct HwConfig {
    pub cores: f64,
    pub power_per_core_w: f64,
    pub usage_factor: f64,
    #[serde(rename = "memoryGB")]
    pub memory_gb: f64,
    #[serde(rename = "powerPerGBW")]
    pub power_per_gb_w: f64,
    pub pue: f64,
    /// Grams of CO2e per kWh.
    pub carbon_intensity: f64,
}

impl Default for HwConfig {
    fn default() -> Self {
        Self {
            cores: 4.0,
            power_per_core_w: 15.8,
            usage_factor: 1.0,
            memory_gb: 16.0,
            power_per_gb_w: 0.3725,
            pue: 1.67,
            carbon_intensity: 253.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("hwConfig field `{0}` must be positive")]
pub struct NonPositiveField(pub &'static str);

impl HwConfig {
    pub fn validate(&self) -> Result<(), NonPositiveField> {
        let fields = [
            ("cores", self.cores),
            ("powerPerCoreW", self.power_per_core_w),
            ("usageFactor", self.usage_factor),
            ("memoryGB", self.memory_gb),
            ("powerPerGBW", self.power_per_gb_w),
            ("pue", self.pue),
            ("carbonIntensity", self.carbon_intensity),
        ];
        match fields
            .into_iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0))
        {
            Some((name, _)) => Err(NonPositiveField(name)),
            None => Ok(()),
        }
    }

    /// Average draw in watts, before the PUE multiplier.
    pub fn power_w(&self) -> f64 {
        self.cores * self.power_per_core_w * self.usage_factor
            + self.memory_gb * self.power_per_gb_w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CarbonEstimate {
    pub runtime_hours: f64,
    pub cores: f64,
    pub power_per_core_w: f64,
    pub usage_factor: f64,
    #[serde(rename = "memoryGB")]
    pub memory_gb: f64,
    #[serde(rename = "powerPerGBW")]
    pub power_per_gb_w: f64,
    pub pue: f64,
    pub carbon_intensity: f64,
    #[serde(rename = "energyKWh")]
    pub energy_kwh: f64,
    #[serde(rename = "carbonGCO2e")]
    pub carbon_gco2e: f64,
}

pub fn estimate(runtime_hours: f64, hw: &HwConfig) -> CarbonEstimate {
    let energy_kwh = runtime_hours * hw.power_w() * hw.pue / 1000.0;
    CarbonEstimate {
        runtime_hours,
        cores: hw.cores,
        power_per_core_w: hw.power_per_core_w,
        usage_factor: hw.usage_factor,
        memory_gb: hw.memory_gb,
        power_per_gb_w: hw.power_per_gb_w,
        pue: hw.pue,
        carbon_intensity: hw.carbon_intensity,
        energy_kwh,
        carbon_gco2e: energy_kwh * hw.carbon_intensity,
    }
}

/// `100 * (traditional - schemata) / schemata`.
pub fn percent_difference(schemata: f64, traditional: f64) -> f64 {
    100.0 * (traditional - schemata) / schemata
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CarbonReport {
    pub schemata: CarbonEstimate,
    pub traditional: CarbonEstimate,
    pub runtime_difference_percent: f64,
    pub energy_difference_percent: f64,
    pub carbon_difference_percent: f64,
}

pub fn carbon_report(schemata_hours: f64, traditional_hours: f64, hw: &HwConfig) -> CarbonReport {
    let schemata = estimate(schemata_hours, hw);
    let traditional = estimate(traditional_hours, hw);
    CarbonReport {
        runtime_difference_percent: percent_difference(schemata_hours, traditional_hours),
        energy_difference_percent: percent_difference(schemata.energy_kwh, traditional.energy_kwh),
        carbon_difference_percent: percent_difference(
            schemata.carbon_gco2e,
            traditional.carbon_gco2e,
        ),
        schemata,
        traditional,
    }
}
