//! `config.json`: what to mutate, how, and where to write results.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::HwConfig;
use crate::mutagen::{GenerationOptions, DEFAULT_STRIDE};
use crate::operators::{OperatorKind, DEFAULT_DELAY_STEPS};
use crate::strategies::StrategyKind;

pub const DEFAULT_STEP_BUDGET: u64 = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyChoice {
    Schemata,
    Traditional,
    Both,
}

impl StrategyChoice {
    pub fn strategies(self) -> Vec<StrategyKind> {
        match self {
            StrategyChoice::Schemata => vec![StrategyKind::Schemata],
            StrategyChoice::Traditional => vec![StrategyKind::Traditional],
            StrategyChoice::Both => vec![StrategyKind::Schemata, StrategyKind::Traditional],
        }
    }
}

impl FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "schemata" => Ok(StrategyChoice::Schemata),
            "traditional" => Ok(StrategyChoice::Traditional),
            "both" => Ok(StrategyChoice::Both),
            _ => Err(format!(
                "unknown strategy `{s}` (expected schemata, traditional or both)"
            )),
        }
    }
}

/// Whether a mutant's row keeps running after its first killing test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Policy {
    #[serde(rename = "fullFail")]
    FullFail,
    #[serde(rename = "fastFail")]
    FastFail,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::FullFail => "fullFail",
            Policy::FastFail => "fastFail",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fullFail" => Ok(Policy::FullFail),
            "fastFail" => Ok(Policy::FastFail),
            _ => Err(format!(
                "unknown policy `{s}` (expected fullFail or fastFail)"
            )),
        }
    }
}

fn default_operators() -> Vec<String> {
    OperatorKind::ALL
        .iter()
        .map(|k| k.acronym().to_string())
        .collect()
}

fn default_stride() -> u32 {
    DEFAULT_STRIDE
}

fn default_strategy() -> StrategyChoice {
    StrategyChoice::Both
}

fn default_policy() -> Policy {
    Policy::FullFail
}

fn default_step_budget() -> u64 {
    DEFAULT_STEP_BUDGET
}

fn default_delay() -> i64 {
    DEFAULT_DELAY_STEPS
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CampaignConfig {
    pub project_dir: PathBuf,
    #[serde(default = "default_operators")]
    pub operator_name_list: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_stride")]
    pub stride: u32,
    #[serde(default = "default_strategy")]
    pub strategy: StrategyChoice,
    #[serde(default = "default_policy")]
    pub policy: Policy,
    #[serde(default = "default_step_budget")]
    pub step_budget: u64,
    #[serde(default = "default_delay")]
    pub delay_steps: i64,
    #[serde(default)]
    pub exclude_list: Vec<String>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub hw_config: HwConfig,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl CampaignConfig {
    pub fn new(project_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            project_dir: project_dir.into(),
            operator_name_list: default_operators(),
            seed: 0,
            stride: DEFAULT_STRIDE,
            strategy: StrategyChoice::Both,
            policy: Policy::FullFail,
            step_budget: DEFAULT_STEP_BUDGET,
            delay_steps: DEFAULT_DELAY_STEPS,
            exclude_list: Vec::new(),
            output_dir: output_dir.into(),
            hw_config: HwConfig::default(),
        }
    }

    /// Reads and validates a config file; relative paths are resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base)
    }

    pub fn from_json(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut config: CampaignConfig = serde_json::from_str(text)?;
        config.project_dir = base.join(&config.project_dir);
        config.output_dir = base.join(&config.output_dir);
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let ops = self.operators()?;
        let distinct: BTreeSet<_> = ops.iter().collect();
        if distinct.len() != ops.len() {
            return Err(ConfigError::Invalid(
                "operatorNameList lists an operator twice".into(),
            ));
        }
        if self.step_budget == 0 {
            return Err(ConfigError::Invalid("stepBudget must be positive".into()));
        }
        if self.stride == 0 {
            return Err(ConfigError::Invalid("stride must be positive".into()));
        }
        if self.delay_steps < 0 {
            return Err(ConfigError::Invalid(
                "delaySteps must not be negative".into(),
            ));
        }
        self.hw_config
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn operators(&self) -> Result<Vec<OperatorKind>, ConfigError> {
        OperatorKind::parse_list(&self.operator_name_list)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn generation_options(&self) -> Result<GenerationOptions, ConfigError> {
        Ok(GenerationOptions {
            operators: self.operators()?,
            seed: self.seed,
            stride: self.stride,
            delay_steps: self.delay_steps,
            exclude: self.exclude_list.iter().cloned().collect(),
        })
    }

    /// The effective configuration as JSON; loading it again from any
    /// directory yields the same config when the paths are absolute.
    pub fn echo(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plain data serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = CampaignConfig::from_json(r#"{"projectDir": "app"}"#, Path::new("/cfg")).unwrap();
        assert_eq!(c.project_dir, Path::new("/cfg/app"));
        assert_eq!(c.output_dir, Path::new("/cfg/out"));
        assert_eq!(c.operators().unwrap(), OperatorKind::ALL);
        assert_eq!(c.stride, 1000);
        assert_eq!(c.policy, Policy::FullFail);
        assert_eq!(c.strategy, StrategyChoice::Both);
    }

    #[test]
    fn unknown_keys_and_operators_are_rejected() {
        let base = Path::new("/cfg");
        assert!(CampaignConfig::from_json(r#"{"projectDir": "a", "colour": 1}"#, base).is_err());
        let err = CampaignConfig::from_json(
            r#"{"projectDir": "a", "operatorNameList": ["BMA", "XYZ"]}"#,
            base,
        )
        .unwrap_err();
        assert!(err.to_string().contains("XYZ"), "{err}");
        assert!(
            CampaignConfig::from_json(r#"{"projectDir": "a", "stepBudget": 0}"#, base).is_err()
        );
        assert!(CampaignConfig::from_json(
            r#"{"projectDir": "a", "policy": "sometimesFail"}"#,
            base
        )
        .is_err());
    }

    #[test]
    fn echo_round_trips() {
        let c = CampaignConfig::from_json(
            r#"{"projectDir": "a", "operatorNameList": ["NI"], "seed": 9, "policy": "fastFail", "excludeList": ["x.mini"]}"#,
            Path::new("/cfg"),
        )
        .unwrap();
        let again = CampaignConfig::from_json(&c.echo(), Path::new("/elsewhere")).unwrap();
        assert_eq!(c, again);
    }
}
