//! Scenario files: market constants, provider bandwidths/floors, and the
//! regulator block. Unknown keys are rejected with the offending name.

use std::path::Path;

use hetnet_market::MarketParams;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub params: ParamsSection,
    #[serde(default)]
    pub sps: Vec<SpSection>,
    pub regulator: Option<RegulatorSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub alpha: f64,
    pub n_mobile: f64,
    pub n_fixed: f64,
    pub r0: f64,
    pub lambda_s: f64,
}

/// One provider: `total` licensed bandwidth for equilibrium runs, or
/// `initial` endowment for regulator sweeps.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpSection {
    pub total: Option<f64>,
    pub initial: Option<f64>,
    #[serde(default)]
    pub floor: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorSection {
    pub b_new: f64,
    pub grid: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Option<String>,
}

pub fn load(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("scenario `{}`: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("scenario `{}`: {e}", path.display())))
}

impl ScenarioFile {
    pub fn market_params(&self) -> Result<MarketParams, CliError> {
        let p = &self.params;
        Ok(MarketParams::new(
            p.alpha, p.n_mobile, p.n_fixed, p.r0, p.lambda_s,
        )?)
    }

    fn sp(&self, index: usize) -> Result<&SpSection, CliError> {
        self.sps.get(index).ok_or_else(|| {
            CliError::Input(format!(
                "sps: expected at least {} provider entries, found {}",
                index + 1,
                self.sps.len()
            ))
        })
    }

    pub fn sp_total(&self, index: usize) -> Result<f64, CliError> {
        self.sp(index)?.total.ok_or_else(|| {
            CliError::Input(format!(
                "sps[{index}].total: missing (required for this command)"
            ))
        })
    }

    pub fn sp_initial(&self, index: usize) -> Result<f64, CliError> {
        self.sp(index)?.initial.ok_or_else(|| {
            CliError::Input(format!(
                "sps[{index}].initial: missing (required for regulator sweeps)"
            ))
        })
    }

    pub fn sp_floor(&self, index: usize) -> Result<f64, CliError> {
        Ok(self.sp(index)?.floor)
    }
}
