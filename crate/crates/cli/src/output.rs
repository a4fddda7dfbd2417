//! Deterministic output: every number prints with 12 significant digits, a
//! `.` decimal separator and `\n` line endings, so identical inputs produce
//! byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::scenario::ScenarioFile;
use crate::{CliError, CommonArgs, OutputFormat};

/// 12 significant digits; fixed-point in the ordinary range, scientific
/// outside it.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=14).contains(&exp) {
        format!("{x:.11e}")
    } else {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

/// Where a command's output goes: `--out`, then the scenario's output path,
/// then stdout.
pub fn sink(args: &CommonArgs, scenario: &ScenarioFile) -> Option<PathBuf> {
    args.out.clone().or_else(|| {
        scenario
            .output
            .as_ref()
            .and_then(|o| o.path.as_ref())
            .map(PathBuf::from)
    })
}

pub fn resolve_format(
    args: &CommonArgs,
    scenario: &ScenarioFile,
    default: OutputFormat,
) -> Result<OutputFormat, CliError> {
    if let Some(f) = args.format {
        return Ok(f);
    }
    match scenario.output.as_ref().and_then(|o| o.format.as_deref()) {
        None => Ok(default),
        Some("csv") => Ok(OutputFormat::Csv),
        Some("human") => Ok(OutputFormat::Human),
        Some(other) => Err(CliError::Input(format!(
            "output.format: unknown value `{other}` (expected `csv` or `human`)"
        ))),
    }
}

pub fn write_out(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Input(format!("output `{}`: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}
