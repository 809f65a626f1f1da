//! `sweep-gradients`: analytic gradients across an α grid for plotting.

use std::fs;
use std::path::Path;

use alphagan_core::grad::{sweep_alpha, GradientSweepRow, Scenario};
use alphagan_core::report::{gradient_csv, write_text};

use crate::error::{CliError, CliResult};

pub const GRADIENTS_FILE: &str = "gradients.csv";

/// Reads `pr,pg,d` lines. Blank lines, `#` comments and a leading header row are skipped.
pub fn parse_scenarios(text: &str) -> CliResult<Vec<Scenario>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if out.is_empty() && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let bad = || {
            CliError::Usage(format!(
                "scenario line {}: expected pr,pg,d but found {line:?}",
                no + 1
            ))
        };
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?;
        let [pr, pg, d] = fields[..] else {
            return Err(bad());
        };
        out.push(
            Scenario::new(pr, pg, d)
                .map_err(|e| CliError::Usage(format!("scenario line {}: {e}", no + 1)))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Usage("scenario file has no rows".into()));
    }
    Ok(out)
}

pub fn load_scenarios(path: Option<&Path>) -> CliResult<Vec<Scenario>> {
    match path {
        Some(p) => parse_scenarios(&fs::read_to_string(p)?),
        None => Ok(Scenario::plotted()),
    }
}

pub fn sweep_gradients(
    scenarios: &[Scenario],
    alphas: &[f64],
    out: &Path,
) -> CliResult<Vec<GradientSweepRow>> {
    let rows = sweep_alpha(scenarios, alphas)?;
    write_text(&out.join(GRADIENTS_FILE), &gradient_csv(&rows))?;
    Ok(rows)
}
