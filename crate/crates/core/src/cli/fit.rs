use std::fs;
use std::path::Path;

use super::results::{Column, ResultsFile};
use super::CliError;
use crate::fitkit::{fit, FitForm, FitReport};

/// Default fixed exponent for `scaled-power`.
pub const DEFAULT_EXPONENT: f64 = 1.0 / 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub form: FitForm,
    pub column: Column,
    /// Overrides the leading coefficient taken from the file's process.
    pub c0: Option<f64>,
    pub exponent: Option<f64>,
}

impl FitOptions {
    pub fn new(form: FitForm, column: Column) -> Self {
        Self {
            form,
            column,
            c0: None,
            exponent: None,
        }
    }
}

pub fn fit_results(file: &ResultsFile, opts: &FitOptions) -> Result<FitReport, CliError> {
    let points = file.series(opts.column)?;
    let c0 = match (opts.form, opts.c0) {
        (_, Some(c0)) => c0,
        (FitForm::CorrectedSqrt, None) => file.meta.process.sqrt_coefficient().ok_or_else(|| {
            CliError::Usage(format!(
                "corrected-sqrt needs --c0 for {}",
                file.meta.process
            ))
        })?,
        (_, None) => 0.0,
    };
    let exponent = opts.exponent.unwrap_or(DEFAULT_EXPONENT);
    Ok(fit(opts.form, &points, c0, exponent)?)
}

/// Reads `input`, fits, and writes pretty JSON to `out` if given. Returns
/// the JSON text.
pub fn cmd_fit(input: &Path, opts: &FitOptions, out: Option<&Path>) -> Result<String, CliError> {
    let file = ResultsFile::read(input)?;
    let report = fit_results(&file, opts)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(out) = out {
        fs::write(out, format!("{json}\n")).map_err(|e| CliError::io(out, e))?;
    }
    Ok(json)
}
