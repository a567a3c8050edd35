//! Per-checkpoint summary table with normalized columns, plus plain
//! two-column plot-data files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ProcessSpec;
use super::results::{Column, ResultsFile};
use super::CliError;
use crate::fitkit::{fit_log_power, fit_power};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportOptions {
    /// `(b, c)` in `mean (ln n)^-b n^-c` for planar processes.
    pub mean_exponents: Option<(f64, f64)>,
    /// `f` in `sd n^-f` for planar processes.
    pub sd_exponent: Option<f64>,
    /// Directory for plot-data files; none are written when unset.
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: u64,
    pub samples: u64,
    pub mean: f64,
    pub sd: Option<f64>,
    pub se_mean: Option<f64>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub norm_mean: Option<f64>,
    pub norm_sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub process: String,
    /// How the normalized columns were formed.
    pub normalization: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# process: {}", self.process).unwrap();
        for line in &self.normalization {
            writeln!(out, "# {line}").unwrap();
        }
        writeln!(
            out,
            "{:>10} {:>8} {:>14} {:>12} {:>10} {:>9} {:>9} {:>10} {:>10}",
            "n", "samples", "mean", "sd", "se_mean", "skewness", "kurtosis", "norm_mean", "norm_sd"
        )
        .unwrap();
        let opt = |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |v| format!("{v:.prec$}"));
        for r in &self.rows {
            writeln!(
                out,
                "{:>10} {:>8} {:>14.4} {:>12} {:>10} {:>9} {:>9} {:>10} {:>10}",
                r.n,
                r.samples,
                r.mean,
                opt(r.sd, 4),
                opt(r.se_mean, 4),
                opt(r.skewness, 4),
                opt(r.kurtosis, 4),
                opt(r.norm_mean, 4),
                opt(r.norm_sd, 4),
            )
            .unwrap();
        }
        out
    }

    /// One file per column with at least one value: `# n <column>` then
    /// whitespace-delimited pairs.
    pub fn write_plot_data(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let columns: [(&str, fn(&ReportRow) -> Option<f64>); 6] = [
            ("mean", |r| Some(r.mean)),
            ("sd", |r| r.sd),
            ("skewness", |r| r.skewness),
            ("kurtosis", |r| r.kurtosis),
            ("norm_mean", |r| r.norm_mean),
            ("norm_sd", |r| r.norm_sd),
        ];
        let mut written = Vec::new();
        for (name, get) in columns {
            let mut body = format!("# n {name}\n");
            let mut any = false;
            for r in &self.rows {
                if let Some(v) = get(r) {
                    writeln!(body, "{} {v}", r.n).unwrap();
                    any = true;
                }
            }
            if any {
                let path = dir.join(format!("{name}.dat"));
                fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

/// `(n, value) -> normalized value`.
type Scale = Box<dyn Fn(f64, f64) -> f64>;

pub fn report(file: &ResultsFile, opts: &ReportOptions) -> Result<Report, CliError> {
    file.validate()?;
    let mut normalization = Vec::new();
    let (norm_mean, norm_sd): (Scale, Option<Scale>) =
        match file.meta.process {
            ProcessSpec::Multiline { .. } => {
                let c0 = file.meta.process.sqrt_coefficient().expect("multiline");
                normalization.push(format!("norm_mean = ({c0} sqrt(n) - mean) n^(-1/6)"));
                normalization.push("norm_sd = sd n^(-1/6)".into());
                (
                    Box::new(move |n, m| (c0 * n.sqrt() - m) * n.powf(-1.0 / 6.0)),
                    Some(Box::new(|n, s| s * n.powf(-1.0 / 6.0))),
                )
            }
            ProcessSpec::Plane { .. } => {
                let mean_exp = opts.mean_exponents.map(|e| (e, "given")).or_else(|| {
                    let f = fit_log_power(&file.series(Column::Mean).ok()?).ok()?;
                    Some(((f.param("b")?.estimate, f.param("c")?.estimate), "fitted"))
                });
                let sd_exp = opts.sd_exponent.map(|f| (f, "given")).or_else(|| {
                    let f = fit_power(&file.series(Column::Sd).ok()?).ok()?;
                    Some((f.param("f")?.estimate, "fitted"))
                });
                let nm: Scale = match mean_exp {
                    Some(((b, c), how)) => {
                        normalization.push(format!("norm_mean = mean (ln n)^(-{b}) n^(-{c}) ({how})"));
                        Box::new(move |n, m| m * n.ln().powf(-b) * n.powf(-c))
                    }
                    None => {
                        normalization.push("norm_mean omitted: no exponents given and the fit failed".into());
                        Box::new(|_, _| f64::NAN)
                    }
                };
                let ns: Option<Scale> = match sd_exp {
                    Some((f, how)) => {
                        normalization.push(format!("norm_sd = sd n^(-{f}) ({how})"));
                        Some(Box::new(move |n, s| s * n.powf(-f)))
                    }
                    None => {
                        normalization.push("norm_sd omitted: no exponent given and the fit failed".into());
                        None
                    }
                };
                (nm, ns)
            }
        };

    let rows = file
        .rows
        .iter()
        .map(|r| {
            let n = r.n as f64;
            let s = r.acc.summary().ok();
            let nm = norm_mean(n, r.acc.mean);
            ReportRow {
                n: r.n,
                samples: r.acc.count,
                mean: r.acc.mean,
                sd: s.map(|s| s.sd),
                se_mean: s.map(|s| s.se_mean),
                skewness: s.and_then(|s| s.skewness),
                kurtosis: s.and_then(|s| s.kurtosis),
                norm_mean: nm.is_finite().then_some(nm),
                norm_sd: match (&norm_sd, s) {
                    (Some(f), Some(s)) => Some(f(n, s.sd)),
                    _ => None,
                },
            }
        })
        .collect();
    let report = Report {
        process: file.meta.process.to_string(),
        normalization,
        rows,
    };
    if let Some(dir) = &opts.plot_dir {
        report.write_plot_data(dir)?;
    }
    Ok(report)
}
