//! Scaling-law fits with 95% confidence intervals.
//!
//! | form             | model                         | regression             |
//! |------------------|-------------------------------|------------------------|
//! | corrected-sqrt   | `y = c0 sqrt(n) + a n^(1/6)`  | closed form for `a`    |
//! | scaled-power     | `y = b n^e0`                  | closed form for `b`    |
//! | power            | `y = d n^f`                   | OLS on `ln y`          |
//! | log-power        | `y = a (ln n)^b n^c`          | OLS on `ln y`          |
//!
//! Logarithms are natural. MSE is always the mean squared residual in the
//! original `y` scale; `r_squared` is measured in the regression scale.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

/// Condition number of the column-normalized design above which a fit warns
/// about near-collinear regressors.
pub const COLLINEARITY_WARN: f64 = 1e4;

const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("no data points")]
    Empty,
    #[error("need at least {needed} points, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("need at least {needed} distinct n values, have {have}")]
    InsufficientDistinct { needed: usize, have: usize },
    #[error("y must be positive for a log-scale fit (got {0})")]
    NonPositive(f64),
    #[error("n must be at least {min} (got {n})")]
    NTooSmall { n: f64, min: f64 },
    #[error("singular design matrix")]
    SingularDesign,
    #[error("non-finite input value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitForm {
    CorrectedSqrt,
    ScaledPower,
    Power,
    LogPower,
}

impl fmt::Display for FitForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitForm::CorrectedSqrt => "corrected-sqrt",
            FitForm::ScaledPower => "scaled-power",
            FitForm::Power => "power",
            FitForm::LogPower => "log-power",
        })
    }
}

impl FromStr for FitForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corrected-sqrt" => Ok(FitForm::CorrectedSqrt),
            "scaled-power" => Ok(FitForm::ScaledPower),
            "power" => Ok(FitForm::Power),
            "log-power" => Ok(FitForm::LogPower),
            other => Err(format!("unknown fit form {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub name: String,
    pub estimate: f64,
    pub ci95: [f64; 2],
}

impl ParamEstimate {
    pub fn contains(&self, x: f64) -> bool {
        self.ci95[0] <= x && x <= self.ci95[1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FitForm,
    pub formula: String,
    pub params: Vec<ParamEstimate>,
    pub mse: f64,
    pub r_squared: f64,
    /// Residual degrees of freedom; zero means the intervals are degenerate.
    pub df: usize,
    /// Condition number of the column-normalized design (log-scale fits).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub condition_number: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
    /// `y - fitted`, original scale, in input order.
    pub residuals: Vec<f64>,
}

impl FitReport {
    pub fn param(&self, name: &str) -> Option<&ParamEstimate> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Two-sided 95% Student t quantile.
pub fn t_quantile_975(df: usize) -> f64 {
    if df == 0 {
        return f64::INFINITY;
    }
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("df > 0")
        .inverse_cdf(0.975)
}

fn check_finite(points: &[(f64, f64)]) -> Result<(), FitError> {
    if points.is_empty() {
        return Err(FitError::Empty);
    }
    if points.iter().any(|(n, y)| !n.is_finite() || !y.is_finite()) {
        return Err(FitError::NonFinite);
    }
    Ok(())
}

fn distinct_n(points: &[(f64, f64)]) -> usize {
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    ns.len()
}

fn mse(residuals: &[f64]) -> f64 {
    residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64
}

fn r_squared(observed: &[f64], residuals: &[f64]) -> f64 {
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    let sst: f64 = observed.iter().map(|y| (y - mean).powi(2)).sum();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    if sst > 0.0 {
        1.0 - sse / sst
    } else if sse == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

/// Least squares of `target` on a single regressor through the origin.
fn one_param(regressor: &[f64], target: &[f64]) -> (f64, f64, usize) {
    let sxx: f64 = regressor.iter().map(|x| x * x).sum();
    let sxy: f64 = regressor.iter().zip(target).map(|(x, y)| x * y).sum();
    let coef = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let sse: f64 = regressor
        .iter()
        .zip(target)
        .map(|(x, y)| (y - coef * x).powi(2))
        .sum();
    let df = target.len() - 1;
    let half = if df == 0 || sxx == 0.0 {
        0.0
    } else {
        t_quantile_975(df) * (sse / df as f64 / sxx).sqrt()
    };
    (coef, half, df)
}

fn degenerate_warning(df: usize, warnings: &mut Vec<String>) {
    if df == 0 {
        warnings.push("zero residual degrees of freedom: confidence intervals are degenerate".into());
    }
}

/// `y = c0 sqrt(n) + a n^(1/6)` with `c0` fixed.
pub fn fit_corrected_sqrt(points: &[(f64, f64)], c0: f64) -> Result<FitReport, FitError> {
    check_finite(points)?;
    let x: Vec<f64> = points.iter().map(|(n, _)| n.powf(1.0 / 6.0)).collect();
    let r: Vec<f64> = points.iter().map(|(n, y)| y - c0 * n.sqrt()).collect();
    let (a, half, df) = one_param(&x, &r);
    let residuals: Vec<f64> = x.iter().zip(&r).map(|(x, r)| r - a * x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let mut warnings = Vec::new();
    degenerate_warning(df, &mut warnings);
    Ok(FitReport {
        model: FitForm::CorrectedSqrt,
        formula: format!("y = {c0} n^(1/2) + a n^(1/6)"),
        params: vec![ParamEstimate {
            name: "a".into(),
            estimate: a,
            ci95: [a - half, a + half],
        }],
        mse: mse(&residuals),
        r_squared: r_squared(&ys, &residuals),
        df,
        condition_number: None,
        warnings,
        residuals,
    })
}

/// `y = b n^e0` with `e0` fixed.
pub fn fit_scaled_power(points: &[(f64, f64)], exponent: f64) -> Result<FitReport, FitError> {
    check_finite(points)?;
    let x: Vec<f64> = points.iter().map(|(n, _)| n.powf(exponent)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (b, half, df) = one_param(&x, &ys);
    let residuals: Vec<f64> = x.iter().zip(&ys).map(|(x, y)| y - b * x).collect();
    let mut warnings = Vec::new();
    degenerate_warning(df, &mut warnings);
    Ok(FitReport {
        model: FitForm::ScaledPower,
        formula: format!("y = b n^{exponent}"),
        params: vec![ParamEstimate {
            name: "b".into(),
            estimate: b,
            ci95: [b - half, b + half],
        }],
        mse: mse(&residuals),
        r_squared: r_squared(&ys, &residuals),
        df,
        condition_number: None,
        warnings,
        residuals,
    })
}

/// Ordinary least squares through an SVD of the design.
#[derive(Debug, Clone)]
pub(crate) struct Ols {
    pub beta: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub residuals: Vec<f64>,
    pub df: usize,
    pub condition: f64,
}

pub(crate) fn ols(columns: &[Vec<f64>], target: &[f64]) -> Result<Ols, FitError> {
    let rows = target.len();
    let p = columns.len();
    if rows < p {
        return Err(FitError::InsufficientData { needed: p, have: rows });
    }
    // normalize columns so the condition number reflects collinearity, not units
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if norms.contains(&0.0) {
        return Err(FitError::SingularDesign);
    }
    let x = DMatrix::from_fn(rows, p, |i, j| columns[j][i] / norms[j]);
    let y = DVector::from_column_slice(target);
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= RANK_TOL * smax {
        return Err(FitError::SingularDesign);
    }
    let scaled = svd.solve(&y, 0.0).map_err(|_| FitError::SingularDesign)?;
    let fitted = &x * &scaled;
    let residuals: Vec<f64> = (&y - &fitted).iter().copied().collect();
    let df = rows - p;
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let t = t_quantile_975(df);
    let half_widths = (0..p)
        .map(|j| {
            if df == 0 {
                return 0.0;
            }
            // (X^T X)^-1 = V S^-2 V^T
            let var_unit: f64 = (0..p)
                .map(|k| (v_t[(k, j)] / svd.singular_values[k]).powi(2))
                .sum();
            t * (sse / df as f64 * var_unit).sqrt() / norms[j]
        })
        .collect();
    Ok(Ols {
        beta: (0..p).map(|j| scaled[j] / norms[j]).collect(),
        half_widths,
        residuals,
        df,
        condition: smax / smin,
    })
}

fn check_positive(points: &[(f64, f64)]) -> Result<(), FitError> {
    match points.iter().find(|p| p.1 <= 0.0) {
        Some(&(_, y)) => Err(FitError::NonPositive(y)),
        None => Ok(()),
    }
}

fn collinearity_warning(condition: f64, warnings: &mut Vec<String>) {
    if condition > COLLINEARITY_WARN {
        warnings.push(format!(
            "regressors nearly collinear (condition number {condition:.3e}); individual exponents are poorly determined"
        ));
    }
}

/// `y = d n^f` by OLS of `ln y` on `[1, ln n]`.
pub fn fit_power(points: &[(f64, f64)]) -> Result<FitReport, FitError> {
    check_finite(points)?;
    check_positive(points)?;
    if let Some(&(n, _)) = points.iter().find(|p| p.0 <= 0.0) {
        return Err(FitError::NTooSmall { n, min: f64::MIN_POSITIVE });
    }
    let distinct = distinct_n(points);
    if distinct < 2 {
        return Err(FitError::InsufficientDistinct { needed: 2, have: distinct });
    }
    let ln_n: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ln_y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = ols(&[vec![1.0; points.len()], ln_n], &ln_y)?;
    let (ln_d, f) = (fit.beta[0], fit.beta[1]);
    let d = ln_d.exp();
    let residuals: Vec<f64> = points.iter().map(|(n, y)| y - d * n.powf(f)).collect();
    let mut warnings = Vec::new();
    degenerate_warning(fit.df, &mut warnings);
    collinearity_warning(fit.condition, &mut warnings);
    Ok(FitReport {
        model: FitForm::Power,
        formula: "y = d n^f".into(),
        params: vec![
            ParamEstimate {
                name: "d".into(),
                estimate: d,
                ci95: [(ln_d - fit.half_widths[0]).exp(), (ln_d + fit.half_widths[0]).exp()],
            },
            ParamEstimate {
                name: "f".into(),
                estimate: f,
                ci95: [f - fit.half_widths[1], f + fit.half_widths[1]],
            },
        ],
        mse: mse(&residuals),
        r_squared: r_squared(&ln_y, &fit.residuals),
        df: fit.df,
        condition_number: Some(fit.condition),
        warnings,
        residuals,
    })
}

/// `y = a (ln n)^b n^c` by OLS of `ln y` on `[1, ln ln n, ln n]`.
pub fn fit_log_power(points: &[(f64, f64)]) -> Result<FitReport, FitError> {
    check_finite(points)?;
    check_positive(points)?;
    if let Some(&(n, _)) = points.iter().find(|p| p.0 < 2.0) {
        return Err(FitError::NTooSmall { n, min: 2.0 });
    }
    if points.len() < 3 {
        return Err(FitError::InsufficientData { needed: 3, have: points.len() });
    }
    let ln_n: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ln_ln_n: Vec<f64> = ln_n.iter().map(|l| l.ln()).collect();
    let ln_y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = ols(&[vec![1.0; points.len()], ln_ln_n, ln_n], &ln_y)?;
    let (ln_a, b, c) = (fit.beta[0], fit.beta[1], fit.beta[2]);
    let a = ln_a.exp();
    let residuals: Vec<f64> = points
        .iter()
        .map(|(n, y)| y - a * n.ln().powf(b) * n.powf(c))
        .collect();
    let mut warnings = Vec::new();
    degenerate_warning(fit.df, &mut warnings);
    collinearity_warning(fit.condition, &mut warnings);
    Ok(FitReport {
        model: FitForm::LogPower,
        formula: "y = a (ln n)^b n^c".into(),
        params: vec![
            ParamEstimate {
                name: "a".into(),
                estimate: a,
                ci95: [(ln_a - fit.half_widths[0]).exp(), (ln_a + fit.half_widths[0]).exp()],
            },
            ParamEstimate {
                name: "b".into(),
                estimate: b,
                ci95: [b - fit.half_widths[1], b + fit.half_widths[1]],
            },
            ParamEstimate {
                name: "c".into(),
                estimate: c,
                ci95: [c - fit.half_widths[2], c + fit.half_widths[2]],
            },
        ],
        mse: mse(&residuals),
        r_squared: r_squared(&ln_y, &fit.residuals),
        df: fit.df,
        condition_number: Some(fit.condition),
        warnings,
        residuals,
    })
}

/// Dispatch by form. `c0` and `exponent` are only used by the fixed-shape
/// forms.
pub fn fit(form: FitForm, points: &[(f64, f64)], c0: f64, exponent: f64) -> Result<FitReport, FitError> {
    match form {
        FitForm::CorrectedSqrt => fit_corrected_sqrt(points, c0),
        FitForm::ScaledPower => fit_scaled_power(points, exponent),
        FitForm::Power => fit_power(points),
        FitForm::LogPower => fit_log_power(points),
    }
}
