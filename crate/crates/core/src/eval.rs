//! Side-by-side model comparison and residual-distribution reports.
//!
//! [`compare`] evaluates any number of predictors on one test set and builds
//! a table next to fixed reference rows (published scores for the same
//! task). [`error_report`] dumps plot-ready residual scatter and histogram
//! files per output.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::datagen::{Dataset, NUM_FEATURES, NUM_TARGETS};
use crate::model::{evaluate, Metrics, ModelError};

/// A prediction function entered into a comparison.
pub type PredictFn<'a> = Box<dyn Fn(&[f64; NUM_FEATURES]) -> [f64; NUM_TARGETS] + 'a>;

/// Errors from report generation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no residuals to report")]
    EmptyResiduals,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// What kind of predictor a comparison row describes. Only the neural
/// network rows (float or quantized) represent something that fits the
/// microcontroller deployment path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    LinearRegression,
    NnFloat,
    NnQuantized,
}

impl ModelKind {
    pub fn mcu_deployable(self) -> bool {
        matches!(self, ModelKind::NnFloat | ModelKind::NnQuantized)
    }
}

/// One predictor entered into a comparison.
pub struct Candidate<'a> {
    pub name: String,
    pub kind: ModelKind,
    pub predict: PredictFn<'a>,
}

impl<'a> Candidate<'a> {
    pub fn new<F>(name: &str, kind: ModelKind, predict: F) -> Self
    where
        F: Fn(&[f64; NUM_FEATURES]) -> [f64; NUM_TARGETS] + 'a,
    {
        Self {
            name: name.to_string(),
            kind,
            predict: Box::new(predict),
        }
    }
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub r2: [f64; NUM_TARGETS],
    pub mcu_deployable: bool,
    /// True for the fixed published-score rows, false for rows computed here.
    pub reference: bool,
}

/// Comparison of evaluated predictors plus the reference rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ReportRow>,
}

/// Published test scores for this task, kept as fixed reference rows:
/// (name, R^2 per theta0..theta3, MCU-deployable).
pub const REFERENCE_SCORES: [(&str, [f64; NUM_TARGETS], bool); 3] = [
    ("Linear Regression", [0.9245, 0.9310, 0.9393, 0.9315], false),
    (
        "Neural Network (Fully Connected) GPU",
        [0.9985, 0.9972, 0.9990, 0.9989],
        true,
    ),
    (
        "Neural Network (Fully Connected) MCU",
        [0.9742, 0.9733, 0.9761, 0.9756],
        true,
    ),
];

/// Evaluates every candidate on `test`. Returns the combined report
/// (computed rows first, reference rows after) and the full metrics
/// backing each computed row, in candidate order.
pub fn compare(
    candidates: &[Candidate],
    test: &Dataset,
) -> Result<(ComparisonReport, Vec<Metrics>), EvalError> {
    let mut rows = Vec::new();
    let mut all_metrics = Vec::new();
    for c in candidates {
        let metrics = evaluate(&c.predict, test)?;
        rows.push(ReportRow {
            name: c.name.clone(),
            r2: metrics.r2(),
            mcu_deployable: c.kind.mcu_deployable(),
            reference: false,
        });
        all_metrics.push(metrics);
    }
    for (name, r2, mcu) in REFERENCE_SCORES {
        rows.push(ReportRow {
            name: format!("{name} [reference]"),
            r2,
            mcu_deployable: mcu,
            reference: true,
        });
    }
    Ok((ComparisonReport { rows }, all_metrics))
}

impl ComparisonReport {
    /// Machine-readable form: `model,theta0,theta1,theta2,theta3,mcu`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,theta0,theta1,theta2,theta3,mcu\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.4},{:.4},{:.4},{:.4},{}\n",
                row.name,
                row.r2[0],
                row.r2[1],
                row.r2[2],
                row.r2[3],
                if row.mcu_deployable { "yes" } else { "no" }
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), EvalError> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .rows
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        writeln!(
            f,
            "{:<width$}  {:>8} {:>8} {:>8} {:>8}  {:>4}",
            "model", "theta0", "theta1", "theta2", "theta3", "mcu"
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "{:<width$}  {:>8.4} {:>8.4} {:>8.4} {:>8.4}  {:>4}",
                row.name,
                row.r2[0],
                row.r2[1],
                row.r2[2],
                row.r2[3],
                if row.mcu_deployable { "yes" } else { "no" }
            )?;
        }
        Ok(())
    }
}

/// Mean and standard deviation of the prediction errors per output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub mean: [f64; NUM_TARGETS],
    pub stddev: [f64; NUM_TARGETS],
}

/// Writes residual scatter files (`y_true,error`) and error histograms
/// (`bin_lo,bin_hi,count`) for every output into `dir`, named
/// `<prefix>_residuals_theta<j>.csv` and `<prefix>_error_hist_theta<j>.csv`.
pub fn error_report(
    metrics: &Metrics,
    bins: usize,
    dir: &Path,
    prefix: &str,
) -> Result<ErrorSummary, EvalError> {
    if metrics.outputs.iter().any(|o| o.residuals.is_empty()) {
        return Err(EvalError::EmptyResiduals);
    }
    let bins = bins.max(1);
    let mut mean = [0.0; NUM_TARGETS];
    let mut stddev = [0.0; NUM_TARGETS];

    for (j, o) in metrics.outputs.iter().enumerate() {
        let mut w = BufWriter::new(File::create(
            dir.join(format!("{prefix}_residuals_theta{j}.csv")),
        )?);
        writeln!(w, "y_true,error")?;
        for (y, e) in &o.residuals {
            writeln!(w, "{y:.16e},{e:.16e}")?;
        }
        w.flush()?;

        let errors: Vec<f64> = o.residuals.iter().map(|(_, e)| *e).collect();
        let n = errors.len() as f64;
        let mu = errors.iter().sum::<f64>() / n;
        let var = errors.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>() / n;
        mean[j] = mu;
        stddev[j] = var.sqrt();

        let lo = errors.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = errors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for e in &errors {
            let idx = if width > 0.0 {
                (((e - lo) / width).floor() as usize).min(bins - 1)
            } else {
                0
            };
            counts[idx] += 1;
        }
        let mut w = BufWriter::new(File::create(
            dir.join(format!("{prefix}_error_hist_theta{j}.csv")),
        )?);
        writeln!(w, "bin_lo,bin_hi,count")?;
        for (k, c) in counts.iter().enumerate() {
            let bin_lo = lo + k as f64 * width;
            let bin_hi = if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width };
            writeln!(w, "{bin_lo:.16e},{bin_hi:.16e},{c}")?;
        }
        w.flush()?;
    }
    Ok(ErrorSummary { mean, stddev })
}
