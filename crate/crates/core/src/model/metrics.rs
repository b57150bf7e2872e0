//! Regression metrics: per-output R^2, MSE and retained residuals.

use super::ModelError;
use crate::datagen::{Dataset, NUM_FEATURES, NUM_TARGETS};
use std::fmt;

/// Metrics for one rotation output.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputMetrics {
    /// Coefficient of determination `1 - SS_res / SS_tot`.
    pub r2: f64,
    pub mse: f64,
    /// `(y_true, y_true - prediction)` pairs in dataset order.
    pub residuals: Vec<(f64, f64)>,
}

/// Per-output evaluation of one predictor on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub outputs: [OutputMetrics; NUM_TARGETS],
}

impl Metrics {
    pub fn r2(&self) -> [f64; NUM_TARGETS] {
        std::array::from_fn(|j| self.outputs[j].r2)
    }

    pub fn mse(&self) -> [f64; NUM_TARGETS] {
        std::array::from_fn(|j| self.outputs[j].mse)
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:>10} {:>14}", "output", "R^2", "MSE")?;
        for (j, o) in self.outputs.iter().enumerate() {
            writeln!(f, "theta{j:<3} {:>10.4} {:>14.6}", o.r2, o.mse)?;
        }
        Ok(())
    }
}

/// Evaluates `predict` on every row of `test`.
pub fn evaluate<F>(predict: F, test: &Dataset) -> Result<Metrics, ModelError>
where
    F: Fn(&[f64; NUM_FEATURES]) -> [f64; NUM_TARGETS],
{
    if test.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let predictions: Vec<[f64; NUM_TARGETS]> =
        test.samples.iter().map(|s| predict(&s.features)).collect();
    let n = test.len() as f64;

    let mut outputs = Vec::with_capacity(NUM_TARGETS);
    for j in 0..NUM_TARGETS {
        let mean = test.samples.iter().map(|s| s.targets[j]).sum::<f64>() / n;
        let ss_tot: f64 = test
            .samples
            .iter()
            .map(|s| (s.targets[j] - mean) * (s.targets[j] - mean))
            .sum();
        if ss_tot == 0.0 {
            return Err(ModelError::UndefinedR2 { output: j });
        }
        let mut ss_res = 0.0;
        let mut residuals = Vec::with_capacity(test.len());
        for (s, pred) in test.samples.iter().zip(&predictions) {
            let err = s.targets[j] - pred[j];
            ss_res += err * err;
            residuals.push((s.targets[j], err));
        }
        outputs.push(OutputMetrics {
            r2: 1.0 - ss_res / ss_tot,
            mse: ss_res / n,
            residuals,
        });
    }
    Ok(Metrics {
        outputs: outputs.try_into().unwrap(),
    })
}
