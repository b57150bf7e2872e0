//! Closed-form linear-regression baseline.
//!
//! Ordinary least squares per output through the normal equations with a
//! symmetric positive-semidefinite solve. Exactly collinear feature columns
//! (which the cube-shaped data grid produces: B = D = H) are detected during
//! elimination and dropped with a zero coefficient, the same aliasing
//! treatment statistical packages apply. Fitted values are unaffected by
//! which aliased column survives. The fit fails only when no informative
//! feature column remains, e.g. a dataset of identical rows.

use super::ModelError;
use crate::datagen::{Dataset, NUM_FEATURES, NUM_TARGETS};

/// Relative pivot threshold below which a column counts as aliased.
const PIVOT_TOL: f64 = 1e-10;

/// Affine predictor `y_j = intercept_j + coefficients_j . features`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub coefficients: [[f64; NUM_FEATURES]; NUM_TARGETS],
    pub intercepts: [f64; NUM_TARGETS],
}

impl LinearModel {
    pub fn predict(&self, features: &[f64; NUM_FEATURES]) -> [f64; NUM_TARGETS] {
        std::array::from_fn(|j| {
            self.intercepts[j]
                + self.coefficients[j]
                    .iter()
                    .zip(features)
                    .map(|(c, f)| c * f)
                    .sum::<f64>()
        })
    }
}

/// Fits the four outputs by ordinary least squares. Needs at least
/// `NUM_FEATURES + 1` rows.
pub fn fit_linear(train: &Dataset) -> Result<LinearModel, ModelError> {
    let needed = NUM_FEATURES + 1;
    if train.len() < needed {
        return Err(ModelError::NotEnoughRows {
            rows: train.len(),
            needed,
        });
    }
    let rows: Vec<&[f64]> = train.samples.iter().map(|s| &s.features[..]).collect();
    let mut solutions = [[0.0; NUM_FEATURES + 1]; NUM_TARGETS];
    for j in 0..NUM_TARGETS {
        let targets: Vec<f64> = train.samples.iter().map(|s| s.targets[j]).collect();
        let solved = fit_ols(&rows, &targets)?;
        solutions[j].copy_from_slice(&solved);
    }
    let mut model = LinearModel {
        coefficients: [[0.0; NUM_FEATURES]; NUM_TARGETS],
        intercepts: [0.0; NUM_TARGETS],
    };
    for j in 0..NUM_TARGETS {
        model.intercepts[j] = solutions[j][0];
        model.coefficients[j].copy_from_slice(&solutions[j][1..]);
    }
    Ok(model)
}

/// Least squares with intercept for an arbitrary feature count. Returns
/// `[intercept, coefficients...]`.
pub(crate) fn fit_ols(rows: &[&[f64]], targets: &[f64]) -> Result<Vec<f64>, ModelError> {
    assert_eq!(rows.len(), targets.len());
    let p = rows[0].len();
    let m = p + 1;

    // Gram matrix and right-hand side of the normal equations for the
    // intercept-augmented design.
    let mut gram = vec![vec![0.0f64; m]; m];
    let mut rhs = vec![0.0f64; m];
    let mut aug = vec![0.0f64; m];
    for (row, &y) in rows.iter().zip(targets) {
        aug[0] = 1.0;
        aug[1..].copy_from_slice(row);
        for i in 0..m {
            for j in i..m {
                gram[i][j] += aug[i] * aug[j];
            }
            rhs[i] += aug[i] * y;
        }
    }
    for i in 0..m {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
    }

    let (solution, dropped) = solve_psd_dropping(gram, rhs)?;
    if dropped[1..].iter().all(|&d| d) {
        return Err(ModelError::SingularFit);
    }
    Ok(solution)
}

/// Solves a positive-semidefinite system by symmetric Gaussian elimination.
/// A pivot that collapses below `PIVOT_TOL` times its original diagonal
/// marks a linearly dependent column: the column is removed from the system
/// and its solution entry is zero.
fn solve_psd_dropping(
    mut g: Vec<Vec<f64>>,
    mut rhs: Vec<f64>,
) -> Result<(Vec<f64>, Vec<bool>), ModelError> {
    let m = g.len();
    let original_diag: Vec<f64> = (0..m).map(|i| g[i][i]).collect();
    let mut dropped = vec![false; m];

    for k in 0..m {
        if g[k][k] <= PIVOT_TOL * original_diag[k] {
            dropped[k] = true;
            for i in 0..m {
                g[k][i] = 0.0;
                g[i][k] = 0.0;
            }
            g[k][k] = 1.0;
            rhs[k] = 0.0;
            continue;
        }
        for i in k + 1..m {
            let factor = g[i][k] / g[k][k];
            if factor == 0.0 {
                continue;
            }
            for j in k..m {
                g[i][j] -= factor * g[k][j];
            }
            rhs[i] -= factor * rhs[k];
        }
    }

    let mut x = vec![0.0f64; m];
    for k in (0..m).rev() {
        let mut acc = rhs[k];
        for j in k + 1..m {
            acc -= g[k][j] * x[j];
        }
        x[k] = acc / g[k][k];
        if !x[k].is_finite() {
            return Err(ModelError::SingularFit);
        }
    }
    Ok((x, dropped))
}
