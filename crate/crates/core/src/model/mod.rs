//! Fully-connected regression network with a from-scratch training loop,
//! plus a closed-form linear baseline and regression metrics.
//!
//! The network maps the seven dataset features to the four motor rotations.
//! Features and targets are z-scored with statistics taken from the training
//! split; the statistics are stored inside the model so inference consumes
//! and produces raw units. Weights and activations are 32-bit; the gradient
//! checker promotes everything to 64-bit.

mod linear;
mod metrics;
pub(crate) mod net;

pub use linear::{fit_linear, LinearModel};
pub use metrics::{evaluate, Metrics, OutputMetrics};
pub use net::{Activation, Layer};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::datagen::{Dataset, Sample, NUM_FEATURES, NUM_TARGETS};
use net::{backward_accumulate, forward_collect, loss_gradient, promote_layers, sample_loss, Gradients};

/// Errors from model fitting, evaluation and validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least {needed} rows, got {rows}")]
    NotEnoughRows { rows: usize, needed: usize },
    #[error("design matrix is rank-deficient: no informative feature column")]
    SingularFit,
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Divergence { epoch: usize },
    #[error("R^2 undefined for output {output}: zero target variance")]
    UndefinedR2 { output: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Per-component z-score statistics, stored in the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats<const N: usize> {
    pub mean: [f32; N],
    pub stddev: [f32; N],
}

impl<const N: usize> NormStats<N> {
    /// Identity transform (mean 0, stddev 1).
    pub fn identity() -> Self {
        Self {
            mean: [0.0; N],
            stddev: [1.0; N],
        }
    }

    /// Statistics of `rows`, computed in 64-bit and stored as 32-bit.
    /// A constant component gets stddev 1 so standardization maps it to zero
    /// instead of dividing by zero.
    pub fn from_rows<'a>(rows: impl Iterator<Item = &'a [f64; N]> + Clone) -> Self {
        let mut mean = [0.0f64; N];
        let mut n = 0usize;
        for row in rows.clone() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
            n += 1;
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut var = [0.0f64; N];
        for row in rows {
            for ((s, v), m) in var.iter_mut().zip(row).zip(mean) {
                *s += (v - m) * (v - m);
            }
        }
        let mut out = Self::identity();
        for i in 0..N {
            out.mean[i] = mean[i] as f32;
            let sd = (var[i] / n as f64).sqrt() as f32;
            out.stddev[i] = if sd > 0.0 { sd } else { 1.0 };
        }
        out
    }

    pub fn standardize(&self, raw: &[f64; N]) -> [f32; N] {
        std::array::from_fn(|i| (raw[i] as f32 - self.mean[i]) / self.stddev[i])
    }

    pub fn destandardize(&self, std: &[f32]) -> [f64; N] {
        debug_assert_eq!(std.len(), N);
        std::array::from_fn(|i| (std[i] * self.stddev[i] + self.mean[i]) as f64)
    }

    fn standardize_f64(&self, raw: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| (raw[i] - self.mean[i] as f64) / self.stddev[i] as f64)
    }
}

/// The fully-connected regression network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layers: Vec<Layer<f32>>,
    pub input_norm: NormStats<NUM_FEATURES>,
    pub output_norm: NormStats<NUM_TARGETS>,
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub hidden_dims: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 256,
            learning_rate: 1e-3,
            seed: 42,
            hidden_dims: vec![64, 64, 64],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.epochs == 0 {
            return Err(ModelError::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(ModelError::InvalidConfig("batch size must be >= 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "learning rate {} must be > 0",
                self.learning_rate
            )));
        }
        if self.hidden_dims.is_empty() || self.hidden_dims.contains(&0) {
            return Err(ModelError::InvalidConfig(
                "hidden dims must be non-empty and positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-epoch mean training loss (MSE in standardized target units).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_loss: Vec<f64>,
}

/// Builds an untrained network `7 -> hidden_dims -> 4` with relu hidden
/// layers and a linear output. Weights are Glorot-uniform from the seed,
/// biases zero, normalization identity until [`train`] fills it in.
pub fn init_mlp(hidden_dims: &[usize], seed: u64) -> Result<MlpModel, ModelError> {
    if hidden_dims.is_empty() || hidden_dims.contains(&0) {
        return Err(ModelError::InvalidConfig(
            "hidden dims must be non-empty and positive".into(),
        ));
    }
    let mut dims = vec![NUM_FEATURES];
    dims.extend_from_slice(hidden_dims);
    dims.push(NUM_TARGETS);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(dims.len() - 1);
    for k in 0..dims.len() - 1 {
        let (fan_in, fan_out) = (dims[k], dims[k + 1]);
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt() as f32;
        let weights = (0..fan_in * fan_out)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        layers.push(Layer {
            in_dim: fan_in,
            out_dim: fan_out,
            activation: if k + 1 == dims.len() - 1 {
                Activation::Linear
            } else {
                Activation::Relu
            },
            weights,
            biases: vec![0.0; fan_out],
        });
    }
    Ok(MlpModel {
        layers,
        input_norm: NormStats::identity(),
        output_norm: NormStats::identity(),
    })
}

impl MlpModel {
    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.parameter_count()).sum()
    }

    /// Checks the structural invariants: dimensions chain from 7 to 4, the
    /// output layer is linear, stddevs are positive.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidModel(msg));
        let Some(first) = self.layers.first() else {
            return bad("no layers".into());
        };
        if first.in_dim != NUM_FEATURES {
            return bad(format!(
                "first layer takes {} inputs, expected {NUM_FEATURES}",
                first.in_dim
            ));
        }
        let last = self.layers.last().unwrap();
        if last.out_dim != NUM_TARGETS {
            return bad(format!(
                "last layer emits {} outputs, expected {NUM_TARGETS}",
                last.out_dim
            ));
        }
        if last.activation != Activation::Linear {
            return bad("output layer must be linear".into());
        }
        for pair in self.layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return bad(format!(
                    "layer dimensions do not chain: {} -> {}",
                    pair[0].out_dim, pair[1].in_dim
                ));
            }
        }
        for l in &self.layers {
            if l.weights.len() != l.in_dim * l.out_dim || l.biases.len() != l.out_dim {
                return bad("weight or bias buffer has the wrong length".into());
            }
            if l.weights.iter().chain(l.biases.iter()).any(|v| !v.is_finite()) {
                return bad("non-finite parameter".into());
            }
        }
        if self.input_norm.stddev.iter().any(|&s| s <= 0.0)
            || self.output_norm.stddev.iter().any(|&s| s <= 0.0)
        {
            return bad("normalization stddev must be positive".into());
        }
        Ok(())
    }

    /// Predicts the four rotations for raw features. Pure: equal inputs give
    /// bit-identical outputs.
    pub fn forward(&self, features: &[f64; NUM_FEATURES]) -> [f64; NUM_TARGETS] {
        let mut h: Vec<f32> = self.input_norm.standardize(features).to_vec();
        for layer in &self.layers {
            h = layer.forward(&h);
        }
        self.output_norm.destandardize(&h)
    }
}

/// Trains `model` in place: fits normalization statistics on `data`, then
/// minimizes MSE on standardized targets with mini-batch Adam
/// (beta1 0.9, beta2 0.999, eps 1e-8) and seeded per-epoch shuffling.
/// Single-threaded and bit-reproducible for a fixed seed.
pub fn train(model: &mut MlpModel, data: &Dataset, cfg: &TrainConfig) -> Result<TrainReport, ModelError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }

    model.input_norm = NormStats::from_rows(data.samples.iter().map(|s| &s.features));
    model.output_norm = NormStats::from_rows(data.samples.iter().map(|s| &s.targets));

    let xs: Vec<[f32; NUM_FEATURES]> = data
        .samples
        .iter()
        .map(|s| model.input_norm.standardize(&s.features))
        .collect();
    let ts: Vec<[f32; NUM_TARGETS]> = data
        .samples
        .iter()
        .map(|s| model.output_norm.standardize(&s.targets))
        .collect();

    let mut adam = AdamState::zeros_like(&model.layers);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    let mut step = 0i32;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0f64;
        for batch in order.chunks(cfg.batch_size) {
            let mut grads = Gradients::zeros_like(&model.layers);
            let mut batch_loss = 0.0f64;
            for &i in batch {
                let acts = forward_collect(&model.layers, &xs[i]);
                let pred = acts.last().unwrap();
                batch_loss += sample_loss(pred, &ts[i]) as f64;
                let d_out = loss_gradient(pred, &ts[i]);
                backward_accumulate(&model.layers, &xs[i], &acts, &d_out, &mut grads);
            }
            batch_loss /= batch.len() as f64;
            if !batch_loss.is_finite() || batch_loss > DIVERGENCE_LIMIT {
                return Err(ModelError::Divergence { epoch });
            }
            grads.scale(1.0 / batch.len() as f32);
            step += 1;
            adam.update(&mut model.layers, &grads, cfg.learning_rate as f32, step);
            loss_sum += batch_loss * batch.len() as f64;
        }
        epoch_loss.push(loss_sum / data.len() as f64);
    }
    Ok(TrainReport { epoch_loss })
}

/// Targets are standardized, so a healthy mean loss is O(1). Crossing this
/// bound means the optimizer blew up (Adam keeps parameters finite even at
/// absurd learning rates, so a non-finite check alone is not enough).
const DIVERGENCE_LIMIT: f64 = 1e12;

const ADAM_BETA1: f32 = 0.9;
const ADAM_BETA2: f32 = 0.999;
const ADAM_EPS: f32 = 1e-8;

struct AdamState {
    m: Gradients<f32>,
    v: Gradients<f32>,
}

impl AdamState {
    fn zeros_like(layers: &[Layer<f32>]) -> Self {
        Self {
            m: Gradients::zeros_like(layers),
            v: Gradients::zeros_like(layers),
        }
    }

    fn update(&mut self, layers: &mut [Layer<f32>], grads: &Gradients<f32>, lr: f32, step: i32) {
        let bias1 = 1.0 - ADAM_BETA1.powi(step);
        let bias2 = 1.0 - ADAM_BETA2.powi(step);
        for (k, layer) in layers.iter_mut().enumerate() {
            step_tensor(
                &mut layer.weights,
                &grads.d_weights[k],
                &mut self.m.d_weights[k],
                &mut self.v.d_weights[k],
                lr,
                bias1,
                bias2,
            );
            step_tensor(
                &mut layer.biases,
                &grads.d_biases[k],
                &mut self.m.d_biases[k],
                &mut self.v.d_biases[k],
                lr,
                bias1,
                bias2,
            );
        }
    }
}

fn step_tensor(
    params: &mut [f32],
    grads: &[f32],
    m: &mut [f32],
    v: &mut [f32],
    lr: f32,
    bias1: f32,
    bias2: f32,
) {
    for i in 0..params.len() {
        m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * grads[i];
        v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * grads[i] * grads[i];
        let m_hat = m[i] / bias1;
        let v_hat = v[i] / bias2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
}

/// Compares analytic gradients of the per-sample loss against central finite
/// differences over every parameter, all in 64-bit arithmetic, and returns
/// the maximum relative error. `eps` must lie in `[1e-5, 1e-2]`.
pub fn gradient_check(model: &MlpModel, sample: &Sample, eps: f64) -> Result<f64, ModelError> {
    if !(1e-5..=1e-2).contains(&eps) {
        return Err(ModelError::InvalidConfig(format!(
            "gradient-check eps {eps} must lie in [1e-5, 1e-2]"
        )));
    }
    let layers = promote_layers(&model.layers);
    let x = model.input_norm.standardize_f64(&sample.features);
    let t = model.output_norm.standardize_f64(&sample.targets);

    let acts = forward_collect(&layers, &x);
    let d_out = loss_gradient(acts.last().unwrap(), &t);
    let mut analytic = Gradients::zeros_like(&layers);
    backward_accumulate(&layers, &x, &acts, &d_out, &mut analytic);

    let loss_of = |layers: &[Layer<f64>]| -> f64 {
        let acts = forward_collect(layers, &x);
        sample_loss(acts.last().unwrap(), &t)
    };

    let mut work = layers.clone();
    let mut max_rel: f64 = 0.0;
    for k in 0..layers.len() {
        for idx in 0..layers[k].weights.len() + layers[k].biases.len() {
            let (tensor_len, is_weight) = (layers[k].weights.len(), idx < layers[k].weights.len());
            let slot = if is_weight { idx } else { idx - tensor_len };
            let read = |w: &[Layer<f64>]| {
                if is_weight {
                    w[k].weights[slot]
                } else {
                    w[k].biases[slot]
                }
            };
            let write = |w: &mut [Layer<f64>], v: f64| {
                if is_weight {
                    w[k].weights[slot] = v;
                } else {
                    w[k].biases[slot] = v;
                }
            };
            let orig = read(&work);
            write(&mut work, orig + eps);
            let plus = loss_of(&work);
            write(&mut work, orig - eps);
            let minus = loss_of(&work);
            write(&mut work, orig);
            let numeric = (plus - minus) / (2.0 * eps);
            let analytic_v = if is_weight {
                analytic.d_weights[k][slot]
            } else {
                analytic.d_biases[k][slot]
            };
            let rel = (analytic_v - numeric).abs() / (analytic_v.abs() + numeric.abs()).max(1e-8);
            max_rel = max_rel.max(rel);
        }
    }
    Ok(max_rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen;

    fn linear_map_dataset(rows: usize, seed: u64) -> Dataset {
        // Targets are an exact affine function of all seven features.
        let coef = [
            [2.0, -1.0, 0.5, 1.5, -0.5, 3.0, 10.0],
            [1.0, 1.0, -2.0, 0.25, 2.0, -1.0, 5.0],
            [-3.0, 0.5, 1.0, 1.0, 0.0, 0.5, -2.0],
            [0.5, 2.0, 2.0, -1.0, 1.0, 1.0, 1.0],
        ];
        let intercept = [1.0, -2.0, 0.0, 3.0];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..rows)
            .map(|_| {
                let features: [f64; NUM_FEATURES] =
                    std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                let targets = std::array::from_fn(|j| {
                    intercept[j]
                        + coef[j]
                            .iter()
                            .zip(features)
                            .map(|(c, f)| c * f)
                            .sum::<f64>()
                });
                datagen::Sample { features, targets }
            })
            .collect();
        Dataset { samples }
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let a = init_mlp(&[64, 64, 64], 7).unwrap();
        let b = init_mlp(&[64, 64, 64], 7).unwrap();
        assert_eq!(a, b);
        let c = init_mlp(&[64, 64, 64], 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn default_architecture_has_9092_parameters() {
        let m = init_mlp(&[64, 64, 64], 0).unwrap();
        assert_eq!(m.parameter_count(), 9092);
        assert!(m.layers.iter().all(|l| l.biases.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn init_rejects_empty_hidden_dims() {
        assert!(matches!(init_mlp(&[], 0), Err(ModelError::InvalidConfig(_))));
        assert!(matches!(init_mlp(&[8, 0], 0), Err(ModelError::InvalidConfig(_))));
    }

    #[test]
    fn forward_with_identity_layer_selects_inputs() {
        let mut weights = vec![0.0f32; NUM_FEATURES * NUM_TARGETS];
        for o in 0..NUM_TARGETS {
            weights[o * NUM_FEATURES + o] = 1.0;
        }
        let m = MlpModel {
            layers: vec![Layer {
                in_dim: NUM_FEATURES,
                out_dim: NUM_TARGETS,
                activation: Activation::Linear,
                weights,
                biases: vec![0.0; NUM_TARGETS],
            }],
            input_norm: NormStats::identity(),
            output_norm: NormStats::identity(),
        };
        let out = m.forward(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        assert_eq!(out, [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn dead_relu_layer_yields_the_destandardized_bias() {
        let mut m = init_mlp(&[5], 3).unwrap();
        // Force every hidden pre-activation negative.
        m.layers[0].biases = vec![-100.0; 5];
        m.layers[1].biases = vec![0.25; NUM_TARGETS];
        m.output_norm = NormStats {
            mean: [1.0, 2.0, 3.0, 4.0],
            stddev: [2.0; NUM_TARGETS],
        };
        let out = m.forward(&[0.1; NUM_FEATURES]);
        for (o, mean) in out.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((o - (0.25 * 2.0 + mean)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_final_weights_return_the_output_mean() {
        let mut m = init_mlp(&[8], 5).unwrap();
        m.output_norm = NormStats {
            mean: [10.0, 20.0, 30.0, 40.0],
            stddev: [1.0; NUM_TARGETS],
        };
        let last = m.layers.last_mut().unwrap();
        last.weights.iter_mut().for_each(|w| *w = 0.0);
        let out = m.forward(&[0.3; NUM_FEATURES]);
        for (o, mean) in out.iter().zip([10.0, 20.0, 30.0, 40.0]) {
            assert!((o - mean).abs() < 1e-6);
        }
    }

    #[test]
    fn forward_is_bitwise_pure() {
        let ds = linear_map_dataset(64, 1);
        let mut m = init_mlp(&[16], 2).unwrap();
        train(
            &mut m,
            &ds,
            &TrainConfig {
                epochs: 5,
                hidden_dims: vec![16],
                ..TrainConfig::default()
            },
        )
        .unwrap();
        let f = [0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7];
        let a = m.forward(&f).map(f64::to_bits);
        let b = m.forward(&f).map(f64::to_bits);
        assert_eq!(a, b);
    }

    #[test]
    fn training_fits_an_exact_linear_map() {
        let ds = linear_map_dataset(256, 9);
        let mut m = init_mlp(&[16], 0).unwrap();
        let cfg = TrainConfig {
            epochs: 200,
            batch_size: 32,
            learning_rate: 5e-3,
            hidden_dims: vec![16],
            ..TrainConfig::default()
        };
        let report = train(&mut m, &ds, &cfg).unwrap();
        assert!(report.epoch_loss[9] < report.epoch_loss[0]);
        let metrics = evaluate(|f| m.forward(f), &ds).unwrap();
        for o in &metrics.outputs {
            assert!(o.r2 >= 0.999, "train R^2 {} too low", o.r2);
        }
    }

    #[test]
    fn training_is_bit_reproducible_per_seed() {
        let ds = linear_map_dataset(100, 4);
        let cfg = TrainConfig {
            epochs: 10,
            batch_size: 32,
            hidden_dims: vec![8],
            ..TrainConfig::default()
        };
        let mut a = init_mlp(&[8], 11).unwrap();
        train(&mut a, &ds, &cfg).unwrap();
        let mut b = init_mlp(&[8], 11).unwrap();
        train(&mut b, &ds, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn absurd_learning_rate_diverges() {
        let ds = linear_map_dataset(100, 4);
        let mut m = init_mlp(&[8], 0).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e6,
            epochs: 50,
            hidden_dims: vec![8],
            ..TrainConfig::default()
        };
        match train(&mut m, &ds, &cfg) {
            Err(ModelError::Divergence { epoch }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn zero_epochs_is_rejected() {
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ModelError::InvalidConfig(_))));
    }

    #[test]
    fn normalization_round_trips() {
        let ds = linear_map_dataset(64, 13);
        let stats = NormStats::from_rows(ds.samples.iter().map(|s| &s.targets));
        for s in &ds.samples {
            let round = stats.destandardize(&stats.standardize(&s.targets));
            for (r, t) in round.iter().zip(s.targets) {
                let denom = t.abs().max(1.0);
                assert!((r - t).abs() / denom < 1e-6, "{r} vs {t}");
            }
        }
    }

    #[test]
    fn constant_feature_gets_unit_stddev() {
        let rows = [[1.0; NUM_FEATURES], [1.0; NUM_FEATURES]];
        let stats = NormStats::from_rows(rows.iter());
        assert_eq!(stats.stddev, [1.0; NUM_FEATURES]);
        assert_eq!(stats.standardize(&[1.0; NUM_FEATURES]), [0.0; NUM_FEATURES]);
    }

    #[test]
    fn gradient_check_on_a_fresh_small_model() {
        let m = init_mlp(&[5], 21).unwrap();
        let sample = datagen::Sample {
            features: [0.5, -0.25, 0.75, 2.0, 2.0, 2.0, 0.01],
            targets: [10.0, -5.0, 2.5, 0.0],
        };
        let err = gradient_check(&m, &sample, 1e-4).unwrap();
        assert!(err <= 1e-4, "max relative gradient error {err}");
    }

    #[test]
    fn gradient_check_handles_unreachable_parameters() {
        let mut m = init_mlp(&[5], 21).unwrap();
        let last = m.layers.last_mut().unwrap();
        last.weights.iter_mut().for_each(|w| *w = 0.0);
        let sample = datagen::Sample {
            features: [0.5, -0.25, 0.75, 2.0, 2.0, 2.0, 0.01],
            targets: [1.0, 2.0, 3.0, 4.0],
        };
        let err = gradient_check(&m, &sample, 1e-4).unwrap();
        assert!(err <= 1e-4, "max relative gradient error {err}");
    }

    #[test]
    fn gradient_check_sweep_over_seeded_models() {
        let mut worst: f64 = 0.0;
        for seed in 0..25u64 {
            let hidden = [3 + (seed % 4) as usize];
            let m = init_mlp(&hidden, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
            let sample = datagen::Sample {
                features: std::array::from_fn(|_| rng.random_range(-2.0..2.0)),
                targets: std::array::from_fn(|_| rng.random_range(-20.0..20.0)),
            };
            worst = worst.max(gradient_check(&m, &sample, 1e-4).unwrap());
        }
        assert!(worst <= 1e-4, "max relative gradient error {worst}");
    }

    #[test]
    fn gradient_check_rejects_out_of_range_eps() {
        let m = init_mlp(&[5], 0).unwrap();
        let sample = datagen::Sample {
            features: [0.0; NUM_FEATURES],
            targets: [0.0; NUM_TARGETS],
        };
        assert!(matches!(
            gradient_check(&m, &sample, 1e-6),
            Err(ModelError::InvalidConfig(_))
        ));
        assert!(matches!(
            gradient_check(&m, &sample, 0.1),
            Err(ModelError::InvalidConfig(_))
        ));
    }

    #[test]
    fn trained_model_passes_validation() {
        let ds = linear_map_dataset(64, 1);
        let mut m = init_mlp(&[8], 2).unwrap();
        train(
            &mut m,
            &ds,
            &TrainConfig {
                epochs: 2,
                hidden_dims: vec![8],
                ..TrainConfig::default()
            },
        )
        .unwrap();
        m.validate().unwrap();
    }
}
