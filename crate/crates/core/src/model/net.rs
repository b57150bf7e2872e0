//! Dense-layer arithmetic, generic over the scalar type.
//!
//! The training path runs on `f32` (weights and activations are 32-bit
//! end to end). The gradient checker promotes the same layers to `f64` and
//! runs the identical code, so finite differences validate the exact
//! backpropagation used for training rather than a reimplementation.

use num_traits::Float;
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Scalar bound for the layer math.
pub trait Scalar: Float + AddAssign + SubAssign + MulAssign + std::fmt::Debug {}
impl<T: Float + AddAssign + SubAssign + MulAssign + std::fmt::Debug> Scalar for T {}

/// Per-layer nonlinearity. Codes match the model container format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Relu,
}

impl Activation {
    pub fn code(self) -> u8 {
        match self {
            Activation::Linear => 0,
            Activation::Relu => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::Linear),
            1 => Some(Activation::Relu),
            _ => None,
        }
    }

    /// `apply` on a concrete `f32`, for interpreter-style callers.
    pub fn apply_f32(self, z: f32) -> f32 {
        self.apply(z)
    }

    fn apply<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::Linear => z,
            Activation::Relu => {
                if z > T::zero() {
                    z
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Derivative expressed through the layer output. For relu the output is
    /// zero exactly where the derivative is zero.
    fn derivative_from_output<T: Scalar>(self, output: T) -> T {
        match self {
            Activation::Linear => T::one(),
            Activation::Relu => {
                if output > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// One dense layer: `out = act(W x + b)` with `W` row-major `out_dim x in_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T = f32> {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

impl<T: Scalar> Layer<T> {
    pub fn parameter_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    pub fn forward(&self, input: &[T]) -> Vec<T> {
        debug_assert_eq!(input.len(), self.in_dim);
        let mut out = Vec::with_capacity(self.out_dim);
        for o in 0..self.out_dim {
            let mut acc = self.biases[o];
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            for (w, x) in row.iter().zip(input) {
                acc += *w * *x;
            }
            out.push(self.activation.apply(acc));
        }
        out
    }
}

pub fn promote_layers(layers: &[Layer<f32>]) -> Vec<Layer<f64>> {
    layers
        .iter()
        .map(|l| Layer {
            in_dim: l.in_dim,
            out_dim: l.out_dim,
            activation: l.activation,
            weights: l.weights.iter().map(|&w| w as f64).collect(),
            biases: l.biases.iter().map(|&b| b as f64).collect(),
        })
        .collect()
}

/// Runs the stack and keeps every layer's output (needed for backprop).
pub fn forward_collect<T: Scalar>(layers: &[Layer<T>], input: &[T]) -> Vec<Vec<T>> {
    let mut acts: Vec<Vec<T>> = Vec::with_capacity(layers.len());
    for (k, layer) in layers.iter().enumerate() {
        let src: &[T] = if k == 0 { input } else { &acts[k - 1] };
        let out = layer.forward(src);
        acts.push(out);
    }
    acts
}

/// Parameter gradients, shaped like the layer stack.
#[derive(Debug, Clone)]
pub struct Gradients<T> {
    pub d_weights: Vec<Vec<T>>,
    pub d_biases: Vec<Vec<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn zeros_like(layers: &[Layer<T>]) -> Self {
        Self {
            d_weights: layers.iter().map(|l| vec![T::zero(); l.weights.len()]).collect(),
            d_biases: layers.iter().map(|l| vec![T::zero(); l.biases.len()]).collect(),
        }
    }

    pub fn scale(&mut self, factor: T) {
        for g in self.d_weights.iter_mut().chain(self.d_biases.iter_mut()) {
            for v in g.iter_mut() {
                *v *= factor;
            }
        }
    }
}

/// Loss for one sample in standardized space: mean squared error over the
/// outputs.
pub fn sample_loss<T: Scalar>(prediction: &[T], target: &[T]) -> T {
    debug_assert_eq!(prediction.len(), target.len());
    let mut acc = T::zero();
    for (p, t) in prediction.iter().zip(target) {
        let d = *p - *t;
        acc += d * d;
    }
    acc / T::from(prediction.len()).unwrap()
}

/// Gradient of [`sample_loss`] with respect to the prediction.
pub fn loss_gradient<T: Scalar>(prediction: &[T], target: &[T]) -> Vec<T> {
    let k = T::from(prediction.len()).unwrap();
    prediction
        .iter()
        .zip(target)
        .map(|(p, t)| (T::one() + T::one()) * (*p - *t) / k)
        .collect()
}

/// Backpropagates `d_output` (gradient w.r.t. the final layer output) through
/// the stack, accumulating parameter gradients into `grads`.
pub fn backward_accumulate<T: Scalar>(
    layers: &[Layer<T>],
    input: &[T],
    acts: &[Vec<T>],
    d_output: &[T],
    grads: &mut Gradients<T>,
) {
    let depth = layers.len();
    debug_assert_eq!(acts.len(), depth);

    // delta = dL/dz for the layer being processed.
    let mut delta: Vec<T> = d_output
        .iter()
        .zip(&acts[depth - 1])
        .map(|(g, h)| *g * layers[depth - 1].activation.derivative_from_output(*h))
        .collect();

    for k in (0..depth).rev() {
        let layer = &layers[k];
        let layer_input: &[T] = if k == 0 { input } else { &acts[k - 1] };
        for o in 0..layer.out_dim {
            grads.d_biases[k][o] += delta[o];
            let row = o * layer.in_dim;
            for i in 0..layer.in_dim {
                grads.d_weights[k][row + i] += delta[o] * layer_input[i];
            }
        }
        if k > 0 {
            let prev = &layers[k - 1];
            let mut next_delta = vec![T::zero(); layer.in_dim];
            for o in 0..layer.out_dim {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (nd, w) in next_delta.iter_mut().zip(row) {
                    *nd += *w * delta[o];
                }
            }
            for (nd, h) in next_delta.iter_mut().zip(&acts[k - 1]) {
                *nd *= prev.activation.derivative_from_output(*h);
            }
            delta = next_delta;
        }
    }
}
