//! Post-training 8-bit weight quantization and the binary model container.
//!
//! Quantization is symmetric per weight tensor: `scale = max|w| / 127`,
//! `q = round_half_to_even(w / scale)` clamped to `[-127, 127]`. Only the
//! weights are quantized; biases and normalization statistics stay 32-bit
//! floats. Inference reconstructs `w = q * scale` on the fly and computes
//! with float kernels, so a quantized model needs one byte per weight at
//! rest and behaves exactly like the corresponding dequantized float model.
//!
//! Both float and quantized models serialize to the same little-endian
//! container:
//!
//! ```text
//! magic "CKNN" | version u16 | flags u16 (bit0 = quantized) | layer count u8
//! input mean  f32 x 7 | input stddev  f32 x 7
//! output mean f32 x 4 | output stddev f32 x 4
//! per layer:
//!   in_dim u32 | out_dim u32 | activation u8 (0 linear, 1 relu)
//!   dtype u8 (0 = f32, 1 = i8) | [scale f32 when dtype = 1]
//!   weights row-major out x in (4 bytes or 1 byte each) | biases f32 x out
//! ```
//!
//! No padding anywhere; a blob parses back to an equal model bit for bit.
//! [`emit_c_source`] renders a blob as a C byte array for firmware builds.

use std::fmt::Write as FmtWrite;
use std::path::Path;

use thiserror::Error;

use crate::datagen::{NUM_FEATURES, NUM_TARGETS};
use crate::model::{Activation, Layer, MlpModel, NormStats};

pub const MAGIC: [u8; 4] = *b"CKNN";
pub const FORMAT_VERSION: u16 = 1;
const FLAG_QUANTIZED: u16 = 1;

/// Errors from quantization, container parsing and C emission.
#[derive(Debug, Error)]
pub enum QuantError {
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("'{0}' is not a valid C identifier")]
    InvalidSymbol(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A dense layer with 8-bit weights and one float scale.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    /// Row-major `out_dim x in_dim`, each in `[-127, 127]`.
    pub weights: Vec<i8>,
    /// Dequantization factor: `w = q * scale`.
    pub scale: f32,
    pub biases: Vec<f32>,
}

/// The quantized counterpart of [`MlpModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedModel {
    pub layers: Vec<QuantizedLayer>,
    pub input_norm: NormStats<NUM_FEATURES>,
    pub output_norm: NormStats<NUM_TARGETS>,
}

/// Quantizes every weight tensor of a trained model. Biases and
/// normalization statistics are copied through untouched.
pub fn quantize(model: &MlpModel) -> Result<QuantizedModel, QuantError> {
    let layers = model
        .layers
        .iter()
        .map(|l| {
            let (weights, scale) = quantize_tensor(&l.weights)?;
            for &b in &l.biases {
                if !b.is_finite() {
                    return Err(QuantError::CorruptModel(format!("non-finite bias {b}")));
                }
            }
            Ok(QuantizedLayer {
                in_dim: l.in_dim,
                out_dim: l.out_dim,
                activation: l.activation,
                weights,
                scale,
                biases: l.biases.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuantizedModel {
        layers,
        input_norm: model.input_norm,
        output_norm: model.output_norm,
    })
}

/// Symmetric per-tensor quantization. The ratio `w / max|w|` is formed in
/// 64-bit so that a weight at exactly half the peak hits the 63.5 tie and
/// rounds to even; the peak itself always maps to +-127 (no clipping).
fn quantize_tensor(weights: &[f32]) -> Result<(Vec<i8>, f32), QuantError> {
    let mut amax = 0.0f32;
    for &w in weights {
        if !w.is_finite() {
            return Err(QuantError::CorruptModel(format!("non-finite weight {w}")));
        }
        amax = amax.max(w.abs());
    }
    if amax == 0.0 {
        return Ok((vec![0; weights.len()], 1.0));
    }
    let scale = (amax as f64 / 127.0) as f32;
    let q = weights
        .iter()
        .map(|&w| {
            let ratio = w as f64 / amax as f64;
            (ratio * 127.0).round_ties_even().clamp(-127.0, 127.0) as i8
        })
        .collect();
    Ok((q, scale))
}

impl QuantizedModel {
    /// Runs inference the way the deployed interpreter does: every weight is
    /// converted from 8 bits back to float at use, and all arithmetic is
    /// 32-bit float. Bit-identical to running [`MlpModel::forward`] on
    /// [`QuantizedModel::dequantize`].
    pub fn forward(&self, features: &[f64; NUM_FEATURES]) -> [f64; NUM_TARGETS] {
        let mut h: Vec<f32> = self.input_norm.standardize(features).to_vec();
        for layer in &self.layers {
            let mut out = Vec::with_capacity(layer.out_dim);
            for o in 0..layer.out_dim {
                let mut acc = layer.biases[o];
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (q, x) in row.iter().zip(&h) {
                    acc += (*q as f32 * layer.scale) * *x;
                }
                out.push(layer.activation.apply_f32(acc));
            }
            h = out;
        }
        self.output_norm.destandardize(&h)
    }

    /// Materializes the float model this quantized model stands for.
    pub fn dequantize(&self) -> MlpModel {
        MlpModel {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    in_dim: l.in_dim,
                    out_dim: l.out_dim,
                    activation: l.activation,
                    weights: l.weights.iter().map(|&q| q as f32 * l.scale).collect(),
                    biases: l.biases.clone(),
                })
                .collect(),
            input_norm: self.input_norm,
            output_norm: self.output_norm,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }
}

/// A float or quantized model, as stored in a container blob.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Float(MlpModel),
    Quantized(QuantizedModel),
}

impl AnyModel {
    pub fn predict(&self, features: &[f64; NUM_FEATURES]) -> [f64; NUM_TARGETS] {
        match self {
            AnyModel::Float(m) => m.forward(features),
            AnyModel::Quantized(m) => m.forward(features),
        }
    }

    pub fn is_quantized(&self) -> bool {
        matches!(self, AnyModel::Quantized(_))
    }
}

/// Serialized model bytes in the container format.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBlob {
    bytes: Vec<u8>,
}

impl ModelBlob {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Self { bytes }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn write_file(&self, path: &Path) -> Result<(), QuantError> {
        std::fs::write(path, &self.bytes)?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self, QuantError> {
        Ok(Self {
            bytes: std::fs::read(path)?,
        })
    }
}

pub fn serialize_float(model: &MlpModel) -> ModelBlob {
    serialize(&AnyModel::Float(model.clone()))
}

pub fn serialize_quantized(model: &QuantizedModel) -> ModelBlob {
    serialize(&AnyModel::Quantized(model.clone()))
}

/// Encodes a model into the container format.
pub fn serialize(model: &AnyModel) -> ModelBlob {
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let flags: u16 = if model.is_quantized() { FLAG_QUANTIZED } else { 0 };
    out.extend_from_slice(&flags.to_le_bytes());

    let (input_norm, output_norm, layer_count) = match model {
        AnyModel::Float(m) => (&m.input_norm, &m.output_norm, m.layers.len()),
        AnyModel::Quantized(m) => (&m.input_norm, &m.output_norm, m.layers.len()),
    };
    out.push(layer_count as u8);
    for v in input_norm.mean.iter().chain(&input_norm.stddev) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in output_norm.mean.iter().chain(&output_norm.stddev) {
        out.extend_from_slice(&v.to_le_bytes());
    }

    match model {
        AnyModel::Float(m) => {
            for l in &m.layers {
                out.extend_from_slice(&(l.in_dim as u32).to_le_bytes());
                out.extend_from_slice(&(l.out_dim as u32).to_le_bytes());
                out.push(l.activation.code());
                out.push(0); // dtype f32
                for w in &l.weights {
                    out.extend_from_slice(&w.to_le_bytes());
                }
                for b in &l.biases {
                    out.extend_from_slice(&b.to_le_bytes());
                }
            }
        }
        AnyModel::Quantized(m) => {
            for l in &m.layers {
                out.extend_from_slice(&(l.in_dim as u32).to_le_bytes());
                out.extend_from_slice(&(l.out_dim as u32).to_le_bytes());
                out.push(l.activation.code());
                out.push(1); // dtype i8
                out.extend_from_slice(&l.scale.to_le_bytes());
                out.extend(l.weights.iter().map(|&q| q as u8));
                for b in &l.biases {
                    out.extend_from_slice(&b.to_le_bytes());
                }
            }
        }
    }
    ModelBlob { bytes: out }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], QuantError> {
        if self.pos + n > self.bytes.len() {
            return Err(QuantError::Parse {
                offset: self.pos,
                message: format!(
                    "unexpected end of blob reading {what} ({} bytes left, {n} needed)",
                    self.bytes.len() - self.pos
                ),
            });
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self, what: &str) -> Result<u8, QuantError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16, QuantError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32, QuantError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32, QuantError> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn err(&self, message: String) -> QuantError {
        QuantError::Parse {
            offset: self.pos,
            message,
        }
    }
}

/// Decodes a container blob back into a model. Structural problems report
/// the byte offset at which parsing failed.
pub fn deserialize(blob: &ModelBlob) -> Result<AnyModel, QuantError> {
    let mut r = Reader {
        bytes: &blob.bytes,
        pos: 0,
    };
    if r.take(4, "magic")? != MAGIC {
        return Err(QuantError::Parse {
            offset: 0,
            message: format!("bad magic, expected {MAGIC:?}"),
        });
    }
    let version = r.u16("version")?;
    if version != FORMAT_VERSION {
        return Err(QuantError::Parse {
            offset: 4,
            message: format!("unsupported version {version}, expected {FORMAT_VERSION}"),
        });
    }
    let flags = r.u16("flags")?;
    if flags & !FLAG_QUANTIZED != 0 {
        return Err(QuantError::Parse {
            offset: 6,
            message: format!("unknown flag bits 0x{flags:04x}"),
        });
    }
    let quantized = flags & FLAG_QUANTIZED != 0;
    let layer_count = r.u8("layer count")? as usize;
    if layer_count == 0 {
        return Err(r.err("layer count must be at least 1".into()));
    }

    let read_stats = |r: &mut Reader, n: usize| -> Result<Vec<f32>, QuantError> {
        (0..n).map(|_| r.f32("normalization block")).collect()
    };
    let in_mean = read_stats(&mut r, NUM_FEATURES)?;
    let in_std = read_stats(&mut r, NUM_FEATURES)?;
    let out_mean = read_stats(&mut r, NUM_TARGETS)?;
    let out_std = read_stats(&mut r, NUM_TARGETS)?;
    let input_norm = NormStats::<NUM_FEATURES> {
        mean: in_mean.try_into().unwrap(),
        stddev: in_std.try_into().unwrap(),
    };
    let output_norm = NormStats::<NUM_TARGETS> {
        mean: out_mean.try_into().unwrap(),
        stddev: out_std.try_into().unwrap(),
    };

    let mut float_layers = Vec::new();
    let mut quant_layers = Vec::new();
    for k in 0..layer_count {
        let in_dim = r.u32("in_dim")? as usize;
        let out_dim = r.u32("out_dim")? as usize;
        if in_dim == 0 || out_dim == 0 || in_dim.saturating_mul(out_dim) > 16_000_000 {
            return Err(r.err(format!("implausible layer dimensions {in_dim} x {out_dim}")));
        }
        let act_code = r.u8("activation")?;
        let activation = Activation::from_code(act_code)
            .ok_or_else(|| r.err(format!("unknown activation code {act_code}")))?;
        let dtype = r.u8("dtype")?;
        match dtype {
            0 if !quantized => {
                let mut weights = Vec::with_capacity(in_dim * out_dim);
                for _ in 0..in_dim * out_dim {
                    weights.push(r.f32("weights")?);
                }
                let mut biases = Vec::with_capacity(out_dim);
                for _ in 0..out_dim {
                    biases.push(r.f32("biases")?);
                }
                float_layers.push(Layer {
                    in_dim,
                    out_dim,
                    activation,
                    weights,
                    biases,
                });
            }
            1 if quantized => {
                let scale = r.f32("scale")?;
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(QuantError::CorruptModel(format!(
                        "layer {k}: scale {scale} must be positive"
                    )));
                }
                let raw = r.take(in_dim * out_dim, "weights")?;
                let weights: Vec<i8> = raw.iter().map(|&b| b as i8).collect();
                if weights.contains(&i8::MIN) {
                    return Err(QuantError::CorruptModel(format!(
                        "layer {k}: quantized weight -128 outside [-127, 127]"
                    )));
                }
                let mut biases = Vec::with_capacity(out_dim);
                for _ in 0..out_dim {
                    biases.push(r.f32("biases")?);
                }
                quant_layers.push(QuantizedLayer {
                    in_dim,
                    out_dim,
                    activation,
                    weights,
                    scale,
                    biases,
                });
            }
            0 | 1 => {
                return Err(r.err(format!(
                    "layer {k}: dtype {dtype} contradicts container flags"
                )))
            }
            _ => return Err(r.err(format!("layer {k}: unknown dtype {dtype}"))),
        }
    }
    if r.pos != r.bytes.len() {
        return Err(r.err(format!(
            "{} trailing bytes after the last layer",
            r.bytes.len() - r.pos
        )));
    }

    let model = if quantized {
        AnyModel::Quantized(QuantizedModel {
            layers: quant_layers,
            input_norm,
            output_norm,
        })
    } else {
        AnyModel::Float(MlpModel {
            layers: float_layers,
            input_norm,
            output_norm,
        })
    };
    match &model {
        AnyModel::Float(m) => m
            .validate()
            .map_err(|e| QuantError::CorruptModel(e.to_string()))?,
        AnyModel::Quantized(m) => m
            .dequantize()
            .validate()
            .map_err(|e| QuantError::CorruptModel(e.to_string()))?,
    }
    Ok(model)
}

const C_BYTES_PER_LINE: usize = 12;

/// Renders a blob as a C translation unit:
/// `const unsigned char <symbol>[] = { ... };` followed by
/// `const unsigned int <symbol>_len = N;`. Twelve lowercase hex bytes per
/// line; output is deterministic.
pub fn emit_c_source(blob: &ModelBlob, symbol: &str) -> Result<String, QuantError> {
    if !is_c_identifier(symbol) {
        return Err(QuantError::InvalidSymbol(symbol.to_string()));
    }
    let mut out = String::new();
    writeln!(out, "const unsigned char {symbol}[] = {{").unwrap();
    let chunks: Vec<&[u8]> = blob.bytes.chunks(C_BYTES_PER_LINE).collect();
    for (i, chunk) in chunks.iter().enumerate() {
        let line: Vec<String> = chunk.iter().map(|b| format!("0x{b:02x}")).collect();
        let sep = if i + 1 == chunks.len() { "" } else { "," };
        writeln!(out, "  {}{sep}", line.join(", ")).unwrap();
    }
    writeln!(out, "}};").unwrap();
    writeln!(out, "const unsigned int {symbol}_len = {};", blob.len()).unwrap();
    Ok(out)
}

fn is_c_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Sample;
    use crate::model::{init_mlp, train, TrainConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trained_small_model() -> MlpModel {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = (0..128)
            .map(|_| {
                let features: [f64; NUM_FEATURES] =
                    std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                let targets =
                    std::array::from_fn(|j| features.iter().sum::<f64>() * (j as f64 + 1.0));
                Sample { features, targets }
            })
            .collect();
        let ds = crate::datagen::Dataset { samples };
        let mut m = init_mlp(&[8, 8], 3).unwrap();
        let cfg = TrainConfig {
            epochs: 20,
            batch_size: 32,
            hidden_dims: vec![8, 8],
            ..TrainConfig::default()
        };
        train(&mut m, &ds, &cfg).unwrap();
        m
    }

    #[test]
    fn hand_derived_tensor_quantization() {
        let (q, scale) = quantize_tensor(&[-2.54, 1.27, 0.0]).unwrap();
        assert_eq!(q, vec![-127, 64, 0]);
        assert!((scale - 0.02).abs() < 1e-9, "scale {scale}");
    }

    #[test]
    fn all_zero_tensor_uses_unit_scale() {
        let (q, scale) = quantize_tensor(&[0.0; 6]).unwrap();
        assert_eq!(q, vec![0; 6]);
        assert_eq!(scale, 1.0);
    }

    #[test]
    fn reconstruction_error_stays_below_half_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let weights: Vec<f32> = (0..257).map(|_| rng.random_range(-3.0f32..3.0)).collect();
            let (q, scale) = quantize_tensor(&weights).unwrap();
            let amax = weights.iter().fold(0.0f32, |m, w| m.max(w.abs()));
            let bound = scale as f64 / 2.0 + (amax.next_up() - amax) as f64;
            let mut peak_hit = false;
            for (w, q) in weights.iter().zip(&q) {
                let err = (*w as f64 - *q as f64 * scale as f64).abs();
                assert!(err <= bound, "error {err} above bound {bound}");
                assert!((-127..=127).contains(q));
                peak_hit |= q.unsigned_abs() == 127;
            }
            assert!(peak_hit, "peak weight must quantize to +-127");
        }
    }

    #[test]
    fn non_finite_weight_is_corrupt() {
        assert!(matches!(
            quantize_tensor(&[1.0, f32::NAN]),
            Err(QuantError::CorruptModel(_))
        ));
    }

    #[test]
    fn quantize_keeps_biases_and_stats() {
        let m = trained_small_model();
        let q = quantize(&m).unwrap();
        assert_eq!(q.input_norm, m.input_norm);
        assert_eq!(q.output_norm, m.output_norm);
        for (ql, fl) in q.layers.iter().zip(&m.layers) {
            assert_eq!(ql.biases, fl.biases);
            assert_eq!(ql.activation, fl.activation);
        }
    }

    #[test]
    fn exact_multiples_quantize_losslessly() {
        // Weights are multiples of 2^-7, peak 127 * 2^-7, so scale
        // reconstructs exactly and dequantization is lossless.
        let s = 2.0f32.powi(-7);
        let mut m = init_mlp(&[5], 1).unwrap();
        for layer in &mut m.layers {
            for (i, w) in layer.weights.iter_mut().enumerate() {
                *w = ((i as i32 % 255) - 127) as f32 * s;
            }
            if let Some(first) = layer.weights.first_mut() {
                *first = 127.0 * s;
            }
        }
        let q = quantize(&m).unwrap();
        let deq = q.dequantize();
        for (ql, fl) in deq.layers.iter().zip(&m.layers) {
            assert_eq!(ql.weights, fl.weights);
        }
        let features = [0.3, -0.4, 0.5, 1.0, 2.0, 3.0, 0.01];
        assert_eq!(
            q.forward(&features).map(f64::to_bits),
            m.forward(&features).map(f64::to_bits)
        );
    }

    #[test]
    fn interpreter_matches_the_dequantized_float_model_bitwise() {
        let m = trained_small_model();
        let q = quantize(&m).unwrap();
        let deq = q.dequantize();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let features: [f64; NUM_FEATURES] =
                std::array::from_fn(|_| rng.random_range(-2.0..2.0));
            assert_eq!(
                q.forward(&features).map(f64::to_bits),
                deq.forward(&features).map(f64::to_bits)
            );
        }
    }

    #[test]
    fn blob_round_trip_is_bit_exact() {
        let m = trained_small_model();
        let blob = serialize_float(&m);
        let back = deserialize(&blob).unwrap();
        assert_eq!(back, AnyModel::Float(m.clone()));
        assert_eq!(serialize(&back).as_bytes(), blob.as_bytes());

        let q = quantize(&m).unwrap();
        let qblob = serialize_quantized(&q);
        let qback = deserialize(&qblob).unwrap();
        assert_eq!(qback, AnyModel::Quantized(q));
        assert_eq!(serialize(&qback).as_bytes(), qblob.as_bytes());
    }

    #[test]
    fn default_architecture_blob_sizes_and_ratio() {
        let m = init_mlp(&[64, 64, 64], 0).unwrap();
        assert_eq!(m.parameter_count(), 9092);
        let float_blob = serialize_float(&m);
        let quant_blob = serialize_quantized(&quantize(&m).unwrap());
        // Header 9 + stats 88; float layers add 10 + 4 per parameter;
        // quantized layers add 14 + weights + 4 per bias.
        assert_eq!(float_blob.len(), 36_505);
        assert_eq!(quant_blob.len(), 9_833);
        let ratio = float_blob.len() as f64 / quant_blob.len() as f64;
        assert!(ratio >= 3.5, "compression ratio {ratio}");
    }

    #[test]
    fn quantized_blob_is_always_smaller() {
        let m = init_mlp(&[1], 0).unwrap();
        let float_blob = serialize_float(&m);
        let quant_blob = serialize_quantized(&quantize(&m).unwrap());
        assert!(quant_blob.len() < float_blob.len());
    }

    #[test]
    fn parse_rejects_bad_magic_version_and_truncation() {
        let m = trained_small_model();
        let blob = serialize_float(&m);

        let mut bad = blob.as_bytes().to_vec();
        bad[0] ^= 0xff;
        match deserialize(&ModelBlob::from_bytes(bad)).unwrap_err() {
            QuantError::Parse { offset, .. } => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }

        let mut bad = blob.as_bytes().to_vec();
        bad[4] = 9;
        match deserialize(&ModelBlob::from_bytes(bad)).unwrap_err() {
            QuantError::Parse { offset, .. } => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }

        let truncated = ModelBlob::from_bytes(blob.as_bytes()[..blob.len() - 3].to_vec());
        assert!(matches!(
            deserialize(&truncated),
            Err(QuantError::Parse { .. })
        ));

        let mut padded = blob.as_bytes().to_vec();
        padded.push(0);
        match deserialize(&ModelBlob::from_bytes(padded)).unwrap_err() {
            QuantError::Parse { message, .. } => assert!(message.contains("trailing")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn c_emission_formats_bytes_and_length() {
        let blob = ModelBlob::from_bytes(vec![0x01, 0x02, 0xff]);
        let text = emit_c_source(&blob, "m").unwrap();
        assert!(text.contains("0x01, 0x02, 0xff"));
        assert!(text.contains("const unsigned char m[] = {"));
        assert!(text.contains("const unsigned int m_len = 3;"));
    }

    #[test]
    fn c_emission_round_trips_through_a_text_parser() {
        let m = trained_small_model();
        let blob = serialize_quantized(&quantize(&m).unwrap());
        let text = emit_c_source(&blob, "g_model_data").unwrap();

        let body = text.split_once('{').unwrap().1.split_once('}').unwrap().0;
        let bytes: Vec<u8> = body
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| u8::from_str_radix(t.trim_start_matches("0x"), 16).unwrap())
            .collect();
        assert_eq!(bytes, blob.as_bytes());

        let len_line = text.lines().last().unwrap();
        assert_eq!(
            len_line,
            format!("const unsigned int g_model_data_len = {};", blob.len())
        );

        // 12 bytes per full line.
        let first_line = text.lines().nth(1).unwrap();
        assert_eq!(first_line.matches("0x").count(), 12);
    }

    #[test]
    fn c_emission_rejects_bad_identifiers() {
        let blob = ModelBlob::from_bytes(vec![1]);
        for sym in ["", "1abc", "has space", "dash-ed"] {
            assert!(matches!(
                emit_c_source(&blob, sym),
                Err(QuantError::InvalidSymbol(_))
            ));
        }
        assert!(emit_c_source(&blob, "_ok123").is_ok());
    }
}
