//! Trainable neural dirty-paper coding: an MLP encoder that maps a message
//! and the known interference to a channel input, and an MLP decoder that
//! maps the channel output to message probabilities.

pub mod adam;
pub mod checkpoint;
pub mod mlp;
pub mod train;

pub use adam::AdamState;
pub use checkpoint::Checkpoint;
pub use mlp::{Activation, DenseLayer, LayerGrads, MlpParams};
pub use train::{train, TrainConfig};

use crate::constellation::Constellation;
use crate::{Error, Result};
use ndarray::Array2;

/// A trained encoder/decoder pair for one message constellation.
///
/// The encoder input is the one-hot message concatenated with the
/// interference vector; its output is the transmitted signal. The decoder
/// input is the channel output; its output is one logit per message.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuralDpcModel {
    pub encoder: MlpParams,
    pub decoder: MlpParams,
    pub constellation: Constellation,
    pub lambda: f64,
}

impl NeuralDpcModel {
    /// Validates dimensional consistency between the networks and the
    /// constellation, and that `lambda` is positive.
    pub fn new(
        encoder: MlpParams,
        decoder: MlpParams,
        constellation: Constellation,
        lambda: f64,
    ) -> Result<NeuralDpcModel> {
        let k = constellation.k();
        let m = constellation.cardinality();
        if encoder.input_dim() != m + k || encoder.output_dim() != k {
            return Err(Error::InvalidArgument(format!(
                "encoder maps {} -> {}, expected {} -> {k}",
                encoder.input_dim(),
                encoder.output_dim(),
                m + k
            )));
        }
        if decoder.input_dim() != k || decoder.output_dim() != m {
            return Err(Error::InvalidArgument(format!(
                "decoder maps {} -> {}, expected {k} -> {m}",
                decoder.input_dim(),
                decoder.output_dim()
            )));
        }
        if encoder.activation != decoder.activation {
            return Err(Error::InvalidArgument(
                "encoder and decoder activations differ".into(),
            ));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(NeuralDpcModel { encoder, decoder, constellation, lambda })
    }

    /// Channel dimension.
    pub fn k(&self) -> usize {
        self.constellation.k()
    }

    /// Number of messages.
    pub fn cardinality(&self) -> usize {
        self.constellation.cardinality()
    }

    /// Encoder input vector for message `v` and interference `s`.
    fn encoder_input(&self, v: usize, s: &[f64]) -> Vec<f64> {
        let m = self.cardinality();
        assert!(v < m, "message index {v} out of range");
        assert_eq!(s.len(), self.k(), "interference dimension mismatch");
        let mut input = vec![0.0; m + s.len()];
        input[v] = 1.0;
        input[m..].copy_from_slice(s);
        input
    }

    /// Transmitted signal for message `v` given interference `s`.
    pub fn encode(&self, v: usize, s: &[f64]) -> Vec<f64> {
        self.encoder.forward_single(&self.encoder_input(v, s))
    }

    /// Encoder forward pass for a batch: message indices plus an
    /// interference matrix with one row per sample.
    pub fn encode_batch(&self, vs: &[usize], s: &Array2<f64>) -> Array2<f64> {
        let m = self.cardinality();
        let k = self.k();
        assert_eq!(s.dim(), (vs.len(), k), "interference batch shape mismatch");
        let mut input = Array2::zeros((vs.len(), m + k));
        for (i, &v) in vs.iter().enumerate() {
            assert!(v < m, "message index {v} out of range");
            input[[i, v]] = 1.0;
            for d in 0..k {
                input[[i, m + d]] = s[[i, d]];
            }
        }
        self.encoder.forward_batch(&input).0
    }

    /// Posterior message probabilities for a channel output.
    pub fn decode_probs(&self, y: &[f64]) -> Vec<f64> {
        let mut logits = self.decoder.forward_single(y);
        softmax_in_place(&mut logits);
        logits
    }

    /// Hard decisions for a batch of channel outputs (one row per sample).
    /// Ties resolve to the smallest message index.
    pub fn decode_batch(&self, y: &Array2<f64>) -> Vec<usize> {
        let (logits, _) = self.decoder.forward_batch(y);
        logits
            .outer_iter()
            .map(|row| argmax(row.as_slice().expect("row-major batch")))
            .collect()
    }

    /// Hard decision for one channel output.
    pub fn decode(&self, y: &[f64]) -> usize {
        argmax(&self.decoder.forward_single(y))
    }
}

/// Index of the largest value; ties resolve to the smallest index.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable in-place softmax.
pub fn softmax_in_place(xs: &mut [f64]) {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in xs.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in xs.iter_mut() {
        *x /= sum;
    }
}
