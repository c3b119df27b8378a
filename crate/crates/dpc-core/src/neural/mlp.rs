//! Dense multilayer perceptrons with explicit forward and backward passes.
//!
//! Layers apply `z = a W^T + b` on batch-row matrices; hidden layers pass
//! `z` through the configured activation and the output layer stays linear.
//! The backward pass implements the standard chain rule by hand so gradient
//! correctness can be checked against finite differences.

use crate::rng::RngStream;
use crate::{Error, Result};
use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, Axis};

/// Hidden-layer activation function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Activation {
    /// `sin(z)`, useful for smooth interference-folding behavior.
    Sinusoidal,
    /// `max(z, slope * z)` with `0 <= slope < 1`.
    LeakyRelu { slope: f64 },
}

impl Activation {
    /// Parses `sin`, `lrelu`, or `lrelu:<slope>`.
    pub fn parse(s: &str) -> Result<Activation> {
        if s == "sin" {
            return Ok(Activation::Sinusoidal);
        }
        if s == "lrelu" {
            return Ok(Activation::LeakyRelu { slope: 0.01 });
        }
        if let Some(rest) = s.strip_prefix("lrelu:") {
            let slope: f64 = rest
                .parse()
                .map_err(|_| Error::Config(format!("activation '{s}': slope is not a number")))?;
            if !(0.0..1.0).contains(&slope) {
                return Err(Error::Config(format!(
                    "activation '{s}': slope must be in [0, 1)"
                )));
            }
            return Ok(Activation::LeakyRelu { slope });
        }
        Err(Error::Config(format!(
            "activation '{s}': expected 'sin', 'lrelu', or 'lrelu:<slope>'"
        )))
    }

    /// Canonical descriptor, the inverse of [`Activation::parse`].
    pub fn descriptor(&self) -> String {
        match self {
            Activation::Sinusoidal => "sin".into(),
            Activation::LeakyRelu { slope } => format!("lrelu:{slope}"),
        }
    }

    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Sinusoidal => z.sin(),
            Activation::LeakyRelu { slope } => {
                if z >= 0.0 {
                    z
                } else {
                    slope * z
                }
            }
        }
    }

    #[inline]
    pub fn derivative(&self, z: f64) -> f64 {
        match self {
            Activation::Sinusoidal => z.cos(),
            Activation::LeakyRelu { slope } => {
                if z >= 0.0 {
                    1.0
                } else {
                    *slope
                }
            }
        }
    }
}

/// One dense layer: weight matrix (rows are output units) and bias vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

/// Gradients with the same shapes as a [`DenseLayer`].
#[derive(Clone, Debug)]
pub struct LayerGrads {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

/// An MLP: a stack of dense layers with a shared hidden activation and a
/// linear output layer.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams {
    pub layers: Vec<DenseLayer>,
    pub activation: Activation,
}

/// Forward-pass intermediates needed by the backward pass.
pub struct BatchCache {
    /// Input to each layer (batch rows); `inputs[0]` is the network input.
    inputs: Vec<Array2<f64>>,
    /// Pre-activation of each layer.
    pre: Vec<Array2<f64>>,
}

impl MlpParams {
    /// Glorot-uniform initialization for the layer sizes in `dims`
    /// (input, hidden..., output). Weights are drawn row-major per layer
    /// from `U(-sqrt(6/(fan_in+fan_out)), +...)`; biases start at zero. For
    /// sinusoidal networks the first layer is additionally scaled by
    /// `omega0`.
    ///
    /// Errors if fewer than two sizes are given, any size is zero, or
    /// `omega0` is not positive.
    pub fn init(
        dims: &[usize],
        activation: Activation,
        omega0: f64,
        rng: &mut RngStream,
    ) -> Result<MlpParams> {
        if dims.len() < 2 {
            return Err(Error::InvalidArgument(
                "network needs at least an input and an output size".into(),
            ));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("layer sizes must be positive".into()));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for (l, pair) in dims.windows(2).enumerate() {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let scale = if l == 0 && activation == Activation::Sinusoidal {
                omega0
            } else {
                1.0
            };
            let mut w = Array2::zeros((fan_out, fan_in));
            for i in 0..fan_out {
                for j in 0..fan_in {
                    w[[i, j]] = scale * rng.next_uniform(-limit, limit);
                }
            }
            layers.push(DenseLayer { w, b: Array1::zeros(fan_out) });
        }
        Ok(MlpParams { layers, activation })
    }

    /// Layer sizes (input, hidden..., output).
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.layers[0].w.ncols()];
        dims.extend(self.layers.iter().map(|l| l.w.nrows()));
        dims
    }

    /// Total number of scalar parameters.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Input dimension.
    pub fn input_dim(&self) -> usize {
        self.layers[0].w.ncols()
    }

    /// Output dimension.
    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().w.nrows()
    }

    /// Forward pass for a single input vector.
    pub fn forward_single(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_dim(), "forward: input dimension mismatch");
        let last = self.layers.len() - 1;
        let mut a = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.b.to_vec();
            for (zi, row) in z.iter_mut().zip(layer.w.outer_iter()) {
                for (wij, aj) in row.iter().zip(&a) {
                    *zi += wij * aj;
                }
            }
            if l < last {
                for zi in z.iter_mut() {
                    *zi = self.activation.apply(*zi);
                }
            }
            a = z;
        }
        a
    }

    /// Forward pass for a batch (rows are samples). Returns the output and
    /// the cache consumed by [`MlpParams::backward_batch`].
    pub fn forward_batch(&self, x: &Array2<f64>) -> (Array2<f64>, BatchCache) {
        assert_eq!(x.ncols(), self.input_dim(), "forward: input dimension mismatch");
        let last = self.layers.len() - 1;
        let mut cache = BatchCache { inputs: Vec::new(), pre: Vec::new() };
        let mut a = x.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            cache.inputs.push(a.clone());
            let mut z = Array2::zeros((a.nrows(), layer.w.nrows()));
            general_mat_mul(1.0, &a, &layer.w.t(), 0.0, &mut z);
            z += &layer.b;
            cache.pre.push(z.clone());
            a = if l < last {
                z.mapv_into(|v| self.activation.apply(v))
            } else {
                z
            };
        }
        (a, cache)
    }

    /// Backward pass for a batch. `dout` is the loss gradient at the network
    /// output (including any batch normalization the caller wants). Returns
    /// per-layer parameter gradients and the gradient at the network input.
    pub fn backward_batch(&self, cache: &BatchCache, dout: &Array2<f64>) -> (Vec<LayerGrads>, Array2<f64>) {
        let last = self.layers.len() - 1;
        let mut grads: Vec<LayerGrads> = Vec::with_capacity(self.layers.len());
        let mut dz = dout.clone();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            if l < last {
                let deriv = cache.pre[l].mapv(|v| self.activation.derivative(v));
                dz = &dz * &deriv;
            }
            let mut dw = Array2::zeros(layer.w.dim());
            general_mat_mul(1.0, &dz.t(), &cache.inputs[l], 0.0, &mut dw);
            let db = dz.sum_axis(Axis(0));
            grads.push(LayerGrads { w: dw, b: db });
            let mut da = Array2::zeros((dz.nrows(), layer.w.ncols()));
            general_mat_mul(1.0, &dz, &layer.w, 0.0, &mut da);
            dz = da;
            if l == 0 {
                grads.reverse();
                return (grads, dz);
            }
        }
        unreachable!("networks always have at least one layer");
    }

    /// All parameters flattened: per layer, the weight matrix row-major
    /// followed by the bias vector.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend(l.w.iter());
            out.extend(l.b.iter());
        }
        out
    }

    /// Writes flattened parameters back, in [`MlpParams::flatten`] order.
    /// Panics if the length does not match.
    pub fn assign_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "assign_flat: length mismatch");
        let mut it = flat.iter();
        for l in &mut self.layers {
            for w in l.w.iter_mut() {
                *w = *it.next().unwrap();
            }
            for b in l.b.iter_mut() {
                *b = *it.next().unwrap();
            }
        }
    }
}
