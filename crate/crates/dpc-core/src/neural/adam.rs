//! Adam optimizer over MLP parameter stacks.

use super::mlp::{LayerGrads, MlpParams};
use ndarray::{Array1, Array2};

/// First- and second-moment state for one network.
#[derive(Clone, Debug)]
pub struct AdamState {
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<(Array2<f64>, Array1<f64>)>,
    v: Vec<(Array2<f64>, Array1<f64>)>,
}

impl AdamState {
    /// Zero-initialized state shaped like `params`, with the standard
    /// coefficients `beta1 = 0.9`, `beta2 = 0.999`, `eps = 1e-8`.
    pub fn new(params: &MlpParams) -> AdamState {
        let zeros = |l: &super::mlp::DenseLayer| {
            (Array2::zeros(l.w.dim()), Array1::zeros(l.b.dim()))
        };
        AdamState {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: params.layers.iter().map(zeros).collect(),
            v: params.layers.iter().map(zeros).collect(),
        }
    }

    /// Number of steps taken.
    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One bias-corrected Adam update of `params` along `grads` at learning
    /// rate `lr`. Panics if the gradient stack does not match the parameter
    /// shapes.
    pub fn step(&mut self, params: &mut MlpParams, grads: &[LayerGrads], lr: f64) {
        assert_eq!(grads.len(), params.layers.len(), "adam: layer count mismatch");
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (l, layer) in params.layers.iter_mut().enumerate() {
            let g = &grads[l];
            assert_eq!(g.w.dim(), layer.w.dim(), "adam: weight shape mismatch");
            let (mw, mb) = &mut self.m[l];
            let (vw, vb) = &mut self.v[l];
            for (((p, g), m), v) in layer
                .w
                .iter_mut()
                .zip(g.w.iter())
                .zip(mw.iter_mut())
                .zip(vw.iter_mut())
            {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
            }
            for (((p, g), m), v) in layer
                .b
                .iter_mut()
                .zip(g.b.iter())
                .zip(mb.iter_mut())
                .zip(vb.iter_mut())
            {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
            }
        }
    }
}
