//! Training loop for the neural dirty-paper coder.
//!
//! Each step samples a fresh batch of (message, interference, noise)
//! triples, pushes them through encoder, channel, and decoder, and descends
//! the cross entropy plus a transmit-power penalty with Adam on both
//! networks. There is no dataset: the channel model is the data generator.

use super::adam::AdamState;
use super::checkpoint::Checkpoint;
use super::mlp::{Activation, LayerGrads, MlpParams};
use super::{softmax_in_place, NeuralDpcModel};
use crate::channel::ChannelConfig;
use crate::constellation::Constellation;
use crate::rng::RngStream;
use crate::{Error, Result};
use ndarray::Array2;

/// Stream ids under the training seed.
const STREAM_INIT_ENCODER: u64 = 1;
const STREAM_INIT_DECODER: u64 = 2;
const STREAM_BATCHES: u64 = 3;

/// Training hyperparameters.
///
/// The default `omega0` of 10 matters for sinusoidal networks: it scales the
/// first-layer pre-activations so that typical interference amplitudes span
/// several periods of the sine, which is what lets the encoder learn a
/// folding (modulo-like) transmit map. At `omega0 = 1` the first layer stays
/// in the near-linear part of the sine and training settles into a
/// high-power linear-cancellation solution instead.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub steps_per_epoch: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    pub activation: Activation,
    pub omega0: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            epochs: 150,
            steps_per_epoch: 200,
            batch_size: 512,
            lr: 1e-3,
            hidden_width: 128,
            hidden_layers: 3,
            activation: Activation::Sinusoidal,
            omega0: 10.0,
            seed: 1,
        }
    }
}

impl TrainConfig {
    /// Checks that every hyperparameter is in range.
    pub fn validate(&self) -> Result<()> {
        // epochs may be zero: that trains nothing and checkpoints the
        // freshly initialized networks.
        let positive = [
            ("steps-per-epoch", self.steps_per_epoch),
            ("batch-size", self.batch_size),
            ("hidden-width", self.hidden_width),
            ("hidden-layers", self.hidden_layers),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("lr must be positive, got {}", self.lr)));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::Config(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        Ok(())
    }
}

/// Learning rate at `epoch` under the step schedule: the base rate halves
/// once 60% and again once 80% of `total_epochs` are done.
pub fn lr_at_epoch(base_lr: f64, epoch: usize, total_epochs: usize) -> f64 {
    let mut lr = base_lr;
    if epoch >= total_epochs * 6 / 10 {
        lr *= 0.5;
    }
    if epoch >= total_epochs * 8 / 10 {
        lr *= 0.5;
    }
    lr
}

/// One training batch: encoder inputs plus everything needed to simulate
/// the channel and score the decoder.
#[derive(Clone, Debug)]
pub struct TrainBatch {
    /// One-hot messages concatenated with interference, one row per sample.
    pub enc_in: Array2<f64>,
    /// Message indices.
    pub vs: Vec<usize>,
    /// Interference rows.
    pub s: Array2<f64>,
    /// Noise rows.
    pub n: Array2<f64>,
}

/// Draws a batch from the channel model. Per sample the draw order is
/// message, interference, noise.
pub fn sample_batch(
    constellation: &Constellation,
    channel: &ChannelConfig,
    batch_size: usize,
    rng: &mut RngStream,
) -> TrainBatch {
    let m = constellation.cardinality();
    let k = constellation.k();
    let mut enc_in = Array2::zeros((batch_size, m + k));
    let mut s = Array2::zeros((batch_size, k));
    let mut n = Array2::zeros((batch_size, k));
    let mut vs = Vec::with_capacity(batch_size);
    for i in 0..batch_size {
        let v = constellation.sample_message(rng);
        let si = channel.sample_interference(rng);
        let ni = channel.sample_noise(rng);
        enc_in[[i, v]] = 1.0;
        for d in 0..k {
            enc_in[[i, m + d]] = si[d];
            s[[i, d]] = si[d];
            n[[i, d]] = ni[d];
        }
        vs.push(v);
    }
    TrainBatch { enc_in, vs, s, n }
}

/// Loss and parameter gradients for one batch.
#[derive(Debug)]
pub struct LossGrads {
    pub loss: f64,
    pub encoder: Vec<LayerGrads>,
    pub decoder: Vec<LayerGrads>,
}

/// Mean loss over the batch and its exact gradients for both networks.
///
/// The per-sample loss is the cross entropy in bits of the decoder softmax
/// against the sent message plus `power_weight * |x|^2` for the encoder
/// output `x`. The backward pass folds the channel's identity Jacobian and
/// the power term's `2 * power_weight * x` into the encoder gradient.
///
/// Errors if `power_weight` is negative or not finite.
pub fn loss_and_grads(
    encoder: &MlpParams,
    decoder: &MlpParams,
    batch: &TrainBatch,
    power_weight: f64,
) -> Result<LossGrads> {
    if !(power_weight >= 0.0 && power_weight.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "power weight must be finite and nonnegative, got {power_weight}"
        )));
    }
    let b = batch.vs.len();
    assert!(b > 0, "loss_and_grads: empty batch");
    let inv_b = 1.0 / b as f64;

    let (x, enc_cache) = encoder.forward_batch(&batch.enc_in);
    let y = &x + &batch.s + &batch.n;
    let (logits, dec_cache) = decoder.forward_batch(&y);

    // Cross entropy is reported in bits, so the softmax gradient picks up
    // the same log2(e) factor as the loss itself.
    let ce_scale = inv_b * std::f64::consts::LOG2_E;
    let mut loss = 0.0;
    let mut dlogits = logits;
    for (i, mut row) in dlogits.outer_iter_mut().enumerate() {
        let r = row.as_slice_mut().expect("row-major batch");
        let max = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + r.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
        loss += (lse - r[batch.vs[i]]) * ce_scale;
        softmax_in_place(r);
        r[batch.vs[i]] -= 1.0;
        for v in r.iter_mut() {
            *v *= ce_scale;
        }
    }
    loss += power_weight * inv_b * x.iter().map(|&v| v * v).sum::<f64>();

    let (dec_grads, dy) = decoder.backward_batch(&dec_cache, &dlogits);
    let dx = &dy + &(2.0 * power_weight * inv_b * &x);
    let (enc_grads, _) = encoder.backward_batch(&enc_cache, &dx);

    Ok(LossGrads { loss, encoder: enc_grads, decoder: dec_grads })
}

/// Trains an encoder/decoder pair on the given channel.
///
/// `lambda` sets the power appetite: the optimized per-sample objective is
/// `cross_entropy_bits + |x|^2 / lambda`, so larger `lambda` tolerates more
/// transmit power (and thus reaches higher SNR operating points) while
/// smaller `lambda` squeezes the power down. Returns the checkpoint and the
/// mean loss per epoch.
///
/// Errors on invalid configuration, mismatched dimensions, or a non-finite
/// loss (divergence).
pub fn train(
    constellation: &Constellation,
    channel: &ChannelConfig,
    lambda: f64,
    cfg: &TrainConfig,
) -> Result<(Checkpoint, Vec<f64>)> {
    cfg.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    if constellation.k() != channel.k() {
        return Err(Error::Config(format!(
            "constellation dimension {} does not match channel dimension {}",
            constellation.k(),
            channel.k()
        )));
    }
    let m = constellation.cardinality();
    let k = constellation.k();
    let mut enc_dims = vec![m + k];
    let mut dec_dims = vec![k];
    for _ in 0..cfg.hidden_layers {
        enc_dims.push(cfg.hidden_width);
        dec_dims.push(cfg.hidden_width);
    }
    enc_dims.push(k);
    dec_dims.push(m);

    let root = RngStream::new(cfg.seed, 0);
    let mut enc_rng = root.substream(STREAM_INIT_ENCODER);
    let mut dec_rng = root.substream(STREAM_INIT_DECODER);
    let mut batch_rng = root.substream(STREAM_BATCHES);

    let mut encoder = MlpParams::init(&enc_dims, cfg.activation, cfg.omega0, &mut enc_rng)?;
    let mut decoder = MlpParams::init(&dec_dims, cfg.activation, cfg.omega0, &mut dec_rng)?;
    let mut enc_adam = AdamState::new(&encoder);
    let mut dec_adam = AdamState::new(&decoder);
    let power_weight = 1.0 / lambda;

    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let lr = lr_at_epoch(cfg.lr, epoch, cfg.epochs);
        let mut epoch_loss = 0.0;
        for step in 0..cfg.steps_per_epoch {
            let batch = sample_batch(constellation, channel, cfg.batch_size, &mut batch_rng);
            let lg = loss_and_grads(&encoder, &decoder, &batch, power_weight)?;
            if !lg.loss.is_finite() {
                return Err(Error::Diverged { epoch, step, lambda });
            }
            enc_adam.step(&mut encoder, &lg.encoder, lr);
            dec_adam.step(&mut decoder, &lg.decoder, lr);
            epoch_loss += lg.loss;
        }
        epoch_losses.push(epoch_loss / cfg.steps_per_epoch as f64);
    }

    // Zero-epoch runs checkpoint the raw initialization; they have no loss.
    let final_loss = epoch_losses.last().copied().unwrap_or(f64::NAN);
    let config_echo = format!(
        "k={k} messages={m} interference={} noise-var={} lambda={lambda} epochs={} \
         steps-per-epoch={} batch-size={} lr={} activation={} omega0={} hidden-width={} \
         hidden-layers={} seed={}",
        channel.interference().descriptor(),
        channel.noise_var(),
        cfg.epochs,
        cfg.steps_per_epoch,
        cfg.batch_size,
        cfg.lr,
        cfg.activation.descriptor(),
        cfg.omega0,
        cfg.hidden_width,
        cfg.hidden_layers,
        cfg.seed,
    );
    let model = NeuralDpcModel::new(encoder, decoder, constellation.clone(), lambda)?;
    let checkpoint = Checkpoint {
        model,
        omega0: cfg.omega0,
        seed: cfg.seed,
        final_loss,
        config_echo,
    };
    Ok((checkpoint, epoch_losses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Interference;

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            epochs: 8,
            steps_per_epoch: 25,
            batch_size: 64,
            lr: 1e-3,
            hidden_width: 24,
            hidden_layers: 2,
            activation: Activation::Sinusoidal,
            omega0: 1.0,
            seed: 7,
        }
    }

    fn bpsk_channel(noise: f64) -> ChannelConfig {
        ChannelConfig::new(1, Interference::Gaussian { variance: 5.0 }, noise).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        // Zero epochs is a valid request for a freshly initialized model.
        assert!(TrainConfig { epochs: 0, ..small_cfg() }.validate().is_ok());
        assert!(TrainConfig { batch_size: 0, ..small_cfg() }.validate().is_err());
        assert!(TrainConfig { lr: 0.0, ..small_cfg() }.validate().is_err());
        assert!(TrainConfig { omega0: -1.0, ..small_cfg() }.validate().is_err());
    }

    #[test]
    fn lr_schedule_steps_down() {
        assert_eq!(lr_at_epoch(1e-3, 0, 500), 1e-3);
        assert_eq!(lr_at_epoch(1e-3, 299, 500), 1e-3);
        assert_eq!(lr_at_epoch(1e-3, 300, 500), 5e-4);
        assert_eq!(lr_at_epoch(1e-3, 399, 500), 5e-4);
        assert_eq!(lr_at_epoch(1e-3, 400, 500), 2.5e-4);
        assert_eq!(lr_at_epoch(1e-3, 499, 500), 2.5e-4);
    }

    #[test]
    fn sample_batch_layout() {
        let c = Constellation::bpsk();
        let ch = bpsk_channel(1.0);
        let mut rng = RngStream::new(1, 0);
        let b = sample_batch(&c, &ch, 32, &mut rng);
        assert_eq!(b.enc_in.dim(), (32, 3));
        assert_eq!(b.s.dim(), (32, 1));
        for i in 0..32 {
            let v = b.vs[i];
            assert_eq!(b.enc_in[[i, v]], 1.0);
            assert_eq!(b.enc_in[[i, 1 - v]], 0.0);
            assert_eq!(b.enc_in[[i, 2]], b.s[[i, 0]]);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = RngStream::new(11, 0);
        let c = Constellation::bpsk();
        let ch = bpsk_channel(0.5);
        for act in [Activation::Sinusoidal, Activation::LeakyRelu { slope: 0.01 }] {
            for &w in &[0.0, 0.2] {
                let enc = MlpParams::init(&[3, 6, 1], act, 1.0, &mut rng).unwrap();
                let dec = MlpParams::init(&[1, 6, 2], act, 1.0, &mut rng).unwrap();
                let batch = sample_batch(&c, &ch, 5, &mut rng);
                let lg = loss_and_grads(&enc, &dec, &batch, w).unwrap();
                let mut analytic: Vec<f64> = Vec::new();
                for g in lg.encoder.iter().chain(&lg.decoder) {
                    analytic.extend(g.w.iter());
                    analytic.extend(g.b.iter());
                }
                let ne = enc.param_count();
                let mut flat = enc.flatten();
                flat.extend(dec.flatten());
                let fd = crate::math::finite_diff_grad(
                    |p| {
                        let mut e = enc.clone();
                        let mut d = dec.clone();
                        e.assign_flat(&p[..ne]);
                        d.assign_flat(&p[ne..]);
                        loss_and_grads(&e, &d, &batch, w).unwrap().loss
                    },
                    &flat,
                    1e-5,
                );
                for (a, f) in analytic.iter().zip(&fd) {
                    let rel = (a - f).abs() / a.abs().max(f.abs()).max(1e-6);
                    assert!(rel < 1e-4, "{act:?} w={w}: {a} vs {f} (rel {rel})");
                }
            }
        }
    }

    #[test]
    fn uniform_decoder_loss_is_log2_cardinality() {
        let q = Constellation::qpsk(1.0).unwrap();
        let ch = ChannelConfig::new(2, Interference::Gaussian { variance: 5.0 }, 1.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        let mut enc = MlpParams::init(&[6, 8, 2], Activation::Sinusoidal, 1.0, &mut rng).unwrap();
        let mut dec = MlpParams::init(&[2, 8, 4], Activation::Sinusoidal, 1.0, &mut rng).unwrap();
        // Zeroed decoder weights give uniform softmax rows, so the cross
        // entropy is exactly log2 of the cardinality; zeroed encoder weights
        // silence the power term even with a nonzero weight on it.
        enc.assign_flat(&vec![0.0; enc.param_count()]);
        dec.assign_flat(&vec![0.0; dec.param_count()]);
        let batch = sample_batch(&q, &ch, 16, &mut rng);
        let lg = loss_and_grads(&enc, &dec, &batch, 0.2).unwrap();
        assert!((lg.loss - 2.0).abs() < 1e-12, "loss {}", lg.loss);
    }

    #[test]
    fn loss_decreases_on_small_run() {
        let c = Constellation::bpsk();
        let ch = bpsk_channel(0.25);
        let (ckpt, losses) = train(&c, &ch, 50.0, &small_cfg()).unwrap();
        assert_eq!(losses.len(), 8);
        assert!(losses.iter().all(|l| l.is_finite()));
        assert!(
            losses.last().unwrap() < &losses[0],
            "no improvement: {losses:?}"
        );
        assert!(ckpt.final_loss == *losses.last().unwrap());
        assert_eq!(ckpt.model.cardinality(), 2);
    }

    #[test]
    fn training_is_deterministic() {
        let c = Constellation::bpsk();
        let ch = bpsk_channel(1.0);
        let cfg = TrainConfig { epochs: 2, ..small_cfg() };
        let (a, la) = train(&c, &ch, 10.0, &cfg).unwrap();
        let (b, lb) = train(&c, &ch, 10.0, &cfg).unwrap();
        assert_eq!(la, lb);
        assert_eq!(a.model, b.model);
        assert_eq!(a.config_echo, b.config_echo);
    }

    #[test]
    fn different_seeds_differ() {
        let c = Constellation::bpsk();
        let ch = bpsk_channel(1.0);
        let cfg = TrainConfig { epochs: 1, steps_per_epoch: 5, ..small_cfg() };
        let (a, _) = train(&c, &ch, 10.0, &cfg).unwrap();
        let (b, _) = train(&c, &ch, 10.0, &TrainConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.model, b.model);
    }

    #[test]
    fn divergence_is_reported() {
        let c = Constellation::bpsk();
        let ch = bpsk_channel(1.0);
        let cfg = TrainConfig {
            lr: 1e80,
            activation: Activation::LeakyRelu { slope: 0.01 },
            epochs: 1,
            steps_per_epoch: 10,
            ..small_cfg()
        };
        match train(&c, &ch, 10.0, &cfg) {
            Err(Error::Diverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_lambda_and_dimension_mismatch() {
        let c = Constellation::bpsk();
        let ch = bpsk_channel(1.0);
        assert!(train(&c, &ch, 0.0, &small_cfg()).is_err());
        assert!(train(&c, &ch, f64::NAN, &small_cfg()).is_err());
        let q = Constellation::qpsk(1.0).unwrap();
        assert!(train(&q, &ch, 10.0, &small_cfg()).is_err());
    }
}
