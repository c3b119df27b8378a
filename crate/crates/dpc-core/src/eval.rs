//! Monte Carlo evaluation: SER and power estimation, λ-sweeps, interference
//! mismatch studies, classical baselines, and grid exports of learned
//! encoder maps and decoder decision regions.
//!
//! Determinism contract: sample `i` of an estimate derives every random draw
//! from `base.substream(i)` in a fixed order (message, interference, noise,
//! then any dither), so estimates are bit-identical for any chunk size or
//! worker count. Chunks report exact integer error counts and their partial
//! sums are folded in index order.

use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;

use crate::channel::{snr_db, ChannelConfig, Interference};
use crate::classical::{
    awgn_reference_ser, thp_encode, thp_receive, wrap_centered, LatticeDpc,
};
use crate::constellation::Constellation;
use crate::lattice::Lattice;
use crate::math::from_db;
use crate::neural::train::{train, TrainConfig};
use crate::neural::NeuralDpcModel;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Toolkit version stamped into every output file header.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stream id for evaluation draws. Training owns streams 0 through 3.
pub const STREAM_EVAL: u64 = 4;

/// Offset between a run's seed and the seed of its evaluation draws, keeping
/// evaluation samples disjoint from training samples.
pub const EVAL_SEED_OFFSET: u64 = 1 << 32;

/// Seed stride between successive λ-sweep entries so each trained model gets
/// a fresh seed: entry `i` trains with `seed + i * SWEEP_SEED_STRIDE`.
pub const SWEEP_SEED_STRIDE: u64 = 1 << 16;

/// Samples per work unit; results do not depend on this value.
const CHUNK_SIZE: usize = 4096;

/// Column header of curve CSV files.
pub const CURVE_COLUMNS: &str = "scheme,lambda,snr_db,ser,ci95,n_samples,interference,seed";

/// A symbol error rate with its sampling pedigree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SerEstimate {
    /// Fraction of erroneous hard decisions.
    pub ser: f64,
    /// Number of Monte Carlo samples; 0 marks a closed-form value.
    pub n_samples: u64,
    /// Half-width of the normal-approximation 95% confidence interval.
    pub ci95_halfwidth: f64,
}

impl SerEstimate {
    /// Estimate from an exact error count.
    pub fn from_errors(errors: u64, n_samples: u64) -> SerEstimate {
        assert!(n_samples > 0, "estimate needs at least one sample");
        assert!(errors <= n_samples, "more errors than samples");
        let ser = errors as f64 / n_samples as f64;
        let ci95_halfwidth = 1.96 * (ser * (1.0 - ser) / n_samples as f64).sqrt();
        SerEstimate { ser, n_samples, ci95_halfwidth }
    }

    /// Zero-width estimate for closed-form error rates.
    pub fn exact(ser: f64) -> SerEstimate {
        SerEstimate { ser, n_samples: 0, ci95_halfwidth: 0.0 }
    }
}

/// One point of an SNR/SER trade-off curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    /// Scheme label; closed-form entries carry an `:analytic=1` suffix.
    pub scheme: String,
    /// Power-appetite weight for trained schemes, absent for baselines.
    pub lambda: Option<f64>,
    /// Mean transmit power over per-dimension noise variance, in dB.
    pub snr_db: f64,
    /// Symbol error rate estimate.
    pub ser: SerEstimate,
    /// Interference descriptor the point was evaluated under.
    pub interference: String,
    /// Seed that reproduces the point end to end.
    pub seed: u64,
}

impl CurvePoint {
    /// The point as one CSV row matching [`CURVE_COLUMNS`].
    pub fn csv_row(&self) -> String {
        let lambda = self.lambda.map(|l| l.to_string()).unwrap_or_default();
        format!(
            "{},{lambda},{},{},{},{},{},{}",
            self.scheme,
            self.snr_db,
            self.ser.ser,
            self.ser.ci95_halfwidth,
            self.ser.n_samples,
            self.interference,
            self.seed
        )
    }
}

/// A transmission scheme the Monte Carlo harness can drive end to end.
#[derive(Clone, Debug)]
pub enum Scheme {
    /// Scalar Tomlinson-Harashima precoding, applied independently per
    /// dimension with a shared interval length and per-dimension dithers.
    Thp { delta: f64, constellation: Constellation },
    /// Modulo-lattice precoding.
    Lattice(LatticeDpc),
    /// Interference-ignoring transmission: send the constellation point,
    /// decide by the nearest point to the raw channel output.
    Naive(Constellation),
    /// Interference-free reference: the channel adds noise only.
    Awgn(Constellation),
    /// Trained encoder/decoder pair.
    Neural(NeuralDpcModel),
}

impl Scheme {
    /// Tomlinson-Harashima scheme with `messages` points carved out of the
    /// centered interval (k = 1) or square cell (k = 2) of size `delta`.
    ///
    /// Errors if the dimension is unsupported, `delta` is not positive, or
    /// the message set does not fit the cell.
    pub fn thp(k: usize, delta: f64, messages: usize) -> Result<Scheme> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "thp scheme: interval must be positive, got {delta}"
            )));
        }
        let cell = match k {
            1 => Lattice::scalar(delta)?,
            2 => Lattice::cubic(delta)?,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "thp scheme: dimension must be 1 or 2, got {k}"
                )))
            }
        };
        let constellation = Constellation::from_lattice(&cell, messages)?;
        for p in constellation.points() {
            for &c in p {
                if !(-delta / 2.0..delta / 2.0).contains(&c) {
                    return Err(Error::InvalidArgument(format!(
                        "thp scheme: constellation coordinate {c} outside the cell"
                    )));
                }
            }
        }
        Ok(Scheme::Thp { delta, constellation })
    }

    /// Short label used in CSV rows.
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Thp { .. } => "thp",
            Scheme::Lattice(_) => "lattice",
            Scheme::Naive(_) => "naive",
            Scheme::Awgn(_) => "awgn",
            Scheme::Neural(_) => "neural",
        }
    }

    /// The scheme's message constellation.
    pub fn constellation(&self) -> &Constellation {
        match self {
            Scheme::Thp { constellation, .. } => constellation,
            Scheme::Lattice(dpc) => dpc.constellation(),
            Scheme::Naive(c) | Scheme::Awgn(c) => c,
            Scheme::Neural(model) => &model.constellation,
        }
    }

    /// Channel dimension.
    pub fn k(&self) -> usize {
        self.constellation().k()
    }

    /// Power-appetite weight, present for trained schemes only.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            Scheme::Neural(model) => Some(model.lambda),
            _ => None,
        }
    }
}

/// Index of the point closest to `y`; ties resolve to the smallest index.
fn nearest_index(points: &[Vec<f64>], y: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d: f64 = p.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Nearest point under the per-dimension wrapped metric of interval `delta`.
fn wrapped_nearest(points: &[Vec<f64>], y: &[f64], delta: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d: f64 = p
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let w = wrap_centered(a - b, delta);
                w * w
            })
            .sum();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

fn classical_chunk(
    scheme: &Scheme,
    channel: &ChannelConfig,
    lo: usize,
    hi: usize,
    base: &RngStream,
    decode: bool,
) -> (u64, f64) {
    let k = channel.k();
    let cons = scheme.constellation();
    let mut errors = 0u64;
    let mut power = 0.0;
    for i in lo..hi {
        let mut sub = base.substream(i as u64);
        let v = cons.sample_message(&mut sub);
        let s = channel.sample_interference(&mut sub);
        let n = channel.sample_noise(&mut sub);
        match scheme {
            Scheme::Thp { delta, constellation } => {
                let point = constellation.point(v);
                let half = delta / 2.0;
                let mut x = vec![0.0; k];
                let mut u = vec![0.0; k];
                for d in 0..k {
                    u[d] = sub.next_uniform(-half, half);
                    x[d] = thp_encode(point[d], s[d], u[d], *delta)
                        .expect("scheme construction validated the interval");
                    power += x[d] * x[d];
                }
                if decode {
                    let mut y_tilde = vec![0.0; k];
                    for d in 0..k {
                        y_tilde[d] = thp_receive(x[d] + s[d] + n[d], u[d], *delta)
                            .expect("scheme construction validated the interval");
                    }
                    if wrapped_nearest(constellation.points(), &y_tilde, *delta) != v {
                        errors += 1;
                    }
                }
            }
            Scheme::Lattice(dpc) => {
                let u = dpc.sample_dither(&mut sub);
                let x = dpc.encode(v, &s, &u);
                power += x.iter().map(|a| a * a).sum::<f64>();
                if decode {
                    let y: Vec<f64> = (0..k).map(|d| x[d] + s[d] + n[d]).collect();
                    if dpc.detect(&dpc.receive(&y, &u)) != v {
                        errors += 1;
                    }
                }
            }
            Scheme::Naive(c) => {
                let x = c.point(v);
                power += x.iter().map(|a| a * a).sum::<f64>();
                if decode {
                    let y: Vec<f64> = (0..k).map(|d| x[d] + s[d] + n[d]).collect();
                    if nearest_index(c.points(), &y) != v {
                        errors += 1;
                    }
                }
            }
            Scheme::Awgn(c) => {
                let x = c.point(v);
                power += x.iter().map(|a| a * a).sum::<f64>();
                if decode {
                    let y: Vec<f64> = (0..k).map(|d| x[d] + n[d]).collect();
                    if nearest_index(c.points(), &y) != v {
                        errors += 1;
                    }
                }
            }
            Scheme::Neural(_) => unreachable!("neural chunks run batched"),
        }
    }
    (errors, power)
}

fn neural_chunk(
    model: &NeuralDpcModel,
    channel: &ChannelConfig,
    lo: usize,
    hi: usize,
    base: &RngStream,
    decode: bool,
) -> (u64, f64) {
    let k = channel.k();
    let b = hi - lo;
    let mut vs = Vec::with_capacity(b);
    let mut s = Array2::zeros((b, k));
    let mut n = Array2::zeros((b, k));
    for i in 0..b {
        let mut sub = base.substream((lo + i) as u64);
        vs.push(model.constellation.sample_message(&mut sub));
        let si = channel.sample_interference(&mut sub);
        let ni = channel.sample_noise(&mut sub);
        for d in 0..k {
            s[[i, d]] = si[d];
            n[[i, d]] = ni[d];
        }
    }
    let x = model.encode_batch(&vs, &s);
    let power = x.iter().map(|a| a * a).sum::<f64>();
    if !decode {
        return (0, power);
    }
    let y = &x + &s + &n;
    let decisions = model.decode_batch(&y);
    let errors = decisions.iter().zip(&vs).filter(|(a, b)| a != b).count() as u64;
    (errors, power)
}

fn run_chunk(
    scheme: &Scheme,
    channel: &ChannelConfig,
    lo: usize,
    hi: usize,
    base: &RngStream,
    decode: bool,
) -> (u64, f64) {
    match scheme {
        Scheme::Neural(model) => neural_chunk(model, channel, lo, hi, base, decode),
        _ => classical_chunk(scheme, channel, lo, hi, base, decode),
    }
}

fn accumulate(
    scheme: &Scheme,
    channel: &ChannelConfig,
    n_samples: usize,
    base: &RngStream,
    decode: bool,
) -> Result<(u64, f64)> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "estimation needs at least one sample".into(),
        ));
    }
    if scheme.k() != channel.k() {
        return Err(Error::InvalidArgument(format!(
            "scheme dimension {} does not match channel dimension {}",
            scheme.k(),
            channel.k()
        )));
    }
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let partials: Vec<(u64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK_SIZE;
            let hi = usize::min(lo + CHUNK_SIZE, n_samples);
            run_chunk(scheme, channel, lo, hi, base, decode)
        })
        .collect();
    let mut errors = 0u64;
    let mut power_sum = 0.0;
    for (e, p) in partials {
        errors += e;
        power_sum += p;
    }
    Ok((errors, power_sum))
}

/// Symbol error rate of `scheme` over `channel` by Monte Carlo.
///
/// Sample `i` draws from `base.substream(i)`, so the result does not depend
/// on chunking or thread count. Errors on a dimension mismatch or an empty
/// sample budget.
pub fn estimate_ser(
    scheme: &Scheme,
    channel: &ChannelConfig,
    n_samples: usize,
    base: &RngStream,
) -> Result<SerEstimate> {
    let (errors, _) = accumulate(scheme, channel, n_samples, base, true)?;
    Ok(SerEstimate::from_errors(errors, n_samples as u64))
}

/// Mean transmit power `E|X|^2` of `scheme` over `channel` by Monte Carlo.
///
/// Draws exactly like [`estimate_ser`] (decisions are simply skipped), so
/// at equal arguments the power agrees bit for bit with [`evaluate`].
pub fn estimate_power(
    scheme: &Scheme,
    channel: &ChannelConfig,
    n_samples: usize,
    base: &RngStream,
) -> Result<f64> {
    let (_, power_sum) = accumulate(scheme, channel, n_samples, base, false)?;
    Ok(power_sum / n_samples as f64)
}

/// SER and mean transmit power from one shared set of draws.
pub fn evaluate(
    scheme: &Scheme,
    channel: &ChannelConfig,
    n_samples: usize,
    base: &RngStream,
) -> Result<(SerEstimate, f64)> {
    let (errors, power_sum) = accumulate(scheme, channel, n_samples, base, true)?;
    Ok((
        SerEstimate::from_errors(errors, n_samples as u64),
        power_sum / n_samples as f64,
    ))
}

/// Measures one curve point for `scheme` over `channel`.
///
/// `seed` is the run's user-facing seed and is reported in the row; the
/// evaluation draws use `seed + EVAL_SEED_OFFSET` under [`STREAM_EVAL`] so
/// they never overlap the training samples of a model trained with `seed`.
pub fn measure_curve_point(
    scheme: &Scheme,
    channel: &ChannelConfig,
    n_samples: usize,
    seed: u64,
) -> Result<CurvePoint> {
    let base = RngStream::new(seed.wrapping_add(EVAL_SEED_OFFSET), STREAM_EVAL);
    let (ser, power) = evaluate(scheme, channel, n_samples, &base)?;
    let interference = match scheme {
        Scheme::Awgn(_) => "none".to_string(),
        _ => channel.interference().descriptor(),
    };
    Ok(CurvePoint {
        scheme: scheme.label().to_string(),
        lambda: scheme.lambda(),
        snr_db: snr_db(power, channel.noise_var())?,
        ser,
        interference,
        seed,
    })
}

/// Closed-form interference-free reference point at symbol SNR `snr_db`
/// (`Es/N0`, in dB). The scheme label carries an `analytic=1` flag.
pub fn awgn_analytic_point(
    constellation: &Constellation,
    snr_db: f64,
    seed: u64,
) -> Result<CurvePoint> {
    let ser = awgn_reference_ser(constellation, snr_db)?;
    Ok(CurvePoint {
        scheme: "awgn:analytic=1".to_string(),
        lambda: None,
        snr_db,
        ser: SerEstimate::exact(ser),
        interference: "none".to_string(),
        seed,
    })
}

/// Monte Carlo interference-free reference point at symbol SNR `snr_db`
/// (`Es/N0`, in dB): noise is set to `Es / (2 * snr)` per dimension so the
/// row is directly comparable with [`awgn_analytic_point`].
pub fn awgn_mc_point(
    constellation: &Constellation,
    snr_db: f64,
    n_samples: usize,
    seed: u64,
) -> Result<CurvePoint> {
    let es = constellation.average_power();
    if !(es > 0.0) {
        return Err(Error::InvalidArgument(
            "awgn reference needs a constellation with positive power".into(),
        ));
    }
    let noise_var = es / (2.0 * from_db(snr_db));
    let channel = ChannelConfig::new(
        constellation.k(),
        Interference::Gaussian { variance: 0.0 },
        noise_var,
    )?;
    let scheme = Scheme::Awgn(constellation.clone());
    let base = RngStream::new(seed.wrapping_add(EVAL_SEED_OFFSET), STREAM_EVAL);
    let ser = estimate_ser(&scheme, &channel, n_samples, &base)?;
    Ok(CurvePoint {
        scheme: "awgn".to_string(),
        lambda: None,
        snr_db,
        ser,
        interference: "none".to_string(),
        seed,
    })
}

/// Trains one model per λ and measures its curve point.
///
/// Entry `i` trains with seed `cfg.seed + i * SWEEP_SEED_STRIDE` so every
/// model sees fresh data; training failures carry the offending λ. The
/// returned curve is sorted by SNR.
pub fn lambda_sweep(
    constellation: &Constellation,
    channel: &ChannelConfig,
    cfg: &TrainConfig,
    lambdas: &[f64],
    n_eval: usize,
) -> Result<Vec<CurvePoint>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one lambda".into()));
    }
    let mut points = Vec::with_capacity(lambdas.len());
    for (i, &lambda) in lambdas.iter().enumerate() {
        let mut run_cfg = cfg.clone();
        run_cfg.seed = cfg.seed.wrapping_add(i as u64 * SWEEP_SEED_STRIDE);
        let (ckpt, _) = train(constellation, channel, lambda, &run_cfg)?;
        let scheme = Scheme::Neural(ckpt.model);
        points.push(measure_curve_point(&scheme, channel, n_eval, run_cfg.seed)?);
    }
    points.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    Ok(points)
}

/// Measures Tomlinson-Harashima baseline points at the requested SNRs.
///
/// The interval for a target SNR `t` (dB) follows from the uniform transmit
/// distribution: per-dimension power `delta^2 / 12`, so
/// `delta = sqrt(12 * from_db(t) * noise_var / k)`. Rows are sorted by SNR.
pub fn thp_snr_sweep(
    channel: &ChannelConfig,
    messages: usize,
    snr_dbs: &[f64],
    n_eval: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if snr_dbs.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one SNR".into()));
    }
    let k = channel.k();
    let mut points = Vec::with_capacity(snr_dbs.len());
    for &t in snr_dbs {
        let power = from_db(t) * channel.noise_var();
        let delta = (12.0 * power / k as f64).sqrt();
        let scheme = Scheme::thp(k, delta, messages)?;
        points.push(measure_curve_point(&scheme, channel, n_eval, seed)?);
    }
    points.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    Ok(points)
}

/// Re-evaluates a trained model under each test interference variance
/// without retraining, in the given order.
///
/// All variances share one evaluation seed, so rows differ only through the
/// interference scale (common random numbers). Errors if the channel's
/// interference is not Gaussian.
pub fn mismatch_eval(
    model: &NeuralDpcModel,
    channel: &ChannelConfig,
    test_variances: &[f64],
    n_eval: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if !matches!(channel.interference(), Interference::Gaussian { .. }) {
        return Err(Error::InvalidArgument(
            "mismatch evaluation supports Gaussian interference only".into(),
        ));
    }
    if test_variances.is_empty() {
        return Err(Error::InvalidArgument(
            "mismatch evaluation needs at least one test variance".into(),
        ));
    }
    let mut points = Vec::with_capacity(test_variances.len());
    for &variance in test_variances {
        let test_channel =
            channel.with_interference(Interference::Gaussian { variance })?;
        let scheme = Scheme::Neural(model.clone());
        points.push(measure_curve_point(&scheme, &test_channel, n_eval, seed)?);
    }
    Ok(points)
}

/// Hard decisions of a 2-D model's decoder over a regular inclusive grid,
/// row-major in (y1, y2). Errors for 1-D models (export the encoder map
/// instead) and degenerate grids.
pub fn decision_region_grid(
    model: &NeuralDpcModel,
    bounds: [(f64, f64); 2],
    resolution: usize,
) -> Result<Vec<(f64, f64, usize)>> {
    if model.k() != 2 {
        return Err(Error::InvalidArgument(
            "decision regions need a 2-dimensional model; use the encoder map for scalar models"
                .into(),
        ));
    }
    check_grid(&bounds, resolution)?;
    let step = |(lo, hi): (f64, f64), i: usize| {
        lo + (hi - lo) * i as f64 / (resolution - 1) as f64
    };
    let mut rows = Vec::with_capacity(resolution * resolution);
    let mut y = Array2::zeros((resolution * resolution, 2));
    for i in 0..resolution {
        let y1 = step(bounds[0], i);
        for j in 0..resolution {
            let y2 = step(bounds[1], j);
            y[[i * resolution + j, 0]] = y1;
            y[[i * resolution + j, 1]] = y2;
            rows.push((y1, y2, 0));
        }
    }
    for (row, label) in rows.iter_mut().zip(model.decode_batch(&y)) {
        row.2 = label;
    }
    Ok(rows)
}

/// Encoder outputs of a 1-D model over a regular inclusive interference
/// grid: each row is `[s, x(v=0, s), x(v=1, s), ...]`.
pub fn encoder_map_grid(
    model: &NeuralDpcModel,
    s_range: (f64, f64),
    resolution: usize,
) -> Result<Vec<Vec<f64>>> {
    if model.k() != 1 {
        return Err(Error::InvalidArgument(
            "encoder maps need a 1-dimensional model; use decision regions for 2-D models".into(),
        ));
    }
    check_grid(&[s_range], resolution)?;
    let m = model.cardinality();
    let mut s = Array2::zeros((resolution, 1));
    for i in 0..resolution {
        s[[i, 0]] =
            s_range.0 + (s_range.1 - s_range.0) * i as f64 / (resolution - 1) as f64;
    }
    let mut rows: Vec<Vec<f64>> = (0..resolution)
        .map(|i| {
            let mut row = Vec::with_capacity(1 + m);
            row.push(s[[i, 0]]);
            row
        })
        .collect();
    for v in 0..m {
        let x = model.encode_batch(&vec![v; resolution], &s);
        for i in 0..resolution {
            rows[i].push(x[[i, 0]]);
        }
    }
    Ok(rows)
}

fn check_grid(bounds: &[(f64, f64)], resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    for &(lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// One-line comment header stamped on every CSV artifact.
pub fn csv_header(config_echo: &str) -> String {
    format!("# dpc {TOOLKIT_VERSION} | {config_echo}")
}

/// Writes a curve CSV: header comment, column names, one row per point.
pub fn write_curve_csv(path: &Path, config_echo: &str, points: &[CurvePoint]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&csv_header(config_echo));
    out.push('\n');
    out.push_str(CURVE_COLUMNS);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes a decision-region grid CSV with columns `y1,y2,label`.
pub fn write_decision_region_csv(
    path: &Path,
    config_echo: &str,
    rows: &[(f64, f64, usize)],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&csv_header(config_echo));
    out.push_str("\ny1,y2,label\n");
    for (y1, y2, label) in rows {
        out.push_str(&format!("{y1},{y2},{label}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes an encoder-map CSV with columns `s,x_v0,x_v1,...`.
pub fn write_encoder_map_csv(
    path: &Path,
    config_echo: &str,
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&csv_header(config_echo));
    out.push('\n');
    let m = rows.first().map_or(0, |r| r.len().saturating_sub(1));
    out.push_str("s");
    for v in 0..m {
        out.push_str(&format!(",x_v{v}"));
    }
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
