//! Python bindings for the dirty-paper coding toolkit.
//!
//! Exposes the deterministic RNG, lattices, constellations, channel
//! configuration, classical precoders, neural training, and Monte Carlo
//! evaluation as a `dpc_py` extension module. Wrappers hold the core types
//! by value and surface errors as `ValueError` (bad arguments or failed
//! invariants) or `IOError` (checkpoint and file problems).

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use dpc_core::channel::{ChannelConfig as CoreChannel, Interference};
use dpc_core::classical::{self, LatticeDpc as CoreLatticeDpc};
use dpc_core::constellation::Constellation as CoreConstellation;
use dpc_core::eval::{self, CurvePoint, Scheme, EVAL_SEED_OFFSET, STREAM_EVAL, TOOLKIT_VERSION};
use dpc_core::lattice::Lattice as CoreLattice;
use dpc_core::math;
use dpc_core::neural::checkpoint::Checkpoint as CoreCheckpoint;
use dpc_core::neural::{self, Activation, TrainConfig};
use dpc_core::rng::RngStream as CoreRng;
use dpc_core::Error;

fn pyerr(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Checkpoint(_) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Counter-based deterministic random stream.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct RngStream {
    inner: CoreRng,
}

#[pymethods]
impl RngStream {
    #[new]
    #[pyo3(signature = (seed, stream_id = 0))]
    fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { inner: CoreRng::new(seed, stream_id) }
    }

    /// Independent child stream derived from this stream's key.
    fn substream(&self, child: u64) -> Self {
        RngStream { inner: self.inner.substream(child) }
    }

    /// Next uniform draw in (0, 1).
    fn u01(&mut self) -> f64 {
        self.inner.next_u01()
    }

    /// Next standard normal draw.
    fn standard_normal(&mut self) -> f64 {
        self.inner.next_standard_normal()
    }

    /// Next uniform draw in [lo, hi).
    fn uniform(&mut self, lo: f64, hi: f64) -> PyResult<f64> {
        if !(lo < hi) {
            return Err(PyValueError::new_err(format!("empty interval [{lo}, {hi})")));
        }
        Ok(self.inner.next_uniform(lo, hi))
    }

    /// Next index uniform on {0, .., n-1}.
    fn index(&mut self, n: usize) -> PyResult<usize> {
        if n == 0 {
            return Err(PyValueError::new_err("index range must be non-empty"));
        }
        Ok(self.inner.next_index(n))
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn stream_id(&self) -> u64 {
        self.inner.stream_id()
    }

    fn __repr__(&self) -> String {
        format!("RngStream(seed={}, stream_id={})", self.inner.seed(), self.inner.stream_id())
    }
}

/// Full-rank lattice in one or two dimensions.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Lattice {
    inner: CoreLattice,
}

#[pymethods]
impl Lattice {
    /// Scalar lattice `delta * Z`.
    #[staticmethod]
    fn scalar(delta: f64) -> PyResult<Self> {
        CoreLattice::scalar(delta).map(|inner| Lattice { inner }).map_err(pyerr)
    }

    /// Cubic lattice `delta * Z^2`.
    #[staticmethod]
    fn cubic(delta: f64) -> PyResult<Self> {
        CoreLattice::cubic(delta).map(|inner| Lattice { inner }).map_err(pyerr)
    }

    /// Hexagonal lattice scaled to the given cell volume.
    #[staticmethod]
    fn hexagonal(volume: f64) -> PyResult<Self> {
        CoreLattice::hexagonal(volume).map(|inner| Lattice { inner }).map_err(pyerr)
    }

    /// Construction-A lattice from length-2 code words modulo `q`.
    #[staticmethod]
    fn construction_a(code_words: Vec<(u32, u32)>, q: u32, scale: f64) -> PyResult<Self> {
        let words: Vec<[u32; 2]> = code_words.into_iter().map(|(a, b)| [a, b]).collect();
        CoreLattice::construction_a(&words, q, scale)
            .map(|inner| Lattice { inner })
            .map_err(pyerr)
    }

    /// Lattice from generator rows given as a flat row-major list.
    #[staticmethod]
    fn from_generator(k: usize, rows: Vec<f64>) -> PyResult<Self> {
        CoreLattice::from_generator(k, &rows).map(|inner| Lattice { inner }).map_err(pyerr)
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn generator_rows(&self) -> Vec<Vec<f64>> {
        self.inner.generator_rows()
    }

    fn cell_volume(&self) -> f64 {
        self.inner.cell_volume()
    }

    /// Nearest lattice point to `z`.
    fn nearest_point(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&z)?;
        Ok(self.inner.nearest_point(&z))
    }

    /// `z` reduced to the fundamental Voronoi cell.
    fn mod_lattice(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&z)?;
        Ok(self.inner.mod_lattice(&z))
    }

    /// Dither drawn uniformly from the fundamental Voronoi cell.
    fn sample_dither(&self, rng: &mut RngStream) -> Vec<f64> {
        self.inner.sample_dither(&mut rng.inner)
    }

    /// Per-dimension second moment estimated on a grid over the cell.
    #[pyo3(signature = (resolution = 512))]
    fn second_moment_grid(&self, resolution: usize) -> f64 {
        self.inner.second_moment_grid(resolution)
    }

    fn __repr__(&self) -> String {
        format!("Lattice(k={}, cell_volume={})", self.inner.k(), self.inner.cell_volume())
    }
}

impl Lattice {
    fn check_dim(&self, z: &[f64]) -> PyResult<()> {
        if z.len() != self.inner.k() {
            return Err(PyValueError::new_err(format!(
                "point has dimension {}, lattice has dimension {}",
                z.len(),
                self.inner.k()
            )));
        }
        Ok(())
    }
}

/// Finite message constellation.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Constellation {
    inner: CoreConstellation,
}

#[pymethods]
impl Constellation {
    /// BPSK points -1 and +1.
    #[staticmethod]
    fn bpsk() -> Self {
        Constellation { inner: CoreConstellation::bpsk() }
    }

    /// QPSK points at (+-a, +-a) with total power `scale^2`.
    #[staticmethod]
    fn qpsk(scale: f64) -> PyResult<Self> {
        CoreConstellation::qpsk(scale).map(|inner| Constellation { inner }).map_err(pyerr)
    }

    /// Explicit point list, one row per message.
    #[staticmethod]
    fn from_points(k: usize, points: Vec<Vec<f64>>) -> PyResult<Self> {
        CoreConstellation::from_points(k, points)
            .map(|inner| Constellation { inner })
            .map_err(pyerr)
    }

    /// First `m` lattice points by distance from the origin.
    #[staticmethod]
    fn from_lattice(lattice: &Lattice, m: usize) -> PyResult<Self> {
        CoreConstellation::from_lattice(&lattice.inner, m)
            .map(|inner| Constellation { inner })
            .map_err(pyerr)
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn cardinality(&self) -> usize {
        self.inner.cardinality()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points().to_vec()
    }

    fn average_power(&self) -> f64 {
        self.inner.average_power()
    }

    fn min_distance(&self) -> f64 {
        self.inner.min_distance()
    }

    fn sample_message(&self, rng: &mut RngStream) -> usize {
        self.inner.sample_message(&mut rng.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.cardinality()
    }

    fn __repr__(&self) -> String {
        format!("Constellation(k={}, m={})", self.inner.k(), self.inner.cardinality())
    }
}

/// Interference-plus-noise channel description.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct ChannelConfig {
    inner: CoreChannel,
}

#[pymethods]
impl ChannelConfig {
    /// New channel with `interference` given as a descriptor such as
    /// "gaussian:30" or "qpsk:4.5".
    #[pyo3(signature = (k, interference = "gaussian:30", noise_var = 1.0))]
    #[new]
    fn new(k: usize, interference: &str, noise_var: f64) -> PyResult<Self> {
        let interference = Interference::parse(interference).map_err(pyerr)?;
        CoreChannel::new(k, interference, noise_var)
            .map(|inner| ChannelConfig { inner })
            .map_err(pyerr)
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn noise_var(&self) -> f64 {
        self.inner.noise_var()
    }

    #[getter]
    fn interference(&self) -> String {
        self.inner.interference().descriptor()
    }

    /// Same channel with a different interference descriptor.
    fn with_interference(&self, interference: &str) -> PyResult<Self> {
        let interference = Interference::parse(interference).map_err(pyerr)?;
        self.inner
            .with_interference(interference)
            .map(|inner| ChannelConfig { inner })
            .map_err(pyerr)
    }

    /// Same channel with a different per-dimension noise variance.
    fn with_noise_var(&self, noise_var: f64) -> PyResult<Self> {
        self.inner.with_noise_var(noise_var).map(|inner| ChannelConfig { inner }).map_err(pyerr)
    }

    fn sample_interference(&self, rng: &mut RngStream) -> Vec<f64> {
        self.inner.sample_interference(&mut rng.inner)
    }

    fn sample_noise(&self, rng: &mut RngStream) -> Vec<f64> {
        self.inner.sample_noise(&mut rng.inner)
    }

    /// Received vector `x + s + n` with fresh noise.
    fn transmit(&self, x: Vec<f64>, s: Vec<f64>, rng: &mut RngStream) -> PyResult<Vec<f64>> {
        if x.len() != self.inner.k() || s.len() != self.inner.k() {
            return Err(PyValueError::new_err(format!(
                "x and s must have dimension {}",
                self.inner.k()
            )));
        }
        Ok(self.inner.transmit(&x, &s, &mut rng.inner))
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelConfig(k={}, interference='{}', noise_var={})",
            self.inner.k(),
            self.inner.interference().descriptor(),
            self.inner.noise_var()
        )
    }
}

/// Modulo-lattice dirty-paper precoder.
#[pyclass]
struct LatticeDpc {
    inner: CoreLatticeDpc,
}

#[pymethods]
impl LatticeDpc {
    #[new]
    fn new(lattice: &Lattice, constellation: &Constellation, alpha: f64) -> PyResult<Self> {
        CoreLatticeDpc::new(lattice.inner.clone(), constellation.inner.clone(), alpha)
            .map(|inner| LatticeDpc { inner })
            .map_err(pyerr)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    /// Transmit vector for message `v` against interference `s` with dither `u`.
    fn encode(&self, v: usize, s: Vec<f64>, u: Vec<f64>) -> PyResult<Vec<f64>> {
        let k = self.inner.lattice().k();
        if v >= self.inner.constellation().cardinality() || s.len() != k || u.len() != k {
            return Err(PyValueError::new_err("message or vector dimensions out of range"));
        }
        Ok(self.inner.encode(v, &s, &u))
    }

    /// Folded receiver statistic `mod_lattice(alpha * y + u)`.
    fn receive(&self, y: Vec<f64>, u: Vec<f64>) -> PyResult<Vec<f64>> {
        let k = self.inner.lattice().k();
        if y.len() != k || u.len() != k {
            return Err(PyValueError::new_err(format!("y and u must have dimension {k}")));
        }
        Ok(self.inner.receive(&y, &u))
    }

    /// Message whose wrapped distance to the folded statistic is smallest.
    fn detect(&self, y_tilde: Vec<f64>) -> PyResult<usize> {
        if y_tilde.len() != self.inner.lattice().k() {
            return Err(PyValueError::new_err("folded statistic has the wrong dimension"));
        }
        Ok(self.inner.detect(&y_tilde))
    }

    fn sample_dither(&self, rng: &mut RngStream) -> Vec<f64> {
        self.inner.sample_dither(&mut rng.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "LatticeDpc(k={}, m={}, alpha={})",
            self.inner.lattice().k(),
            self.inner.constellation().cardinality(),
            self.inner.alpha()
        )
    }
}

/// Trained encoder/decoder pair plus reproducibility metadata.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Checkpoint {
    inner: CoreCheckpoint,
}

#[pymethods]
impl Checkpoint {
    /// Loads a checkpoint file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        CoreCheckpoint::load(std::path::Path::new(path))
            .map(|inner| Checkpoint { inner })
            .map_err(pyerr)
    }

    /// Parses a checkpoint from bytes.
    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        CoreCheckpoint::from_bytes(data).map(|inner| Checkpoint { inner }).map_err(pyerr)
    }

    /// Writes the checkpoint to a file.
    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(std::path::Path::new(path)).map_err(pyerr)
    }

    /// Serialized checkpoint bytes.
    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_bytes())
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.model.k()
    }

    #[getter]
    fn cardinality(&self) -> usize {
        self.inner.model.cardinality()
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.model.lambda
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.inner.omega0
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn final_loss(&self) -> f64 {
        self.inner.final_loss
    }

    #[getter]
    fn config_echo(&self) -> String {
        self.inner.config_echo.clone()
    }

    #[getter]
    fn activation(&self) -> String {
        self.inner.model.encoder.activation.descriptor()
    }

    /// Total trainable parameter count across encoder and decoder.
    #[getter]
    fn param_count(&self) -> usize {
        self.inner.model.encoder.flatten().len() + self.inner.model.decoder.flatten().len()
    }

    /// Transmit vector for message `v` against interference `s`.
    fn encode(&self, v: usize, s: Vec<f64>) -> PyResult<Vec<f64>> {
        let model = &self.inner.model;
        if v >= model.cardinality() || s.len() != model.k() {
            return Err(PyValueError::new_err("message index or interference out of range"));
        }
        Ok(model.encode(v, &s))
    }

    /// Most likely message for received vector `y`.
    fn decode(&self, y: Vec<f64>) -> PyResult<usize> {
        if y.len() != self.inner.model.k() {
            return Err(PyValueError::new_err("received vector has the wrong dimension"));
        }
        Ok(self.inner.model.decode(&y))
    }

    /// Posterior probabilities over messages for received vector `y`.
    fn decode_probs(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        if y.len() != self.inner.model.k() {
            return Err(PyValueError::new_err("received vector has the wrong dimension"));
        }
        Ok(self.inner.model.decode_probs(&y))
    }

    fn __repr__(&self) -> String {
        format!(
            "Checkpoint(k={}, m={}, lambda={}, final_loss={:.6})",
            self.inner.model.k(),
            self.inner.model.cardinality(),
            self.inner.model.lambda,
            self.inner.final_loss
        )
    }
}

fn point_dict<'py>(py: Python<'py>, p: &CurvePoint) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scheme", &p.scheme)?;
    d.set_item("lambda", p.lambda)?;
    d.set_item("snr_db", p.snr_db)?;
    d.set_item("ser", p.ser.ser)?;
    d.set_item("ci95", p.ser.ci95_halfwidth)?;
    d.set_item("n_samples", p.ser.n_samples)?;
    d.set_item("interference", &p.interference)?;
    d.set_item("seed", p.seed)?;
    Ok(d)
}

/// Tomlinson-Harashima transmit sample for one dimension.
#[pyfunction]
fn thp_encode(v: f64, s: f64, u: f64, delta: f64) -> PyResult<f64> {
    classical::thp_encode(v, s, u, delta).map_err(pyerr)
}

/// Tomlinson-Harashima folded receiver statistic for one dimension.
#[pyfunction]
fn thp_receive(y: f64, u: f64, delta: f64) -> PyResult<f64> {
    classical::thp_receive(y, u, delta).map_err(pyerr)
}

/// Exact symbol error rate of modulo-Delta detection of `m` PAM levels.
#[pyfunction]
fn thp_ser_exact(delta: f64, m: usize, noise_var: f64) -> PyResult<f64> {
    classical::thp_ser_exact(delta, m, noise_var).map_err(pyerr)
}

/// MMSE inflation factor `power / (power + noise_var)`.
#[pyfunction]
fn mmse_alpha(power: f64, noise_var: f64) -> PyResult<f64> {
    classical::mmse_alpha(power, noise_var).map_err(pyerr)
}

/// Closed-form BPSK symbol error rate at linear SNR `Es/N0`.
#[pyfunction]
fn bpsk_awgn_ser(snr: f64) -> PyResult<f64> {
    classical::bpsk_awgn_ser(snr).map_err(pyerr)
}

/// Closed-form QPSK symbol error rate at linear SNR `Es/N0`.
#[pyfunction]
fn qpsk_awgn_ser(snr: f64) -> PyResult<f64> {
    classical::qpsk_awgn_ser(snr).map_err(pyerr)
}

/// Closed-form AWGN symbol error rate for a BPSK or QPSK constellation.
#[pyfunction]
fn awgn_reference_ser(constellation: &Constellation, snr_db: f64) -> PyResult<f64> {
    classical::awgn_reference_ser(&constellation.inner, snr_db).map_err(pyerr)
}

/// Standard normal tail probability.
#[pyfunction]
fn q_function(x: f64) -> f64 {
    math::q_function(x)
}

/// Linear ratio to decibels.
#[pyfunction]
fn to_db(x: f64) -> PyResult<f64> {
    math::to_db(x).map_err(pyerr)
}

/// Decibels to linear ratio.
#[pyfunction]
fn from_db(db: f64) -> f64 {
    math::from_db(db)
}

/// SNR in dB given mean transmit power and per-dimension noise variance.
#[pyfunction]
fn snr_db(power: f64, noise_var: f64) -> PyResult<f64> {
    dpc_core::channel::snr_db(power, noise_var).map_err(pyerr)
}

/// Interference-free capacity `0.5 * log2(1 + P / noise_var)` in bits.
#[pyfunction]
fn dpc_capacity_bits(power: f64, noise_var: f64) -> PyResult<f64> {
    dpc_core::channel::dpc_capacity_bits(power, noise_var).map_err(pyerr)
}

/// Trains an encoder/decoder pair; returns the checkpoint and per-epoch losses.
#[pyfunction]
#[pyo3(signature = (
    constellation,
    channel,
    lambda_ = 100.0,
    epochs = 150,
    steps_per_epoch = 200,
    batch_size = 512,
    lr = 1e-3,
    activation = "sin",
    omega0 = 10.0,
    hidden_width = 128,
    hidden_layers = 3,
    seed = 1,
))]
#[allow(clippy::too_many_arguments)]
fn train(
    constellation: &Constellation,
    channel: &ChannelConfig,
    lambda_: f64,
    epochs: usize,
    steps_per_epoch: usize,
    batch_size: usize,
    lr: f64,
    activation: &str,
    omega0: f64,
    hidden_width: usize,
    hidden_layers: usize,
    seed: u64,
) -> PyResult<(Checkpoint, Vec<f64>)> {
    let cfg = TrainConfig {
        epochs,
        steps_per_epoch,
        batch_size,
        lr,
        hidden_width,
        hidden_layers,
        activation: Activation::parse(activation).map_err(pyerr)?,
        omega0,
        seed,
    };
    let (ckpt, losses) =
        neural::train(&constellation.inner, &channel.inner, lambda_, &cfg).map_err(pyerr)?;
    Ok((Checkpoint { inner: ckpt }, losses))
}

/// Monte Carlo evaluation of a trained model on a channel.
///
/// Returns a dict with the measured symbol error rate, its 95% confidence
/// half-width, the mean transmit power, and the resulting SNR in dB.
#[pyfunction]
#[pyo3(signature = (checkpoint, channel, n_samples = 1 << 18, seed = 1))]
fn evaluate<'py>(
    py: Python<'py>,
    checkpoint: &Checkpoint,
    channel: &ChannelConfig,
    n_samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let scheme = Scheme::Neural(checkpoint.inner.model.clone());
    let base = CoreRng::new(seed.wrapping_add(EVAL_SEED_OFFSET), STREAM_EVAL);
    let (est, power) = eval::evaluate(&scheme, &channel.inner, n_samples, &base).map_err(pyerr)?;
    let d = PyDict::new(py);
    d.set_item("scheme", scheme.label())?;
    d.set_item("lambda", checkpoint.inner.model.lambda)?;
    d.set_item("ser", est.ser)?;
    d.set_item("ci95", est.ci95_halfwidth)?;
    d.set_item("n_samples", est.n_samples)?;
    d.set_item("power", power)?;
    d.set_item("snr_db", dpc_core::channel::snr_db(power, channel.inner.noise_var()).map_err(pyerr)?)?;
    d.set_item("interference", channel.inner.interference().descriptor())?;
    d.set_item("seed", seed)?;
    Ok(d)
}

/// Tomlinson-Harashima baseline curve at the requested SNR targets.
#[pyfunction]
#[pyo3(signature = (channel, messages, snr_dbs, n_samples = 1 << 18, seed = 1))]
fn thp_curve<'py>(
    py: Python<'py>,
    channel: &ChannelConfig,
    messages: usize,
    snr_dbs: Vec<f64>,
    n_samples: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let points =
        eval::thp_snr_sweep(&channel.inner, messages, &snr_dbs, n_samples, seed).map_err(pyerr)?;
    points.iter().map(|p| point_dict(py, p)).collect()
}

/// Encoder transmit map on a grid of interference values (k = 1 models).
///
/// Returns rows `[s, x(v=0, s), .., x(v=m-1, s)]`.
#[pyfunction]
#[pyo3(signature = (checkpoint, lo = -15.0, hi = 15.0, resolution = 256))]
fn encoder_map(
    checkpoint: &Checkpoint,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> PyResult<Vec<Vec<f64>>> {
    eval::encoder_map_grid(&checkpoint.inner.model, (lo, hi), resolution).map_err(pyerr)
}

/// Decoder decision regions on a grid (k = 2 models).
///
/// Returns `(y1, y2, label)` triples in row-major order.
#[pyfunction]
#[pyo3(signature = (checkpoint, lo = -15.0, hi = 15.0, resolution = 256))]
fn decision_regions(
    checkpoint: &Checkpoint,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> PyResult<Vec<(f64, f64, usize)>> {
    eval::decision_region_grid(&checkpoint.inner.model, [(lo, hi), (lo, hi)], resolution)
        .map_err(pyerr)
}

#[pymodule]
fn dpc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", TOOLKIT_VERSION)?;
    m.add_class::<RngStream>()?;
    m.add_class::<Lattice>()?;
    m.add_class::<Constellation>()?;
    m.add_class::<ChannelConfig>()?;
    m.add_class::<LatticeDpc>()?;
    m.add_class::<Checkpoint>()?;
    m.add_function(wrap_pyfunction!(thp_encode, m)?)?;
    m.add_function(wrap_pyfunction!(thp_receive, m)?)?;
    m.add_function(wrap_pyfunction!(thp_ser_exact, m)?)?;
    m.add_function(wrap_pyfunction!(mmse_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(bpsk_awgn_ser, m)?)?;
    m.add_function(wrap_pyfunction!(qpsk_awgn_ser, m)?)?;
    m.add_function(wrap_pyfunction!(awgn_reference_ser, m)?)?;
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(to_db, m)?)?;
    m.add_function(wrap_pyfunction!(from_db, m)?)?;
    m.add_function(wrap_pyfunction!(snr_db, m)?)?;
    m.add_function(wrap_pyfunction!(dpc_capacity_bits, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(thp_curve, m)?)?;
    m.add_function(wrap_pyfunction!(encoder_map, m)?)?;
    m.add_function(wrap_pyfunction!(decision_regions, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_mapping_distinguishes_io() {
        pyo3::Python::initialize();
        Python::attach(|py| {
            let io = pyerr(Error::Checkpoint("bad magic".into()));
            assert!(io.is_instance_of::<PyIOError>(py));
            let val = pyerr(Error::InvalidArgument("nope".into()));
            assert!(val.is_instance_of::<PyValueError>(py));
        });
    }
}
