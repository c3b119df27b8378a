//! Binary checkpoint format for trained encoder/decoder pairs.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic      b"NDPC"
//! version    u32 (currently 1)
//! k          u32    channel dimension
//! messages   u32    constellation size
//! activation u32    0 = sin, 1 = leaky ReLU
//! slope      f64    leaky ReLU slope (0 for sin)
//! omega0     f64
//! lambda     f64
//! seed       u64
//! final_loss f64
//! enc dims   u32 count, then that many u32 layer sizes
//! dec dims   u32 count, then that many u32 layer sizes
//! points     messages * k f64, row-major by message index
//! echo       u32 byte length, then UTF-8 training config echo
//! enc params per layer: weights row-major, then biases
//! dec params same layout
//! crc32      u32 over every preceding byte
//! ```

use super::mlp::{Activation, MlpParams};
use super::NeuralDpcModel;
use crate::constellation::Constellation;
use crate::rng::RngStream;
use crate::{Error, Result};
use std::path::Path;

const MAGIC: &[u8; 4] = b"NDPC";
const VERSION: u32 = 1;

/// A trained model plus the metadata needed to reproduce and evaluate it.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub model: NeuralDpcModel,
    pub omega0: f64,
    pub seed: u64,
    pub final_loss: f64,
    pub config_echo: String,
}

impl Checkpoint {
    /// Serializes to the documented binary layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let model = &self.model;
        let k = model.k() as u32;
        let m = model.cardinality() as u32;
        let (act_id, slope) = match model.encoder.activation {
            Activation::Sinusoidal => (0u32, 0.0),
            Activation::LeakyRelu { slope } => (1u32, slope),
        };
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&k.to_le_bytes());
        out.extend_from_slice(&m.to_le_bytes());
        out.extend_from_slice(&act_id.to_le_bytes());
        out.extend_from_slice(&slope.to_le_bytes());
        out.extend_from_slice(&self.omega0.to_le_bytes());
        out.extend_from_slice(&model.lambda.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.final_loss.to_le_bytes());
        for net in [&model.encoder, &model.decoder] {
            let dims = net.dims();
            out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
            for d in dims {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
        }
        for p in model.constellation.points() {
            for &v in p {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let echo = self.config_echo.as_bytes();
        out.extend_from_slice(&(echo.len() as u32).to_le_bytes());
        out.extend_from_slice(echo);
        for net in [&model.encoder, &model.decoder] {
            for v in net.flatten() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    /// Writes the checkpoint to `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    /// Parses the documented binary layout, verifying the checksum and all
    /// structural invariants.
    pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(Error::Checkpoint("bad magic, not a checkpoint file".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported version {version}, expected {VERSION}"
            )));
        }
        if bytes.len() < 8 {
            return Err(Error::Checkpoint("truncated file".into()));
        }
        let stored_crc = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
        let computed = crc32fast::hash(&bytes[..bytes.len() - 4]);
        if stored_crc != computed {
            return Err(Error::Checkpoint(format!(
                "checksum mismatch: stored {stored_crc:08x}, computed {computed:08x}"
            )));
        }

        let k = r.u32()? as usize;
        let m = r.u32()? as usize;
        if !(k == 1 || k == 2) {
            return Err(Error::Checkpoint(format!("invalid dimension {k}")));
        }
        if m == 0 || m > 4096 {
            return Err(Error::Checkpoint(format!("invalid message count {m}")));
        }
        let act_id = r.u32()?;
        let slope = r.f64()?;
        let activation = match act_id {
            0 => Activation::Sinusoidal,
            1 => {
                if !(0.0..1.0).contains(&slope) {
                    return Err(Error::Checkpoint(format!("invalid slope {slope}")));
                }
                Activation::LeakyRelu { slope }
            }
            _ => return Err(Error::Checkpoint(format!("unknown activation id {act_id}"))),
        };
        let omega0 = r.f64()?;
        let lambda = r.f64()?;
        let seed = r.u64()?;
        let final_loss = r.f64()?;

        let mut all_dims = Vec::new();
        for net in ["encoder", "decoder"] {
            let count = r.u32()? as usize;
            if !(2..=64).contains(&count) {
                return Err(Error::Checkpoint(format!("{net} has {count} layer sizes")));
            }
            let mut dims = Vec::with_capacity(count);
            for _ in 0..count {
                let d = r.u32()? as usize;
                if d == 0 || d > 1 << 20 {
                    return Err(Error::Checkpoint(format!("{net} layer size {d}")));
                }
                dims.push(d);
            }
            all_dims.push(dims);
        }
        let (enc_dims, dec_dims) = (&all_dims[0], &all_dims[1]);

        let mut points = Vec::with_capacity(m);
        for _ in 0..m {
            let mut p = Vec::with_capacity(k);
            for _ in 0..k {
                p.push(r.f64()?);
            }
            points.push(p);
        }

        let echo_len = r.u32()? as usize;
        let echo_bytes = r.take(echo_len)?;
        let config_echo = String::from_utf8(echo_bytes.to_vec())
            .map_err(|_| Error::Checkpoint("config echo is not UTF-8".into()))?;

        let mut dummy = RngStream::new(0, 0);
        let mut nets = Vec::new();
        for dims in [enc_dims, dec_dims] {
            let mut net = MlpParams::init(dims, activation, 1.0, &mut dummy)
                .map_err(|e| Error::Checkpoint(format!("invalid layer sizes: {e}")))?;
            let n = net.param_count();
            let mut flat = Vec::with_capacity(n);
            for _ in 0..n {
                flat.push(r.f64()?);
            }
            net.assign_flat(&flat);
            nets.push(net);
        }
        r.take(4)?;
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes after checksum".into()));
        }

        let constellation = Constellation::from_points(k, points)
            .map_err(|e| Error::Checkpoint(format!("invalid constellation: {e}")))?;
        let decoder = nets.pop().unwrap();
        let encoder = nets.pop().unwrap();
        let model = NeuralDpcModel::new(encoder, decoder, constellation, lambda)
            .map_err(|e| Error::Checkpoint(format!("inconsistent model: {e}")))?;
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::Checkpoint(format!("invalid omega0 {omega0}")));
        }
        Ok(Checkpoint { model, omega0, seed, final_loss, config_echo })
    }

    /// Reads a checkpoint from `path`.
    pub fn load(path: &Path) -> Result<Checkpoint> {
        let bytes = std::fs::read(path)?;
        Checkpoint::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Checkpoint("truncated file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
