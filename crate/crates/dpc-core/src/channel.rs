//! The interference channel `Y = X + S + N`.
//!
//! `S` is additive interference known to the transmitter ahead of time and
//! `N` is white Gaussian noise. Variances are per dimension; a QPSK
//! interferer has the stated total symbol power spread over 2 dimensions.

use crate::rng::RngStream;
use crate::{Error, Result};

/// Interference processes available at the channel.
#[derive(Clone, Debug, PartialEq)]
pub enum Interference {
    /// I.i.d. Gaussian interference with the given per-dimension variance.
    Gaussian { variance: f64 },
    /// Uniform draw from the QPSK alphabet `sqrt(power/2) * (±1, ±1)`,
    /// lexicographic symbol order. Two-dimensional channels only.
    Qpsk { power: f64 },
}

impl Interference {
    /// Parses `gaussian:<var>` or `qpsk:<power>` descriptors.
    pub fn parse(s: &str) -> Result<Interference> {
        let bad = |m: &str| Error::Config(format!("interference '{s}': {m}"));
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| bad("expected '<kind>:<value>'"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| bad("value is not a number"))?;
        match kind {
            "gaussian" => {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(bad("variance must be finite and nonnegative"));
                }
                Ok(Interference::Gaussian { variance: value })
            }
            "qpsk" => {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(bad("power must be finite and nonnegative"));
                }
                Ok(Interference::Qpsk { power: value })
            }
            _ => Err(bad("kind must be 'gaussian' or 'qpsk'")),
        }
    }

    /// Canonical descriptor string, the inverse of [`Interference::parse`].
    pub fn descriptor(&self) -> String {
        match self {
            Interference::Gaussian { variance } => format!("gaussian:{variance}"),
            Interference::Qpsk { power } => format!("qpsk:{power}"),
        }
    }

    /// Per-dimension power of the interference in `k` dimensions.
    pub fn per_dim_power(&self, k: usize) -> f64 {
        match self {
            Interference::Gaussian { variance } => *variance,
            Interference::Qpsk { power } => power / k as f64,
        }
    }
}

/// Channel parameters: dimension, interference process, and per-dimension
/// noise variance.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelConfig {
    k: usize,
    interference: Interference,
    noise_var: f64,
}

impl ChannelConfig {
    /// Validates and builds a channel.
    ///
    /// Errors if `k` is not 1 or 2, `noise_var` is negative or not finite,
    /// or a QPSK interferer is requested on a 1-dimensional channel.
    pub fn new(k: usize, interference: Interference, noise_var: f64) -> Result<ChannelConfig> {
        if !(k == 1 || k == 2) {
            return Err(Error::InvalidArgument(format!(
                "channel dimension must be 1 or 2, got {k}"
            )));
        }
        if !(noise_var >= 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be finite and nonnegative, got {noise_var}"
            )));
        }
        if k == 1 {
            if let Interference::Qpsk { .. } = interference {
                return Err(Error::InvalidArgument(
                    "QPSK interference needs a 2-dimensional channel".into(),
                ));
            }
        }
        Ok(ChannelConfig { k, interference, noise_var })
    }

    /// Channel dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Interference process.
    pub fn interference(&self) -> &Interference {
        &self.interference
    }

    /// Per-dimension noise variance.
    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Same channel with a different interference process.
    pub fn with_interference(&self, interference: Interference) -> Result<ChannelConfig> {
        ChannelConfig::new(self.k, interference, self.noise_var)
    }

    /// Same channel with a different noise variance.
    pub fn with_noise_var(&self, noise_var: f64) -> Result<ChannelConfig> {
        ChannelConfig::new(self.k, self.interference.clone(), noise_var)
    }

    /// Draws one interference vector (`k` values).
    pub fn sample_interference(&self, rng: &mut RngStream) -> Vec<f64> {
        match &self.interference {
            Interference::Gaussian { variance } => {
                let sd = variance.sqrt();
                (0..self.k).map(|_| sd * rng.next_standard_normal()).collect()
            }
            Interference::Qpsk { power } => {
                let a = (power / 2.0).sqrt();
                let idx = rng.next_index(4);
                let signs = [[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]][idx];
                vec![a * signs[0], a * signs[1]]
            }
        }
    }

    /// Draws one noise vector (`k` values).
    pub fn sample_noise(&self, rng: &mut RngStream) -> Vec<f64> {
        let sd = self.noise_var.sqrt();
        (0..self.k).map(|_| sd * rng.next_standard_normal()).collect()
    }

    /// Channel law: `y = x + s + n` with fresh noise. Panics if `x` or `s`
    /// does not have dimension `k`.
    pub fn transmit(&self, x: &[f64], s: &[f64], rng: &mut RngStream) -> Vec<f64> {
        assert_eq!(x.len(), self.k, "transmit: signal dimension mismatch");
        assert_eq!(s.len(), self.k, "transmit: interference dimension mismatch");
        let n = self.sample_noise(rng);
        (0..self.k).map(|i| x[i] + s[i] + n[i]).collect()
    }
}

/// Signal-to-noise ratio in dB: mean transmit power `E|X|^2` over the
/// per-dimension noise variance. Errors unless both are positive.
pub fn snr_db(power: f64, noise_var: f64) -> Result<f64> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "snr_db: power must be positive, got {power}"
        )));
    }
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "snr_db: noise variance must be positive, got {noise_var}"
        )));
    }
    crate::math::to_db(power / noise_var)
}

/// Capacity of the interference channel with transmitter-side knowledge:
/// `0.5 * log2(1 + power / noise_var)` bits per dimension, independent of
/// the interference power. Errors unless both arguments are positive.
pub fn dpc_capacity_bits(power: f64, noise_var: f64) -> Result<f64> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "dpc_capacity_bits: power must be positive, got {power}"
        )));
    }
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "dpc_capacity_bits: noise variance must be positive, got {noise_var}"
        )));
    }
    Ok(0.5 * (1.0 + power / noise_var).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{mean, variance};

    #[test]
    fn parse_and_descriptor_round_trip() {
        let g = Interference::parse("gaussian:30").unwrap();
        assert_eq!(g, Interference::Gaussian { variance: 30.0 });
        assert_eq!(Interference::parse(&g.descriptor()).unwrap(), g);
        let q = Interference::parse("qpsk:4.5").unwrap();
        assert_eq!(q, Interference::Qpsk { power: 4.5 });
        assert_eq!(Interference::parse(&q.descriptor()).unwrap(), q);
        assert!(Interference::parse("gaussian").is_err());
        assert!(Interference::parse("gaussian:x").is_err());
        assert!(Interference::parse("gaussian:-1").is_err());
        assert!(Interference::parse("laplace:1").is_err());
    }

    #[test]
    fn config_validation() {
        let g = Interference::Gaussian { variance: 30.0 };
        assert!(ChannelConfig::new(1, g.clone(), 1.0).is_ok());
        assert!(ChannelConfig::new(3, g.clone(), 1.0).is_err());
        assert!(ChannelConfig::new(1, g, -1.0).is_err());
        assert!(ChannelConfig::new(1, Interference::Qpsk { power: 1.5 }, 1.0).is_err());
        assert!(ChannelConfig::new(2, Interference::Qpsk { power: 1.5 }, 1.0).is_ok());
    }

    #[test]
    fn gaussian_interference_moments() {
        let cfg = ChannelConfig::new(1, Interference::Gaussian { variance: 30.0 }, 1.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| cfg.sample_interference(&mut rng)[0]).collect();
        assert!(mean(&xs).abs() < 0.05);
        assert!((variance(&xs) - 30.0).abs() < 0.3);
    }

    #[test]
    fn qpsk_interference_alphabet_and_power() {
        let cfg = ChannelConfig::new(2, Interference::Qpsk { power: 4.5 }, 1.0).unwrap();
        let mut rng = RngStream::new(4, 0);
        let a = (4.5f64 / 2.0).sqrt();
        let mut seen = std::collections::BTreeSet::new();
        let mut total = 0.0;
        let n = 10_000;
        for _ in 0..n {
            let s = cfg.sample_interference(&mut rng);
            assert!((s[0].abs() - a).abs() < 1e-12 && (s[1].abs() - a).abs() < 1e-12);
            seen.insert((s[0] > 0.0, s[1] > 0.0));
            total += s[0] * s[0] + s[1] * s[1];
        }
        assert_eq!(seen.len(), 4);
        assert!((total / n as f64 - 4.5).abs() < 1e-9);
    }

    #[test]
    fn transmit_adds_components() {
        let cfg = ChannelConfig::new(2, Interference::Gaussian { variance: 0.0 }, 0.0).unwrap();
        let mut rng = RngStream::new(5, 0);
        let y = cfg.transmit(&[1.0, -2.0], &[0.25, 0.5], &mut rng);
        assert_eq!(y, vec![1.25, -1.5]);

        let cfg = cfg.with_noise_var(2.0).unwrap();
        let mut rng = RngStream::new(5, 1);
        let ys: Vec<f64> = (0..100_000)
            .map(|_| cfg.transmit(&[1.0, 0.0], &[0.0, 0.0], &mut rng)[0] - 1.0)
            .collect();
        assert!(mean(&ys).abs() < 0.02);
        assert!((variance(&ys) - 2.0).abs() < 0.05);
    }

    #[test]
    fn snr_and_capacity_values() {
        assert_eq!(snr_db(1.0, 1.0).unwrap(), 0.0);
        assert!((snr_db(10.0, 1.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((snr_db(5.0465, 1.0).unwrap() - 7.03).abs() < 0.001);
        assert!(snr_db(0.0, 1.0).is_err());
        assert!(snr_db(1.0, 0.0).is_err());

        // Capacity does not depend on the interference, only on P and noise.
        let c = dpc_capacity_bits(crate::math::from_db(7.03), 1.0).unwrap();
        assert!((c - 0.5 * (1.0 + 10.0_f64.powf(0.703)).log2()).abs() < 1e-12);
        assert!((c - 1.2981).abs() < 2e-4);
        assert!((dpc_capacity_bits(3.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(dpc_capacity_bits(-1.0, 1.0).is_err());
    }
}
