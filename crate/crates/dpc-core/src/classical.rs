//! Classical interference pre-cancellation: Tomlinson-Harashima precoding on
//! a scalar channel and its modulo-lattice generalization.
//!
//! Both schemes subtract the known interference at the transmitter and fold
//! the result back into a fundamental cell so the transmit power stays
//! bounded; the receiver applies the matching fold and sees an equivalent
//! channel whose noise does not involve the interference at all.

use crate::constellation::Constellation;
use crate::lattice::Lattice;
use crate::math::q_function;
use crate::rng::RngStream;
use crate::{Error, Result};

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "modulo interval must be positive, got {delta}"
        )));
    }
    Ok(())
}

fn check_dither(u: f64, delta: f64) -> Result<()> {
    if !(-delta / 2.0..delta / 2.0).contains(&u) {
        return Err(Error::InvalidArgument(format!(
            "dither {u} outside [-{0}, {0})", delta / 2.0
        )));
    }
    Ok(())
}

/// Centered wrap of `z` into `[-delta/2, delta/2)`.
pub(crate) fn wrap_centered(z: f64, delta: f64) -> f64 {
    (z + delta / 2.0).rem_euclid(delta) - delta / 2.0
}

/// Tomlinson-Harashima transmit side: `x = (v - s - u) mod delta`, wrapped
/// into `[-delta/2, delta/2)`.
///
/// Errors if `delta` is not positive or `u` is outside `[-delta/2, delta/2)`.
pub fn thp_encode(v: f64, s: f64, u: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    check_dither(u, delta)?;
    Ok(wrap_centered(v - s - u, delta))
}

/// Tomlinson-Harashima receive side: `(y + u) mod delta`. With `y` from the
/// channel `y = x + s + n` this equals `(v + n) mod delta`, so the
/// interference is gone.
///
/// Errors if `delta` is not positive or `u` is outside `[-delta/2, delta/2)`.
pub fn thp_receive(y: f64, u: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    check_dither(u, delta)?;
    Ok(wrap_centered(y + u, delta))
}

/// Modulo-lattice dirty-paper precoding with inflation factor `alpha`.
#[derive(Clone, Debug)]
pub struct LatticeDpc {
    lattice: Lattice,
    constellation: Constellation,
    alpha: f64,
}

impl LatticeDpc {
    /// Validates and builds a scheme.
    ///
    /// Errors if the lattice and constellation dimensions differ, if `alpha`
    /// is outside `(0, 1]`, or if a constellation point is not a fixed point
    /// of the lattice modulo map (moves by more than 1e-9).
    pub fn new(lattice: Lattice, constellation: Constellation, alpha: f64) -> Result<LatticeDpc> {
        if lattice.k() != constellation.k() {
            return Err(Error::InvalidArgument(format!(
                "lattice dimension {} does not match constellation dimension {}",
                lattice.k(),
                constellation.k()
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be in (0, 1], got {alpha}"
            )));
        }
        for (i, p) in constellation.points().iter().enumerate() {
            let r = lattice.mod_lattice(p);
            let moved: f64 = p.iter().zip(&r).map(|(a, b)| (a - b) * (a - b)).sum();
            if moved.sqrt() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "constellation point {i} is outside the fundamental cell"
                )));
            }
        }
        Ok(LatticeDpc { lattice, constellation, alpha })
    }

    /// The scheme's lattice.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The scheme's message constellation.
    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// The inflation factor.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Transmit side: `x = (v - alpha * s - u) mod L` for message index `v`,
    /// interference `s`, and dither `u`.
    pub fn encode(&self, v: usize, s: &[f64], u: &[f64]) -> Vec<f64> {
        let k = self.lattice.k();
        assert_eq!(s.len(), k, "encode: interference dimension mismatch");
        assert_eq!(u.len(), k, "encode: dither dimension mismatch");
        let point = self.constellation.point(v);
        let z: Vec<f64> = (0..k).map(|i| point[i] - self.alpha * s[i] - u[i]).collect();
        self.lattice.mod_lattice(&z)
    }

    /// Receive side: `(alpha * y + u) mod L`, which equals
    /// `(v + alpha * n - (1 - alpha) * x) mod L` for `y = x + s + n`.
    pub fn receive(&self, y: &[f64], u: &[f64]) -> Vec<f64> {
        let k = self.lattice.k();
        assert_eq!(y.len(), k, "receive: observation dimension mismatch");
        assert_eq!(u.len(), k, "receive: dither dimension mismatch");
        let z: Vec<f64> = (0..k).map(|i| self.alpha * y[i] + u[i]).collect();
        self.lattice.mod_lattice(&z)
    }

    /// Minimum-distance detection on the folded channel: the message whose
    /// point is closest to `y_tilde` under the wrapped distance
    /// `|(y_tilde - point) mod L|`. Ties resolve to the smallest index.
    pub fn detect(&self, y_tilde: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0usize);
        for (i, p) in self.constellation.points().iter().enumerate() {
            let d: Vec<f64> = y_tilde.iter().zip(p).map(|(a, b)| a - b).collect();
            let w = self.lattice.mod_lattice(&d);
            let dist: f64 = w.iter().map(|&x| x * x).sum();
            if dist < best.0 {
                best = (dist, i);
            }
        }
        best.1
    }

    /// Dither draw for this scheme's lattice.
    pub fn sample_dither(&self, rng: &mut RngStream) -> Vec<f64> {
        self.lattice.sample_dither(rng)
    }
}

/// MMSE inflation factor `P / (P + noise_var)`. Errors unless both arguments
/// are positive.
pub fn mmse_alpha(power: f64, noise_var: f64) -> Result<f64> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mmse_alpha: power must be positive, got {power}"
        )));
    }
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mmse_alpha: noise variance must be positive, got {noise_var}"
        )));
    }
    Ok(power / (power + noise_var))
}

/// BPSK symbol error rate over interference-free AWGN at linear symbol SNR
/// `Es/N0`: `Q(sqrt(2 * snr))`. Errors if `snr` is negative.
pub fn bpsk_awgn_ser(snr: f64) -> Result<f64> {
    if !(snr >= 0.0 && snr.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bpsk_awgn_ser: snr must be finite and nonnegative, got {snr}"
        )));
    }
    Ok(q_function((2.0 * snr).sqrt()))
}

/// QPSK symbol error rate over interference-free AWGN at linear symbol SNR
/// `Es/N0`: `1 - (1 - Q(sqrt(snr)))^2`. Errors if `snr` is negative.
pub fn qpsk_awgn_ser(snr: f64) -> Result<f64> {
    if !(snr >= 0.0 && snr.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "qpsk_awgn_ser: snr must be finite and nonnegative, got {snr}"
        )));
    }
    let per_dim = q_function(snr.sqrt());
    Ok(1.0 - (1.0 - per_dim) * (1.0 - per_dim))
}

/// Closed-form AWGN SER for BPSK-shaped (2 points, 1-D) or QPSK-shaped
/// (4 points, 2-D) constellations at the given symbol SNR in dB.
///
/// Errors for constellation shapes without a closed form here.
pub fn awgn_reference_ser(constellation: &Constellation, snr_db: f64) -> Result<f64> {
    let snr = crate::math::from_db(snr_db);
    match (constellation.k(), constellation.cardinality()) {
        (1, 2) => bpsk_awgn_ser(snr),
        (2, 4) => qpsk_awgn_ser(snr),
        (k, m) => Err(Error::InvalidArgument(format!(
            "no closed-form AWGN SER for {m} points in {k} dimensions"
        ))),
    }
}

/// Exact SER of scalar Tomlinson-Harashima precoding with `m` equally spaced
/// messages on the wrapped interval of length `delta` and Gaussian noise.
///
/// The receiver sees `(v + n) mod delta`; a symbol is correct when the
/// folded noise stays within `delta / (2m)` of the message, so the correct
/// probability is a rapidly converging sum of Gaussian tail differences.
///
/// Errors unless `delta`, `m`, and `noise_var` are positive.
pub fn thp_ser_exact(delta: f64, m: usize, noise_var: f64) -> Result<f64> {
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::InvalidArgument("thp_ser_exact: need at least one message".into()));
    }
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "thp_ser_exact: noise variance must be positive, got {noise_var}"
        )));
    }
    if m == 1 {
        return Ok(0.0);
    }
    let sd = noise_var.sqrt();
    let d = delta / (2.0 * m as f64);
    // Periods beyond 12 standard deviations contribute less than 1e-30.
    let span = ((12.0 * sd / delta).ceil() as i64 + 1).min(2_000_000);
    let mut p_correct = 0.0;
    for j in -span..=span {
        let center = j as f64 * delta;
        p_correct += q_function((center - d) / sd) - q_function((center + d) / sd);
    }
    Ok((1.0 - p_correct).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{mean, variance};

    #[test]
    fn wrap_is_half_open_and_exact() {
        assert_eq!(wrap_centered(2.0, 4.0), -2.0);
        assert_eq!(wrap_centered(-2.0, 4.0), -2.0);
        assert!((wrap_centered(1.9999, 4.0) - 1.9999).abs() < 1e-12);
        assert_eq!(wrap_centered(5.0, 4.0), 1.0);
        assert_eq!(wrap_centered(-5.0, 4.0), -1.0);
        assert_eq!(wrap_centered(0.75, 1.0), -0.25);
        let mut rng = RngStream::new(1, 0);
        for _ in 0..10_000 {
            let z = rng.next_uniform(-100.0, 100.0);
            let w = wrap_centered(z, 10.5);
            assert!((-5.25..5.25).contains(&w));
            assert!(((z - w) / 10.5 - ((z - w) / 10.5).round()).abs() < 1e-9);
        }
    }

    #[test]
    fn thp_validation() {
        assert!(thp_encode(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(thp_encode(1.0, 0.0, 2.0, 4.0).is_err());
        assert!(thp_encode(1.0, 0.0, -2.1, 4.0).is_err());
        assert!(thp_receive(1.0, 5.0, 4.0).is_err());
        assert!(thp_encode(1.0, 0.0, -2.0, 4.0).is_ok());
    }

    #[test]
    fn thp_cancels_interference() {
        let mut rng = RngStream::new(2, 0);
        for &delta in &[1.0, 4.0, 10.5] {
            for _ in 0..20_000 {
                let v = rng.next_uniform(-delta / 2.0, delta / 2.0);
                let s = rng.next_uniform(-40.0, 40.0);
                let n = rng.next_uniform(-0.3, 0.3);
                let u = rng.next_uniform(-delta / 2.0, delta / 2.0);
                let x = thp_encode(v, s, u, delta).unwrap();
                assert!((-delta / 2.0..delta / 2.0).contains(&x));
                let y = x + s + n;
                let got = thp_receive(y, u, delta).unwrap();
                let want = wrap_centered(v + n, delta);
                assert!((got - want).abs() < 1e-9, "delta {delta}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn thp_zero_noise_recovers_message() {
        let mut rng = RngStream::new(3, 0);
        let delta = 4.0;
        for _ in 0..1000 {
            let v = rng.next_uniform(-1.9, 1.9);
            let s = rng.next_uniform(-50.0, 50.0);
            let u = rng.next_uniform(-2.0, 2.0);
            let x = thp_encode(v, s, u, delta).unwrap();
            let got = thp_receive(x + s, u, delta).unwrap();
            assert!((got - v).abs() < 1e-9);
        }
    }

    #[test]
    fn thp_output_is_uniform_with_dither() {
        // With a uniform dither the transmit signal is uniform over the
        // interval regardless of v and s, so its power is delta^2 / 12.
        let delta = 4.0;
        let mut rng = RngStream::new(4, 0);
        let xs: Vec<f64> = (0..200_000)
            .map(|_| {
                let u = rng.next_uniform(-delta / 2.0, delta / 2.0);
                thp_encode(1.3, 17.9, u, delta).unwrap()
            })
            .collect();
        assert!(mean(&xs).abs() < 0.02);
        assert!((variance(&xs) - delta * delta / 12.0).abs() < 0.02);
    }

    #[test]
    fn lattice_dpc_validation() {
        let lat = Lattice::scalar(4.0).unwrap();
        let c = Constellation::from_lattice(&lat, 2).unwrap();
        assert!(LatticeDpc::new(lat.clone(), c.clone(), 1.0).is_ok());
        assert!(LatticeDpc::new(lat.clone(), c.clone(), 0.0).is_err());
        assert!(LatticeDpc::new(lat.clone(), c.clone(), 1.1).is_err());
        let far = Constellation::from_points(1, vec![vec![0.0], vec![3.0]]).unwrap();
        assert!(LatticeDpc::new(lat.clone(), far, 0.9).is_err());
        let c2 = Constellation::qpsk(1.0).unwrap();
        assert!(LatticeDpc::new(lat, c2, 0.9).is_err());
    }

    fn scheme_cases() -> Vec<LatticeDpc> {
        let mut out = Vec::new();
        for alpha in [1.0, 0.83461] {
            let lat = Lattice::scalar(4.0).unwrap();
            let c = Constellation::from_lattice(&lat, 2).unwrap();
            out.push(LatticeDpc::new(lat, c, alpha).unwrap());
            let lat = Lattice::cubic(3.7).unwrap();
            let c = Constellation::from_lattice(&lat, 4).unwrap();
            out.push(LatticeDpc::new(lat, c, alpha).unwrap());
            let lat = Lattice::hexagonal(13.0).unwrap();
            let c = Constellation::from_lattice(&lat, 4).unwrap();
            out.push(LatticeDpc::new(lat, c, alpha).unwrap());
            let lat = Lattice::construction_a(&[[0, 0], [1, 1]], 2, 2.5).unwrap();
            let c = Constellation::from_lattice(&lat, 4).unwrap();
            out.push(LatticeDpc::new(lat, c, alpha).unwrap());
        }
        out
    }

    #[test]
    fn lattice_receive_identity() {
        // (alpha y + u) mod L == (v + alpha n - (1 - alpha) x) mod L.
        let mut rng = RngStream::new(5, 0);
        for scheme in scheme_cases() {
            let k = scheme.lattice().k();
            for _ in 0..5000 {
                let v = scheme.constellation().sample_message(&mut rng);
                let s: Vec<f64> = (0..k).map(|_| rng.next_uniform(-30.0, 30.0)).collect();
                let n: Vec<f64> = (0..k).map(|_| rng.next_uniform(-2.0, 2.0)).collect();
                let u = scheme.sample_dither(&mut rng);
                let x = scheme.encode(v, &s, &u);
                let y: Vec<f64> = (0..k).map(|i| x[i] + s[i] + n[i]).collect();
                let got = scheme.receive(&y, &u);
                let point = scheme.constellation().point(v);
                let alt: Vec<f64> = (0..k)
                    .map(|i| point[i] + scheme.alpha() * n[i] - (1.0 - scheme.alpha()) * x[i])
                    .collect();
                let want = scheme.lattice().mod_lattice(&alt);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-9, "alpha {}: {got:?} vs {want:?}", scheme.alpha());
                }
            }
        }
    }

    #[test]
    fn lattice_dpc_zero_noise_alpha_one_detects_message() {
        let mut rng = RngStream::new(6, 0);
        for scheme in scheme_cases().into_iter().filter(|s| s.alpha() == 1.0) {
            let k = scheme.lattice().k();
            for _ in 0..2000 {
                let v = scheme.constellation().sample_message(&mut rng);
                let s: Vec<f64> = (0..k).map(|_| rng.next_uniform(-30.0, 30.0)).collect();
                let u = scheme.sample_dither(&mut rng);
                let x = scheme.encode(v, &s, &u);
                let y: Vec<f64> = (0..k).map(|i| x[i] + s[i]).collect();
                let yt = scheme.receive(&y, &u);
                assert_eq!(scheme.detect(&yt), v);
            }
        }
    }

    #[test]
    fn scalar_lattice_dpc_with_alpha_one_matches_thp() {
        let delta = 10.5;
        let lat = Lattice::scalar(delta).unwrap();
        let c = Constellation::from_lattice(&lat, 2).unwrap();
        let scheme = LatticeDpc::new(lat, c.clone(), 1.0).unwrap();
        let mut rng = RngStream::new(7, 0);
        for _ in 0..20_000 {
            let v = rng.next_index(2);
            let s = rng.next_uniform(-40.0, 40.0);
            let n = rng.next_uniform(-1.5, 1.5);
            let u = rng.next_uniform(-delta / 2.0, delta / 2.0);
            let xl = scheme.encode(v, &[s], &[u])[0];
            let xt = thp_encode(c.point(v)[0], s, u, delta).unwrap();
            assert!((xl - xt).abs() < 1e-9);
            let y = xl + s + n;
            let yl = scheme.receive(&[y], &[u])[0];
            let yt = thp_receive(y, u, delta).unwrap();
            assert!((yl - yt).abs() < 1e-9);
        }
    }

    #[test]
    fn mmse_alpha_values() {
        let p = crate::math::from_db(7.03);
        assert!((mmse_alpha(p, 1.0).unwrap() - 0.83461).abs() < 1e-5);
        assert_eq!(mmse_alpha(1.0, 1.0).unwrap(), 0.5);
        assert!(mmse_alpha(0.0, 1.0).is_err());
        assert!(mmse_alpha(1.0, 0.0).is_err());
    }

    #[test]
    fn awgn_closed_forms() {
        assert!((bpsk_awgn_ser(1.0).unwrap() - q_function(std::f64::consts::SQRT_2)).abs() < 1e-15);
        assert!((bpsk_awgn_ser(1.0).unwrap() - 0.0786496).abs() < 1e-6);
        let q1 = q_function(1.0);
        assert!((qpsk_awgn_ser(1.0).unwrap() - (2.0 * q1 - q1 * q1)).abs() < 1e-15);
        assert!(bpsk_awgn_ser(-0.1).is_err());

        let b = Constellation::bpsk();
        assert_eq!(
            awgn_reference_ser(&b, 0.0).unwrap(),
            bpsk_awgn_ser(1.0).unwrap()
        );
        let q = Constellation::qpsk(1.0).unwrap();
        assert_eq!(
            awgn_reference_ser(&q, 4.0).unwrap(),
            qpsk_awgn_ser(crate::math::from_db(4.0)).unwrap()
        );
        let c3 = Constellation::from_points(1, vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert!(awgn_reference_ser(&c3, 0.0).is_err());
    }

    #[test]
    fn thp_ser_exact_matches_numeric_integration() {
        // Riemann sum of the Gaussian density against the wrapped correct
        // region, as an independent check of the tail-difference series.
        for &(delta, m, var) in &[(4.0, 2usize, 1.0), (4.0, 2, 4.0), (10.5, 4, 2.0)] {
            let want = thp_ser_exact(delta, m, var).unwrap();
            let sd = var.sqrt();
            let d = delta / (2.0 * m as f64);
            let steps = 800_000;
            let lo = -12.0 * sd;
            let hi = 12.0 * sd;
            let h = (hi - lo) / steps as f64;
            let mut correct = 0.0;
            for i in 0..steps {
                let t = lo + (i as f64 + 0.5) * h;
                if wrap_centered(t, delta).abs() < d {
                    let phi = (-t * t / (2.0 * var)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
                    correct += phi * h;
                }
            }
            let got = 1.0 - correct;
            assert!((got - want).abs() < 1e-5, "delta {delta} m {m} var {var}: {got} vs {want}");
        }
    }

    #[test]
    fn thp_ser_exact_limits() {
        assert!(thp_ser_exact(4.0, 2, 1e-6).unwrap() < 1e-12);
        let high = thp_ser_exact(4.0, 2, 1e6).unwrap();
        assert!((high - 0.5).abs() < 1e-3);
        assert_eq!(thp_ser_exact(4.0, 1, 1.0).unwrap(), 0.0);
        assert!(thp_ser_exact(0.0, 2, 1.0).is_err());
        assert!(thp_ser_exact(4.0, 0, 1.0).is_err());
        assert!(thp_ser_exact(4.0, 2, 0.0).is_err());
    }
}
