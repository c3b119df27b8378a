//! Lattices in one and two dimensions: nearest-point quantization, centered
//! modulo reduction, Voronoi dithers, and second-moment estimation.
//!
//! A lattice is stored as a row-basis generator matrix; the point with
//! integer coefficients `c` is `c * G`. The nearest-point search rounds the
//! real coefficients of the input and exhaustively scores integer offsets in
//! `{-2..2}^k` around them, which is exact for the reduced bases produced by
//! the constructors here.

use crate::{Error, Result};
use crate::rng::RngStream;

/// Generator determinants at or below this magnitude are rejected as singular.
pub const MIN_GENERATOR_DET: f64 = 1e-12;

/// A full-rank lattice in `k` dimensions, `k` in `{1, 2}`.
#[derive(Clone, Debug)]
pub struct Lattice {
    k: usize,
    /// Row basis, padded with the identity in the unused dimension for k = 1.
    gen: [[f64; 2]; 2],
    /// Inverse of `gen`, used to obtain real coefficients.
    inv: [[f64; 2]; 2],
    det_abs: f64,
}

impl Lattice {
    /// Builds a lattice from `k` row-major basis rows of length `k`.
    ///
    /// Errors if `k` is not 1 or 2, if `rows.len() != k * k`, or if the
    /// basis is singular (determinant magnitude at most 1e-12).
    pub fn from_generator(k: usize, rows: &[f64]) -> Result<Lattice> {
        if !(k == 1 || k == 2) {
            return Err(Error::InvalidArgument(format!(
                "lattice dimension must be 1 or 2, got {k}"
            )));
        }
        if rows.len() != k * k {
            return Err(Error::InvalidArgument(format!(
                "generator needs {} entries for k = {k}, got {}",
                k * k,
                rows.len()
            )));
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "generator entries must be finite".into(),
            ));
        }
        let gen = match k {
            1 => [[rows[0], 0.0], [0.0, 1.0]],
            _ => [[rows[0], rows[1]], [rows[2], rows[3]]],
        };
        let det = gen[0][0] * gen[1][1] - gen[0][1] * gen[1][0];
        let det_abs = det.abs();
        if det_abs <= MIN_GENERATOR_DET {
            return Err(Error::InvalidArgument(format!(
                "generator is singular (|det| = {det_abs:e})"
            )));
        }
        let inv = [
            [gen[1][1] / det, -gen[0][1] / det],
            [-gen[1][0] / det, gen[0][0] / det],
        ];
        Ok(Lattice { k, gen, inv, det_abs })
    }

    /// Scalar lattice `delta * Z`. Requires `delta > 0`.
    pub fn scalar(delta: f64) -> Result<Lattice> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scalar lattice spacing must be positive, got {delta}"
            )));
        }
        Lattice::from_generator(1, &[delta])
    }

    /// Cubic lattice `delta * Z^2`. Requires `delta > 0`.
    pub fn cubic(delta: f64) -> Result<Lattice> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cubic lattice spacing must be positive, got {delta}"
            )));
        }
        Lattice::from_generator(2, &[delta, 0.0, 0.0, delta])
    }

    /// Hexagonal lattice scaled so its Voronoi cell has the given volume.
    /// Requires `volume > 0`.
    pub fn hexagonal(volume: f64) -> Result<Lattice> {
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "hexagonal cell volume must be positive, got {volume}"
            )));
        }
        // Unit basis (1, 0), (1/2, sqrt(3)/2) has cell volume sqrt(3)/2.
        let s = (volume / (3.0_f64.sqrt() / 2.0)).sqrt();
        Lattice::from_generator(2, &[s, 0.0, 0.5 * s, 3.0_f64.sqrt() / 2.0 * s])
    }

    /// Construction A lattice `scale * (C + q * Z^2)` for a linear code `C`
    /// over `Z_q` with block length 2.
    ///
    /// Errors if `q < 2`, `scale` is not positive, the code is empty, an
    /// entry is not below `q`, or `C` is not closed under addition mod `q`
    /// (which also enforces membership of the zero word).
    pub fn construction_a(code_words: &[[u32; 2]], q: u32, scale: f64) -> Result<Lattice> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!(
                "construction A modulus must be at least 2, got {q}"
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "construction A scale must be positive, got {scale}"
            )));
        }
        if code_words.is_empty() {
            return Err(Error::InvalidArgument("construction A code is empty".into()));
        }
        let mut code: Vec<[u32; 2]> = Vec::new();
        for w in code_words {
            if w[0] >= q || w[1] >= q {
                return Err(Error::InvalidArgument(format!(
                    "code word ({}, {}) has entries outside 0..{q}",
                    w[0], w[1]
                )));
            }
            if !code.contains(w) {
                code.push(*w);
            }
        }
        if !code.contains(&[0, 0]) {
            return Err(Error::InvalidArgument(
                "construction A code must contain the zero word".into(),
            ));
        }
        for a in &code {
            for b in &code {
                let s = [(a[0] + b[0]) % q, (a[1] + b[1]) % q];
                if !code.contains(&s) {
                    return Err(Error::InvalidArgument(format!(
                        "code is not closed under addition mod {q}: ({}, {}) + ({}, {}) is missing",
                        a[0], a[1], b[0], b[1]
                    )));
                }
            }
        }

        let mut rows: Vec<[i64; 2]> = code
            .iter()
            .map(|w| [w[0] as i64, w[1] as i64])
            .collect();
        rows.push([q as i64, 0]);
        rows.push([0, q as i64]);
        let h = hermite_normal_form(&rows);
        let r = lagrange_reduce(h);
        Lattice::from_generator(
            2,
            &[
                scale * r[0][0] as f64,
                scale * r[0][1] as f64,
                scale * r[1][0] as f64,
                scale * r[1][1] as f64,
            ],
        )
    }

    /// Lattice dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Row basis as `k` rows of `k` entries.
    pub fn generator_rows(&self) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|i| self.gen[i][..self.k].to_vec())
            .collect()
    }

    /// Volume of the fundamental (Voronoi) cell.
    pub fn cell_volume(&self) -> f64 {
        self.det_abs
    }

    /// Integer coefficients and position of the lattice point nearest to `z`.
    ///
    /// Ties on the Voronoi boundary resolve to the lexicographically smallest
    /// coefficient vector. Panics if `z.len() != k`.
    fn quantize(&self, z: &[f64]) -> ([i64; 2], [f64; 2]) {
        assert_eq!(z.len(), self.k, "point dimension does not match lattice");
        let z2 = [z[0], if self.k == 2 { z[1] } else { 0.0 }];
        let a0 = z2[0] * self.inv[0][0] + z2[1] * self.inv[1][0];
        let a1 = z2[0] * self.inv[0][1] + z2[1] * self.inv[1][1];
        let b0 = a0.round() as i64;
        let b1 = if self.k == 2 { a1.round() as i64 } else { 0 };
        let r1 = if self.k == 2 { 2 } else { 0 };
        let mut best_d = f64::INFINITY;
        let mut best = ([0i64; 2], [0.0f64; 2]);
        for c0 in (b0 - 2)..=(b0 + 2) {
            for c1 in (b1 - r1)..=(b1 + r1) {
                let p0 = c0 as f64 * self.gen[0][0] + c1 as f64 * self.gen[1][0];
                let p1 = c0 as f64 * self.gen[0][1] + c1 as f64 * self.gen[1][1];
                let d0 = z2[0] - p0;
                let d1 = z2[1] - p1;
                let d = d0 * d0 + d1 * d1;
                if d < best_d {
                    best_d = d;
                    best = ([c0, c1], [p0, p1]);
                }
            }
        }
        best
    }

    /// Lattice point nearest to `z`. Panics if `z.len() != k`.
    pub fn nearest_point(&self, z: &[f64]) -> Vec<f64> {
        let (_, p) = self.quantize(z);
        p[..self.k].to_vec()
    }

    /// Integer coefficients of the lattice point nearest to `z`.
    pub fn nearest_coefficients(&self, z: &[f64]) -> Vec<i64> {
        let (c, _) = self.quantize(z);
        c[..self.k].to_vec()
    }

    /// Centered modulo reduction: `z` minus its nearest lattice point. The
    /// result lies in the fundamental Voronoi cell.
    pub fn mod_lattice(&self, z: &[f64]) -> Vec<f64> {
        let (_, p) = self.quantize(z);
        (0..self.k).map(|i| z[i] - p[i]).collect()
    }

    /// Draws a dither uniform over the Voronoi cell: a uniform point in the
    /// basis parallelepiped (one `u01` draw per dimension, in order) reduced
    /// by `mod_lattice`.
    pub fn sample_dither(&self, rng: &mut RngStream) -> Vec<f64> {
        let mut u = [0.0f64; 2];
        for i in 0..self.k {
            let w = rng.next_u01();
            u[0] += w * self.gen[i][0];
            u[1] += w * self.gen[i][1];
        }
        self.mod_lattice(&u[..self.k])
    }

    /// Monte Carlo estimate of the per-dimension second moment
    /// `E[|U|^2] / k` of a uniform dither `U` over the Voronoi cell.
    pub fn second_moment(&self, n_samples: usize, rng: &mut RngStream) -> f64 {
        assert!(n_samples > 0, "second_moment: need at least one sample");
        let mut acc = 0.0;
        for _ in 0..n_samples {
            let u = self.sample_dither(rng);
            acc += u.iter().map(|&x| x * x).sum::<f64>();
        }
        acc / (n_samples as f64 * self.k as f64)
    }

    /// Deterministic midpoint-grid estimate of the per-dimension second
    /// moment, with `resolution` points per axis.
    pub fn second_moment_grid(&self, resolution: usize) -> f64 {
        assert!(resolution > 0, "second_moment_grid: resolution must be positive");
        let mut acc = 0.0;
        let mut count = 0usize;
        let r1 = if self.k == 2 { resolution } else { 1 };
        for i in 0..resolution {
            for j in 0..r1 {
                let w0 = (i as f64 + 0.5) / resolution as f64;
                let w1 = (j as f64 + 0.5) / r1 as f64;
                let mut u = [
                    w0 * self.gen[0][0],
                    w0 * self.gen[0][1],
                ];
                if self.k == 2 {
                    u[0] += w1 * self.gen[1][0];
                    u[1] += w1 * self.gen[1][1];
                }
                let m = self.mod_lattice(&u[..self.k]);
                acc += m.iter().map(|&x| x * x).sum::<f64>();
                count += 1;
            }
        }
        acc / (count as f64 * self.k as f64)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Row-style Hermite normal form `[[g, b], [0, g2]]` of the lattice spanned
/// by the given integer rows. Requires full rank, which holds for
/// construction A inputs since `q * I` is always included.
fn hermite_normal_form(rows: &[[i64; 2]]) -> [[i64; 2]; 2] {
    let mut pivot: Option<[i64; 2]> = None;
    let mut seconds: Vec<i64> = Vec::new();
    for &r in rows {
        if r == [0, 0] {
            continue;
        }
        if r[0] == 0 {
            seconds.push(r[1]);
            continue;
        }
        pivot = Some(match pivot {
            None => r,
            Some(p) => {
                let (g, x, y) = ext_gcd(p[0], r[0]);
                let np = [g, x * p[1] + y * r[1]];
                // Both p and r reduce to first component 0 against np.
                seconds.push(p[1] - (p[0] / g) * np[1]);
                seconds.push(r[1] - (r[0] / g) * np[1]);
                np
            }
        });
    }
    let p = pivot.expect("construction A generating set always spans dimension 0");
    let mut g2 = 0i64;
    for s in seconds {
        g2 = ext_gcd(g2, s).0;
    }
    assert!(g2 > 0, "construction A generating set always has full rank");
    let mut p = if p[0] < 0 { [-p[0], -p[1]] } else { p };
    p[1] = p[1].rem_euclid(g2);
    [p, [0, g2]]
}

/// Lagrange (Gauss) reduction of a 2-D integer basis: returns a basis of the
/// same lattice whose first vector is a shortest nonzero lattice vector.
fn lagrange_reduce(mut b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    loop {
        let n0 = b[0][0] * b[0][0] + b[0][1] * b[0][1];
        let n1 = b[1][0] * b[1][0] + b[1][1] * b[1][1];
        if n0 > n1 {
            b.swap(0, 1);
        }
        let n0 = b[0][0] * b[0][0] + b[0][1] * b[0][1];
        let dot = b[0][0] * b[1][0] + b[0][1] * b[1][1];
        let mu = (dot as f64 / n0 as f64).round() as i64;
        if mu == 0 {
            return b;
        }
        b[1][0] -= mu * b[0][0];
        b[1][1] -= mu * b[0][1];
    }
}
