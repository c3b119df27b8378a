//! Message constellations: small finite point sets in 1 or 2 dimensions.

use crate::lattice::Lattice;
use crate::rng::RngStream;
use crate::{Error, Result};

/// A finite set of pairwise-distinct message points in `k` dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    k: usize,
    points: Vec<Vec<f64>>,
}

impl Constellation {
    /// BPSK: `{-1, +1}` in one dimension.
    pub fn bpsk() -> Constellation {
        Constellation { k: 1, points: vec![vec![-1.0], vec![1.0]] }
    }

    /// QPSK: the four points `scale / sqrt(2) * (±1, ±1)` in lexicographic
    /// order. Requires `scale > 0`; `scale = 1` gives unit average power.
    pub fn qpsk(scale: f64) -> Result<Constellation> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "qpsk scale must be positive, got {scale}"
            )));
        }
        let a = scale / std::f64::consts::SQRT_2;
        Ok(Constellation {
            k: 2,
            points: vec![
                vec![-a, -a],
                vec![-a, a],
                vec![a, -a],
                vec![a, a],
            ],
        })
    }

    /// Builds a constellation from explicit points.
    ///
    /// Errors if the set is empty, a point has the wrong dimension, or two
    /// points coincide within 1e-9.
    pub fn from_points(k: usize, points: Vec<Vec<f64>>) -> Result<Constellation> {
        if !(k == 1 || k == 2) {
            return Err(Error::InvalidArgument(format!(
                "constellation dimension must be 1 or 2, got {k}"
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("constellation is empty".into()));
        }
        for p in &points {
            if p.len() != k {
                return Err(Error::InvalidArgument(format!(
                    "constellation point {p:?} does not have dimension {k}"
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "constellation point {p:?} is not finite"
                )));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d: f64 = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d.sqrt() < 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "constellation points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Constellation { k, points })
    }

    /// Carves `m` messages out of a lattice cell: the points of the fine
    /// lattice `(1/r) * L` with `r = ceil(m^(1/k))`, enumerated row-major
    /// over coefficients in `[0, r)^k`, reduced into the cell, and shifted
    /// so their centroid is at the origin.
    ///
    /// Errors if `m == 0`.
    pub fn from_lattice(lattice: &Lattice, m: usize) -> Result<Constellation> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "lattice constellation needs at least one message".into(),
            ));
        }
        let k = lattice.k();
        let r = if k == 1 {
            m
        } else {
            (m as f64).sqrt().ceil() as usize
        };
        let rows = lattice.generator_rows();
        let mut points = Vec::with_capacity(m);
        'outer: for i0 in 0..r {
            let range1 = if k == 2 { r } else { 1 };
            for i1 in 0..range1 {
                if points.len() == m {
                    break 'outer;
                }
                let mut p = vec![0.0; k];
                for (dim, pv) in p.iter_mut().enumerate() {
                    *pv = i0 as f64 / r as f64 * rows[0][dim]
                        + if k == 2 { i1 as f64 / r as f64 * rows[1][dim] } else { 0.0 };
                }
                points.push(lattice.mod_lattice(&p));
            }
        }
        let mut centroid = vec![0.0; k];
        for p in &points {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / m as f64;
            }
        }
        for p in &mut points {
            for (v, c) in p.iter_mut().zip(&centroid) {
                *v -= c;
            }
        }
        Constellation::from_points(k, points)
    }

    /// Dimension of the points.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of messages.
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    /// Point for message index `i`. Panics if `i` is out of range.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// All points in index order.
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Mean of `|p|^2` over the points.
    pub fn average_power(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.iter().map(|&v| v * v).sum::<f64>())
            .sum::<f64>()
            / self.points.len() as f64
    }

    /// Smallest pairwise Euclidean distance. Returns infinity for a single
    /// point.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                let d: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.min(d.sqrt());
            }
        }
        best
    }

    /// Uniformly random message index.
    pub fn sample_message(&self, rng: &mut RngStream) -> usize {
        rng.next_index(self.points.len())
    }
}
