//! Box grids, coefficient fields and their discrete calculus.
//!
//! Storage order: node index `(i1·n2 + i2)·n3 + i3` (x3 fastest); at each
//! node a 3×3 matrix with entry `(Z, p)`.

mod boundary;
mod gauge;
pub mod sbp;

pub use boundary::{boundary_pairing, boundary_pairing_gradient, BoundaryField, Face};
pub use gauge::{pure_gauge_field, pure_gauge_from_fn, GaugeFactor, GaugeGenerator};
pub use sbp::{Sbp1d, Scheme};

use crate::error::{Error, Result};
use crate::reduce::{pairwise_sum, weighted_sum};
use crate::tensor::{contract, max_abs, Mat3, LEVI_NONZERO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    pub origin: [f64; 3],
    pub extent: [f64; 3],
    pub n: [usize; 3],
    pub scheme: Scheme,
}

impl BoxGrid {
    /// Grid with the highest-order scheme the node counts allow.
    pub fn new(origin: [f64; 3], extent: [f64; 3], n: [usize; 3]) -> Result<Self> {
        Self::with_scheme(origin, extent, n, Scheme::auto_for(n))
    }

    pub fn with_scheme(
        origin: [f64; 3],
        extent: [f64; 3],
        n: [usize; 3],
        scheme: Scheme,
    ) -> Result<Self> {
        for axis in 0..3 {
            if n[axis] < scheme.min_nodes() {
                return Err(Error::GridTooSmall {
                    axis,
                    n: n[axis],
                    min: scheme.min_nodes(),
                });
            }
            if !(extent[axis] > 0.0 && extent[axis].is_finite()) || !origin[axis].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: extent must be positive and finite"
                )));
            }
        }
        Ok(Self {
            origin,
            extent,
            n,
            scheme,
        })
    }

    /// Unit cube with `n` nodes per axis.
    pub fn unit_cube(n: usize) -> Result<Self> {
        Self::new([0.0; 3], [1.0; 3], [n; 3])
    }

    pub fn h(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.extent[a] / (self.n[a] - 1) as f64)
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strides(&self) -> [usize; 3] {
        [self.n[1] * self.n[2], self.n[2], 1]
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n[1] + i[1]) * self.n[2] + i[2]
    }

    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let i3 = idx % self.n[2];
        let r = idx / self.n[2];
        [r / self.n[1], r % self.n[1], i3]
    }

    pub fn position(&self, i: [usize; 3]) -> [f64; 3] {
        let h = self.h();
        [0, 1, 2].map(|a| self.origin[a] + i[a] as f64 * h[a])
    }

    pub fn position_of(&self, idx: usize) -> [f64; 3] {
        self.position(self.multi_index(idx))
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let i = self.multi_index(idx);
        (0..3).any(|a| i[a] == 0 || i[a] == self.n[a] - 1)
    }

    pub fn operators(&self) -> [Sbp1d; 3] {
        let h = self.h();
        [0, 1, 2].map(|a| Sbp1d::new(self.scheme, self.n[a], h[a]))
    }

    /// Tensor-product quadrature weights (the SBP norm).
    pub fn weights(&self) -> Vec<f64> {
        let ops = self.operators();
        (0..self.len())
            .map(|idx| {
                let i = self.multi_index(idx);
                ops[0].norm[i[0]] * ops[1].norm[i[1]] * ops[2].norm[i[2]]
            })
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.extent.iter().product()
    }

    pub fn same_layout(&self, other: &BoxGrid) -> bool {
        self.n == other.n
            && self.scheme == other.scheme
            && (0..3).all(|a| {
                (self.origin[a] - other.origin[a]).abs() <= 1e-12 * (1.0 + self.extent[a])
                    && (self.extent[a] - other.extent[a]).abs() <= 1e-12 * self.extent[a]
            })
    }

    pub fn ensure_same(&self, other: &BoxGrid) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grid n={:?} scheme={} vs n={:?} scheme={}",
                self.n,
                self.scheme.name(),
                other.n,
                other.scheme.name()
            )))
        }
    }
}

/// Quadrature of a nodal scalar field.
pub fn volume_integral(grid: &BoxGrid, s: &[f64]) -> f64 {
    assert_eq!(s.len(), grid.len(), "scalar field length");
    weighted_sum(&grid.weights(), |i| s[i])
}

/// Grid-sampled su(2)-valued 1-form.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffField {
    pub grid: BoxGrid,
    pub data: Vec<Mat3>,
}

impl CoeffField {
    pub fn zeros(grid: BoxGrid) -> Self {
        Self {
            grid,
            data: vec![Mat3::zeros(); grid.len()],
        }
    }

    pub fn constant(grid: BoxGrid, m: Mat3) -> Self {
        Self {
            grid,
            data: vec![m; grid.len()],
        }
    }

    pub fn from_fn<F>(grid: BoxGrid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> Mat3 + Sync,
    {
        let data = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.position_of(i)))
            .collect();
        Self { grid, data }
    }

    /// Seeded low-frequency random field of roughly unit size times
    /// `amplitude`: a few sine modes per entry plus 5% nodal noise.
    pub fn random_smooth(grid: BoxGrid, amplitude: f64, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<[f64; 7]> = (0..9)
            .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
            .collect();
        let noise: Vec<Mat3> = (0..grid.len())
            .map(|_| Mat3::from_fn(|_, _| rng.random_range(-0.05..0.05)))
            .collect();
        let lo = grid.origin;
        let ext = grid.extent;
        let smooth = Self::from_fn(grid, |x| {
            let u: [f64; 3] = std::array::from_fn(|a| (x[a] - lo[a]) / ext[a]);
            Mat3::from_fn(|r, c| {
                let m = &modes[3 * r + c];
                m[0] + m[1] * (2.0 * u[0] + m[4]).sin()
                    + m[2] * (1.5 * u[1] + m[5]).cos()
                    + m[3] * (2.5 * u[2] + m[6]).sin()
            })
        });
        Self {
            grid,
            data: smooth.data.iter().zip(&noise).map(|(a, b)| (a + b) * amplitude).collect(),
        }
    }

    pub fn from_data(grid: BoxGrid, data: Vec<Mat3>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "data has {} nodes, grid has {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, data })
    }

    /// Nodewise map, run in parallel.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(usize, &Mat3) -> Mat3 + Sync,
    {
        let data = self.data.par_iter().enumerate().map(|(i, m)| f(i, m)).collect();
        Self {
            grid: self.grid,
            data,
        }
    }

    pub fn zip_map<F>(&self, other: &Self, f: F) -> Self
    where
        F: Fn(&Mat3, &Mat3) -> Mat3 + Sync,
    {
        assert_eq!(self.data.len(), other.data.len(), "field length mismatch");
        let data = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(a, b)| f(a, b))
            .collect();
        Self {
            grid: self.grid,
            data,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|_, a| a * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b * s)
    }

    /// Quadrature inner product `Σ w_n u_n : v_n`.
    pub fn dot_w(&self, other: &Self) -> f64 {
        let w = self.grid.weights();
        weighted_sum(&w, |i| contract(&self.data[i], &other.data[i]))
    }

    /// Euclidean inner product of the raw node values.
    pub fn dot_raw(&self, other: &Self) -> f64 {
        let terms: Vec<f64> = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(a, b)| contract(a, b))
            .collect();
        pairwise_sum(&terms)
    }

    /// Largest absolute entry.
    pub fn linf(&self) -> f64 {
        self.data.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// Largest nodal Frobenius norm.
    pub fn max_frobenius(&self) -> f64 {
        self.data.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    /// Discrete L2 norm in the quadrature weights.
    pub fn l2(&self) -> f64 {
        self.dot_w(self).max(0.0).sqrt()
    }

    /// Largest absolute entry over nodes not on the boundary.
    pub fn linf_interior(&self) -> f64 {
        self.data
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.grid.is_boundary(*i))
            .map(|(_, m)| max_abs(m))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|m| m.iter().all(|v| v.is_finite()))
    }
}

/// `∂_axis` applied entrywise.
pub fn partial(f: &CoeffField, axis: usize) -> CoeffField {
    let grid = f.grid;
    let ops = grid.operators();
    let op = &ops[axis];
    let stride = grid.strides()[axis];
    let data = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let i = grid.multi_index(idx)[axis];
            let base = idx - i * stride;
            op.rows[i]
                .iter()
                .fold(Mat3::zeros(), |acc, &(j, c)| acc + f.data[base + j * stride] * c)
        })
        .collect();
    CoeffField { grid, data }
}

/// Row-wise curl `(curl f)_{Zr} = ε_{rqp} ∂_q f_{Zp}`.
pub fn curl_rowwise(f: &CoeffField) -> CoeffField {
    let d = [partial(f, 0), partial(f, 1), partial(f, 2)];
    let grid = f.grid;
    let data = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let mut out = Mat3::zeros();
            for &(r, q, p, s) in LEVI_NONZERO.iter() {
                for z in 0..3 {
                    out[(z, r)] += s * d[q].data[idx][(z, p)];
                }
            }
            out
        })
        .collect();
    CoeffField { grid, data }
}

/// Diagonal of `W⁻¹ curlᵀ W curl`: entry `(Z, p)` at each node is the
/// weighted squared norm of the curl column for `λ_{Zp}` at that node.
pub fn curl_gram_diagonal(grid: &BoxGrid) -> CoeffField {
    let ops = grid.operators();
    let per_axis: Vec<Vec<f64>> = ops
        .iter()
        .map(|op| {
            (0..op.n)
                .map(|n| op.cols[n].iter().map(|&(m, c)| op.norm[m] * c * c).sum::<f64>() / op.norm[n])
                .collect()
        })
        .collect();
    CoeffField::from_data(
        *grid,
        (0..grid.len())
            .map(|idx| {
                let mi = grid.multi_index(idx);
                Mat3::from_fn(|_, p| (0..3).filter(|&q| q != p).map(|q| per_axis[q][mi[q]]).sum())
            })
            .collect(),
    )
    .expect("layout matches grid")
}

/// Exact matrix transpose of [`curl_rowwise`] acting on raw node values.
pub fn curl_transpose(g: &CoeffField) -> CoeffField {
    let grid = g.grid;
    let ops = grid.operators();
    let strides = grid.strides();
    let data = (0..grid.len())
        .into_par_iter()
        .map(|m| {
            let mi = grid.multi_index(m);
            // t[q] = Σ_n D_q[n, m] g_n
            let mut t = [Mat3::zeros(); 3];
            for q in 0..3 {
                let base = m - mi[q] * strides[q];
                for &(n, c) in &ops[q].cols[mi[q]] {
                    t[q] += g.data[base + n * strides[q]] * c;
                }
            }
            let mut out = Mat3::zeros();
            for &(r, q, p, s) in LEVI_NONZERO.iter() {
                for z in 0..3 {
                    out[(z, p)] += s * t[q][(z, r)];
                }
            }
            out
        })
        .collect();
    CoeffField { grid, data }
}
