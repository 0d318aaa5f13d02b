//! Small dense index algebra shared by every module: the Levi-Civita
//! symbol, 3×3 coefficient matrices and their 9-vector flattening.
//!
//! Flattening convention: entry `(Z, p)` of a coefficient matrix maps to
//! index `3·Z + p` (0-based), i.e. row-major with the Lie index outer.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

pub type Mat3 = Matrix3<f64>;
pub type Vec9 = SVector<f64, 9>;
pub type Mat9 = SMatrix<f64, 9, 9>;

/// Levi-Civita symbol ε_{ijk} on 0-based indices.
#[inline]
pub fn levi(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The six non-zero entries of ε as `(i, j, k, sign)`.
pub const LEVI_NONZERO: [(usize, usize, usize, f64); 6] = [
    (0, 1, 2, 1.0),
    (1, 2, 0, 1.0),
    (2, 0, 1, 1.0),
    (0, 2, 1, -1.0),
    (2, 1, 0, -1.0),
    (1, 0, 2, -1.0),
];

#[inline]
pub fn flat_index(row: usize, col: usize) -> usize {
    3 * row + col
}

pub fn flatten(m: &Mat3) -> Vec9 {
    Vec9::from_fn(|i, _| m[(i / 3, i % 3)])
}

pub fn unflatten(v: &Vec9) -> Mat3 {
    Mat3::from_fn(|r, c| v[flat_index(r, c)])
}

/// Frobenius contraction `A : B`.
#[inline]
pub fn contract(a: &Mat3, b: &Mat3) -> f64 {
    a.component_mul(b).sum()
}

/// T_{Zp}(A) = ε_{pqr} ε_{ZDC} A_{Dq} A_{Cr}; equals twice the cofactor matrix.
pub fn t_of(a: &Mat3) -> Mat3 {
    let mut t = Mat3::zeros();
    for &(p, q, r, s1) in LEVI_NONZERO.iter() {
        for &(z, d, c, s2) in LEVI_NONZERO.iter() {
            t[(z, p)] += s1 * s2 * a[(d, q)] * a[(c, r)];
        }
    }
    t
}

/// Symmetric matrix of the quadratic form `A ↦ λ : T(A)` on flattened A:
/// `M[(B,q)][(C,r)] = λ_{Zp} ε_{pqr} ε_{ZBC}`.
///
/// The tensor is already symmetric under `(B,q) ↔ (C,r)`; the explicit
/// symmetrization only removes rounding asymmetry.
pub fn coupling_matrix(lam: &Mat3) -> Mat9 {
    let mut m = Mat9::zeros();
    for &(p, q, r, s1) in LEVI_NONZERO.iter() {
        for &(z, b, c, s2) in LEVI_NONZERO.iter() {
            m[(flat_index(b, q), flat_index(c, r))] += lam[(z, p)] * s1 * s2;
        }
    }
    (m + m.transpose()) * 0.5
}

/// Row-wise cross product `(M × n)_{Zr} = ε_{rqs} M_{Zq} n_s`.
pub fn cross_rowwise(m: &Mat3, n: &Vector3<f64>) -> Mat3 {
    let mut out = Mat3::zeros();
    for z in 0..3 {
        let row = Vector3::new(m[(z, 0)], m[(z, 1)], m[(z, 2)]);
        let c = row.cross(n);
        for r in 0..3 {
            out[(z, r)] = c[r];
        }
    }
    out
}

/// Row-major nested array, the layout used in JSON output.
pub fn rows_of(m: &Mat3) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|r| [0, 1, 2].map(|c| m[(r, c)]))
}

pub fn from_rows(r: &[[f64; 3]; 3]) -> Mat3 {
    Mat3::from_fn(|i, j| r[i][j])
}

/// Serializes a matrix as a row-major nested array.
pub fn ser_mat3<S: serde::Serializer>(m: &Mat3, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&rows_of(m), s)
}

pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
