use super::{BoxGrid, CoeffField};
use crate::error::Result;
use crate::reduce::pairwise_sum;
use crate::tensor::{contract, cross_rowwise, max_abs, Mat3};
use nalgebra::Vector3;

/// One box face. Nodes are ordered with the two tangential axes in
/// increasing axis order, the later one fastest. Edge and corner nodes
/// belong to every face that contains them.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub axis: usize,
    /// 0 for the face at the origin side, 1 for the far side.
    pub side: usize,
    pub normal: Vector3<f64>,
    pub tangential: [usize; 2],
    pub dims: [usize; 2],
    /// Global node index of each face node.
    pub nodes: Vec<usize>,
    /// Face quadrature weights (products of the tangential norm weights).
    pub weights: Vec<f64>,
    /// Area element: product of the tangential spacings.
    pub da: f64,
    pub data: Vec<Mat3>,
}

/// Boundary datum on the six faces, ordered x1−, x1+, x2−, x2+, x3−, x3+.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    pub grid: BoxGrid,
    pub faces: Vec<Face>,
}

impl BoundaryField {
    pub fn zeros(grid: BoxGrid) -> Self {
        let ops = grid.operators();
        let h = grid.h();
        let mut faces = Vec::with_capacity(6);
        for axis in 0..3 {
            let tangential = match axis {
                0 => [1, 2],
                1 => [0, 2],
                _ => [0, 1],
            };
            let dims = [grid.n[tangential[0]], grid.n[tangential[1]]];
            for side in 0..2 {
                let fixed = if side == 0 { 0 } else { grid.n[axis] - 1 };
                let mut normal = Vector3::zeros();
                normal[axis] = if side == 0 { -1.0 } else { 1.0 };
                let mut nodes = Vec::with_capacity(dims[0] * dims[1]);
                let mut weights = Vec::with_capacity(dims[0] * dims[1]);
                for a in 0..dims[0] {
                    for b in 0..dims[1] {
                        let mut i = [0usize; 3];
                        i[axis] = fixed;
                        i[tangential[0]] = a;
                        i[tangential[1]] = b;
                        nodes.push(grid.index(i));
                        weights.push(ops[tangential[0]].norm[a] * ops[tangential[1]].norm[b]);
                    }
                }
                let count = nodes.len();
                faces.push(Face {
                    axis,
                    side,
                    normal,
                    tangential,
                    dims,
                    nodes,
                    weights,
                    da: h[tangential[0]] * h[tangential[1]],
                    data: vec![Mat3::zeros(); count],
                });
            }
        }
        Self { grid, faces }
    }

    /// Restriction of a field to the boundary nodes.
    pub fn trace(field: &CoeffField) -> Self {
        let mut b = Self::zeros(field.grid);
        for face in &mut b.faces {
            face.data = face.nodes.iter().map(|&n| field.data[n]).collect();
        }
        b
    }

    /// Datum from a function of position and outward normal.
    pub fn from_fn<F>(grid: BoxGrid, f: F) -> Self
    where
        F: Fn([f64; 3], &Vector3<f64>) -> Mat3,
    {
        let mut b = Self::zeros(grid);
        for face in &mut b.faces {
            let normal = face.normal;
            face.data = face
                .nodes
                .iter()
                .map(|&n| f(grid.position_of(n), &normal))
                .collect();
        }
        b
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (f, g) in out.faces.iter_mut().zip(&other.faces) {
            for (a, b) in f.data.iter_mut().zip(&g.data) {
                *a -= b;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for f in &mut out.faces {
            for a in &mut f.data {
                *a *= s;
            }
        }
        out
    }

    pub fn linf(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| f.data.iter())
            .map(max_abs)
            .fold(0.0, f64::max)
    }

    /// Largest entry of the row-wise tangential part `M × n`.
    pub fn tangential_linf(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| f.data.iter().map(move |m| max_abs(&cross_rowwise(m, &f.normal))))
            .fold(0.0, f64::max)
    }
}

/// `Σ_faces Σ_nodes a · λ : (A_b × n)` (positive sign).
pub fn boundary_pairing(lam: &CoeffField, ab: &BoundaryField) -> Result<f64> {
    lam.grid.ensure_same(&ab.grid)?;
    let mut terms = Vec::new();
    for face in &ab.faces {
        for ((&node, &w), m) in face.nodes.iter().zip(&face.weights).zip(&face.data) {
            terms.push(w * contract(&lam.data[node], &cross_rowwise(m, &face.normal)));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Gradient of [`boundary_pairing`] in `λ`, as a representer in the
/// quadrature inner product (divided by the node weights).
pub fn boundary_pairing_gradient(ab: &BoundaryField) -> CoeffField {
    let grid = ab.grid;
    let w = grid.weights();
    let mut g = CoeffField::zeros(grid);
    for face in &ab.faces {
        for ((&node, &fw), m) in face.nodes.iter().zip(&face.weights).zip(&face.data) {
            g.data[node] += cross_rowwise(m, &face.normal) * (fw / w[node]);
        }
    }
    g
}
