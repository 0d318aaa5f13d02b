//! Chern-Simons action, its first variation and the flatness residual.
//!
//! Pointwise density `2 A:curl A + 8 det A`; the cubic part is
//! `(4/3)·ε_{pqr}ε_{JKL}A_{Jp}A_{Kq}A_{Lr}`, which equals `8 det A`.

use crate::grid::{curl_rowwise, volume_integral, BoxGrid, CoeffField};
use crate::tensor::{contract, t_of};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsReport {
    pub action: f64,
    pub residual_linf: f64,
    pub residual_l2: f64,
}

pub fn cs_action(a: &CoeffField) -> f64 {
    let c = curl_rowwise(a);
    let density: Vec<f64> = a
        .data
        .par_iter()
        .zip(c.data.par_iter())
        .map(|(m, cm)| 2.0 * contract(m, cm) + 8.0 * m.determinant())
        .collect();
    volume_integral(&a.grid, &density)
}

/// `R_{Zp} = ε_{pqr}(∂_q A_{Zr} + ε_{ZBC} A_{Bq} A_{Cr})`, i.e. `curl A + T(A)`.
pub fn flatness_residual(a: &CoeffField) -> CoeffField {
    curl_rowwise(a).zip_map(a, |c, m| c + t_of(m))
}

/// `4·R(A)` at interior nodes and zero on the boundary.
///
/// For variations supported away from the boundary this is the exact
/// gradient of [`cs_action`] in the quadrature inner product.
pub fn cs_gradient(a: &CoeffField) -> CoeffField {
    let grid = a.grid;
    flatness_residual(a).map(|i, r| {
        if grid.is_boundary(i) {
            crate::tensor::Mat3::zeros()
        } else {
            r * 4.0
        }
    })
}

pub fn cs_report(a: &CoeffField) -> CsReport {
    let r = flatness_residual(a);
    CsReport {
        action: cs_action(a),
        residual_linf: r.linf(),
        residual_l2: r.l2(),
    }
}

/// `φ(x) = Π_a sin²(π (x_a − o_a)/L_a)`, smooth and vanishing on the boundary.
pub fn smooth_bump(grid: &BoxGrid) -> Vec<f64> {
    (0..grid.len())
        .map(|i| {
            let x = grid.position_of(i);
            (0..3)
                .map(|a| {
                    let s = (std::f64::consts::PI * (x[a] - grid.origin[a]) / grid.extent[a]).sin();
                    s * s
                })
                .product()
        })
        .collect()
}

/// `A^t_{Jk} = t φ δ_{Jk}`.
pub fn diagonal_family(grid: &BoxGrid, phi: &[f64], t: f64) -> CoeffField {
    CoeffField {
        grid: *grid,
        data: phi
            .iter()
            .map(|&p| crate::tensor::Mat3::identity() * (t * p))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicFit {
    /// Coefficients of `1, t, t², t³`.
    pub coeffs: [f64; 4],
    /// Largest absolute residual of the fit at the samples.
    pub residual: f64,
}

/// Least-squares cubic through `(t_i, y_i)`; needs four distinct abscissae.
pub fn cubic_fit(ts: &[f64], ys: &[f64]) -> Option<CubicFit> {
    if ts.len() != ys.len() || ts.len() < 4 {
        return None;
    }
    let v = DMatrix::from_fn(ts.len(), 4, |i, j| ts[i].powi(j as i32));
    let y = DVector::from_column_slice(ys);
    let c = v.clone().svd(true, true).solve(&y, 1e-14).ok()?;
    if v.clone().svd(false, false).rank(1e-12) < 4 {
        return None;
    }
    let residual = (&v * &c - &y).amax();
    Some(CubicFit {
        coeffs: [c[0], c[1], c[2], c[3]],
        residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CubicDemo {
    pub samples: Vec<(f64, f64)>,
    pub fit: CubicFit,
    /// `8·∫φ³` by the same quadrature.
    pub predicted_t3: f64,
    pub relative_error: f64,
}

/// Samples the action along the diagonal bump family and fits a cubic.
pub fn cubic_demo(grid: &BoxGrid, ts: &[f64]) -> Option<CubicDemo> {
    let phi = smooth_bump(grid);
    let samples: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| (t, cs_action(&diagonal_family(grid, &phi, t))))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let fit = cubic_fit(&xs, &ys)?;
    let cubes: Vec<f64> = phi.iter().map(|p| p * p * p).collect();
    let predicted_t3 = 8.0 * volume_integral(grid, &cubes);
    let relative_error = (fit.coeffs[3] - predicted_t3).abs() / predicted_t3.abs();
    Some(CubicDemo {
        samples,
        fit,
        predicted_t3,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Mat3;

    #[test]
    fn zero_field() {
        let g = BoxGrid::unit_cube(5).unwrap();
        let z = CoeffField::zeros(g);
        assert_eq!(cs_action(&z), 0.0);
        assert_eq!(flatness_residual(&z).linf(), 0.0);
        assert_eq!(cs_gradient(&z).linf(), 0.0);
    }

    #[test]
    fn constant_diagonal_residual() {
        let g = BoxGrid::unit_cube(5).unwrap();
        let c = 0.7;
        let r = flatness_residual(&CoeffField::constant(g, Mat3::identity() * c));
        for m in &r.data {
            assert!((m - Mat3::identity() * (2.0 * c * c)).amax() < 1e-12);
        }
    }

    #[test]
    fn cubic_density_is_eight_determinants() {
        let a = Mat3::new(0.3, -1.2, 0.7, 2.0, 0.1, -0.4, 0.5, 0.9, -1.1);
        let mut s = 0.0;
        for p in 0..3 {
            for q in 0..3 {
                for r in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            for l in 0..3 {
                                s += crate::tensor::levi(p, q, r)
                                    * crate::tensor::levi(j, k, l)
                                    * a[(j, p)]
                                    * a[(k, q)]
                                    * a[(l, r)];
                            }
                        }
                    }
                }
            }
        }
        assert!((4.0 / 3.0 * s - 8.0 * a.determinant()).abs() < 1e-12);
        assert!((contract(&a, &t_of(&a)) - 6.0 * a.determinant()).abs() < 1e-12);
    }

    #[test]
    fn gradient_is_four_residual_inside() {
        let g = BoxGrid::unit_cube(8).unwrap();
        let a = CoeffField::from_fn(g, |x| Mat3::from_fn(|z, p| (x[p] * (z + 1) as f64).sin()));
        let r = flatness_residual(&a);
        let gr = cs_gradient(&a);
        for i in 0..g.len() {
            if g.is_boundary(i) {
                assert_eq!(gr.data[i], Mat3::zeros());
            } else {
                assert_eq!(gr.data[i], r.data[i] * 4.0);
            }
        }
    }

    #[test]
    fn cubic_fit_recovers_polynomial() {
        let ts = [-2.0, -1.0, 1.0, 2.0];
        let ys: Vec<f64> = ts.iter().map(|t| 1.0 - t + 0.5 * t * t + 3.0 * t * t * t).collect();
        let f = cubic_fit(&ts, &ys).unwrap();
        for (c, w) in f.coeffs.iter().zip([1.0, -1.0, 0.5, 3.0]) {
            assert!((c - w).abs() < 1e-12);
        }
        assert!(cubic_fit(&[1.0, 1.0, 1.0, 1.0], &[0.0; 4]).is_none());
    }
}
