use super::{BoxGrid, CoeffField};
use crate::error::{Error, Result};
use crate::lie::{su2_defect, su2_exp, Mat2c, StructureData};
use crate::tensor::Mat3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const UNITARY_TOL: f64 = 1e-10;

/// One factor `exp(rate · x_axis · E_generator)` of a gauge map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeFactor {
    pub axis: usize,
    pub generator: usize,
    pub rate: f64,
}

/// `g(x) = Π_k exp(rate_k · x_{axis_k} · E_{generator_k})`, left to right.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeGenerator {
    pub factors: Vec<GaugeFactor>,
}

impl GaugeGenerator {
    pub fn new(factors: Vec<GaugeFactor>) -> Self {
        Self { factors }
    }

    pub fn validate(&self) -> Result<()> {
        for f in &self.factors {
            if f.axis > 2 || f.generator > 2 || !f.rate.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "gauge factor {f:?}: axis and generator must be 0, 1 or 2 with finite rate"
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: [f64; 3]) -> Mat2c {
        let e = crate::lie::Su2Basis::standard().e;
        self.factors.iter().fold(Mat2c::identity(), |acc, f| {
            acc * su2_exp(&(e[f.generator] * Complex64::new(f.rate * x[f.axis], 0.0)))
        })
    }

    pub fn sample(&self, grid: &BoxGrid) -> Vec<Mat2c> {
        (0..grid.len())
            .into_par_iter()
            .map(|i| self.eval(grid.position_of(i)))
            .collect()
    }

    /// Flat connection of this map on `grid`.
    pub fn field(&self, grid: &BoxGrid) -> Result<CoeffField> {
        self.validate()?;
        pure_gauge_field(grid, &self.sample(grid))
    }
}

/// Finite-difference rows for group-valued samples: fourth order when the
/// axis has at least five nodes, second order otherwise.
fn fd_rows(n: usize, h: f64) -> Vec<Vec<(usize, f64)>> {
    let mut rows = vec![Vec::new(); n];
    if n >= 5 {
        let s = 1.0 / (12.0 * h);
        let first = [-25.0, 48.0, -36.0, 16.0, -3.0];
        let second = [-3.0, -10.0, 18.0, -6.0, 1.0];
        for j in 0..5 {
            rows[0].push((j, first[j] * s));
            rows[1].push((j, second[j] * s));
            rows[n - 1].push((n - 1 - j, -first[j] * s));
            rows[n - 2].push((n - 1 - j, -second[j] * s));
        }
        let central = [1.0, -8.0, 0.0, 8.0, -1.0];
        for (i, row) in rows.iter_mut().enumerate().take(n - 2).skip(2) {
            for (o, &c) in central.iter().enumerate() {
                row.push((i + o - 2, c * s));
            }
        }
    } else {
        let s = 1.0 / (2.0 * h);
        rows[0] = vec![(0, -3.0 * s), (1, 4.0 * s), (2, -s)];
        rows[n - 1] = vec![(n - 1, 3.0 * s), (n - 2, -4.0 * s), (n - 3, s)];
        for (i, row) in rows.iter_mut().enumerate().take(n - 1).skip(1) {
            *row = vec![(i - 1, -s), (i + 1, s)];
        }
    }
    rows
}

/// `A_{Jp} = s · ⟨E_J, g⁻¹ ∂_p g⟩` from nodal SU(2) samples, where `s` is
/// the measured structure-constant sign. With that factor the field solves
/// `curl A + T(A) = 0` up to the differencing error.
pub fn pure_gauge_field(grid: &BoxGrid, g: &[Mat2c]) -> Result<CoeffField> {
    if g.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} group samples for {} nodes",
            g.len(),
            grid.len()
        )));
    }
    if let Some((node, deviation)) = g
        .iter()
        .map(su2_defect)
        .enumerate()
        .find(|(_, d)| !(*d <= UNITARY_TOL))
    {
        return Err(Error::NotUnitary { node, deviation });
    }
    let sd = StructureData::standard();
    let h = grid.h();
    let rows: Vec<_> = (0..3).map(|a| fd_rows(grid.n[a], h[a])).collect();
    let strides = grid.strides();
    let data = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let mi = grid.multi_index(idx);
            let ginv = g[idx].adjoint();
            let mut a = Mat3::zeros();
            for p in 0..3 {
                let base = idx - mi[p] * strides[p];
                let dg = rows[p][mi[p]].iter().fold(Mat2c::zeros(), |acc, &(j, c)| {
                    acc + g[base + j * strides[p]] * Complex64::new(c, 0.0)
                });
                let x = ginv * dg;
                for j in 0..3 {
                    a[(j, p)] = sd.sign * (-0.5 * (sd.basis.e[j] * x).trace().re);
                }
            }
            a
        })
        .collect();
    Ok(CoeffField { grid: *grid, data })
}

/// [`pure_gauge_field`] for a map given as a function of position.
pub fn pure_gauge_from_fn<F>(grid: &BoxGrid, f: F) -> Result<CoeffField>
where
    F: Fn([f64; 3]) -> Mat2c + Sync,
{
    let g: Vec<Mat2c> = (0..grid.len())
        .into_par_iter()
        .map(|i| f(grid.position_of(i)))
        .collect();
    pure_gauge_field(grid, &g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map_gives_zero_field() {
        let grid = BoxGrid::unit_cube(5).unwrap();
        let a = pure_gauge_from_fn(&grid, |_| Mat2c::identity()).unwrap();
        assert_eq!(a.linf(), 0.0);
    }

    #[test]
    fn abelian_map_gives_constant_field() {
        // g = exp(x1 E3): g⁻¹∂_1 g = E3, so A = s·δ_{Z3}δ_{p1}.
        let grid = BoxGrid::unit_cube(17).unwrap();
        let gen = GaugeGenerator::new(vec![GaugeFactor {
            axis: 0,
            generator: 2,
            rate: 1.0,
        }]);
        let a = gen.field(&grid).unwrap();
        let mut want = Mat3::zeros();
        want[(2, 0)] = -1.0;
        let err = a.data.iter().map(|m| (m - want).amax()).fold(0.0, f64::max);
        assert!(err < 1e-5, "err {err}");
    }

    #[test]
    fn non_unitary_input_is_rejected() {
        let grid = BoxGrid::unit_cube(3).unwrap();
        let mut g = vec![Mat2c::identity(); grid.len()];
        g[4] *= Complex64::new(1.001, 0.0);
        assert!(matches!(
            pure_gauge_field(&grid, &g),
            Err(Error::NotUnitary { node: 4, .. })
        ));
    }

    #[test]
    fn fd_rows_are_exact_on_quartics() {
        let n = 9;
        let h = 0.25;
        let rows = fd_rows(n, h);
        for (i, r) in rows.iter().enumerate() {
            let x = i as f64 * h;
            let d: f64 = r.iter().map(|&(j, c)| c * (j as f64 * h).powi(4)).sum();
            assert!((d - 4.0 * x.powi(3)).abs() < 1e-10, "row {i}");
        }
    }
}
