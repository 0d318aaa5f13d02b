//! Explicit dual scheme for the shifted quadratic potential
//! `H(A) = ½k|A − Ā|²`.
//!
//! At each node the pre-dual integrand is quadratic in `A`, so the
//! dual-to-primal map is one 9×9 linear solve per node.

use crate::error::{Error, Result};
use crate::grid::{
    boundary_pairing, boundary_pairing_gradient, curl_rowwise, volume_integral, BoundaryField,
    BoxGrid, CoeffField,
};
use crate::chern_simons::flatness_residual;
use crate::tensor::{contract, coupling_matrix, flatten, t_of, unflatten, Mat3, Mat9};
use rayon::prelude::*;
use serde::Serialize;

pub const COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct QuadDualProblem {
    pub grid: BoxGrid,
    pub abar: CoeffField,
    pub ab: BoundaryField,
    pub k: f64,
}

impl QuadDualProblem {
    pub fn new(abar: CoeffField, ab: BoundaryField, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
        }
        abar.grid.ensure_same(&ab.grid)?;
        if !abar.is_finite() {
            return Err(Error::InvalidParameter("base field has non-finite entries".into()));
        }
        Ok(Self {
            grid: abar.grid,
            abar,
            ab,
            k,
        })
    }

    /// `Ā = 0`, `A_b = 0`.
    pub fn homogeneous(grid: BoxGrid, k: f64) -> Result<Self> {
        Self::new(CoeffField::zeros(grid), BoundaryField::zeros(grid), k)
    }

    /// `k = 1 + 4‖λ₀‖∞`, which keeps 𝕂 diagonally dominant at `λ₀`.
    pub fn default_k(lam0: &CoeffField) -> f64 {
        1.0 + 4.0 * lam0.linf()
    }
}

/// Per-node `𝕂 = I + (2/k) M(λ)`.
#[derive(Debug, Clone)]
pub struct KOperator {
    pub k: f64,
    pub mats: Vec<Mat9>,
}

pub fn assemble_k(lam: &CoeffField, k: f64) -> KOperator {
    let s = 2.0 / k;
    KOperator {
        k,
        mats: lam
            .data
            .par_iter()
            .map(|l| Mat9::identity() + coupling_matrix(l) * s)
            .collect(),
    }
}

/// `P = −curl λ − 2 M(λ) Ā`.
pub fn assemble_p(lam: &CoeffField, prob: &QuadDualProblem) -> Result<CoeffField> {
    lam.grid.ensure_same(&prob.grid)?;
    let c = curl_rowwise(lam);
    Ok(c.map(|i, ci| {
        let b = unflatten(&(coupling_matrix(&lam.data[i]) * flatten(&prob.abar.data[i])));
        -ci - b * 2.0
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DtpStats {
    /// Largest condition number of 𝕂 over nodes.
    pub max_cond: f64,
    /// Largest `‖k𝕂(A−Ā) − P‖∞ / (1 + ‖P‖∞)` over nodes.
    pub max_residual: f64,
}

pub fn symmetric_cond(m: &Mat9) -> f64 {
    let ev = m.symmetric_eigenvalues();
    let (lo, hi) = ev
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), e| (lo.min(e.abs()), hi.max(e.abs())));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Dual-to-primal map `A = Ā + (1/k) 𝕂⁻¹ P`, with solve statistics.
pub fn dtp_map_with_stats(
    lam: &CoeffField,
    prob: &QuadDualProblem,
) -> Result<(CoeffField, DtpStats)> {
    let p = assemble_p(lam, prob)?;
    let k = prob.k;
    let kop = assemble_k(lam, k);
    let solved: Vec<Result<(Mat3, f64, f64)>> = (0..prob.grid.len())
        .into_par_iter()
        .map(|i| {
            let km = &kop.mats[i];
            let cond = symmetric_cond(km);
            if !(cond <= COND_LIMIT) {
                return Err(Error::SingularK { node: i, cond });
            }
            let pv = flatten(&p.data[i]);
            let x = km
                .lu()
                .solve(&(pv / k))
                .ok_or(Error::SingularK { node: i, cond })?;
            let res = (km * x * k - pv).amax() / (1.0 + pv.amax());
            Ok((prob.abar.data[i] + unflatten(&x), cond, res))
        })
        .collect();
    let mut data = Vec::with_capacity(solved.len());
    let mut stats = DtpStats {
        max_cond: 0.0,
        max_residual: 0.0,
    };
    for r in solved {
        let (a, c, res) = r?;
        stats.max_cond = stats.max_cond.max(c);
        stats.max_residual = stats.max_residual.max(res);
        data.push(a);
    }
    Ok((
        CoeffField {
            grid: prob.grid,
            data,
        },
        stats,
    ))
}

pub fn dtp_map(lam: &CoeffField, prob: &QuadDualProblem) -> Result<CoeffField> {
    dtp_map_with_stats(lam, prob).map(|(a, _)| a)
}

/// Pointwise pre-dual integrand `A:μ + λ:T(A) + ½k|A − Ā|²`.
pub fn predual_integrand(a: &Mat3, lam: &Mat3, mu: &Mat3, abar: &Mat3, k: f64) -> f64 {
    let d = a - abar;
    contract(a, mu) + contract(lam, &t_of(a)) + 0.5 * k * d.norm_squared()
}

/// Derivative of [`predual_integrand`] in `A`: `μ + 2M(λ)A + k(A − Ā)`.
pub fn predual_integrand_grad(a: &Mat3, lam: &Mat3, mu: &Mat3, abar: &Mat3, k: f64) -> Mat3 {
    mu + unflatten(&(coupling_matrix(lam) * flatten(a))) * 2.0 + (a - abar) * k
}

pub fn predual_action(a: &CoeffField, lam: &CoeffField, prob: &QuadDualProblem) -> Result<f64> {
    a.grid.ensure_same(&prob.grid)?;
    lam.grid.ensure_same(&prob.grid)?;
    let mu = curl_rowwise(lam);
    let density: Vec<f64> = (0..prob.grid.len())
        .into_par_iter()
        .map(|i| predual_integrand(&a.data[i], &lam.data[i], &mu.data[i], &prob.abar.data[i], prob.k))
        .collect();
    Ok(volume_integral(&prob.grid, &density) - boundary_pairing(lam, &prob.ab)?)
}

/// Closed-form dual functional
/// `Σ w [−(1/2k) P·𝕂⁻¹P + λ:T(Ā) + Ā:curl λ] − boundary pairing`.
pub fn dual_action(lam: &CoeffField, prob: &QuadDualProblem) -> Result<f64> {
    let (a, _) = dtp_map_with_stats(lam, prob)?;
    let p = assemble_p(lam, prob)?;
    let mu = curl_rowwise(lam);
    let density: Vec<f64> = (0..prob.grid.len())
        .into_par_iter()
        .map(|i| {
            let abar = &prob.abar.data[i];
            // (1/k) 𝕂⁻¹ P = A − Ā
            let x = a.data[i] - abar;
            -0.5 * contract(&p.data[i], &x)
                + contract(&lam.data[i], &t_of(abar))
                + contract(abar, &mu.data[i])
        })
        .collect();
    Ok(volume_integral(&prob.grid, &density) - boundary_pairing(lam, &prob.ab)?)
}

/// Gradient of [`dual_action`] in the quadrature inner product:
/// the flatness residual of `A = DtP(λ)` plus the boundary mismatch
/// `W⁻¹ a ((A − A_b) × n)` on boundary nodes.
pub fn dual_gradient(lam: &CoeffField, prob: &QuadDualProblem) -> Result<CoeffField> {
    let a = dtp_map(lam, prob)?;
    Ok(gradient_from_primal(&a, &prob.ab))
}

pub(crate) fn gradient_from_primal(a: &CoeffField, ab: &BoundaryField) -> CoeffField {
    let mismatch = BoundaryField::trace(a).sub(ab);
    flatness_residual(a).add(&boundary_pairing_gradient(&mismatch))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualEval {
    pub value: f64,
    pub gradient_linf: f64,
    /// Flatness residual of the DtP image at interior nodes.
    pub dtp_flatness_linf: f64,
    pub boundary_mismatch_linf: f64,
    pub max_cond: f64,
    pub dtp_residual: f64,
}

pub fn evaluate(lam: &CoeffField, prob: &QuadDualProblem) -> Result<DualEval> {
    let (a, stats) = dtp_map_with_stats(lam, prob)?;
    let g = gradient_from_primal(&a, &prob.ab);
    Ok(DualEval {
        value: dual_action(lam, prob)?,
        gradient_linf: g.linf(),
        dtp_flatness_linf: flatness_residual(&a).linf_interior(),
        boundary_mismatch_linf: BoundaryField::trace(&a).sub(&prob.ab).tangential_linf(),
        max_cond: stats.max_cond,
        dtp_residual: stats.max_residual,
    })
}
