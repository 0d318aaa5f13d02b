//! Field-level sup-form dual functional
//! `S̃[λ] = Σ w g(λ, curl λ) − boundary pairing`, its gradient, primal
//! recovery and minimization.

use crate::dual_quadratic::gradient_from_primal;
use crate::error::{Error, Result};
use crate::chern_simons::flatness_residual;
use crate::grid::{
    boundary_pairing, boundary_pairing_gradient, curl_rowwise, curl_transpose, BoundaryField,
    CoeffField,
};
use crate::pointwise::{g_quadratic_closed, quadratic_margin, g_sup_oracle_with, GParams, GValue, OracleOptions};
use crate::reduce::weighted_sum;
use crate::tensor::{contract, t_of, Mat3};
use rayon::prelude::*;
use serde::Serialize;

/// Nodewise suprema of a field.
#[derive(Debug, Clone)]
pub struct PointwiseSup {
    pub values: Vec<f64>,
    pub argmax: CoeffField,
    /// First node with an infinite supremum.
    pub infinite_node: Option<usize>,
    pub max_stationarity: f64,
    pub all_converged: bool,
}

/// Evaluates `g(λ(x), curl λ(x))` at every node. `warm` seeds the ascent
/// for α > 2 (ignored for α = 2, which uses the closed form).
pub fn pointwise_sup(
    lam: &CoeffField,
    params: &GParams,
    warm: Option<&CoeffField>,
    opts: &OracleOptions,
) -> PointwiseSup {
    let mu = curl_rowwise(lam);
    let vals: Vec<GValue> = (0..lam.grid.len())
        .into_par_iter()
        .map(|i| {
            if params.alpha == 2.0 {
                g_quadratic_closed(&lam.data[i], &mu.data[i], params.ell)
            } else {
                let w: Vec<Mat3> = warm.map(|f| vec![f.data[i]]).unwrap_or_default();
                let node_opts = OracleOptions {
                    seed: opts.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
                    ..*opts
                };
                g_sup_oracle_with(&lam.data[i], &mu.data[i], params, &node_opts, &w)
            }
        })
        .collect();
    PointwiseSup {
        infinite_node: vals.iter().position(|v| v.infinite),
        max_stationarity: vals
            .iter()
            .filter(|v| !v.infinite)
            .map(|v| v.stationarity)
            .fold(0.0, f64::max),
        all_converged: vals.iter().all(|v| v.converged),
        values: vals.iter().map(|v| v.value).collect(),
        argmax: CoeffField {
            grid: lam.grid,
            data: vals.iter().map(|v| v.argmax).collect(),
        },
    }
}

/// Oracle settings used at field level: deterministic starts plus a few
/// random ones.
pub fn field_oracle_options() -> OracleOptions {
    OracleOptions {
        starts: 8,
        ..OracleOptions::default()
    }
}

fn action_from_sup(sup: &PointwiseSup, lam: &CoeffField, ab: &BoundaryField) -> Result<f64> {
    if sup.infinite_node.is_some() {
        return Ok(f64::INFINITY);
    }
    let w = lam.grid.weights();
    Ok(weighted_sum(&w, |i| sup.values[i]) - boundary_pairing(lam, ab)?)
}

/// `S̃[λ]`; `+∞` when any node's supremum is unbounded.
pub fn tilde_action(lam: &CoeffField, params: &GParams, ab: &BoundaryField) -> Result<f64> {
    lam.grid.ensure_same(&ab.grid)?;
    let sup = pointwise_sup(lam, params, None, &field_oracle_options());
    action_from_sup(&sup, lam, ab)
}

fn gradient_from_sup(lam: &CoeffField, astar: &CoeffField, ab: &BoundaryField) -> CoeffField {
    let w = lam.grid.weights();
    let weighted = astar.map(|i, a| a * w[i]);
    let adj = curl_transpose(&weighted);
    let bp = boundary_pairing_gradient(ab);
    lam.map(|i, _| t_of(&astar.data[i]) + adj.data[i] / w[i] - bp.data[i])
}

/// Gradient of `S̃` in the quadrature inner product,
/// `T(A*) + W⁻¹ curlᵀ(W A*) − W⁻¹ (boundary pairing gradient)`.
pub fn tilde_gradient(lam: &CoeffField, params: &GParams, ab: &BoundaryField) -> Result<CoeffField> {
    lam.grid.ensure_same(&ab.grid)?;
    let sup = pointwise_sup(lam, params, None, &field_oracle_options());
    if let Some(node) = sup.infinite_node {
        return Err(Error::InfiniteValue { node });
    }
    Ok(gradient_from_sup(lam, &sup.argmax, ab))
}

/// Nodewise maximizer `A*(x)`.
pub fn recover_primal(lam: &CoeffField, params: &GParams) -> Result<CoeffField> {
    let sup = pointwise_sup(lam, params, None, &field_oracle_options());
    if let Some(node) = sup.infinite_node {
        return Err(Error::InfiniteValue { node });
    }
    Ok(sup.argmax)
}

/// First-order residual of the pointwise problem at `A`:
/// `μ + 2M(λ)A − αℓ|A|^{α−2}A`, nodewise max of its norm.
pub fn optimality_residual(lam: &CoeffField, astar: &CoeffField, params: &GParams) -> f64 {
    let mu = curl_rowwise(lam);
    (0..lam.grid.len())
        .into_par_iter()
        .map(|i| {
            let obj = crate::pointwise::Objective::new(&lam.data[i], &mu.data[i], params);
            obj.stationarity(&crate::tensor::flatten(&astar.data[i]))
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Absolute stopping level for the projected gradient (max norm).
    pub grad_tol: f64,
    /// Stopping level relative to the initial projected gradient.
    pub rel_grad_tol: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Pointwise Frobenius cap on λ, enforced for α = 2.
    pub constraint_radius: f64,
    pub memory: usize,
    /// Largest entry of the first trial step.
    pub initial_step: f64,
    /// For α = 2, trial points where `ℓI − B_λ` has an eigenvalue below
    /// `min_margin · ℓ` at some node are rejected.
    pub min_margin: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-12,
            rel_grad_tol: 1e-7,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            constraint_radius: 1.4,
            memory: 10,
            initial_step: 0.1,
            min_margin: 1e-6,
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self, params: &GParams) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.grad_tol > 0.0) || !(self.rel_grad_tol >= 0.0) {
            return bad("grad_tol must be positive and rel_grad_tol non-negative");
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) || !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("armijo and backtrack must lie in (0, 1)");
        }
        if self.memory == 0 || !(self.initial_step > 0.0) {
            return bad("memory and initial_step must be positive");
        }
        if !(self.min_margin >= 0.0 && self.min_margin < 1.0) {
            return bad("min_margin must lie in [0, 1)");
        }
        if params.alpha == 2.0 && !(self.constraint_radius > 0.0 && self.constraint_radius < 1.5) {
            return bad("constraint_radius must lie in (0, 3/2) for alpha = 2");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub iter: usize,
    pub value: f64,
    pub grad_linf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    LineSearchFailure,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeReport {
    pub iterations: usize,
    pub evaluations: usize,
    pub initial_value: f64,
    pub final_value: f64,
    pub initial_grad_linf: f64,
    pub final_grad_linf: f64,
    /// Max-norm of `λ − P(λ − G)`; equals the gradient norm when no
    /// constraint is active.
    pub final_projected_grad_linf: f64,
    pub flatness_linf: f64,
    pub flatness_l2: f64,
    pub flatness_interior_linf: f64,
    /// Tangential mismatch `|(A* − A_b) × n|` on the boundary.
    pub boundary_mismatch_linf: f64,
    /// All components of `A* − A_b` on the boundary.
    pub boundary_mismatch_full_linf: f64,
    pub pointwise_stationarity: f64,
    pub converged: bool,
    pub monotone: bool,
    pub stop_reason: StopReason,
    pub history: Vec<HistoryEntry>,
}

struct Eval {
    value: f64,
    /// Rounding level of `value`.
    noise: f64,
    grad: CoeffField,
    astar: CoeffField,
    stationarity: f64,
}

struct Problem<'a> {
    params: &'a GParams,
    min_margin: f64,
    ab: &'a BoundaryField,
    oracle: OracleOptions,
    weights: Vec<f64>,
    evaluations: usize,
}

impl Problem<'_> {
    fn eval(&mut self, lam: &CoeffField, warm: Option<&CoeffField>) -> Result<Option<Eval>> {
        self.evaluations += 1;
        if self.params.alpha == 2.0 && self.min_margin > 0.0 {
            let ell = self.params.ell;
            let floor = self.min_margin * ell;
            if lam.data.par_iter().any(|m| quadratic_margin(m, ell) < floor) {
                return Ok(None);
            }
        }
        let sup = pointwise_sup(lam, self.params, warm, &self.oracle);
        if sup.infinite_node.is_some() {
            return Ok(None);
        }
        let value = action_from_sup(&sup, lam, self.ab)?;
        let w = &self.weights;
        let scale = weighted_sum(w, |i| sup.values[i].abs()) + boundary_pairing(lam, self.ab)?.abs();
        let noise = 1e3 * f64::EPSILON * scale;
        let grad = gradient_from_sup(lam, &sup.argmax, self.ab);
        Ok(Some(Eval {
            value,
            noise,
            grad,
            astar: sup.argmax,
            stationarity: sup.max_stationarity,
        }))
    }

    fn dot(&self, a: &CoeffField, b: &CoeffField) -> f64 {
        weighted_sum(&self.weights, |i| contract(&a.data[i], &b.data[i]))
    }
}

fn project(lam: &CoeffField, radius: Option<f64>) -> CoeffField {
    match radius {
        None => lam.clone(),
        Some(r) => lam.map(|_, m| {
            let n = m.norm();
            if n > r {
                m * (r / n)
            } else {
                *m
            }
        }),
    }
}

/// Projected L-BFGS with Armijo backtracking in the quadrature metric.
/// Trial points with an infinite value are rejected like failed Armijo tests.
pub fn minimize(
    lam0: &CoeffField,
    params: &GParams,
    ab: &BoundaryField,
    opts: &MinimizeOptions,
) -> Result<(CoeffField, MinimizeReport)> {
    opts.validate(params)?;
    lam0.grid.ensure_same(&ab.grid)?;
    let radius = (params.alpha == 2.0).then_some(opts.constraint_radius);
    let mut prob = Problem {
        params,
        min_margin: opts.min_margin,
        ab,
        oracle: field_oracle_options(),
        weights: lam0.grid.weights(),
        evaluations: 0,
    };
    if let Some(node) = pointwise_sup(lam0, params, None, &prob.oracle).infinite_node {
        return Err(Error::InfeasibleStart { node });
    }
    let mut x = project(lam0, radius);
    let Some(mut cur) = prob.eval(&x, None)? else {
        let node = pointwise_sup(&x, params, None, &prob.oracle).infinite_node.unwrap_or(0);
        return Err(Error::InfeasibleStart { node });
    };
    // Node-diagonal preconditioner from the curl Gram operator; it carries
    // the inverse boundary weights that dominate the curvature.
    let pdiag = crate::grid::curl_gram_diagonal(&lam0.grid).map(|_, m| m.add_scalar(1.0));
    let precond = |v: &CoeffField| v.zip_map(&pdiag, |a, p| a.component_div(p));
    let capped = |v: CoeffField, cap: f64| {
        let m = v.linf();
        if m > cap { v.scale(cap / m) } else { v }
    };
    let pg = |x: &CoeffField, g: &CoeffField| x.sub(&project(&x.sub(g), radius)).linf();
    let initial_value = cur.value;
    let initial_grad = cur.grad.linf();
    let initial_pg = pg(&x, &cur.grad);
    let tol = opts.grad_tol.max(opts.rel_grad_tol * initial_pg);
    let mut history = vec![HistoryEntry {
        iter: 0,
        value: cur.value,
        grad_linf: cur.grad.linf(),
    }];
    let mut mem: std::collections::VecDeque<(CoeffField, CoeffField, f64)> = Default::default();
    let mut monotone = true;
    let mut stop = StopReason::MaxIterations;
    let mut iters = 0;

    if initial_pg <= opts.grad_tol {
        stop = StopReason::GradientTolerance;
    } else {
        for it in 1..=opts.max_iters {
            // two-loop recursion
            let mut q = cur.grad.clone();
            let mut alphas = Vec::with_capacity(mem.len());
            for (s, y, rho) in mem.iter().rev() {
                let a = rho * prob.dot(s, &q);
                q = q.axpy(-a, y);
                alphas.push(a);
            }
            let mut d = match mem.back() {
                Some((s, y, _)) => {
                    let py = precond(y);
                    precond(&q).scale(prob.dot(s, y) / prob.dot(y, &py))
                }
                None => capped(precond(&q), opts.initial_step),
            };
            for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
                let b = rho * prob.dot(y, &d);
                d = d.axpy(a - b, s);
            }
            d = d.scale(-1.0);
            if prob.dot(&d, &cur.grad) >= 0.0 {
                mem.clear();
                d = capped(precond(&cur.grad), opts.initial_step).scale(-1.0);
            }

            let mut t = 1.0;
            let mut next = None;
            for _ in 0..opts.max_backtracks {
                let xt = project(&x.axpy(t, &d), radius);
                let step = xt.sub(&x);
                let decrease = prob.dot(&cur.grad, &step);
                if let Some(e) = prob.eval(&xt, Some(&cur.astar))? {
                    let armijo = e.value <= cur.value + opts.armijo * decrease && e.value <= cur.value;
                    // Once value differences sit at rounding level, a
                    // non-positive slope at the trial point certifies descent
                    // along the segment by convexity.
                    let below_noise = (e.value - cur.value).abs() <= e.noise.max(cur.noise)
                        && decrease.abs() <= e.noise.max(cur.noise);
                    let slope_ok = below_noise && prob.dot(&e.grad, &step) <= 0.0;
                    if armijo || slope_ok {
                        next = Some((xt, e));
                        break;
                    }
                }
                t *= opts.backtrack;
            }
            let Some((xn, en)) = next else {
                if mem.is_empty() {
                    stop = StopReason::LineSearchFailure;
                    break;
                }
                // retry once from a fresh preconditioned gradient step
                mem.clear();
                continue;
            };
            monotone &= en.value <= cur.value + en.noise.max(cur.noise);
            let s = xn.sub(&x);
            let y = en.grad.sub(&cur.grad);
            let sy = prob.dot(&s, &y);
            if sy > 1e-12 * prob.dot(&s, &s).sqrt() * prob.dot(&y, &y).sqrt() {
                if mem.len() == opts.memory {
                    mem.pop_front();
                }
                mem.push_back((s, y, 1.0 / sy));
            }
            x = xn;
            cur = en;
            iters = it;
            history.push(HistoryEntry {
                iter: it,
                value: cur.value,
                grad_linf: cur.grad.linf(),
            });
            if pg(&x, &cur.grad) <= tol {
                stop = StopReason::GradientTolerance;
                break;
            }
        }
    }

    let flat = flatness_residual(&cur.astar);
    let mismatch = BoundaryField::trace(&cur.astar).sub(ab);
    let report = MinimizeReport {
        iterations: iters,
        evaluations: prob.evaluations,
        initial_value,
        final_value: cur.value,
        initial_grad_linf: initial_grad,
        final_grad_linf: cur.grad.linf(),
        final_projected_grad_linf: pg(&x, &cur.grad),
        flatness_linf: flat.linf(),
        flatness_l2: flat.l2(),
        flatness_interior_linf: flat.linf_interior(),
        boundary_mismatch_linf: mismatch.tangential_linf(),
        boundary_mismatch_full_linf: mismatch.linf(),
        pointwise_stationarity: cur.stationarity,
        converged: stop == StopReason::GradientTolerance,
        monotone,
        stop_reason: stop,
        history,
    };
    Ok((x, report))
}

/// Gradient the quadratic dual scheme would assign to the recovered field;
/// used to cross-check the two formulations.
pub fn primal_gradient(astar: &CoeffField, ab: &BoundaryField) -> CoeffField {
    gradient_from_primal(astar, ab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_quadratic::{dtp_map, QuadDualProblem};
    use crate::grid::BoxGrid;
    use crate::pointwise::g_quadratic_closed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: BoxGrid, amp: f64, seed: u64) -> CoeffField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..grid.len())
            .map(|_| Mat3::from_fn(|_, _| amp * rng.random_range(-1.0..1.0)))
            .collect();
        CoeffField::from_data(grid, data).unwrap()
    }

    fn smooth_field(grid: BoxGrid, amp: f64, seed: u64) -> CoeffField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<[f64; 4]> = (0..9).map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))).collect();
        CoeffField::from_fn(grid, |x| {
            Mat3::from_fn(|r, s| {
                let k = &c[3 * r + s];
                amp * (k[0] + k[1] * x[0] + k[2] * (2.0 * x[1]).sin() + k[3] * x[2] * x[0])
            })
        })
    }

    #[test]
    fn zero_multiplier_gives_zero() {
        let grid = BoxGrid::unit_cube(5).unwrap();
        let lam = CoeffField::zeros(grid);
        let ab = BoundaryField::zeros(grid);
        let p = GParams::quadratic(0.5);
        assert_eq!(tilde_action(&lam, &p, &ab).unwrap(), 0.0);
        assert_eq!(tilde_gradient(&lam, &p, &ab).unwrap().linf(), 0.0);
        assert_eq!(recover_primal(&lam, &p).unwrap().linf(), 0.0);
    }

    #[test]
    fn infeasible_node_gives_infinity() {
        let grid = BoxGrid::unit_cube(4).unwrap();
        let mut lam = CoeffField::zeros(grid);
        lam.data[7] = Mat3::identity() * 1.0;
        let p = GParams::quadratic(0.5);
        let ab = BoundaryField::zeros(grid);
        assert_eq!(tilde_action(&lam, &p, &ab).unwrap(), f64::INFINITY);
        assert!(matches!(tilde_gradient(&lam, &p, &ab), Err(Error::InfiniteValue { node: 7 })));
        let r = minimize(&lam, &p, &ab, &MinimizeOptions::default());
        assert!(matches!(r, Err(Error::InfeasibleStart { node: 7 })));
    }

    #[test]
    fn constant_multiplier_reduces_to_single_node() {
        let grid = BoxGrid::unit_cube(5).unwrap();
        let m = Mat3::new(0.1, -0.2, 0.05, 0.3, 0.0, -0.1, 0.02, 0.15, -0.25);
        let lam = CoeffField::constant(grid, m);
        let p = GParams::quadratic(0.5);
        let v = tilde_action(&lam, &p, &BoundaryField::zeros(grid)).unwrap();
        let g = g_quadratic_closed(&m, &Mat3::zeros(), 0.5).value;
        assert!((v - grid.volume() * g).abs() < 1e-14);
    }

    #[test]
    fn argmax_matches_quadratic_dtp_with_flipped_sign() {
        let grid = BoxGrid::unit_cube(6).unwrap();
        let lam = smooth_field(grid, 0.1, 3);
        let a = recover_primal(&lam, &GParams::quadratic(0.5)).unwrap();
        let prob = QuadDualProblem::homogeneous(grid, 1.0).unwrap();
        let d = dtp_map(&lam.scale(-1.0), &prob).unwrap();
        assert!(a.sub(&d).linf() < 1e-8 * (1.0 + d.linf()));
    }

    #[test]
    fn argmax_is_stationary_for_quartic() {
        let grid = BoxGrid::unit_cube(4).unwrap();
        let p = GParams::new(4.0, 0.05).unwrap();
        let lam = random_field(grid, 0.3, 11);
        let a = recover_primal(&lam, &p).unwrap();
        assert!(optimality_residual(&lam, &a, &p) < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let grid = BoxGrid::unit_cube(5).unwrap();
        let gen = crate::grid::GaugeGenerator::new(vec![crate::grid::GaugeFactor {
            axis: 2,
            generator: 1,
            rate: 0.4,
        }]);
        let ab = BoundaryField::trace(&gen.field(&grid).unwrap());
        for (p, amp) in [(GParams::quadratic(0.5), 0.15), (GParams::new(4.0, 0.1).unwrap(), 0.3)] {
            let lam = smooth_field(grid, amp, 5);
            let dir = smooth_field(grid, 1.0, 6).add(&random_field(grid, 0.1, 7));
            let g = tilde_gradient(&lam, &p, &ab).unwrap();
            let exact = g.dot_w(&dir);
            let err = [1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&h| {
                    let fd = (tilde_action(&lam.axpy(h, &dir), &p, &ab).unwrap()
                        - tilde_action(&lam.axpy(-h, &dir), &p, &ab).unwrap())
                        / (2.0 * h);
                    (fd - exact).abs() / exact.abs().max(1e-3)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(err < 1e-7, "alpha {}: relative error {err}", p.alpha);
        }
    }

    #[test]
    fn convex_along_segments() {
        let grid = BoxGrid::unit_cube(4).unwrap();
        let p = GParams::quadratic(0.5);
        let ab = BoundaryField::trace(&smooth_field(grid, 0.5, 1));
        for s in 0..5 {
            let a = random_field(grid, 0.2, 100 + s);
            let b = random_field(grid, 0.2, 200 + s);
            let fa = tilde_action(&a, &p, &ab).unwrap();
            let fb = tilde_action(&b, &p, &ab).unwrap();
            for t in [0.25, 0.5, 0.75] {
                let m = a.scale(t).axpy(1.0 - t, &b);
                let fm = tilde_action(&m, &p, &ab).unwrap();
                assert!(fm <= t * fa + (1.0 - t) * fb + 1e-9);
            }
        }
    }

    #[test]
    fn grows_along_rays_for_quartic() {
        let grid = BoxGrid::unit_cube(4).unwrap();
        let p = GParams::quartic_sharp();
        let ab = BoundaryField::trace(&smooth_field(grid, 0.3, 2));
        for s in 0..2 {
            let dir = random_field(grid, 1.0, 40 + s);
            let vals: Vec<f64> = [1.0, 4.0, 16.0]
                .iter()
                .map(|&t| tilde_action(&dir.scale(t), &p, &ab).unwrap())
                .collect();
            assert!(vals[0] < vals[1] && vals[1] < vals[2], "{vals:?}");
        }
    }

    #[test]
    fn zero_data_is_already_optimal() {
        let grid = BoxGrid::unit_cube(4).unwrap();
        let (lam, rep) = minimize(
            &CoeffField::zeros(grid),
            &GParams::quadratic(0.5),
            &BoundaryField::zeros(grid),
            &MinimizeOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
        assert_eq!(lam.linf(), 0.0);
        assert_eq!(rep.flatness_linf, 0.0);
    }

    #[test]
    fn rejects_bad_options() {
        let grid = BoxGrid::unit_cube(4).unwrap();
        let o = MinimizeOptions { constraint_radius: 1.6, ..Default::default() };
        let r = minimize(
            &CoeffField::zeros(grid),
            &GParams::quadratic(0.5),
            &BoundaryField::zeros(grid),
            &o,
        );
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }
}
