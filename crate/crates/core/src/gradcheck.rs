//! Central finite-difference checks of field gradients.

use crate::grid::CoeffField;
use serde::Serialize;

/// Step sweep used when none is given.
pub const DEFAULT_STEPS: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Debug, Clone, Serialize)]
pub struct GradCheck {
    pub steps: Vec<f64>,
    /// Best relative error over the sweep, per direction.
    pub errors: Vec<f64>,
    pub max_rel_error: f64,
}

/// Compares `⟨⟨grad, d⟩⟩` with central differences of `f` along seeded
/// random directions; each direction keeps its best step. With
/// `interior_only`, directions vanish on boundary nodes.
pub fn check_gradient<F>(
    f: F,
    x: &CoeffField,
    grad: &CoeffField,
    directions: usize,
    seed: u64,
    steps: &[f64],
    interior_only: bool,
) -> GradCheck
where
    F: Fn(&CoeffField) -> f64,
{
    let grid = x.grid;
    let errors: Vec<f64> = (0..directions as u64)
        .map(|i| {
            let mut d = CoeffField::random_smooth(grid, 1.0, seed.wrapping_add(i));
            if interior_only {
                d = d.map(|n, m| if grid.is_boundary(n) { m * 0.0 } else { *m });
            }
            let exact = grad.dot_w(&d);
            steps
                .iter()
                .map(|&h| {
                    let fd = (f(&x.axpy(h, &d)) - f(&x.axpy(-h, &d))) / (2.0 * h);
                    (fd - exact).abs() / exact.abs().max(1e-12)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    GradCheck {
        steps: steps.to_vec(),
        max_rel_error: errors.iter().copied().fold(0.0, f64::max),
        errors,
    }
}
