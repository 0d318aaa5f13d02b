//! Diagonal-norm summation-by-parts first-derivative operators in 1D.
//!
//! `D = H⁻¹Q` with `Q + Qᵀ = diag(−1, 0, …, 0, 1)`, which gives the
//! discrete integration-by-parts identity used by every gradient formula.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Trapezoid norm, central interior, first-order boundary rows.
    Sbp21,
    /// Fourth-order interior, second-order boundary closure.
    #[default]
    Sbp42,
}

impl Scheme {
    pub fn min_nodes(self) -> usize {
        match self {
            Scheme::Sbp21 => 3,
            Scheme::Sbp42 => 8,
        }
    }

    /// Highest-order scheme supported by the smallest axis.
    pub fn auto_for(n: [usize; 3]) -> Self {
        if n.iter().all(|&k| k >= Scheme::Sbp42.min_nodes()) {
            Scheme::Sbp42
        } else {
            Scheme::Sbp21
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Sbp21 => "sbp21",
            Scheme::Sbp42 => "sbp42",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sbp21" => Ok(Scheme::Sbp21),
            "sbp42" => Ok(Scheme::Sbp42),
            other => Err(format!("unknown scheme `{other}` (expected sbp21 or sbp42)")),
        }
    }
}

const NORM42: [f64; 4] = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];

const BLOCK42: [[f64; 6]; 4] = [
    [-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0],
    [-0.5, 0.0, 0.5, 0.0, 0.0, 0.0],
    [4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0],
    [3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
];

const INTERIOR42: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];

type SparseRows = Vec<Vec<(usize, f64)>>;

/// One axis of the operator: norm weights and sparse rows of `D`, plus the
/// rows of `Dᵀ` for the exact discrete adjoint.
#[derive(Debug, Clone)]
pub struct Sbp1d {
    pub n: usize,
    pub h: f64,
    pub norm: Vec<f64>,
    pub rows: SparseRows,
    pub cols: SparseRows,
}

impl Sbp1d {
    pub fn new(scheme: Scheme, n: usize, h: f64) -> Self {
        assert!(n >= scheme.min_nodes(), "axis too short for {scheme:?}");
        let (norm, dense_rows) = match scheme {
            Scheme::Sbp21 => build21(n),
            Scheme::Sbp42 => build42(n),
        };
        let norm: Vec<f64> = norm.into_iter().map(|w| w * h).collect();
        let rows: SparseRows = dense_rows
            .into_iter()
            .map(|r| r.into_iter().map(|(j, c)| (j, c / h)).collect())
            .collect();
        let mut cols: SparseRows = vec![Vec::new(); n];
        for (i, r) in rows.iter().enumerate() {
            for &(j, c) in r {
                cols[j].push((i, c));
            }
        }
        Self {
            n,
            h,
            norm,
            rows,
            cols,
        }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, c)| c * u[j]).sum())
            .collect()
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, c) in r {
                d[i][j] += c;
            }
        }
        d
    }
}

fn build21(n: usize) -> (Vec<f64>, SparseRows) {
    let mut norm = vec![1.0; n];
    norm[0] = 0.5;
    norm[n - 1] = 0.5;
    let mut rows = Vec::with_capacity(n);
    rows.push(vec![(0, -1.0), (1, 1.0)]);
    for i in 1..n - 1 {
        rows.push(vec![(i - 1, -0.5), (i + 1, 0.5)]);
    }
    rows.push(vec![(n - 2, -1.0), (n - 1, 1.0)]);
    (norm, rows)
}

fn build42(n: usize) -> (Vec<f64>, SparseRows) {
    let mut norm = vec![1.0; n];
    for (i, &w) in NORM42.iter().enumerate() {
        norm[i] = w;
        norm[n - 1 - i] = w;
    }
    let mut rows: SparseRows = vec![Vec::new(); n];
    for (i, coeffs) in BLOCK42.iter().enumerate() {
        for (j, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                rows[i].push((j, c));
                rows[n - 1 - i].push((n - 1 - j, -c));
            }
        }
        rows[n - 1 - i].reverse();
    }
    for (i, row) in rows.iter_mut().enumerate().take(n - 4).skip(4) {
        for (o, &c) in INTERIOR42.iter().enumerate() {
            if c != 0.0 {
                row.push((i + o - 2, c));
            }
        }
    }
    (norm, rows)
}
