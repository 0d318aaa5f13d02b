//! Configuration for `dual-minimize` and shared field-source parsing.

use anyhow::{bail, Context, Result};
use csdual::grid::{GaugeFactor, GaugeGenerator};
use csdual::tilde::MinimizeOptions;
use csdual::Scheme;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// One factor `exp(rate · x_axis · E_generator)`, axis and generator 1-based.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub axis: usize,
    pub generator: usize,
    pub rate: f64,
}

pub fn gauge_from_specs(specs: &[FactorSpec]) -> Result<GaugeGenerator> {
    let factors = specs
        .iter()
        .map(|f| {
            if !(1..=3).contains(&f.axis) || !(1..=3).contains(&f.generator) {
                bail!("gauge factor axis and generator must be 1, 2 or 3");
            }
            Ok(GaugeFactor {
                axis: f.axis - 1,
                generator: f.generator - 1,
                rate: f.rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let g = GaugeGenerator::new(factors);
    g.validate()?;
    Ok(g)
}

/// Parses `axis:generator:rate,...` (1-based), e.g. `1:1:0.3,2:2:0.3`.
pub fn parse_gauge(text: &str) -> Result<GaugeGenerator> {
    let specs = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.trim().split(':').collect();
            if parts.len() != 3 {
                bail!("gauge factor `{item}` is not axis:generator:rate");
            }
            Ok(FactorSpec {
                axis: parts[0].parse().with_context(|| format!("axis in `{item}`"))?,
                generator: parts[1].parse().with_context(|| format!("generator in `{item}`"))?,
                rate: parts[2].parse().with_context(|| format!("rate in `{item}`"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    gauge_from_specs(&specs)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    #[serde(default = "unit_extent")]
    pub extent: [f64; 3],
    #[serde(default)]
    pub origin: [f64; 3],
    /// `auto`, `sbp21` or `sbp42`.
    #[serde(default = "auto")]
    pub scheme: String,
}

fn unit_extent() -> [f64; 3] {
    [1.0; 3]
}

fn auto() -> String {
    "auto".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalSection {
    pub alpha: f64,
    /// Defaults to the value the lower bound is certified for.
    pub ell: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "source")]
pub enum BoundarySection {
    Zero,
    PureGauge { factors: Vec<FactorSpec> },
    Snapshot { path: PathBuf },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum StartSection {
    Zero,
    Random { amplitude: f64 },
    Snapshot { path: PathBuf },
}

impl Default for StartSection {
    fn default() -> Self {
        Self::Random { amplitude: 0.01 }
    }
}

/// Solver keys; any key left out keeps its library default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub rel_grad_tol: Option<f64>,
    pub armijo: Option<f64>,
    pub backtrack: Option<f64>,
    pub max_backtracks: Option<usize>,
    pub constraint_radius: Option<f64>,
    pub memory: Option<usize>,
    pub initial_step: Option<f64>,
    pub min_margin: Option<f64>,
}

impl SolverSection {
    pub fn options(&self) -> MinimizeOptions {
        let d = MinimizeOptions::default();
        MinimizeOptions {
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            grad_tol: self.grad_tol.unwrap_or(d.grad_tol),
            rel_grad_tol: self.rel_grad_tol.unwrap_or(d.rel_grad_tol),
            armijo: self.armijo.unwrap_or(d.armijo),
            backtrack: self.backtrack.unwrap_or(d.backtrack),
            max_backtracks: self.max_backtracks.unwrap_or(d.max_backtracks),
            constraint_radius: self.constraint_radius.unwrap_or(d.constraint_radius),
            memory: self.memory.unwrap_or(d.memory),
            initial_step: self.initial_step.unwrap_or(d.initial_step),
            min_margin: self.min_margin.unwrap_or(d.min_margin),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSection,
    pub functional: FunctionalSection,
    pub boundary: BoundarySection,
    #[serde(default)]
    pub start: StartSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub output: OutputSection,
}

impl MinimizeConfig {
    /// Parses without validating, so command-line overrides can be applied first.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid dual-minimize config")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn scheme(&self) -> Result<Option<Scheme>> {
        parse_scheme(&self.grid.scheme)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.n < 3 {
            bail!("grid.n must be at least 3");
        }
        if self.grid.extent.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            bail!("grid.extent entries must be positive");
        }
        self.scheme()?;
        if let Some(ell) = self.functional.ell {
            if !(ell > 0.0) {
                bail!("functional.ell must be positive");
            }
        }
        if let StartSection::Random { amplitude } = self.start {
            if !(amplitude >= 0.0 && amplitude.is_finite()) {
                bail!("start.amplitude must be non-negative");
            }
        }
        if let BoundarySection::PureGauge { factors } = &self.boundary {
            gauge_from_specs(factors)?;
        }
        Ok(())
    }
}

/// `auto` maps to `None` (pick by grid size).
pub fn parse_scheme(s: &str) -> Result<Option<Scheme>> {
    match s {
        "auto" => Ok(None),
        other => Ok(Some(other.parse().map_err(|e| anyhow::anyhow!("{e}"))?)),
    }
}
