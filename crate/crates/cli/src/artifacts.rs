//! Versioned JSON artifacts handed between pipeline stages.
//!
//! Every stage reads the previous stage's file and refuses on a format
//! version mismatch, so stages can run in separate invocations (or separate
//! implementations) without silently disagreeing about layout.

use crate::errors::{CliError, Result};
use qubofoil::geometry::DecodedDesign;
use qubofoil::hwadapt::{SpinBudget, SplitReport};
use qubofoil::multiobj::ParetoSet;
use qubofoil::quadratize::QuboProblem;
use qubofoil::solvers::{GdOutcome, SolveRecord};
use qubofoil::surrogate::{DesignSpace, PolynomialSurrogate, Sense};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveFit {
    pub name: String,
    pub sense: Sense,
    pub model: PolynomialSurrogate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitArtifact {
    pub format_version: u32,
    pub space: DesignSpace,
    pub objectives: Vec<ObjectiveFit>,
    pub bounds_warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptedProblem {
    pub qubo: QuboProblem,
    /// Multiply adapted energies by this to map back to objective units.
    pub scale: f64,
    pub dropped: Vec<(usize, usize, f64)>,
    pub split: SplitReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveCompile {
    pub name: String,
    pub sense: Sense,
    pub model: PolynomialSurrogate,
    /// Reduced real-coefficient problem (pre-quantization).
    pub qubo: QuboProblem,
    pub budget: SpinBudget,
    pub adapted: Option<AdaptedProblem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileArtifact {
    pub format_version: u32,
    pub space: DesignSpace,
    pub objectives: Vec<ObjectiveCompile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveArtifact {
    pub format_version: u32,
    pub objective: String,
    pub backend: String,
    /// Binary-solver outcome (absent for gradient descent).
    pub record: Option<SolveRecord>,
    /// Continuous-descent outcome (gradient descent only).
    pub gd: Option<GdOutcome>,
    pub decoded: DecodedDesign,
    /// Surrogate value at the decoded point, in objective units.
    pub surrogate_value: f64,
    /// Best energy mapped back through the quantization scale, when the
    /// solve ran on a hardware-adapted problem.
    pub descaled_energy: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSolution {
    pub weight_scalar: f64,
    pub weight_vector: Vec<f64>,
    pub decoded: DecodedDesign,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoArtifact {
    pub format_version: u32,
    pub weight_scalars: Vec<f64>,
    pub composite_spins: usize,
    pub backend: String,
    pub record: SolveRecord,
    pub blocks: Vec<BlockSolution>,
    pub pareto: ParetoSet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitSummary {
    pub objective: String,
    pub sense: Sense,
    pub order: usize,
    pub r_squared: Option<f64>,
    pub residual_norm: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub objective: String,
    pub backend: String,
    pub best_energy: f64,
    pub descaled_energy: Option<f64>,
    pub decoded: Vec<(String, f64)>,
    pub surrogate_value: f64,
    pub time_to_target_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoSummary {
    pub weight_scalars: Vec<f64>,
    pub composite_spins: usize,
    pub front: Vec<BlockSolution>,
    pub dominated: usize,
}

/// Wall-clock timings, segregated so determinism checks can drop the block.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WallClock {
    pub stage_seconds: std::collections::BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub tool_version: String,
    pub config: crate::config::RunConfig,
    pub fits: Vec<FitSummary>,
    pub spin_budgets: Vec<(String, SpinBudget)>,
    pub solve: Option<SolveSummary>,
    pub pareto: Option<ParetoSummary>,
    pub wall_clock: WallClock,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Loads an artifact and enforces the stage format version.
pub fn read_versioned<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let value: serde_json::Value = read_json(path)?;
    match value.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(CliError::Config(format!(
                "{}: artifact format version {v} does not match expected {FORMAT_VERSION}",
                path.display()
            )))
        }
        None => {
            return Err(CliError::Config(format!(
                "{}: missing artifact format version",
                path.display()
            )))
        }
    }
    serde_json::from_value(value)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Report content with every wall-clock field neutralized: the `wall_clock`
/// block is dropped and every `elapsed_seconds` value is zeroed.
pub fn determinism_view(report: &serde_json::Value) -> serde_json::Value {
    fn scrub(value: &mut serde_json::Value) {
        match value {
            serde_json::Value::Object(map) => {
                map.remove("wall_clock");
                if let Some(v) = map.get_mut("elapsed_seconds") {
                    *v = serde_json::json!(0.0);
                }
                if let Some(v) = map.get_mut("time_to_target_seconds") {
                    *v = serde_json::json!(null);
                }
                for v in map.values_mut() {
                    scrub(v);
                }
            }
            serde_json::Value::Array(items) => {
                for v in items {
                    scrub(v);
                }
            }
            _ => {}
        }
    }
    let mut clone = report.clone();
    scrub(&mut clone);
    clone
}
