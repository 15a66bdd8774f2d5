//! Run configuration: one flat TOML namespace, schema-validated up front.
//!
//! Environment variables override only the output directory and the seed
//! (QUBOFOIL_OUT, QUBOFOIL_SEED); command-line flags override both.

use crate::errors::{CliError, Result};
use qubofoil::hwadapt::HardwareProfile;
use qubofoil::solvers::SaSchedule;
use qubofoil::surrogate::{DesignSpace, DesignVariable, RsmOrder, Sense};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const PAPER_WEIGHTS: [f64; 9] = [0.0, 5.0, 20.0, 50.0, 80.0, 100.0, 200.0, 500.0, 2000.0];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    // Design space.
    pub variables: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub bits: Vec<u32>,

    // Objectives.
    pub objectives: Vec<String>,
    pub senses: Vec<String>,
    #[serde(default = "defaults::rsm_order")]
    pub rsm_order: usize,

    // Quadratization and hardware adaptation.
    #[serde(default = "defaults::penalty_eta")]
    pub penalty_eta: f64,
    #[serde(default)]
    pub hw_adapt: bool,
    #[serde(default = "defaults::hw_r_max")]
    pub hw_r_max: i64,
    /// 0 selects the automatic threshold (1e-3 of the largest coefficient).
    #[serde(default)]
    pub hw_epsilon: f64,
    #[serde(default = "defaults::hw_max_spins")]
    pub hw_max_spins: usize,

    // Solver.
    #[serde(default = "defaults::backend")]
    pub backend: String,
    #[serde(default = "defaults::replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::sa_t_init")]
    pub sa_t_init: f64,
    #[serde(default = "defaults::sa_t_min")]
    pub sa_t_min: f64,
    #[serde(default = "defaults::sa_cooling")]
    pub sa_cooling: f64,
    #[serde(default = "defaults::sa_iters_per_temp")]
    pub sa_iters_per_temp: u32,
    #[serde(default = "defaults::gd_starts")]
    pub gd_starts: usize,
    #[serde(default = "defaults::isingdyn_steps")]
    pub isingdyn_steps: usize,
    /// 0 selects available parallelism.
    #[serde(default)]
    pub workers: usize,

    // Multi-objective trade-off scalars.
    #[serde(default = "defaults::pareto_weights")]
    pub pareto_weights: Vec<f64>,
    /// Min-max normalize each objective over its sample range before
    /// weighting (off by default; the composite objective uses raw values).
    #[serde(default)]
    pub normalize_objectives: bool,

    // Synthetic sampling.
    #[serde(default = "defaults::synth_oracle")]
    pub synth_oracle: String,
    #[serde(default)]
    pub synth_counts: Vec<usize>,
    #[serde(default)]
    pub synth_noise: f64,
    #[serde(default = "defaults::synth_skew")]
    pub synth_skew: f64,

    // Files.
    #[serde(default = "defaults::samples")]
    pub samples: String,
    #[serde(default = "defaults::out_dir")]
    pub out_dir: String,

    // Report geometry: fallbacks for airfoil parameters that are not part of
    // the design space, plus the sample-overlay stride (0 = none).
    #[serde(default = "defaults::naca_camber")]
    pub naca_camber: f64,
    #[serde(default = "defaults::naca_camber_location")]
    pub naca_camber_location: f64,
    #[serde(default = "defaults::naca_thickness")]
    pub naca_thickness: f64,
    #[serde(default = "defaults::points_per_surface")]
    pub points_per_surface: usize,
    #[serde(default)]
    pub overlay_stride: usize,
}

mod defaults {
    pub fn rsm_order() -> usize {
        2
    }
    pub fn penalty_eta() -> f64 {
        1.25
    }
    pub fn hw_r_max() -> i64 {
        127
    }
    pub fn hw_max_spins() -> usize {
        1000
    }
    pub fn backend() -> String {
        "sa".into()
    }
    pub fn replicas() -> usize {
        5
    }
    pub fn sa_t_init() -> f64 {
        5000.0
    }
    pub fn sa_t_min() -> f64 {
        0.001
    }
    pub fn sa_cooling() -> f64 {
        0.9
    }
    pub fn sa_iters_per_temp() -> u32 {
        50
    }
    pub fn gd_starts() -> usize {
        8
    }
    pub fn isingdyn_steps() -> usize {
        2000
    }
    pub fn pareto_weights() -> Vec<f64> {
        super::PAPER_WEIGHTS.to_vec()
    }
    pub fn synth_oracle() -> String {
        "quartic3".into()
    }
    pub fn synth_skew() -> f64 {
        1.0
    }
    pub fn samples() -> String {
        "samples.csv".into()
    }
    pub fn out_dir() -> String {
        "out".into()
    }
    pub fn naca_camber() -> f64 {
        6.0
    }
    pub fn naca_camber_location() -> f64 {
        4.0
    }
    pub fn naca_thickness() -> f64 {
        12.0
    }
    pub fn points_per_surface() -> usize {
        80
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    BruteForce,
    Sa,
    Gd,
    IsingDyn,
}

impl Backend {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "bruteforce" => Ok(Backend::BruteForce),
            "sa" => Ok(Backend::Sa),
            "gd" => Ok(Backend::Gd),
            "isingdyn" => Ok(Backend::IsingDyn),
            other => Err(CliError::Config(format!(
                "unknown backend '{other}' (expected bruteforce|sa|gd|isingdyn)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::BruteForce => "bruteforce",
            Backend::Sa => "sa",
            Backend::Gd => "gd",
            Backend::IsingDyn => "isingdyn",
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_env();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Only the output directory and the seed may come from the environment.
    fn apply_env(&mut self) {
        if let Ok(out) = std::env::var("QUBOFOIL_OUT") {
            if !out.is_empty() {
                self.out_dir = out;
            }
        }
        if let Ok(seed) = std::env::var("QUBOFOIL_SEED") {
            if let Ok(parsed) = seed.parse() {
                self.seed = parsed;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        if n == 0 {
            return Err(CliError::Config("no design variables".into()));
        }
        if self.lower.len() != n || self.upper.len() != n || self.bits.len() != n {
            return Err(CliError::Config(format!(
                "variables/lower/upper/bits lengths differ: {n}/{}/{}/{}",
                self.lower.len(),
                self.upper.len(),
                self.bits.len()
            )));
        }
        if self.objectives.is_empty() || self.objectives.len() != self.senses.len() {
            return Err(CliError::Config(format!(
                "{} objectives for {} senses",
                self.objectives.len(),
                self.senses.len()
            )));
        }
        self.design_space()?;
        self.parsed_senses()?;
        self.order()?;
        self.sa_schedule().validate().map_err(CliError::from)?;
        Backend::parse(&self.backend)?;
        self.hardware()?;
        if self.penalty_eta <= 1.0 {
            return Err(CliError::Config(format!(
                "penalty_eta must exceed 1, got {}",
                self.penalty_eta
            )));
        }
        Ok(())
    }

    pub fn design_space(&self) -> Result<DesignSpace> {
        let vars = self
            .variables
            .iter()
            .zip(self.lower.iter().zip(self.upper.iter().zip(&self.bits)))
            .map(|(name, (&lower, (&upper, &bits)))| DesignVariable {
                name: name.clone(),
                lower,
                upper,
                bits,
            })
            .collect();
        DesignSpace::new(vars).map_err(CliError::from)
    }

    pub fn parsed_senses(&self) -> Result<Vec<Sense>> {
        self.senses
            .iter()
            .map(|s| s.parse::<Sense>().map_err(CliError::from))
            .collect()
    }

    pub fn order(&self) -> Result<RsmOrder> {
        RsmOrder::from_degree(self.rsm_order).map_err(CliError::from)
    }

    pub fn sa_schedule(&self) -> SaSchedule {
        SaSchedule {
            t_init: self.sa_t_init,
            t_min: self.sa_t_min,
            cooling: self.sa_cooling,
            iters_per_temp: self.sa_iters_per_temp,
        }
    }

    pub fn hardware(&self) -> Result<HardwareProfile> {
        let eps = if self.hw_epsilon > 0.0 {
            self.hw_epsilon
        } else {
            1.0 // placeholder; quantization recomputes the auto threshold
        };
        HardwareProfile::new(self.hw_r_max, eps, self.hw_max_spins).map_err(CliError::from)
    }

    pub fn backend_kind(&self) -> Result<Backend> {
        Backend::parse(&self.backend)
    }

    pub fn effective_workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        }
    }

    pub fn out_path(&self) -> PathBuf {
        PathBuf::from(&self.out_dir)
    }

    /// Relative sample paths live inside the output directory.
    pub fn samples_path(&self) -> PathBuf {
        let p = PathBuf::from(&self.samples);
        if p.is_absolute() {
            p
        } else {
            self.out_path().join(p)
        }
    }
}
