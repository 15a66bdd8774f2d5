//! Synthetic sampling oracles standing in for aerodynamic evaluation.
//!
//! Three bounded polynomial families, all representable exactly by an
//! order-4 surrogate at zero noise:
//!
//! - `quartic3`: lift-to-drag-ratio-like response over (A, B, T).
//! - `skewed1`: one-variable quartic with a skewed peak; a quadratic fit
//!   shifts the apparent optimum.
//! - `liftdrag`: monotone lift/drag pair over thickness, drag convex.

use crate::config::RunConfig;
use crate::errors::{CliError, Result};
use qubofoil::surrogate::{DesignSpace, SampleRow, SampleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Quartic3,
    Skewed1,
    LiftDrag,
}

#[derive(Debug, Clone, Copy)]
pub struct SynthOracle {
    pub kind: OracleKind,
    pub skew: f64,
}

impl SynthOracle {
    pub fn parse(name: &str, skew: f64) -> Result<Self> {
        let kind = match name {
            "quartic3" => OracleKind::Quartic3,
            "skewed1" => OracleKind::Skewed1,
            "liftdrag" => OracleKind::LiftDrag,
            other => {
                return Err(CliError::Config(format!(
                    "unknown synth oracle '{other}' (expected quartic3|skewed1|liftdrag)"
                )))
            }
        };
        Ok(Self { kind, skew })
    }

    pub fn expected_variables(&self) -> usize {
        match self.kind {
            OracleKind::Quartic3 => 3,
            OracleKind::Skewed1 | OracleKind::LiftDrag => 1,
        }
    }

    pub fn objective_names(&self) -> Vec<String> {
        match self.kind {
            OracleKind::Quartic3 | OracleKind::Skewed1 => vec!["cl_cd".into()],
            OracleKind::LiftDrag => vec!["cl".into(), "cd".into()],
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            OracleKind::Quartic3 => {
                let (a, b, t) = (x[0], x[1], x[2]);
                let base = 18.0 + 2.0 * a - 0.18 * a * a + 1.1 * b - 0.16 * b * b
                    + 2.6 * t
                    - 0.115 * t * t
                    + 0.01 * a * b
                    - 0.002 * a * t;
                let quartic = self.skew * 2e-4 * (t - 6.0).powi(3) * (20.0 - t);
                vec![base + quartic]
            }
            OracleKind::Skewed1 => {
                let t = x[0];
                vec![self.skew * (16.0 - t) * (t - 4.0).powi(3) / 400.0]
            }
            OracleKind::LiftDrag => {
                let t = x[0];
                vec![
                    0.2 + 0.1 * (t - 10.0),
                    0.01 + self.skew * 0.002 * (t - 10.0) * (t - 10.0),
                ]
            }
        }
    }
}

/// Inclusive linspace grid; a default of one point per unit interval when no
/// counts are configured (the integer grid for integer bounds).
fn grid_counts(space: &DesignSpace, configured: &[usize]) -> Result<Vec<usize>> {
    if !configured.is_empty() {
        if configured.len() != space.len() {
            return Err(CliError::Config(format!(
                "synth_counts has {} entries for {} variables",
                configured.len(),
                space.len()
            )));
        }
        if configured.iter().any(|&c| c < 2) {
            return Err(CliError::Config("synth_counts entries must be >= 2".into()));
        }
        return Ok(configured.to_vec());
    }
    Ok(space
        .variables()
        .iter()
        .map(|v| ((v.upper - v.lower).round() as usize + 1).max(2))
        .collect())
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen();
    (-2.0f64 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Full-factorial sampling of the oracle over the design grid, deterministic
/// given the seed.
pub fn synthesize(cfg: &RunConfig) -> Result<SampleSet> {
    let space = cfg.design_space()?;
    let oracle = SynthOracle::parse(&cfg.synth_oracle, cfg.synth_skew)?;
    if space.len() != oracle.expected_variables() {
        return Err(CliError::Config(format!(
            "oracle '{}' expects {} variables, design space has {}",
            cfg.synth_oracle,
            oracle.expected_variables(),
            space.len()
        )));
    }
    let counts = grid_counts(&space, &cfg.synth_counts)?;
    let axes: Vec<Vec<f64>> = space
        .variables()
        .iter()
        .zip(&counts)
        .map(|(v, &c)| {
            (0..c)
                .map(|k| v.lower + (v.upper - v.lower) * k as f64 / (c - 1) as f64)
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total: usize = counts.iter().product();
    let mut rows = Vec::with_capacity(total);
    let mut index = vec![0usize; space.len()];
    loop {
        let x: Vec<f64> = index.iter().zip(&axes).map(|(&k, axis)| axis[k]).collect();
        let mut y = oracle.eval(&x);
        if cfg.synth_noise > 0.0 {
            for v in &mut y {
                *v += cfg.synth_noise * gaussian(&mut rng);
            }
        }
        rows.push(SampleRow { x, y });

        // Odometer increment, last variable fastest.
        let mut pos = space.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < counts[pos] {
                break;
            }
            index[pos] = 0;
            if pos == 0 {
                break;
            }
        }
        if index.iter().all(|&k| k == 0) {
            break;
        }
    }
    debug_assert_eq!(rows.len(), total);

    SampleSet::new(
        space.variables().iter().map(|v| v.name.clone()).collect(),
        oracle.objective_names(),
        rows,
    )
    .map_err(CliError::from)
}
