//! Stage implementations: synth, fit, compile, solve, pareto, report, all.
//!
//! Stages hand artifacts to each other through versioned JSON files in the
//! output directory, so each can run in its own invocation and intermediate
//! state stays inspectable.

use crate::artifacts::{
    read_versioned, write_json, AdaptedProblem, BlockSolution, CompileArtifact, FitArtifact,
    FitSummary, ObjectiveCompile, ObjectiveFit, ParetoArtifact, ParetoSummary, RunReport,
    SolveArtifact, SolveSummary, WallClock, FORMAT_VERSION,
};
use crate::config::{Backend, RunConfig};
use crate::errors::{CliError, Result};
use crate::synth;
use qubofoil::geometry::{decode_design, naca4_coordinates, AirfoilParams, DecodedDesign};
use qubofoil::hwadapt::{default_epsilon, pas_split, quantize, spin_budget, HardwareProfile};
use qubofoil::multiobj::{aggregate_qubo, block_compose, extract_pareto, lift_drag_weights};
use qubofoil::pbool::{compile_hubo, SpinRole};
use qubofoil::quadratize::{rosenberg_reduce, PenaltyPolicy, QuboProblem};
use qubofoil::solvers::{
    gap_trajectory, solve_bruteforce, solve_gd, solve_isingdyn, solve_sa_with_workers,
    time_to_target, SolveRecord, DEFAULT_TTT_THRESHOLD,
};
use qubofoil::surrogate::{DesignSpace, PolynomialSurrogate, SampleSet, Sense};
use std::path::PathBuf;
use std::time::Instant;

fn fit_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_path().join("fit.json")
}
fn compile_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_path().join("compile.json")
}
fn solve_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_path().join("solve.json")
}
fn pareto_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_path().join("pareto.json")
}
fn report_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_path().join("report.json")
}

/// Writes the synthetic sample CSV.
pub fn cmd_synth(cfg: &RunConfig) -> Result<PathBuf> {
    let set = synth::synthesize(cfg)?;
    let path = cfg.samples_path();
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = std::fs::File::create(&path)?;
    set.write_csv(std::io::BufWriter::new(file))
        .map_err(CliError::from)?;
    eprintln!("synth: wrote {} rows to {}", set.len(), path.display());
    Ok(path)
}

/// Fits one surrogate per configured objective.
pub fn cmd_fit(cfg: &RunConfig) -> Result<FitArtifact> {
    let space = cfg.design_space()?;
    let order = cfg.order()?;
    let senses = cfg.parsed_senses()?;
    let samples = SampleSet::read_csv(&cfg.samples_path()).map_err(CliError::from)?;

    if samples.variable_names != cfg.variables {
        return Err(CliError::Config(format!(
            "sample columns {:?} do not match configured variables {:?}",
            samples.variable_names, cfg.variables
        )));
    }
    let bounds_warnings = samples.bounds_warnings(&space);
    for w in &bounds_warnings {
        eprintln!("fit: warning: {w}");
    }

    let mut objectives = Vec::new();
    for (name, &sense) in cfg.objectives.iter().zip(&senses) {
        let index = samples.objective_index(name).ok_or_else(|| {
            CliError::Config(format!(
                "objective '{name}' not found in sample file (has {:?})",
                samples.objective_names
            ))
        })?;
        let model = PolynomialSurrogate::fit(&samples, index, order).map_err(CliError::from)?;
        eprintln!(
            "fit: {name} order {} R^2 = {:.6}",
            order.degree(),
            model.r_squared.unwrap_or(f64::NAN)
        );
        objectives.push(ObjectiveFit {
            name: name.clone(),
            sense,
            model,
        });
    }

    let artifact = FitArtifact {
        format_version: FORMAT_VERSION,
        space,
        objectives,
        bounds_warnings,
    };
    write_json(&fit_path(cfg), &artifact)?;
    Ok(artifact)
}

fn dominant_category(budget: &qubofoil::hwadapt::SpinBudget) -> String {
    let mut cats = [
        ("logical", budget.logical),
        ("qubo-aux", budget.qubo_aux),
        ("physical-aux", budget.physical_aux),
    ];
    cats.sort_by_key(|&(_, count)| std::cmp::Reverse(count));
    format!("{} ({} spins)", cats[0].0, cats[0].1)
}

fn adapt(cfg: &RunConfig, qubo: &QuboProblem) -> Result<AdaptedProblem> {
    let eps = if cfg.hw_epsilon > 0.0 {
        cfg.hw_epsilon
    } else {
        default_epsilon(qubo)
    };
    let hw = HardwareProfile::new(cfg.hw_r_max, eps, cfg.hw_max_spins).map_err(CliError::from)?;
    let quantized = quantize(qubo, &hw).map_err(CliError::from)?;
    for (i, j, v) in &quantized.dropped {
        eprintln!("compile: warning: entry ({i},{j}) = {v} rounded to zero and was dropped");
    }
    let (split, report) = pas_split(&quantized.qubo, &hw).map_err(CliError::from)?;
    Ok(AdaptedProblem {
        qubo: split,
        scale: quantized.scale,
        dropped: quantized.dropped,
        split: report,
    })
}

/// Compiles every fitted objective into a reduced QUBO, optionally adapted to
/// the hardware profile.
pub fn cmd_compile(cfg: &RunConfig) -> Result<CompileArtifact> {
    let fit: FitArtifact = read_versioned(&fit_path(cfg))?;
    let policy = PenaltyPolicy::Auto {
        eta: cfg.penalty_eta,
    };

    let mut objectives = Vec::new();
    for obj in &fit.objectives {
        let (poly, registry) =
            compile_hubo(&obj.model, &fit.space, obj.sense).map_err(CliError::from)?;
        let qubo = rosenberg_reduce(&poly, policy, &registry).map_err(CliError::from)?;
        let adapted = if cfg.hw_adapt {
            Some(adapt(cfg, &qubo)?)
        } else {
            None
        };
        let budget = match &adapted {
            Some(a) => a.split.budget,
            None => spin_budget(&qubo.registry),
        };
        if budget.total > cfg.hw_max_spins {
            return Err(CliError::Capacity(format!(
                "objective '{}' needs {} spins but the profile allows {}; largest contributor: {}",
                obj.name,
                budget.total,
                cfg.hw_max_spins,
                dominant_category(&budget)
            )));
        }
        eprintln!(
            "compile: {} -> {} spins (logical {}, qubo-aux {}, physical-aux {})",
            obj.name, budget.total, budget.logical, budget.qubo_aux, budget.physical_aux
        );
        objectives.push(ObjectiveCompile {
            name: obj.name.clone(),
            sense: obj.sense,
            model: obj.model.clone(),
            qubo,
            budget,
            adapted,
        });
    }

    let artifact = CompileArtifact {
        format_version: FORMAT_VERSION,
        space: fit.space,
        objectives,
    };
    write_json(&compile_path(cfg), &artifact)?;
    Ok(artifact)
}

fn run_backend(
    cfg: &RunConfig,
    backend: Backend,
    problem: &QuboProblem,
) -> Result<SolveRecord> {
    match backend {
        Backend::BruteForce => solve_bruteforce(problem).map_err(CliError::from),
        Backend::Sa => solve_sa_with_workers(
            problem,
            &cfg.sa_schedule(),
            cfg.replicas,
            cfg.seed,
            cfg.effective_workers(),
        )
        .map_err(CliError::from),
        Backend::IsingDyn => {
            solve_isingdyn(problem, cfg.isingdyn_steps, cfg.seed).map_err(CliError::from)
        }
        Backend::Gd => Err(CliError::Config(
            "gradient descent runs on the continuous surrogate, not a QUBO".into(),
        )),
    }
}

fn decode_or_fail(
    assignment: &[u8],
    problem: &QuboProblem,
    space: &DesignSpace,
) -> Result<DecodedDesign> {
    let decoded = decode_design(assignment, &problem.registry, space).map_err(|e| match e {
        qubofoil::Error::CopyConsensus { .. } => CliError::Solver(e.to_string()),
        other => CliError::from(other),
    })?;
    for w in &decoded.warnings {
        eprintln!("decode: warning: {w}");
    }
    Ok(decoded)
}

/// Solves the first objective's compiled problem with the configured backend
/// and decodes the optimum.
pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveArtifact> {
    let compiled: CompileArtifact = read_versioned(&compile_path(cfg))?;
    let backend = cfg.backend_kind()?;
    let obj = compiled
        .objectives
        .first()
        .ok_or_else(|| CliError::Config("compile artifact has no objectives".into()))?;

    let artifact = if backend == Backend::Gd {
        // Descent happens on the continuous surrogate; maximization flips
        // the sign going in and back out.
        let model = match obj.sense {
            Sense::Minimize => obj.model.clone(),
            Sense::Maximize => obj.model.negated(),
        };
        let out = solve_gd(&model, &compiled.space, cfg.gd_starts, cfg.seed)
            .map_err(CliError::from)?;
        let values: Vec<(String, f64)> = compiled
            .space
            .variables()
            .iter()
            .zip(&out.snapped)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect();
        let decoded = DecodedDesign {
            values,
            warnings: Vec::new(),
        };
        let surrogate_value = obj.model.eval(&decoded.point()).map_err(CliError::from)?;
        SolveArtifact {
            format_version: FORMAT_VERSION,
            objective: obj.name.clone(),
            backend: backend.name().into(),
            record: None,
            gd: Some(out),
            decoded,
            surrogate_value,
            descaled_energy: None,
        }
    } else {
        let (problem, scale) = match &obj.adapted {
            Some(a) => (&a.qubo, Some(a.scale)),
            None => (&obj.qubo, None),
        };
        let record = run_backend(cfg, backend, problem)?;
        let decoded = decode_or_fail(&record.best_assignment, problem, &compiled.space)?;
        let surrogate_value = obj.model.eval(&decoded.point()).map_err(CliError::from)?;
        let descaled_energy = scale.map(|s| s * record.best_energy);
        SolveArtifact {
            format_version: FORMAT_VERSION,
            objective: obj.name.clone(),
            backend: backend.name().into(),
            record: Some(record),
            gd: None,
            decoded,
            surrogate_value,
            descaled_energy,
        }
    };

    eprintln!(
        "solve: {} via {} -> {:?} (surrogate {})",
        artifact.objective,
        artifact.backend,
        artifact.decoded.values,
        artifact.surrogate_value
    );
    write_json(&solve_path(cfg), &artifact)?;
    Ok(artifact)
}

/// Builds the trade-off weights, packs every scenario into one block-diagonal
/// problem, solves it once, and extracts the Pareto front.
pub fn cmd_pareto(cfg: &RunConfig) -> Result<ParetoArtifact> {
    let compiled: CompileArtifact = read_versioned(&compile_path(cfg))?;
    if compiled.objectives.len() != 2 {
        return Err(CliError::Config(format!(
            "the trade-off stage needs exactly 2 objectives, found {}",
            compiled.objectives.len()
        )));
    }
    if cfg.pareto_weights.is_empty() {
        return Err(CliError::Config("pareto_weights is empty".into()));
    }
    let backend = cfg.backend_kind()?;
    if backend == Backend::Gd {
        return Err(CliError::Config(
            "gradient descent cannot solve a block-diagonal composite".into(),
        ));
    }

    // Per-weight scalarized problems from the pre-quantization QUBOs. With
    // normalization on, each objective is min-max rescaled over its sample
    // range before weighting, which keeps ill-scaled pairs comparable.
    let mut q0 = compiled.objectives[0].qubo.clone();
    let mut q1 = compiled.objectives[1].qubo.clone();
    if cfg.normalize_objectives {
        let samples = SampleSet::read_csv(&cfg.samples_path()).map_err(CliError::from)?;
        for (qubo, obj) in [(&mut q0, &compiled.objectives[0]), (&mut q1, &compiled.objectives[1])]
        {
            let index = samples.objective_index(&obj.name).ok_or_else(|| {
                CliError::Config(format!("objective '{}' missing from samples", obj.name))
            })?;
            let column: Vec<f64> = samples.rows.iter().map(|r| r.y[index]).collect();
            let lo = column.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = column.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            if span > 0.0 {
                qubo.scale(1.0 / span);
            }
        }
    }
    let mut weighted = Vec::new();
    for &w in &cfg.pareto_weights {
        let wv = lift_drag_weights(w).map_err(CliError::from)?;
        weighted.push(aggregate_qubo(&[&q0, &q1], &wv).map_err(CliError::from)?);
    }
    let refs: Vec<&QuboProblem> = weighted.iter().collect();
    let composite = block_compose(&refs, Some(cfg.hw_max_spins)).map_err(CliError::from)?;
    let block_size = q0.n;

    let (problem, _scale) = if cfg.hw_adapt {
        let adapted = adapt(cfg, &composite)?;
        if adapted.split.budget.total > cfg.hw_max_spins {
            return Err(CliError::Capacity(format!(
                "composite needs {} spins but the profile allows {}; largest contributor: {}",
                adapted.split.budget.total,
                cfg.hw_max_spins,
                dominant_category(&adapted.split.budget)
            )));
        }
        (adapted.qubo, Some(adapted.scale))
    } else {
        (composite, None)
    };

    eprintln!(
        "pareto: {} scenarios, composite of {} spins, backend {}",
        cfg.pareto_weights.len(),
        problem.n,
        backend.name()
    );
    let record = run_backend(cfg, backend, &problem)?;

    // Split copies live past the block ranges; check their consensus before
    // slicing the logical blocks out.
    let mut copy_violations = 0usize;
    for e in problem.registry.entries() {
        if let SpinRole::SplitCopy { parent, .. } = e.role {
            if record.best_assignment[e.spin] != record.best_assignment[parent] {
                copy_violations += 1;
            }
        }
    }
    if copy_violations > 0 {
        eprintln!("pareto: warning: {copy_violations} split copies disagree with their parents");
    }

    let models: Vec<&PolynomialSurrogate> =
        compiled.objectives.iter().map(|o| &o.model).collect();
    let senses: Vec<Sense> = compiled.objectives.iter().map(|o| o.sense).collect();

    let mut blocks = Vec::new();
    let mut candidates = Vec::new();
    for (p, &w) in cfg.pareto_weights.iter().enumerate() {
        let wv = lift_drag_weights(w).map_err(CliError::from)?;
        let slice = &record.best_assignment[p * block_size..(p + 1) * block_size];
        let decoded = decode_or_fail(slice, &q0, &compiled.space)?;
        let x = decoded.point();
        let objectives = models
            .iter()
            .map(|m| m.eval(&x).map_err(CliError::from))
            .collect::<Result<Vec<f64>>>()?;
        candidates.push((wv.to_vec(), x));
        blocks.push(BlockSolution {
            weight_scalar: w,
            weight_vector: wv.to_vec(),
            decoded,
            objectives,
        });
    }
    let pareto = extract_pareto(&candidates, &models, &senses).map_err(CliError::from)?;

    let artifact = ParetoArtifact {
        format_version: FORMAT_VERSION,
        weight_scalars: cfg.pareto_weights.clone(),
        composite_spins: problem.n,
        backend: backend.name().into(),
        record,
        blocks,
        pareto,
    };
    write_json(&pareto_path(cfg), &artifact)?;
    Ok(artifact)
}

fn airfoil_params(cfg: &RunConfig, decoded: &DecodedDesign) -> AirfoilParams {
    AirfoilParams {
        max_camber: decoded.get("A").unwrap_or(cfg.naca_camber),
        camber_location: decoded.get("B").unwrap_or(cfg.naca_camber_location),
        max_thickness: decoded.get("T").unwrap_or(cfg.naca_thickness),
        chord: 1.0,
    }
}

fn write_airfoil(cfg: &RunConfig, name: &str, decoded: &DecodedDesign) -> Result<()> {
    let params = airfoil_params(cfg, decoded);
    for w in params.range_warnings() {
        eprintln!("report: warning: {w}");
    }
    let coords =
        naca4_coordinates(&params, cfg.points_per_surface).map_err(CliError::from)?;
    std::fs::write(cfg.out_path().join(name), coords.to_selig())?;
    Ok(())
}

fn write_plot(cfg: &RunConfig, name: &str, lines: &[(f64, f64)]) -> Result<()> {
    let mut text = String::new();
    for (a, b) in lines {
        text.push_str(&format!("{a} {b}\n"));
    }
    std::fs::write(cfg.out_path().join(name), text)?;
    Ok(())
}

/// Gathers whatever artifacts exist into the run report plus plot-data files.
pub fn cmd_report(cfg: &RunConfig) -> Result<RunReport> {
    let fit: FitArtifact = read_versioned(&fit_path(cfg))?;
    let compiled: Option<CompileArtifact> = read_versioned(&compile_path(cfg)).ok();
    let solved: Option<SolveArtifact> = read_versioned(&solve_path(cfg)).ok();
    let pareto: Option<ParetoArtifact> = read_versioned(&pareto_path(cfg)).ok();

    let fits = fit
        .objectives
        .iter()
        .map(|o| FitSummary {
            objective: o.name.clone(),
            sense: o.sense,
            order: o.model.order.degree(),
            r_squared: o.model.r_squared,
            residual_norm: o.model.residual_norm,
        })
        .collect();
    let spin_budgets = compiled
        .as_ref()
        .map(|c| {
            c.objectives
                .iter()
                .map(|o| (o.name.clone(), o.budget))
                .collect()
        })
        .unwrap_or_default();

    let solve_summary = match &solved {
        Some(s) => {
            let ttt = s.record.as_ref().and_then(|record| {
                let h_min = record.best_energy;
                gap_trajectory(record, h_min)
                    .ok()
                    .and_then(|gap| time_to_target(&gap, DEFAULT_TTT_THRESHOLD).ok().flatten())
            });
            if let Some(record) = &s.record {
                let points: Vec<(f64, f64)> = record
                    .trajectory
                    .iter()
                    .map(|p| (p.elapsed_seconds, p.energy))
                    .collect();
                write_plot(cfg, "trajectory.txt", &points)?;
                if let Ok(gap) = gap_trajectory(record, record.best_energy) {
                    write_plot(cfg, "gap.txt", &gap)?;
                }
            }
            write_airfoil(cfg, "airfoil_best.dat", &s.decoded)?;
            Some(SolveSummary {
                objective: s.objective.clone(),
                backend: s.backend.clone(),
                best_energy: s.record.as_ref().map(|r| r.best_energy).unwrap_or(
                    s.gd.as_ref().map(|g| g.snapped_value).unwrap_or(f64::NAN),
                ),
                descaled_energy: s.descaled_energy,
                decoded: s.decoded.values.clone(),
                surrogate_value: s.surrogate_value,
                time_to_target_seconds: ttt,
            })
        }
        None => None,
    };

    let pareto_summary = match &pareto {
        Some(p) => {
            // Scatter and front, two columns per objective pair.
            let all: Vec<(f64, f64)> = p
                .pareto
                .points
                .iter()
                .map(|pt| (pt.objectives[0], pt.objectives[1]))
                .collect();
            write_plot(cfg, "pareto_points.txt", &all)?;
            let front: Vec<(f64, f64)> = p
                .pareto
                .non_dominated()
                .map(|pt| (pt.objectives[0], pt.objectives[1]))
                .collect();
            write_plot(cfg, "pareto_front.txt", &front)?;

            // Decoded trade-off variable against the weight scalar.
            let trade_var = if cfg.variables.iter().any(|v| v == "T") {
                "T".to_string()
            } else {
                cfg.variables.last().cloned().unwrap_or_default()
            };
            let curve: Vec<(f64, f64)> = p
                .blocks
                .iter()
                .map(|b| (b.weight_scalar, b.decoded.get(&trade_var).unwrap_or(f64::NAN)))
                .collect();
            write_plot(cfg, "thickness_vs_weight.txt", &curve)?;

            for (i, b) in p.blocks.iter().enumerate() {
                write_airfoil(cfg, &format!("airfoil_w{i}.dat"), &b.decoded)?;
            }

            let front_blocks: Vec<BlockSolution> = p
                .blocks
                .iter()
                .filter(|b| {
                    p.pareto
                        .non_dominated()
                        .any(|pt| pt.x == b.decoded.point())
                })
                .cloned()
                .collect();
            Some(ParetoSummary {
                weight_scalars: p.weight_scalars.clone(),
                composite_spins: p.composite_spins,
                front: front_blocks,
                dominated: p.pareto.points.iter().filter(|pt| pt.dominated).count(),
            })
        }
        None => None,
    };

    // Sample-space airfoil overlays, every overlay_stride-th row.
    if cfg.overlay_stride > 0 {
        if let Ok(samples) = SampleSet::read_csv(&cfg.samples_path()) {
            for (i, row) in samples.rows.iter().step_by(cfg.overlay_stride).enumerate() {
                let decoded = DecodedDesign {
                    values: samples
                        .variable_names
                        .iter()
                        .cloned()
                        .zip(row.x.iter().copied())
                        .collect(),
                    warnings: Vec::new(),
                };
                write_airfoil(cfg, &format!("airfoil_sample_{i}.dat"), &decoded)?;
            }
        }
    }

    let report = RunReport {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        fits,
        spin_budgets,
        solve: solve_summary,
        pareto: pareto_summary,
        wall_clock: WallClock::default(),
    };
    write_json(&report_path(cfg), &report)?;
    Ok(report)
}

/// Fused pipeline: synth (when the sample file is missing), fit, compile,
/// solve, pareto (two-objective runs), report.
pub fn cmd_all(cfg: &RunConfig) -> Result<RunReport> {
    let mut wall = WallClock::default();
    let mut time_stage = |name: &str, start: Instant| {
        wall.stage_seconds
            .insert(name.to_string(), start.elapsed().as_secs_f64());
    };

    if !cfg.samples_path().exists() {
        let t = Instant::now();
        cmd_synth(cfg)?;
        time_stage("synth", t);
    }
    let t = Instant::now();
    cmd_fit(cfg)?;
    time_stage("fit", t);

    let t = Instant::now();
    let compiled = cmd_compile(cfg)?;
    time_stage("compile", t);

    let t = Instant::now();
    cmd_solve(cfg)?;
    time_stage("solve", t);

    if compiled.objectives.len() == 2 && !cfg.pareto_weights.is_empty() {
        let t = Instant::now();
        cmd_pareto(cfg)?;
        time_stage("pareto", t);
    }

    let t = Instant::now();
    let mut report = cmd_report(cfg)?;
    time_stage("report", t);

    report.wall_clock = wall;
    write_json(&report_path(cfg), &report)?;
    Ok(report)
}
