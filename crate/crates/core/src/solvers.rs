//! QUBO minimizers with benchmark-grade convergence records.
//!
//! Backends share one contract: return the best assignment found, its
//! offset-included energy (always re-evaluated against the input problem),
//! and a non-increasing best-so-far trajectory. Wall-clock timestamps are
//! sampled on a monotonic clock once per iteration batch and live in a field
//! that determinism checks strip out; everything else is reproducible from
//! the seed.

use crate::error::{Error, Result};
use crate::pbool::nearest_bits;
use crate::quadratize::{qubo_to_ising, QuboProblem};
use crate::surrogate::{DesignSpace, PolynomialSurrogate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Brute force refuses problems above this size unless overridden.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 26;

/// Residual-gap threshold defining the time-to-target metric.
pub const DEFAULT_TTT_THRESHOLD: f64 = 0.01;

/// Flips between monotonic-clock samples.
const CLOCK_BATCH: u64 = 64;

/// Most tied optima stored verbatim; the count is always exact.
const TIES_CAP: usize = 1024;

/// One best-so-far sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub step: u64,
    /// Wall-clock seconds since the solve started. Excluded from
    /// determinism comparisons.
    pub elapsed_seconds: f64,
    pub energy: f64,
}

/// Outcome of one backend invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub backend: String,
    pub seed: u64,
    pub replicas: usize,
    pub best_assignment: Vec<u8>,
    /// Offset-included energy; equals re-evaluating `best_assignment`.
    pub best_energy: f64,
    pub trajectory: Vec<TrajectoryPoint>,
    /// Exact count of global minimizers (brute force only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_optima: Option<u64>,
    /// Tied minimizers, capped at a storage limit (brute force only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tied_optima: Option<Vec<Vec<u8>>>,
}

impl SolveRecord {
    /// JSON value with wall-clock fields zeroed, for byte-stable comparisons.
    pub fn determinism_key(&self) -> serde_json::Value {
        let mut clone = self.clone();
        for p in &mut clone.trajectory {
            p.elapsed_seconds = 0.0;
        }
        serde_json::to_value(&clone).expect("record serializes")
    }
}

/// Geometric cooling schedule for simulated annealing. One iteration is a
/// sweep of N single-spin proposals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaSchedule {
    pub t_init: f64,
    pub t_min: f64,
    pub cooling: f64,
    pub iters_per_temp: u32,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self {
            t_init: 5000.0,
            t_min: 0.001,
            cooling: 0.9,
            iters_per_temp: 50,
        }
    }
}

impl SaSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_init > self.t_min && self.t_min > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "need t_init > t_min > 0, got {} / {}",
                self.t_init, self.t_min
            )));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "cooling rate must lie in (0,1), got {}",
                self.cooling
            )));
        }
        if self.iters_per_temp == 0 {
            return Err(Error::InvalidSchedule("iters_per_temp must be >= 1".into()));
        }
        Ok(())
    }
}

/// Adjacency view for O(degree) single-flip energy deltas.
struct QuboView {
    n: usize,
    diag: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
    offset: f64,
}

impl QuboView {
    fn new(q: &QuboProblem) -> Self {
        let mut diag = vec![0.0; q.n];
        let mut neighbors = vec![Vec::new(); q.n];
        for (&(i, j), &v) in q.entries() {
            if i == j {
                diag[i] += v;
            } else {
                neighbors[i].push((j, v));
                neighbors[j].push((i, v));
            }
        }
        Self {
            n: q.n,
            diag,
            neighbors,
            offset: q.offset,
        }
    }

    fn energy(&self, q: &[u8]) -> f64 {
        let mut e = self.offset;
        for i in 0..self.n {
            if q[i] != 0 {
                e += self.diag[i];
                for &(j, v) in &self.neighbors[i] {
                    if j > i && q[j] != 0 {
                        e += v;
                    }
                }
            }
        }
        e
    }

    /// Energy change from flipping spin k.
    fn delta(&self, q: &[u8], k: usize) -> f64 {
        let mut field = self.diag[k];
        for &(j, v) in &self.neighbors[k] {
            if q[j] != 0 {
                field += v;
            }
        }
        if q[k] == 0 {
            field
        } else {
            -field
        }
    }
}

/// Exhaustive Gray-code scan returning the exact global minimum and the
/// complete argmin set (count exact, stored assignments capped).
pub fn solve_bruteforce(q: &QuboProblem) -> Result<SolveRecord> {
    solve_bruteforce_with_cap(q, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn solve_bruteforce_with_cap(q: &QuboProblem, cap: usize) -> Result<SolveRecord> {
    if q.n > cap {
        return Err(Error::BruteForceCap { spins: q.n, cap });
    }
    let start = Instant::now();
    let view = QuboView::new(q);
    let n = q.n;
    let mut assign = vec![0u8; n];
    let mut energy = view.energy(&assign);
    let mut best = energy;
    let mut best_assign = assign.clone();
    let mut ties: Vec<Vec<u8>> = vec![assign.clone()];
    let mut num_optima: u64 = 1;
    let mut trajectory = vec![TrajectoryPoint {
        step: 0,
        elapsed_seconds: 0.0,
        energy,
    }];

    let total: u64 = 1u64 << n;
    for step in 1..total {
        let k = step.trailing_zeros() as usize;
        energy += view.delta(&assign, k);
        assign[k] ^= 1;
        if energy < best {
            // Resync against a direct evaluation so incremental drift never
            // contaminates the recorded optimum or the tie detection.
            energy = view.energy(&assign);
            if energy < best {
                best = energy;
                best_assign.copy_from_slice(&assign);
                ties.clear();
                ties.push(assign.clone());
                num_optima = 1;
                trajectory.push(TrajectoryPoint {
                    step,
                    elapsed_seconds: start.elapsed().as_secs_f64(),
                    energy,
                });
                continue;
            }
        }
        if energy == best {
            num_optima += 1;
            if ties.len() < TIES_CAP {
                ties.push(assign.clone());
            }
        }
    }

    let best_energy = best;
    Ok(SolveRecord {
        backend: "bruteforce".into(),
        seed: 0,
        replicas: 1,
        best_assignment: best_assign,
        best_energy,
        trajectory,
        num_optima: Some(num_optima),
        tied_optima: Some(ties),
    })
}

fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(replica.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// What one annealing replica produced: its improvement points carry
/// replica-local steps and a replica-local clock.
struct SaReplicaRun {
    best_energy: f64,
    best_assignment: Vec<u8>,
    points: Vec<TrajectoryPoint>,
    flips: u64,
    duration: f64,
}

fn run_sa_replica(view: &QuboView, schedule: &SaSchedule, seed: u64, replica: u64) -> SaReplicaRun {
    let start = Instant::now();
    let n = view.n;
    let mut rng = replica_rng(seed, replica);
    let mut assign: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
    let mut energy = view.energy(&assign);
    let mut best = energy;
    let mut best_assign = assign.clone();
    let mut points = vec![TrajectoryPoint {
        step: 0,
        elapsed_seconds: 0.0,
        energy,
    }];
    let mut flips: u64 = 0;
    let mut elapsed = 0.0f64;

    let mut t = schedule.t_init;
    while t >= schedule.t_min {
        for _ in 0..schedule.iters_per_temp {
            for _ in 0..n {
                let k = rng.gen_range(0..n);
                let d = view.delta(&assign, k);
                if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
                    assign[k] ^= 1;
                    energy += d;
                    if energy < best {
                        // Drift-free resync before recording.
                        energy = view.energy(&assign);
                        if energy < best {
                            best = energy;
                            best_assign.copy_from_slice(&assign);
                            points.push(TrajectoryPoint {
                                step: flips,
                                elapsed_seconds: elapsed,
                                energy,
                            });
                        }
                    }
                }
                flips += 1;
                if flips % CLOCK_BATCH == 0 {
                    elapsed = start.elapsed().as_secs_f64();
                }
            }
        }
        t *= schedule.cooling;
    }

    SaReplicaRun {
        best_energy: best,
        best_assignment: best_assign,
        points,
        flips,
        duration: start.elapsed().as_secs_f64(),
    }
}

/// Metropolis single-spin-flip annealing over independent replicas, merged
/// into one best-so-far record. The (step, energy) sequence is deterministic
/// given the seed and identical for any worker count; timestamps approximate
/// one sequential pass over the replicas.
pub fn solve_sa(
    q: &QuboProblem,
    schedule: &SaSchedule,
    replicas: usize,
    seed: u64,
) -> Result<SolveRecord> {
    solve_sa_with_workers(q, schedule, replicas, seed, 1)
}

pub fn solve_sa_with_workers(
    q: &QuboProblem,
    schedule: &SaSchedule,
    replicas: usize,
    seed: u64,
    workers: usize,
) -> Result<SolveRecord> {
    schedule.validate()?;
    if replicas == 0 {
        return Err(Error::InvalidParameter("replicas must be >= 1".into()));
    }
    let view = QuboView::new(q);

    let runs: Vec<SaReplicaRun> = if workers > 1 && replicas > 1 {
        let mut slots: Vec<Option<SaReplicaRun>> = (0..replicas).map(|_| None).collect();
        let chunk = replicas.div_ceil(workers);
        std::thread::scope(|scope| {
            let view = &view;
            for (t, slice) in slots.chunks_mut(chunk).enumerate() {
                scope.spawn(move || {
                    for (off, slot) in slice.iter_mut().enumerate() {
                        let r = (t * chunk + off) as u64;
                        *slot = Some(run_sa_replica(view, schedule, seed, r));
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.expect("replica ran")).collect()
    } else {
        (0..replicas)
            .map(|r| run_sa_replica(&view, schedule, seed, r as u64))
            .collect()
    };

    // Deterministic merge in replica order.
    let mut best: Option<(f64, Vec<u8>)> = None;
    let mut trajectory: Vec<TrajectoryPoint> = Vec::new();
    let mut step_offset: u64 = 0;
    let mut time_offset = 0.0f64;
    for run in &runs {
        for p in &run.points {
            if best.as_ref().is_none_or(|(b, _)| p.energy < *b) {
                best = Some((p.energy, Vec::new()));
                trajectory.push(TrajectoryPoint {
                    step: step_offset + p.step,
                    elapsed_seconds: time_offset + p.elapsed_seconds,
                    energy: p.energy,
                });
            }
        }
        step_offset += run.flips;
        time_offset += run.duration;
    }
    let best_run = runs
        .iter()
        .min_by(|a, b| a.best_energy.total_cmp(&b.best_energy))
        .expect("at least one replica");
    let best_energy = best_run.best_energy;
    let best_assign = best_run.best_assignment.clone();
    assert_eq!(best_energy, view.energy(&best_assign), "self-consistency");

    Ok(SolveRecord {
        backend: "sa".into(),
        seed,
        replicas,
        best_assignment: best_assign,
        best_energy,
        trajectory,
        num_optima: None,
        tied_optima: None,
    })
}

/// Result of a continuous multi-start descent on the surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdOutcome {
    /// Best continuous point found within the box bounds.
    pub x: Vec<f64>,
    /// Surrogate value at `x`.
    pub value: f64,
    /// `x` snapped to the nearest fixed-point-encodable grid value.
    pub snapped: Vec<f64>,
    pub snapped_value: f64,
    pub starts: usize,
}

/// Projected gradient descent with backtracking line search, minimizing the
/// surrogate inside the design-space box. Use `model.negated()` to maximize.
pub fn solve_gd(
    model: &PolynomialSurrogate,
    space: &DesignSpace,
    starts: usize,
    seed: u64,
) -> Result<GdOutcome> {
    if model.n != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: model.n,
        });
    }
    if starts == 0 {
        return Err(Error::InvalidParameter("starts must be >= 1".into()));
    }
    let n = model.n;
    let lo: Vec<f64> = space.variables().iter().map(|v| v.lower).collect();
    let hi: Vec<f64> = space.variables().iter().map(|v| v.upper).collect();
    let project = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..starts {
        let mut x: Vec<f64> = (0..n).map(|i| rng.gen_range(lo[i]..=hi[i])).collect();
        let mut fx = model.eval(&x)?;
        for _ in 0..2000 {
            let g = model.gradient(&x)?;
            let mut alpha = 1.0f64;
            let mut improved = false;
            while alpha > 1e-14 {
                let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
                project(&mut cand);
                let fc = model.eval(&cand)?;
                if fc < fx - 1e-15 {
                    let moved = cand
                        .iter()
                        .zip(&x)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max);
                    x = cand;
                    fx = fc;
                    improved = true;
                    if moved < 1e-12 {
                        improved = false;
                    }
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| fx < *b) {
            best = Some((fx, x));
        }
    }
    let (value, x) = best.expect("at least one start");
    let snapped: Vec<f64> = (0..n)
        .map(|i| {
            let bits = nearest_bits(space, i, x[i]);
            crate::pbool::encode_value(space, i, &bits).expect("bit width matches")
        })
        .collect();
    let snapped_value = model.eval(&snapped)?;
    Ok(GdOutcome {
        x,
        value,
        snapped,
        snapped_value,
        starts,
    })
}

/// Tunables for the mean-field amplitude dynamics backend. This is a software
/// analogue of optical Ising hardware, not a simulation of its physics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingDynOptions {
    pub steps: usize,
    /// Integration step.
    pub dt: f64,
    /// Final pump value of the linear ramp (bifurcation sits at 1).
    pub pump_final: f64,
    /// Feedback strength relative to the normalized coupling field.
    pub gain: f64,
    /// Amplitude clamp.
    pub saturation: f64,
    /// Steps between energy measurements.
    pub measure_every: usize,
}

impl Default for IsingDynOptions {
    fn default() -> Self {
        Self {
            steps: 2000,
            dt: 0.05,
            pump_final: 2.0,
            gain: 1.0,
            saturation: 1.5,
            measure_every: 16,
        }
    }
}

/// Mean-field amplitude dynamics under a ramped gain with saturation; signs
/// of the final amplitudes give the spin assignment.
pub fn solve_isingdyn(q: &QuboProblem, steps: usize, seed: u64) -> Result<SolveRecord> {
    let opts = IsingDynOptions {
        steps,
        ..IsingDynOptions::default()
    };
    solve_isingdyn_with(q, &opts, seed)
}

pub fn solve_isingdyn_with(
    q: &QuboProblem,
    opts: &IsingDynOptions,
    seed: u64,
) -> Result<SolveRecord> {
    if opts.steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let start = Instant::now();
    let ising = qubo_to_ising(q);
    let view = QuboView::new(q);
    let n = q.n;

    // Dense coupling matrix for the inner loop.
    let mut coupling = vec![0.0f64; n * n];
    for (&(i, j), &v) in ising.couplings() {
        coupling[i * n + j] = v;
        coupling[j * n + i] = v;
    }

    // Normalize the feedback so the coupling field stays comparable to the
    // pump term regardless of coefficient scale.
    let row_norm = (0..n)
        .map(|i| {
            let j_sum: f64 = coupling[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum();
            j_sum + ising.fields[i].abs()
        })
        .fold(0.0f64, f64::max);
    let xi = if row_norm > 0.0 {
        opts.gain / row_norm
    } else {
        opts.gain
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amp: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.001..0.001)).collect();
    let mut best: Option<(f64, Vec<u8>)> = None;
    let mut trajectory: Vec<TrajectoryPoint> = Vec::new();
    let mut elapsed = 0.0f64;

    let measure = |amp: &[f64],
                       step: u64,
                       elapsed: f64,
                       best: &mut Option<(f64, Vec<u8>)>,
                       trajectory: &mut Vec<TrajectoryPoint>| {
        let assign: Vec<u8> = amp.iter().map(|&a| u8::from(a >= 0.0)).collect();
        let e = view.energy(&assign);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            *best = Some((e, assign));
            trajectory.push(TrajectoryPoint {
                step,
                elapsed_seconds: elapsed,
                energy: e,
            });
        }
    };
    measure(&amp, 0, 0.0, &mut best, &mut trajectory);

    for step in 0..opts.steps {
        let pump = opts.pump_final * (step + 1) as f64 / opts.steps as f64;
        let prev = amp.clone();
        for i in 0..n {
            let mut field = ising.fields[i];
            for (j, &c) in coupling[i * n..(i + 1) * n].iter().enumerate() {
                if j != i {
                    field += c * prev[j];
                }
            }
            let da = (pump - 1.0) * prev[i] - prev[i].powi(3) + xi * field;
            amp[i] = (prev[i] + opts.dt * da).clamp(-opts.saturation, opts.saturation);
            if !amp[i].is_finite() {
                return Err(Error::Diverged { step });
            }
        }
        if (step + 1) % opts.measure_every == 0 || step + 1 == opts.steps {
            if (step as u64 + 1) % CLOCK_BATCH == 0 {
                elapsed = start.elapsed().as_secs_f64();
            }
            measure(
                &amp,
                step as u64 + 1,
                elapsed,
                &mut best,
                &mut trajectory,
            );
        }
    }

    let (_, best_assign) = best.expect("measured at least once");
    let best_energy = view.energy(&best_assign);
    Ok(SolveRecord {
        backend: "isingdyn".into(),
        seed,
        replicas: 1,
        best_assignment: best_assign,
        best_energy,
        trajectory,
        num_optima: None,
        tied_optima: None,
    })
}

/// Normalized residual gap (H(t) - H_min) / (H_init - H_min) per trajectory
/// point. H_init is the first recorded energy.
pub fn gap_trajectory(record: &SolveRecord, h_min: f64) -> Result<Vec<(f64, f64)>> {
    let h_init = record
        .trajectory
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?
        .energy;
    let denom = h_init - h_min;
    if denom == 0.0 {
        return Err(Error::DegenerateGap);
    }
    Ok(record
        .trajectory
        .iter()
        .map(|p| (p.elapsed_seconds, (p.energy - h_min) / denom))
        .collect())
}

/// First elapsed time at which the normalized gap reaches the threshold;
/// `None` when the trajectory never gets there.
pub fn time_to_target(gap: &[(f64, f64)], threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "time-to-target threshold must lie in (0,1), got {threshold}"
        )));
    }
    Ok(gap.iter().find(|(_, g)| *g <= threshold).map(|(t, _)| *t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbool::{SpinRole, VariableRegistry};
    use crate::surrogate::{DesignVariable, RsmOrder};

    fn registry_of(n: usize) -> VariableRegistry {
        let mut r = VariableRegistry::new();
        for bit in 0..n {
            r.push(SpinRole::DesignBit {
                variable: "q".into(),
                bit: bit as u32 + 1,
            });
        }
        r
    }

    #[test]
    fn bruteforce_single_negative_diagonal() {
        let mut q = QuboProblem::new(1, registry_of(1));
        q.add(0, 0, -1.0);
        let rec = solve_bruteforce(&q).unwrap();
        assert_eq!(rec.best_assignment, vec![1]);
        assert_eq!(rec.best_energy, -1.0);
        assert_eq!(rec.num_optima, Some(1));
    }

    #[test]
    fn bruteforce_zero_matrix_ties() {
        let q = QuboProblem::new(4, registry_of(4));
        let mut q = q;
        q.offset = 2.5;
        let rec = solve_bruteforce(&q).unwrap();
        assert_eq!(rec.best_energy, 2.5);
        assert_eq!(rec.num_optima, Some(16));
        assert_eq!(rec.tied_optima.as_ref().unwrap().len(), 16);
    }

    #[test]
    fn bruteforce_respects_cap() {
        let q = QuboProblem::new(30, registry_of(30));
        assert!(matches!(
            solve_bruteforce(&q),
            Err(Error::BruteForceCap { spins: 30, cap: 26 })
        ));
    }

    #[test]
    fn sa_single_spin_exact() {
        let mut q = QuboProblem::new(1, registry_of(1));
        q.add(0, 0, -2.0);
        let rec = solve_sa(&q, &SaSchedule::default(), 1, 7).unwrap();
        assert_eq!(rec.best_assignment, vec![1]);
        assert_eq!(rec.best_energy, -2.0);
    }

    #[test]
    fn sa_is_deterministic_given_seed() {
        let mut q = QuboProblem::new(6, registry_of(6));
        q.add(0, 1, 1.5);
        q.add(2, 2, -1.0);
        q.add(3, 5, -0.75);
        let a = solve_sa(&q, &SaSchedule::default(), 3, 42).unwrap();
        let b = solve_sa(&q, &SaSchedule::default(), 3, 42).unwrap();
        assert_eq!(a.determinism_key(), b.determinism_key());
        let c = solve_sa(&q, &SaSchedule::default(), 3, 43).unwrap();
        assert_eq!(c.best_energy, a.best_energy); // easy landscape, same optimum
    }

    #[test]
    fn sa_trajectory_monotone() {
        let mut q = QuboProblem::new(8, registry_of(8));
        for i in 0..8 {
            q.add(i, i, if i % 2 == 0 { -1.0 } else { 0.5 });
            if i > 0 {
                q.add(i - 1, i, 0.25);
            }
        }
        let rec = solve_sa(&q, &SaSchedule::default(), 2, 11).unwrap();
        for w in rec.trajectory.windows(2) {
            assert!(w[1].energy <= w[0].energy);
        }
        assert_eq!(rec.best_energy, q.energy(&rec.best_assignment).unwrap());
    }

    #[test]
    fn schedule_validation() {
        let bad = SaSchedule {
            t_init: 1.0,
            t_min: 2.0,
            ..SaSchedule::default()
        };
        assert!(bad.validate().is_err());
        let bad_rate = SaSchedule {
            cooling: 1.0,
            ..SaSchedule::default()
        };
        assert!(bad_rate.validate().is_err());
    }

    fn space_1d(lower: f64, upper: f64, bits: u32) -> DesignSpace {
        DesignSpace::new(vec![DesignVariable {
            name: "x".into(),
            lower,
            upper,
            bits,
        }])
        .unwrap()
    }

    #[test]
    fn gd_convex_interior_optimum() {
        // (x - 0.3)^2 over [0, 1].
        let model = PolynomialSurrogate {
            order: RsmOrder::Two,
            n: 1,
            coefficients: [(vec![], 0.09), (vec![0], -0.6), (vec![0, 0], 1.0)]
                .into_iter()
                .collect(),
            r_squared: None,
            residual_norm: None,
        };
        let out = solve_gd(&model, &space_1d(0.0, 1.0, 8), 4, 3).unwrap();
        assert!((out.x[0] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn gd_boundary_optimum_projects() {
        // f(x) = x over [2, 5] has its minimum at the lower bound.
        let model = PolynomialSurrogate {
            order: RsmOrder::Two,
            n: 1,
            coefficients: [(vec![0], 1.0)].into_iter().collect(),
            r_squared: None,
            residual_norm: None,
        };
        let out = solve_gd(&model, &space_1d(2.0, 5.0, 4), 3, 9).unwrap();
        assert!((out.x[0] - 2.0).abs() < 1e-9);
        assert_eq!(out.snapped[0], 2.0);
    }

    #[test]
    fn isingdyn_single_spin_follows_field() {
        let mut q = QuboProblem::new(1, registry_of(1));
        q.add(0, 0, -3.0);
        let rec = solve_isingdyn(&q, 500, 5).unwrap();
        assert_eq!(rec.best_assignment, vec![1]);
        assert_eq!(rec.best_energy, -3.0);
    }

    #[test]
    fn isingdyn_ferromagnetic_pair_aligns() {
        // -q0 q1 favors both spins up; the Ising image is a ferromagnetic
        // coupling plus fields.
        let mut q = QuboProblem::new(2, registry_of(2));
        q.add(0, 1, -2.0);
        let rec = solve_isingdyn(&q, 1000, 1).unwrap();
        assert_eq!(rec.best_assignment, vec![1, 1]);
        assert_eq!(rec.best_energy, -2.0);
    }

    #[test]
    fn gap_endpoints_and_midpoint() {
        let rec = SolveRecord {
            backend: "test".into(),
            seed: 0,
            replicas: 1,
            best_assignment: vec![],
            best_energy: -10.0,
            trajectory: vec![
                TrajectoryPoint {
                    step: 0,
                    elapsed_seconds: 0.0,
                    energy: 10.0,
                },
                TrajectoryPoint {
                    step: 1,
                    elapsed_seconds: 0.5,
                    energy: 0.0,
                },
                TrajectoryPoint {
                    step: 2,
                    elapsed_seconds: 1.0,
                    energy: -10.0,
                },
            ],
            num_optima: None,
            tied_optima: None,
        };
        let gap = gap_trajectory(&rec, -10.0).unwrap();
        assert_eq!(gap[0].1, 1.0);
        assert_eq!(gap[1].1, 0.5);
        assert_eq!(gap[2].1, 0.0);
    }

    #[test]
    fn gap_degenerate_is_error() {
        let rec = SolveRecord {
            backend: "test".into(),
            seed: 0,
            replicas: 1,
            best_assignment: vec![],
            best_energy: 1.0,
            trajectory: vec![TrajectoryPoint {
                step: 0,
                elapsed_seconds: 0.0,
                energy: 1.0,
            }],
            num_optima: None,
            tied_optima: None,
        };
        assert!(matches!(gap_trajectory(&rec, 1.0), Err(Error::DegenerateGap)));
    }

    #[test]
    fn ttt_first_crossing_and_none() {
        let gap = vec![(0.0, 1.0), (0.001, 0.4), (0.002, 0.0)];
        assert_eq!(time_to_target(&gap, 0.01).unwrap(), Some(0.002));
        let flat = vec![(0.0, 1.0), (1.0, 1.0)];
        assert_eq!(time_to_target(&flat, 0.01).unwrap(), None);
        assert!(time_to_target(&gap, 0.0).is_err());
        assert!(time_to_target(&gap, 1.0).is_err());
    }
}
