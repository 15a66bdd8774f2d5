//! Weighted-sum scalarization, block-diagonal composition, and Pareto
//! extraction.
//!
//! Least squares is linear in the response, so aggregating fitted
//! coefficients termwise equals fitting the weighted response. The same
//! superposition carries through the fixed-point encoding, so scalarized
//! QUBOs are entrywise weighted sums of the per-objective matrices, with
//! penalty coefficients combined as the (safe upper bound) weighted sum of
//! the per-objective penalties. Independent weight scenarios pack into one
//! block-diagonal matrix whose minimizers restrict to per-block minimizers.

use crate::error::{Error, Result};
use crate::pbool::VariableRegistry;
use crate::quadratize::{PenaltyRecord, QuboProblem};
use crate::surrogate::{PolynomialSurrogate, Sense};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Normalized weight vectors, one per trade-off scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub vectors: Vec<Vec<f64>>,
}

impl WeightScheme {
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        for (p, w) in vectors.iter().enumerate() {
            if w.iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "weight vector {p} has a negative entry"
                )));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "weight vector {p} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self { vectors })
    }

    /// Two-objective scheme from scalar trade-off parameters (one vector per
    /// scalar, see [`lift_drag_weights`]).
    pub fn from_lift_drag_scalars(scalars: &[f64]) -> Result<Self> {
        let vectors = scalars
            .iter()
            .map(|&w| lift_drag_weights(w).map(|pair| pair.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_vectors(vectors)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Weight pair (1/(1+w), w/(1+w)) trading a maximized lift-like objective
/// against a minimized drag-like objective.
pub fn lift_drag_weights(w: f64) -> Result<[f64; 2]> {
    if !(w >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "trade-off scalar must be nonnegative, got {w}"
        )));
    }
    Ok([1.0 / (1.0 + w), w / (1.0 + w)])
}

/// Termwise weighted sum of surrogate coefficients over a shared basis.
pub fn aggregate_coefficients(
    models: &[&PolynomialSurrogate],
    weights: &[f64],
) -> Result<PolynomialSurrogate> {
    if models.is_empty() || models.len() != weights.len() {
        return Err(Error::InvalidParameter(format!(
            "{} models for {} weights",
            models.len(),
            weights.len()
        )));
    }
    let first = models[0];
    for m in models.iter().skip(1) {
        if m.order != first.order || m.n != first.n {
            return Err(Error::MismatchedBasis(format!(
                "order {:?}/{} vs {:?}/{}",
                m.order, m.n, first.order, first.n
            )));
        }
    }
    let mut coefficients: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (m, &w) in models.iter().zip(weights) {
        for (idx, &c) in &m.coefficients {
            *coefficients.entry(idx.clone()).or_insert(0.0) += w * c;
        }
    }
    Ok(PolynomialSurrogate {
        order: first.order,
        n: first.n,
        coefficients,
        r_squared: None,
        residual_norm: None,
    })
}

/// Entrywise weighted sum of QUBOs sharing one registry; penalty records
/// combine as lambda_w = sum w_i lambda_i (a safe upper bound on the penalty
/// the aggregated objective needs).
pub fn aggregate_qubo(qubos: &[&QuboProblem], weights: &[f64]) -> Result<QuboProblem> {
    if qubos.is_empty() || qubos.len() != weights.len() {
        return Err(Error::InvalidParameter(format!(
            "{} problems for {} weights",
            qubos.len(),
            weights.len()
        )));
    }
    let first = qubos[0];
    for q in qubos.iter().skip(1) {
        if q.n != first.n || q.registry != first.registry {
            return Err(Error::RegistryMismatch(
                "aggregated QUBOs must share size and registry".into(),
            ));
        }
        if q.penalties.len() != first.penalties.len()
            || q.penalties
                .iter()
                .zip(&first.penalties)
                .any(|(a, b)| a.aux != b.aux || a.parents != b.parents)
        {
            return Err(Error::RegistryMismatch(
                "aggregated QUBOs must share auxiliary structure".into(),
            ));
        }
    }

    let mut out = QuboProblem::new(first.n, first.registry.clone());
    for (q, &w) in qubos.iter().zip(weights) {
        out.offset += w * q.offset;
        for (&(i, j), &v) in q.entries() {
            out.add(i, j, w * v);
        }
    }
    out.penalties = first
        .penalties
        .iter()
        .enumerate()
        .map(|(r, p)| PenaltyRecord {
            aux: p.aux,
            parents: p.parents,
            lambda: qubos
                .iter()
                .zip(weights)
                .map(|(q, &w)| w * q.penalties[r].lambda)
                .sum(),
        })
        .collect();
    out.prune_zeros();
    Ok(out)
}

/// Packs independent problems into one block-diagonal matrix with shifted
/// spin indices; registry entries are tagged with their block.
pub fn block_compose(qubos: &[&QuboProblem], max_spins: Option<usize>) -> Result<QuboProblem> {
    if qubos.is_empty() {
        return Err(Error::InvalidParameter("no blocks to compose".into()));
    }
    let total: usize = qubos.iter().map(|q| q.n).sum();
    if let Some(cap) = max_spins {
        if total > cap {
            let (largest_idx, largest) = qubos
                .iter()
                .enumerate()
                .max_by_key(|(_, q)| q.n)
                .expect("nonempty");
            return Err(Error::Capacity {
                spins: total,
                max_spins: cap,
                largest: format!("block {largest_idx} ({} spins)", largest.n),
            });
        }
    }

    let mut registry = VariableRegistry::new();
    let mut out_entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut penalties = Vec::new();
    let mut offset = 0.0;
    let mut shift = 0usize;
    for (p, q) in qubos.iter().enumerate() {
        for e in q.registry.entries() {
            registry.push_with_block(e.role.clone(), Some(p));
        }
        for (&(i, j), &v) in q.entries() {
            out_entries.push((i + shift, j + shift, v));
        }
        for rec in &q.penalties {
            penalties.push(PenaltyRecord {
                aux: rec.aux + shift,
                parents: (rec.parents.0 + shift, rec.parents.1 + shift),
                lambda: rec.lambda,
            });
        }
        offset += q.offset;
        shift += q.n;
    }
    let mut out = QuboProblem::new(total, registry);
    out.offset = offset;
    out.penalties = penalties;
    for (i, j, v) in out_entries {
        out.add(i, j, v);
    }
    Ok(out)
}

/// Restriction of a composite assignment to one block's spins.
pub fn block_slice<'a>(
    composite: &'a [u8],
    qubos: &[&QuboProblem],
    block: usize,
) -> &'a [u8] {
    let start: usize = qubos[..block].iter().map(|q| q.n).sum();
    &composite[start..start + qubos[block].n]
}

/// One decoded trade-off candidate with its objective values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub weights: Vec<f64>,
    pub x: Vec<f64>,
    pub objectives: Vec<f64>,
    pub dominated: bool,
}

/// Candidates ordered by the first objective, with dominance flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoSet {
    pub points: Vec<ParetoPoint>,
}

impl ParetoSet {
    pub fn non_dominated(&self) -> impl Iterator<Item = &ParetoPoint> {
        self.points.iter().filter(|p| !p.dominated)
    }

    /// O(P^2) re-verification that no point flagged non-dominated is in fact
    /// dominated.
    pub fn verify(&self, senses: &[Sense]) -> bool {
        self.points.iter().enumerate().all(|(i, p)| {
            p.dominated
                || !self
                    .points
                    .iter()
                    .enumerate()
                    .any(|(j, q)| i != j && dominates(&q.objectives, &p.objectives, senses))
        })
    }

    /// Two-column plot data (objective i vs objective j) for the front.
    pub fn plot_data(&self, i: usize, j: usize) -> String {
        let mut lines: Vec<String> = self
            .non_dominated()
            .map(|p| format!("{} {}", p.objectives[i], p.objectives[j]))
            .collect();
        lines.sort();
        lines.join("\n") + "\n"
    }
}

/// True when `a` is no worse than `b` in every objective and strictly better
/// in at least one, respecting senses.
fn dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    let mut strictly_better = false;
    for ((&av, &bv), &sense) in a.iter().zip(b).zip(senses) {
        let (better, worse) = match sense {
            Sense::Maximize => (av > bv, av < bv),
            Sense::Minimize => (av < bv, av > bv),
        };
        if worse {
            return false;
        }
        if better {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Evaluates every objective at each decoded design point, deduplicates by
/// design point, flags dominated points, and orders by the first objective.
pub fn extract_pareto(
    candidates: &[(Vec<f64>, Vec<f64>)],
    models: &[&PolynomialSurrogate],
    senses: &[Sense],
) -> Result<ParetoSet> {
    if models.len() != senses.len() {
        return Err(Error::InvalidParameter(format!(
            "{} models for {} senses",
            models.len(),
            senses.len()
        )));
    }
    // Distinct weights often map to the same discrete optimum; duplicates
    // would otherwise mark each other dominated-adjacent forever.
    let mut seen: Vec<&[f64]> = Vec::new();
    let mut points: Vec<ParetoPoint> = Vec::new();
    for (weights, x) in candidates {
        if seen.iter().any(|s| *s == x.as_slice()) {
            continue;
        }
        seen.push(x);
        let objectives = models
            .iter()
            .map(|m| m.eval(x))
            .collect::<Result<Vec<f64>>>()?;
        points.push(ParetoPoint {
            weights: weights.clone(),
            x: x.clone(),
            objectives,
            dominated: false,
        });
    }
    for i in 0..points.len() {
        points[i].dominated = points
            .iter()
            .enumerate()
            .any(|(j, q)| j != i && dominates(&q.objectives, &points[i].objectives, senses));
    }
    points.sort_by(|a, b| {
        a.objectives[0]
            .partial_cmp(&b.objectives[0])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ParetoSet { points })
}
