//! Finite-precision hardware adaptation: integer quantization and
//! precision-adaptive splitting (PAS).
//!
//! Ising hardware stores matrix coefficients in a small signed integer range.
//! Quantization divides every entry by a precision threshold epsilon and
//! rounds. Entries that still exceed the range R_max are carried by redundant
//! spin copies: an oversized weight C becomes integer shares C_1..C_Nq with
//! sum C, and copy-consistency penalties
//!
//!   mu * (q_i + q_j - 2 q_i q_j)
//!
//! over every copy pair force all copies equal at any minimizer.
//!
//! Sizing: mu = floor(R_max / 2) (the largest value with |-2 mu| <= R_max)
//! and every share is capped at mu - 1. The strict cap is what makes the
//! split exact: a group of copies can only be pried apart by harvesting
//! shares, and each defecting copy pays at least mu against a gain of at
//! most mu - 1, so every global minimizer keeps all copies equal and the
//! restricted energy equals the input energy.

use crate::error::{Error, Result};
use crate::pbool::{SpinRole, VariableRegistry};
use crate::quadratize::QuboProblem;
use serde::{Deserialize, Serialize};

/// Coefficient range and precision limits of a target device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareProfile {
    /// Coefficients must lie in [-r_max, r_max] (127 for 8-bit signed).
    pub r_max: i64,
    /// Quantization step: entries are scaled by 1/epsilon and rounded.
    pub epsilon: f64,
    pub max_spins: usize,
}

impl HardwareProfile {
    pub fn new(r_max: i64, epsilon: f64, max_spins: usize) -> Result<Self> {
        if r_max < 1 {
            return Err(Error::InvalidParameter(format!(
                "r_max must be >= 1, got {r_max}"
            )));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            r_max,
            epsilon,
            max_spins,
        })
    }

    /// 8-bit signed coefficients, 1000 spins.
    pub fn eight_bit(epsilon: f64) -> Result<Self> {
        Self::new(127, epsilon, 1000)
    }
}

/// Default precision threshold: 1e-3 of the largest absolute coefficient,
/// which keeps an 8-bit dynamic range usable.
pub fn default_epsilon(q: &QuboProblem) -> f64 {
    let max = q
        .entries()
        .values()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    if max > 0.0 {
        max * 1e-3
    } else {
        1.0
    }
}

/// Result of integer quantization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedQubo {
    /// Same structure as the input with every entry an integer value.
    pub qubo: QuboProblem,
    /// Multiply integer energies by this to map back (equals epsilon).
    pub scale: f64,
    /// Entries that rounded to zero and were dropped.
    pub dropped: Vec<(usize, usize, f64)>,
}

/// Replaces every coefficient by round(coeff / epsilon).
pub fn quantize(q: &QuboProblem, hw: &HardwareProfile) -> Result<QuantizedQubo> {
    let eps = hw.epsilon;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    let mut out = QuboProblem::new(q.n, q.registry.clone());
    out.offset = q.offset / eps;
    out.penalties = q
        .penalties
        .iter()
        .map(|p| crate::quadratize::PenaltyRecord {
            aux: p.aux,
            parents: p.parents,
            lambda: (p.lambda / eps).round(),
        })
        .collect();
    let mut dropped = Vec::new();
    for (&(i, j), &v) in q.entries() {
        let scaled = (v / eps).round();
        if scaled == 0.0 {
            dropped.push((i, j, v));
        } else {
            out.add(i, j, scaled);
        }
    }
    if out.entries().is_empty() {
        return Err(Error::QuantizedToZero { epsilon: eps });
    }
    Ok(QuantizedQubo {
        qubo: out,
        scale: eps,
        dropped,
    })
}

/// One oversized coefficient distributed across spin copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    /// Cell (i, j) of the input matrix that exceeded the range.
    pub i: usize,
    pub j: usize,
    pub coefficient: f64,
    /// Endpoint whose participation was split.
    pub target: usize,
    /// Fresh copy spins (the target itself is the first carrier).
    pub copies: Vec<usize>,
    /// Integer weights over target + copies; sums exactly to `coefficient`.
    pub weights: Vec<i64>,
    pub mu: i64,
}

/// Spin counts by category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinBudget {
    pub logical: usize,
    pub qubo_aux: usize,
    pub physical_aux: usize,
    pub total: usize,
}

/// Category counts from registry roles.
pub fn spin_budget(registry: &VariableRegistry) -> SpinBudget {
    let mut budget = SpinBudget {
        logical: 0,
        qubo_aux: 0,
        physical_aux: 0,
        total: registry.len(),
    };
    for e in registry.entries() {
        match e.role {
            SpinRole::DesignBit { .. } => budget.logical += 1,
            SpinRole::RosenbergAux { .. } => budget.qubo_aux += 1,
            SpinRole::SplitCopy { .. } => budget.physical_aux += 1,
        }
    }
    budget
}

/// What the split did, plus the resulting spin budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub splits: Vec<SplitRecord>,
    pub budget: SpinBudget,
    pub mu: i64,
}

/// Splits every integer coefficient with |C| > R_max across redundant copies.
///
/// Diagonal (linear) entries split the spin itself; off-diagonal entries
/// split one endpoint's participation, choosing the endpoint with fewer
/// existing copies. Every emitted component (share weights, mu diagonals,
/// -2 mu pair penalties, untouched entries) lies within [-R_max, R_max].
pub fn pas_split(q: &QuboProblem, hw: &HardwareProfile) -> Result<(QuboProblem, SplitReport)> {
    for (&(i, j), &v) in q.entries() {
        if v.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pas_split requires integer coefficients; entry ({i},{j}) = {v}"
            )));
        }
    }
    let r_max = hw.r_max;
    let mu = r_max / 2;
    let share_cap = mu - 1;

    let mut registry = q.registry.clone();
    let mut splits: Vec<SplitRecord> = Vec::new();
    let mut staged: Vec<(usize, usize, f64)> = Vec::new();
    let mut copy_counts = vec![0u32; q.n];

    for (&(i, j), &v) in q.entries() {
        let magnitude = v.abs() as i64;
        if magnitude <= r_max {
            staged.push((i, j, v));
            continue;
        }
        if share_cap < 1 {
            return Err(Error::InfeasibleSplit {
                i,
                j,
                coefficient: v,
                reason: format!(
                    "r_max {r_max} leaves no room for a dominating penalty (mu = {mu})"
                ),
            });
        }

        let target = if copy_counts[i] <= copy_counts[j] { i } else { j };
        let other = if i == j {
            None
        } else if target == i {
            Some(j)
        } else {
            Some(i)
        };

        let copies_needed = (magnitude + share_cap - 1) / share_cap; // ceil
        let base = magnitude / copies_needed;
        let extra = magnitude % copies_needed;
        let sign = if v < 0.0 { -1i64 } else { 1i64 };
        let weights: Vec<i64> = (0..copies_needed)
            .map(|k| sign * (base + i64::from(k < extra)))
            .collect();
        debug_assert_eq!(weights.iter().sum::<i64>(), v as i64);
        debug_assert!(weights.iter().all(|w| w.abs() <= share_cap));

        let mut slots = vec![target];
        for copy in 1..copies_needed {
            let spin = registry.push(SpinRole::SplitCopy {
                parent: target,
                copy: copy as u32,
            });
            slots.push(spin);
        }
        copy_counts[target] += copies_needed as u32 - 1;

        for (slot, &w) in slots.iter().zip(&weights) {
            match other {
                Some(o) => staged.push((o, *slot, w as f64)),
                None => staged.push((*slot, *slot, w as f64)),
            }
        }
        // Copy-consistency penalties over every pair in the group.
        for a in 0..slots.len() {
            for b in (a + 1)..slots.len() {
                staged.push((slots[a], slots[a], mu as f64));
                staged.push((slots[b], slots[b], mu as f64));
                staged.push((slots[a], slots[b], -2.0 * mu as f64));
            }
        }

        splits.push(SplitRecord {
            i,
            j,
            coefficient: v,
            target,
            copies: slots[1..].to_vec(),
            weights,
            mu,
        });
    }

    let mut out = QuboProblem::new(registry.len(), registry);
    out.offset = q.offset;
    out.penalties = q.penalties.clone();
    for (i, j, v) in staged {
        out.add(i, j, v);
    }
    let report = SplitReport {
        splits,
        budget: spin_budget(&out.registry),
        mu,
    };
    Ok((out, report))
}
