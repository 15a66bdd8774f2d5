//! Rosenberg quadratization of degree-3/4 pseudo-Boolean polynomials.
//!
//! Each substitution replaces a product q_i q_j inside higher-order terms
//! with a fresh auxiliary spin a and adds the consistency penalty
//!
//!   lambda * (q_i q_j - 2 q_i a - 2 q_j a + 3 a)
//!
//! which is 0 when a = q_i q_j and at least lambda otherwise. The penalty
//! coefficient is sized from the maximum single-flip energy change of the
//! unpenalized objective, upper-bounded per spin by the sum of absolute
//! coefficients of the terms containing it, times a safety margin eta > 1.

use crate::error::{Error, Result};
use crate::pbool::{PseudoBooleanPolynomial, SpinRole, VariableRegistry, PRUNE_EPS};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How the Rosenberg penalty coefficient is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PenaltyPolicy {
    /// lambda = eta * max_k sum_{terms containing k} |coefficient|, eta > 1.
    Auto { eta: f64 },
    Fixed { lambda: f64 },
}

impl Default for PenaltyPolicy {
    fn default() -> Self {
        PenaltyPolicy::Auto { eta: 1.25 }
    }
}

/// One auxiliary spin introduced by the reduction, with its penalty weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyRecord {
    pub aux: usize,
    pub parents: (usize, usize),
    pub lambda: f64,
}

/// Upper-triangular sparse QUBO with an energy offset and spin registry.
///
/// Diagonal entries carry linear terms (q^2 = q). The constant term of the
/// source polynomial is tracked as `offset` and re-added when energies are
/// reported; hardware matrices have no constant cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    pub n: usize,
    #[serde(with = "entries_serde")]
    entries: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub registry: VariableRegistry,
    #[serde(default)]
    pub penalties: Vec<PenaltyRecord>,
}

mod entries_serde {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(usize, usize), f64>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        ser.collect_seq(map.iter().map(|(&(i, j), &v)| (i, j, v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<(usize, usize), f64>, D::Error> {
        let triples: Vec<(usize, usize, f64)> = Vec::deserialize(de)?;
        Ok(triples.into_iter().map(|(i, j, v)| ((i, j), v)).collect())
    }
}

impl QuboProblem {
    pub fn new(n: usize, registry: VariableRegistry) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
            offset: 0.0,
            registry,
            penalties: Vec::new(),
        }
    }

    /// Accumulates into the canonical (min, max) cell.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.n && j < self.n);
        let key = (i.min(j), i.max(j));
        *self.entries.entry(key).or_insert(0.0) += value;
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.entries
    }

    pub fn prune_zeros(&mut self) {
        self.entries.retain(|_, v| v.abs() > PRUNE_EPS);
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Multiplies every entry, the offset, and the recorded penalty weights
    /// by a positive factor. Minimizers are unchanged (homogeneity).
    pub fn scale(&mut self, factor: f64) {
        assert!(factor > 0.0, "scale factor must be positive");
        for v in self.entries.values_mut() {
            *v *= factor;
        }
        self.offset *= factor;
        for p in &mut self.penalties {
            p.lambda *= factor;
        }
    }

    /// Offset-included energy of a binary assignment.
    pub fn energy(&self, q: &[u8]) -> Result<f64> {
        if q.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: q.len(),
            });
        }
        let sum: f64 = self
            .entries
            .iter()
            .map(|(&(i, j), &v)| {
                if q[i] != 0 && q[j] != 0 {
                    v
                } else {
                    0.0
                }
            })
            .sum();
        Ok(sum + self.offset)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Penalty weight for one reduction pass over the unpenalized objective.
///
/// The exact maximization of |Delta_k H| over assignments is exponential, so
/// the per-spin sum of absolute coefficients is used instead; it dominates
/// any single-flip change, so the sufficiency guarantee is preserved.
pub fn select_lambda(p: &PseudoBooleanPolynomial, policy: PenaltyPolicy) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::EmptyPolynomial);
    }
    match policy {
        PenaltyPolicy::Fixed { lambda } => Ok(lambda),
        PenaltyPolicy::Auto { eta } => {
            if eta <= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "penalty eta must exceed 1, got {eta}"
                )));
            }
            let mut per_spin = vec![0.0f64; p.num_vars];
            for (idx, c) in p.terms() {
                for &i in idx {
                    per_spin[i] += c.abs();
                }
            }
            let max = per_spin.iter().cloned().fold(0.0f64, f64::max);
            Ok(eta * max)
        }
    }
}

/// Reduces a degree-<=4 polynomial to a QUBO via repeated pair substitution.
///
/// Pairs are chosen greedily by how many remaining high-order terms they
/// appear in (lexicographic tie-break), and one auxiliary is reused across
/// every term containing its pair. A single lambda computed from the full
/// unpenalized objective is applied to all auxiliaries of the pass.
pub fn rosenberg_reduce(
    p: &PseudoBooleanPolynomial,
    policy: PenaltyPolicy,
    registry: &VariableRegistry,
) -> Result<QuboProblem> {
    let degree = p.degree();
    if degree > 4 {
        return Err(Error::UnsupportedDegree { degree });
    }
    if registry.len() != p.num_vars {
        return Err(Error::RegistryMismatch(format!(
            "registry has {} spins, polynomial has {}",
            registry.len(),
            p.num_vars
        )));
    }

    let mut terms: BTreeMap<Vec<usize>, f64> = p.terms().clone();
    let mut registry = registry.clone();
    let mut penalties = Vec::new();

    let lambda = if degree >= 3 {
        select_lambda(p, policy)?
    } else {
        0.0
    };

    loop {
        // Count pair occurrences across remaining high-order terms.
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for key in terms.keys().filter(|k| k.len() >= 3) {
            for a in 0..key.len() {
                for b in (a + 1)..key.len() {
                    *counts.entry((key[a], key[b])).or_insert(0) += 1;
                }
            }
        }
        // Most frequent pair wins; ties go to the lexicographically smallest
        // (BTreeMap iterates ascending, strict > keeps the first maximum).
        let mut chosen: Option<((usize, usize), usize)> = None;
        for (&pair, &count) in &counts {
            if chosen.is_none_or(|(_, best)| count > best) {
                chosen = Some((pair, count));
            }
        }
        let Some((pair, _)) = chosen else {
            break;
        };
        let (pi, pj) = pair;

        let aux = registry.push(SpinRole::RosenbergAux { parents: pair });
        let mut rewritten: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (key, c) in std::mem::take(&mut terms) {
            if key.len() >= 3 && key.contains(&pi) && key.contains(&pj) {
                let mut new_key: Vec<usize> =
                    key.iter().copied().filter(|&v| v != pi && v != pj).collect();
                new_key.push(aux);
                new_key.sort_unstable();
                *rewritten.entry(new_key).or_insert(0.0) += c;
            } else {
                *rewritten.entry(key).or_insert(0.0) += c;
            }
        }
        terms = rewritten;

        // Consistency penalty lambda * (qi qj - 2 qi a - 2 qj a + 3 a).
        *terms.entry(vec![pi, pj]).or_insert(0.0) += lambda;
        *terms.entry(vec![pi.min(aux), pi.max(aux)]).or_insert(0.0) -= 2.0 * lambda;
        *terms.entry(vec![pj.min(aux), pj.max(aux)]).or_insert(0.0) -= 2.0 * lambda;
        *terms.entry(vec![aux]).or_insert(0.0) += 3.0 * lambda;
        penalties.push(PenaltyRecord {
            aux,
            parents: pair,
            lambda,
        });
    }

    let n = registry.len();
    let mut qubo = QuboProblem::new(n, registry);
    qubo.penalties = penalties;
    for (key, c) in terms {
        match key.len() {
            0 => qubo.offset += c,
            1 => qubo.add(key[0], key[0], c),
            2 => qubo.add(key[0], key[1], c),
            len => unreachable!("term of size {len} after reduction"),
        }
    }
    qubo.prune_zeros();
    Ok(qubo)
}

/// Spin-valued formulation related to a QUBO by s = 2q - 1.
///
/// `energy` follows the sign convention H = -sum J_ij s_i s_j - sum h_i s_i,
/// plus the stored offset so that values match the source QUBO directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingProblem {
    pub n: usize,
    #[serde(with = "entries_serde")]
    couplings: BTreeMap<(usize, usize), f64>,
    pub fields: Vec<f64>,
    pub offset: f64,
}

impl IsingProblem {
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.couplings.get(&key).copied().unwrap_or(0.0)
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: spins.len(),
            });
        }
        let pair: f64 = self
            .couplings
            .iter()
            .map(|(&(i, j), &jij)| -jij * spins[i] as f64 * spins[j] as f64)
            .sum();
        let field: f64 = self
            .fields
            .iter()
            .zip(spins)
            .map(|(&h, &s)| -h * s as f64)
            .sum();
        Ok(pair + field + self.offset)
    }

    /// Inverse transform; energies agree with the Ising energy on s = 2q - 1.
    pub fn to_qubo(&self, registry: VariableRegistry) -> QuboProblem {
        let mut qubo = QuboProblem::new(self.n, registry);
        let mut offset = self.offset;
        for (&(i, j), &jij) in &self.couplings {
            let q_ij = -4.0 * jij;
            qubo.add(i, j, q_ij);
            qubo.add(i, i, 2.0 * jij);
            qubo.add(j, j, 2.0 * jij);
            offset -= jij;
        }
        for (i, &h) in self.fields.iter().enumerate() {
            qubo.add(i, i, -2.0 * h);
            offset += h;
        }
        qubo.offset = offset;
        qubo.prune_zeros();
        qubo
    }
}

/// Exact energy-preserving map to Ising form via s = 2q - 1.
pub fn qubo_to_ising(q: &QuboProblem) -> IsingProblem {
    let mut couplings: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut fields = vec![0.0f64; q.n];
    let mut offset = q.offset;
    for (&(i, j), &v) in q.entries() {
        if i == j {
            // v * q_i = v/2 * s_i + v/2
            fields[i] -= v / 2.0;
            offset += v / 2.0;
        } else {
            // v * q_i q_j = v/4 * (1 + s_i + s_j + s_i s_j)
            couplings.insert((i, j), -v / 4.0);
            fields[i] -= v / 4.0;
            fields[j] -= v / 4.0;
            offset += v / 4.0;
        }
    }
    couplings.retain(|_, v| *v != 0.0);
    IsingProblem {
        n: q.n,
        couplings,
        fields,
        offset,
    }
}
