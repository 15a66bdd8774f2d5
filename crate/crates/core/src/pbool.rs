//! Multilinear pseudo-Boolean polynomials and surrogate-to-HUBO compilation.
//!
//! Each design variable x_i in [L_i, U_i] is carried by K_i binary variables
//! through the fixed-point map
//!
//!   x_i = L_i + (U_i - L_i)/(2^K_i - 1) * sum_k q_{i,k} 2^(k-1)
//!
//! with bit k = 1 the least significant. Substituting that affine form into a
//! polynomial surrogate and reducing q^2 = q yields a multilinear polynomial
//! over the bit spins whose degree is bounded by the surrogate order.

use crate::error::{Error, Result};
use crate::surrogate::{DesignSpace, PolynomialSurrogate, Sense};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Coefficients with magnitude at or below this are dropped after expansion;
/// symbolic cancellations leave rounding dust behind.
pub const PRUNE_EPS: f64 = 1e-15;

/// What a spin stands for in the compiled problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "kebab-case")]
pub enum SpinRole {
    /// Bit `bit` (1 = LSB) of a named design variable.
    DesignBit { variable: String, bit: u32 },
    /// Rosenberg auxiliary representing the product of two parent spins.
    RosenbergAux { parents: (usize, usize) },
    /// Redundant precision-split copy of a parent spin.
    SplitCopy { parent: usize, copy: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub spin: usize,
    pub role: SpinRole,
    /// Block index once the problem is packed into a block-diagonal composite.
    pub block: Option<usize>,
}

/// Maps spin indices back to design bits, auxiliaries, and split copies.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VariableRegistry {
    entries: Vec<RegistryEntry>,
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    /// Appends a role and returns the new spin index.
    pub fn push(&mut self, role: SpinRole) -> usize {
        let spin = self.entries.len();
        self.entries.push(RegistryEntry {
            spin,
            role,
            block: None,
        });
        spin
    }

    pub fn push_with_block(&mut self, role: SpinRole, block: Option<usize>) -> usize {
        let spin = self.entries.len();
        self.entries.push(RegistryEntry { spin, role, block });
        spin
    }

    pub fn role(&self, spin: usize) -> &SpinRole {
        &self.entries[spin].role
    }

    /// Spin indices of a variable's design bits ordered by bit position 1..K.
    pub fn design_bits(&self, variable: &str) -> Vec<usize> {
        let mut bits: Vec<(u32, usize)> = self
            .entries
            .iter()
            .filter_map(|e| match &e.role {
                SpinRole::DesignBit { variable: v, bit } if v == variable => Some((*bit, e.spin)),
                _ => None,
            })
            .collect();
        bits.sort_unstable();
        bits.into_iter().map(|(_, s)| s).collect()
    }

    /// Checks contiguity and that every design variable owns exactly its
    /// declared bit positions.
    pub fn validate(&self, space: &DesignSpace) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.spin != i {
                return Err(Error::RegistryMismatch(format!(
                    "entry {i} has spin index {}",
                    e.spin
                )));
            }
        }
        for v in space.variables() {
            let bits = self.design_bits(&v.name);
            if bits.len() != v.bits as usize {
                return Err(Error::RegistryMismatch(format!(
                    "variable '{}' owns {} design bits, expected {}",
                    v.name,
                    bits.len(),
                    v.bits
                )));
            }
        }
        Ok(())
    }
}

/// Multilinear polynomial over binary variables. Terms map canonical sets of
/// distinct spin indices (empty set = constant) to coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoBooleanPolynomial {
    pub num_vars: usize,
    #[serde(with = "crate::ser")]
    terms: BTreeMap<Vec<usize>, f64>,
}

impl PseudoBooleanPolynomial {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut p = Self::new(num_vars);
        for (idx, c) in terms {
            p.add_term(&idx, c);
        }
        p.prune();
        p
    }

    /// Adds `coeff * prod q_idx`, canonicalizing the index set (sort + dedup,
    /// which is exactly the multilinear reduction q^2 = q).
    pub fn add_term(&mut self, indices: &[usize], coeff: f64) {
        let mut key: Vec<usize> = indices.to_vec();
        key.sort_unstable();
        key.dedup();
        debug_assert!(key.iter().all(|&i| i < self.num_vars));
        *self.terms.entry(key).or_insert(0.0) += coeff;
    }

    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() > PRUNE_EPS);
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.terms
    }

    pub fn coefficient(&self, indices: &[usize]) -> f64 {
        self.terms.get(indices).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    pub fn negate(&mut self) {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
    }

    /// Sum over terms of coefficient * prod q[i].
    pub fn eval(&self, q: &[u8]) -> Result<f64> {
        if q.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: q.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(idx, c)| {
                if idx.iter().all(|&i| q[i] != 0) {
                    *c
                } else {
                    0.0
                }
            })
            .sum())
    }
}

/// Fixed-point decode of one variable's bit vector (bit 0 of the slice is the
/// least significant).
pub fn encode_value(space: &DesignSpace, var_index: usize, bits: &[u8]) -> Result<f64> {
    let v = &space.variables()[var_index];
    if bits.len() != v.bits as usize {
        return Err(Error::DimensionMismatch {
            expected: v.bits as usize,
            got: bits.len(),
        });
    }
    let level: u64 = bits
        .iter()
        .enumerate()
        .map(|(k, &b)| (b as u64) << k)
        .sum();
    Ok(v.lower + space.step(var_index) * level as f64)
}

/// Bit pattern (LSB first) of the encodable grid value nearest to `x`.
pub fn nearest_bits(space: &DesignSpace, var_index: usize, x: f64) -> Vec<u8> {
    let v = &space.variables()[var_index];
    let max_level = (1u64 << v.bits) - 1;
    let raw = ((x - v.lower) / space.step(var_index)).round();
    let level = raw.clamp(0.0, max_level as f64) as u64;
    (0..v.bits).map(|k| ((level >> k) & 1) as u8).collect()
}

/// Substitutes the fixed-point encoding into a surrogate and expands it into
/// a multilinear polynomial over design-bit spins. `Sense::Maximize` negates
/// every coefficient so downstream solvers stay pure minimizers.
pub fn compile_hubo(
    model: &PolynomialSurrogate,
    space: &DesignSpace,
    sense: Sense,
) -> Result<(PseudoBooleanPolynomial, VariableRegistry)> {
    if model.n != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: model.n,
        });
    }

    let mut registry = VariableRegistry::new();
    for v in space.variables() {
        for bit in 1..=v.bits {
            registry.push(SpinRole::DesignBit {
                variable: v.name.clone(),
                bit,
            });
        }
    }
    let num_spins = space.total_bits();

    let mut accum: HashMap<Vec<usize>, f64> = HashMap::new();
    for (idx, &beta) in model.coefficients.iter() {
        if beta == 0.0 {
            continue;
        }
        // Expand beta * prod_v (L_v + sum_k step_v 2^(k-1) q_{v,k}).
        let mut partial: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), beta)];
        for &v in idx {
            let var = &space.variables()[v];
            let step = space.step(v);
            let offset = space.bit_offset(v);
            let mut next: Vec<(Vec<usize>, f64)> =
                Vec::with_capacity(partial.len() * (var.bits as usize + 1));
            for (set, c) in &partial {
                if var.lower != 0.0 {
                    next.push((set.clone(), c * var.lower));
                }
                for k in 0..var.bits {
                    let spin = offset + k as usize;
                    let mut grown = set.clone();
                    match grown.binary_search(&spin) {
                        Ok(_) => {} // q^2 = q
                        Err(pos) => grown.insert(pos, spin),
                    }
                    next.push((grown, c * step * f64::powi(2.0, k as i32)));
                }
            }
            partial = next;
        }
        for (set, c) in partial {
            *accum.entry(set).or_insert(0.0) += c;
        }
    }

    let sign = match sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut poly = PseudoBooleanPolynomial::new(num_spins);
    for (set, c) in accum {
        if c.abs() > PRUNE_EPS {
            poly.terms.insert(set, sign * c);
        }
    }
    Ok((poly, registry))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::{DesignVariable, RsmOrder};

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
    fn encode_endpoints() {
        let space = space_1d(6.0, 20.0, 8);
        assert_eq!(encode_value(&space, 0, &[0; 8]).unwrap(), 6.0);
        assert_eq!(encode_value(&space, 0, &[1; 8]).unwrap(), 20.0);
    }

    #[test]
    fn encode_unit_step() {
        // (U - L) / (2^3 - 1) = 1, so bits (1,0,1) = 5 decode to 5.0.
        let space = space_1d(0.0, 7.0, 3);
        assert_eq!(encode_value(&space, 0, &[1, 0, 1]).unwrap(), 5.0);
    }

    #[test]
    fn encode_rejects_wrong_length() {
        let space = space_1d(0.0, 1.0, 4);
        assert!(encode_value(&space, 0, &[0, 1]).is_err());
    }

    #[test]
    fn encode_monotone_in_level() {
        let space = space_1d(-2.0, 3.0, 6);
        let mut prev = f64::NEG_INFINITY;
        for level in 0u64..64 {
            let bits: Vec<u8> = (0..6).map(|k| ((level >> k) & 1) as u8).collect();
            let x = encode_value(&space, 0, &bits).unwrap();
            assert!(x > prev);
            prev = x;
        }
    }

    #[test]
    fn nearest_bits_round_trip() {
        let space = space_1d(6.0, 20.0, 5);
        for level in 0u64..32 {
            let bits: Vec<u8> = (0..5).map(|k| ((level >> k) & 1) as u8).collect();
            let x = encode_value(&space, 0, &bits).unwrap();
            assert_eq!(nearest_bits(&space, 0, x), bits);
        }
        // Clamping beyond the bounds.
        assert_eq!(nearest_bits(&space, 0, -100.0), vec![0; 5]);
        assert_eq!(nearest_bits(&space, 0, 100.0), vec![1; 5]);
    }

    fn model_1d(coeffs: &[(Vec<usize>, f64)], order: RsmOrder) -> PolynomialSurrogate {
        PolynomialSurrogate {
            order,
            n: 1,
            coefficients: coeffs.iter().cloned().collect(),
            r_squared: None,
            residual_norm: None,
        }
    }

    #[test]
    fn compile_identity_model() {
        let space = space_1d(0.0, 1.0, 1);
        let model = model_1d(&[(vec![0], 1.0)], RsmOrder::Two);
        let (poly, registry) = compile_hubo(&model, &space, Sense::Minimize).unwrap();
        assert_eq!(poly.terms().len(), 1);
        assert_eq!(poly.coefficient(&[0]), 1.0);
        assert_eq!(registry.len(), 1);
    }

    #[test]
    fn compile_merges_square_into_linear() {
        // x^2 on one bit: q^2 = q.
        let space = space_1d(0.0, 1.0, 1);
        let model = model_1d(&[(vec![0, 0], 1.0)], RsmOrder::Two);
        let (poly, _) = compile_hubo(&model, &space, Sense::Minimize).unwrap();
        assert_eq!(poly.coefficient(&[0]), 1.0);
        assert_eq!(poly.degree(), 1);
    }

    #[test]
    fn compile_maximize_negates() {
        let space = space_1d(0.0, 1.0, 1);
        let model = model_1d(&[(vec![0], 2.5)], RsmOrder::Two);
        let (poly, _) = compile_hubo(&model, &space, Sense::Maximize).unwrap();
        assert_eq!(poly.coefficient(&[0]), -2.5);
    }

    #[test]
    fn eval_pbp_cases() {
        let empty = PseudoBooleanPolynomial::new(3);
        assert_eq!(empty.eval(&[1, 0, 1]).unwrap(), 0.0);

        let p = PseudoBooleanPolynomial::from_terms(2, vec![(vec![0, 1], 2.0)]);
        assert_eq!(p.eval(&[1, 1]).unwrap(), 2.0);
        assert_eq!(p.eval(&[1, 0]).unwrap(), 0.0);
        assert!(p.eval(&[1]).is_err());
    }

    #[test]
    fn constructors_keep_terms_multilinear() {
        let p = PseudoBooleanPolynomial::from_terms(3, vec![(vec![2, 0, 0], 1.5)]);
        assert_eq!(p.coefficient(&[0, 2]), 1.5);
        assert!(p.terms().keys().all(|k| {
            let mut d = k.clone();
            d.dedup();
            d.len() == k.len()
        }));
    }

    #[test]
    fn registry_design_bits_complete() {
        let space = DesignSpace::new(vec![
            DesignVariable {
                name: "a".into(),
                lower: 0.0,
                upper: 1.0,
                bits: 3,
            },
            DesignVariable {
                name: "b".into(),
                lower: 0.0,
                upper: 1.0,
                bits: 2,
            },
        ])
        .unwrap();
        let model = PolynomialSurrogate {
            order: RsmOrder::Two,
            n: 2,
            coefficients: [(vec![0, 1], 1.0)].into_iter().collect(),
            r_squared: None,
            residual_norm: None,
        };
        let (_, registry) = compile_hubo(&model, &space, Sense::Minimize).unwrap();
        assert_eq!(registry.len(), 5);
        registry.validate(&space).unwrap();
        assert_eq!(registry.design_bits("a"), vec![0, 1, 2]);
        assert_eq!(registry.design_bits("b"), vec![3, 4]);
    }
}
