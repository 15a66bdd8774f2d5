//! Shared generators and independent oracles for the integration tests.
//!
//! The brute-force helpers here deliberately re-derive energies by direct
//! summation in plain counting order so they stay independent of the
//! library's Gray-code scan and solver paths.

#![allow(dead_code)]

use qubofoil::pbool::{SpinRole, VariableRegistry};
use qubofoil::quadratize::QuboProblem;
use qubofoil::surrogate::{DesignSpace, DesignVariable, PolynomialSurrogate, RsmOrder};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn registry_of(n: usize) -> VariableRegistry {
    let mut r = VariableRegistry::new();
    for bit in 0..n {
        r.push(SpinRole::DesignBit {
            variable: "q".into(),
            bit: bit as u32 + 1,
        });
    }
    r
}

pub fn random_space(rng: &mut ChaCha8Rng, n: usize, bits: &[u32]) -> DesignSpace {
    assert_eq!(bits.len(), n);
    let vars = (0..n)
        .map(|i| {
            let lower = rng.gen_range(-3.0..2.0);
            let width = rng.gen_range(0.5..4.0);
            DesignVariable {
                name: format!("v{i}"),
                lower,
                upper: lower + width,
                bits: bits[i],
            }
        })
        .collect();
    DesignSpace::new(vars).unwrap()
}

pub fn random_model(rng: &mut ChaCha8Rng, n: usize, order: RsmOrder) -> PolynomialSurrogate {
    let coefficients: BTreeMap<Vec<usize>, f64> =
        qubofoil::surrogate::monomial_basis(n, order.degree())
            .into_iter()
            .map(|idx| (idx, rng.gen_range(-1.0..1.0)))
            .collect();
    PolynomialSurrogate {
        order,
        n,
        coefficients,
        r_squared: None,
        residual_norm: None,
    }
}

pub fn random_qubo(rng: &mut ChaCha8Rng, n: usize, magnitude: f64, density: f64) -> QuboProblem {
    let mut q = QuboProblem::new(n, registry_of(n));
    for i in 0..n {
        for j in i..n {
            if rng.gen::<f64>() < density {
                q.add(i, j, rng.gen_range(-magnitude..magnitude));
            }
        }
    }
    q
}

/// All binary assignments of n spins in counting order.
pub fn assignments(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u64..(1u64 << n)).map(move |v| (0..n).map(|b| ((v >> b) & 1) as u8).collect())
}

/// Independent exhaustive minimizer: direct summation per assignment.
pub fn exhaustive_min(q: &QuboProblem) -> (f64, Vec<Vec<u8>>) {
    let mut best = f64::INFINITY;
    let mut argmins: Vec<Vec<u8>> = Vec::new();
    for a in assignments(q.n) {
        let mut e = q.offset;
        for (&(i, j), &v) in q.entries() {
            if a[i] != 0 && a[j] != 0 {
                e += v;
            }
        }
        if e < best {
            best = e;
            argmins = vec![a];
        } else if e == best {
            argmins.push(a);
        }
    }
    (best, argmins)
}

/// Independent fixed-point decode: bits of each variable taken from its
/// contiguous spin range, LSB first.
pub fn decode_bits(space: &DesignSpace, assignment: &[u8]) -> Vec<f64> {
    let mut x = Vec::with_capacity(space.len());
    let mut offset = 0usize;
    for (i, v) in space.variables().iter().enumerate() {
        let mut level = 0u64;
        for k in 0..v.bits as usize {
            level |= (assignment[offset + k] as u64) << k;
        }
        x.push(v.lower + space.step(i) * level as f64);
        offset += v.bits as usize;
    }
    x
}
