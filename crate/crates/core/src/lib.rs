//! qubofoil — compile continuous design problems into QUBO form and solve them.
//!
//! The pipeline mirrors how Ising-machine workflows treat continuous
//! engineering objectives:
//!
//! 1. [`surrogate`] fits polynomial response surface models (order 2 or 4)
//!    to sampled design/response data.
//! 2. [`pbool`] encodes each design variable with fixed-point binary bits and
//!    expands the surrogate into a multilinear pseudo-Boolean polynomial.
//! 3. [`quadratize`] reduces degree-3/4 terms to quadratic via Rosenberg
//!    auxiliaries with automatically sized penalties, producing a QUBO.
//! 4. [`hwadapt`] quantizes coefficients to integers and splits entries that
//!    exceed the hardware coefficient range across redundant spin copies.
//! 5. [`solvers`] minimizes the QUBO (brute force, simulated annealing,
//!    mean-field Ising dynamics) or the continuous surrogate (gradient
//!    descent) and records convergence trajectories.
//! 6. [`multiobj`] scalarizes multiple objectives, packs weight scenarios
//!    into one block-diagonal problem, and extracts a Pareto front from a
//!    single solve.
//! 7. [`geometry`] decodes spin assignments back to design points and emits
//!    NACA 4-digit airfoil coordinates for reporting.

pub mod error;
pub mod geometry;
pub mod hwadapt;
pub mod multiobj;
pub mod pbool;
pub mod quadratize;
pub mod solvers;
pub mod surrogate;

mod linalg;
mod ser;

pub use error::{Error, Result};
pub use geometry::{AirfoilCoordinates, AirfoilParams, DecodedDesign};
pub use hwadapt::{HardwareProfile, QuantizedQubo, SpinBudget, SplitReport};
pub use multiobj::{ParetoPoint, ParetoSet};
pub use pbool::{PseudoBooleanPolynomial, SpinRole, VariableRegistry};
pub use quadratize::{IsingProblem, PenaltyPolicy, QuboProblem};
pub use solvers::{SaSchedule, SolveRecord};
pub use surrogate::{DesignSpace, DesignVariable, PolynomialSurrogate, RsmOrder, SampleSet, Sense};
