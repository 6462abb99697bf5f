//! Deciding and counting solutions of polynomial systems over finite fields
//! faster than exhaustive search.
//!
//! The solver sums the indicator polynomial `F = Π (1 - P_i^{q-1})` over all
//! points. It computes a partial sum `Z_β` by recursion on probabilistic
//! polynomials and trimmed multipoint evaluation/interpolation, and it
//! decides satisfiability by isolating a unique solution with random affine
//! equations.

pub mod analysis;
pub mod error;
pub mod field;
pub mod mpoly;
pub mod oracle;
pub mod pes;
pub mod randomized;
pub mod reduction;
pub mod selftest;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
pub use field::{Elem, Field};
pub use mpoly::{Monomial, PolySystem, Polynomial, TrimmedPointSet};
pub use pes::{parse_pes, write_pes};
pub use randomized::RngStream;
pub use solver::{full_sum, partial_sum, solve_pes, SolverParams, Verdict};
pub use transform::{evaluate_trimmed, interpolate_trimmed, TrimmedEvaluation};
