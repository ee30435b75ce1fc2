//! Dense density-matrix simulation with Kraus noise, mid-circuit measurement,
//! classical feed-forward and seeded shot sampling.

mod channel;
mod circuit;
mod counts;
mod density;
mod exec;
mod gate;
mod kernel;

pub use channel::NoiseChannel;
pub use circuit::{Basis, Circuit, Op};
pub use counts::{multinomial, CountsTable};
pub use density::{hermitian_eigenvalues, DensityMatrix, Tolerance};
pub use exec::{outcome_probabilities, run_branch, run_exact, run_exact_reduced, sample_counts, Branch, Start};
pub use gate::{Gate, GateKind};

/// Largest supported register.
pub const MAX_QUBITS: usize = 12;
