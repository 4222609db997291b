//! Genuine tripartite entanglement detection for three-qubit states, applied
//! to the thermal state of a four-spin star network.
//!
//! - [`linalg`]: dense complex matrices and a Jacobi Hermitian eigensolver
//! - [`qubits`]: kets, density operators, partial trace and transpose
//! - [`witness`]: the biseparability-exclusion witness and its `I^(N)` detector
//! - [`negativity`]: partial-transpose negativities
//! - [`spinstar`]: Hamiltonian, closed-form spectrum, Gibbs and peripheral states
//! - [`cli`]: parameter sweeps and CSV output behind the binary

pub mod cli;
pub mod error;
pub mod linalg;
pub mod negativity;
pub mod qubits;
pub mod spinstar;
pub mod witness;

pub use error::{Error, Result};
