//! Exact desk-scale simulation of a state-independent contextuality test
//! on small quantum ensembles.
//!
//! The pieces, bottom up:
//!
//! - [`linalg`]: dense complex matrices for 1-4 qubits, partial traces,
//!   Kraus channels, and a self-contained Hermitian eigensolver.
//! - [`pauli`]: exact symbolic Pauli-string algebra with phase tracking.
//! - [`square`]: the Peres-Mermin square, its verification, the quantum
//!   value beta = 6, and the brute-forced noncontextual bound beta <= 4.
//! - [`dqc1`]: the one-clean-qubit protocol that reads correlations out of
//!   a probe qubit's X coherence, with an efficiency/mixedness
//!   equivalence check.
//! - [`noise`]: per-gate three-qubit dephasing and the beta-versus-t/T2
//!   degradation curve.
//! - [`nmr`]: the three-spin malonic-acid Hamiltonian, free induction
//!   decay, and spectrum.
//! - [`cli`]: the `pmsim` command-line tool over all of the above.

pub mod cli;
pub mod dqc1;
pub mod error;
pub mod linalg;
pub mod nmr;
pub mod noise;
pub mod pauli;
pub mod square;

pub use error::{Error, Result};
