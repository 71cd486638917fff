//! Dense statevector simulation of a small quantum register.
//!
//! Qubit 0 is the most significant bit of a basis index, so for a register
//! of `n` qubits the basis state `|q_0 q_1 ... q_{n-1}>` lives at index
//! `q_0 * 2^{n-1} + ... + q_{n-1}`. When a register carries an ancilla it is
//! always qubit 0, which makes amplitude arrays ancilla-major.

mod gate;
mod measure;
mod qft;
mod state;

pub use gate::{apply_controlled_circuit, apply_gate, circuit_matrix, GateOp};
pub use measure::{
    effect_probability, project_data_register, sample_binomial, sample_effect, sample_index,
    sample_register, MeasurementEffect,
};
pub use qft::{build_qft_circuit, qft_gate_count, qft_matrix};
pub use state::{new_basis_state, StateVector, DEFAULT_QUBIT_CAP};

pub use num_complex::Complex64;
