use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{Error, Result};

/// The gate set needed for the QFT and its ancilla-controlled variant.
///
/// Angles are in radians. `PhaseShift` and `ControlledPhase` multiply the
/// `|1>` (resp. `|11>`) component by `exp(i * angle)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateOp {
    Hadamard(usize),
    PhaseShift {
        target: usize,
        angle: f64,
    },
    ControlledPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    Swap(usize, usize),
}

impl GateOp {
    /// Qubits the gate acts on, in the order its matrix is written.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::Hadamard(q) | GateOp::PhaseShift { target: q, .. } => vec![q],
            GateOp::ControlledPhase {
                control, target, ..
            } => vec![control, target],
            GateOp::Swap(a, b) => vec![a, b],
        }
    }

    /// Same gate with every qubit index moved up by `offset`.
    pub fn shifted(self, offset: usize) -> GateOp {
        match self {
            GateOp::Hadamard(q) => GateOp::Hadamard(q + offset),
            GateOp::PhaseShift { target, angle } => GateOp::PhaseShift {
                target: target + offset,
                angle,
            },
            GateOp::ControlledPhase {
                control,
                target,
                angle,
            } => GateOp::ControlledPhase {
                control: control + offset,
                target: target + offset,
                angle,
            },
            GateOp::Swap(a, b) => GateOp::Swap(a + offset, b + offset),
        }
    }

    /// Local matrix; for two-qubit gates the first entry of [`GateOp::qubits`] is the high bit.
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        match *self {
            GateOp::Hadamard(_) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                vec![vec![h, h], vec![h, -h]]
            }
            GateOp::PhaseShift { angle, .. } => {
                vec![vec![o, z], vec![z, Complex64::from_polar(1.0, angle)]]
            }
            GateOp::ControlledPhase { angle, .. } => {
                let mut m = identity(4);
                m[3][3] = Complex64::from_polar(1.0, angle);
                m
            }
            GateOp::Swap(..) => vec![
                vec![o, z, z, z],
                vec![z, z, o, z],
                vec![z, o, z, z],
                vec![z, z, z, o],
            ],
        }
    }
}

fn identity(dim: usize) -> Vec<Vec<Complex64>> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

impl StateVector {
    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        self.apply_masked(gate, 0)
    }

    /// Applies `gate` only on basis states whose bits in `control_mask` are all set.
    fn apply_masked(&mut self, gate: &GateOp, control_mask: usize) -> Result<()> {
        let gated = |i: usize| i & control_mask == control_mask;
        match *gate {
            GateOp::Hadamard(q) => {
                let m = self.mask(q)?;
                let amps = self.amplitudes_mut();
                for i in (0..amps.len()).filter(|&i| i & m == 0 && gated(i)) {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                }
            }
            GateOp::PhaseShift { target, angle } => {
                let m = self.mask(target)?;
                let phase = Complex64::from_polar(1.0, angle);
                for (i, a) in self.amplitudes_mut().iter_mut().enumerate() {
                    if i & m != 0 && gated(i) {
                        *a *= phase;
                    }
                }
            }
            GateOp::ControlledPhase {
                control,
                target,
                angle,
            } => {
                let m = self.mask(control)? | self.mask(target)?;
                if control == target {
                    return Err(Error::InvalidQubit {
                        qubit: target,
                        num_qubits: self.num_qubits(),
                    });
                }
                let phase = Complex64::from_polar(1.0, angle);
                for (i, a) in self.amplitudes_mut().iter_mut().enumerate() {
                    if i & m == m && gated(i) {
                        *a *= phase;
                    }
                }
            }
            GateOp::Swap(a, b) => {
                let (ma, mb) = (self.mask(a)?, self.mask(b)?);
                if a == b {
                    return Ok(());
                }
                let amps = self.amplitudes_mut();
                for i in (0..amps.len()).filter(|&i| i & ma != 0 && i & mb == 0 && gated(i)) {
                    amps.swap(i, i ^ ma ^ mb);
                }
            }
        }
        Ok(())
    }
}

/// Returns `U * state` for the unitary of `gate`.
pub fn apply_gate(mut state: StateVector, gate: &GateOp) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// Applies every gate of `circuit` conditioned on `control` being `|1>`.
pub fn apply_controlled_circuit(
    mut state: StateVector,
    control: usize,
    circuit: &[GateOp],
) -> Result<StateVector> {
    let control_mask = state.mask(control)?;
    if circuit.iter().any(|g| g.qubits().contains(&control)) {
        return Err(Error::GateTouchesControl { control });
    }
    for gate in circuit {
        state.apply_masked(gate, control_mask)?;
    }
    Ok(state)
}

/// Dense `2^n x 2^n` matrix of a gate sequence, built column by column.
pub fn circuit_matrix(circuit: &[GateOp], num_qubits: usize) -> Result<Vec<Vec<Complex64>>> {
    let dim = 1usize << num_qubits;
    let mut columns = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut state = super::new_basis_state(num_qubits, j)?;
        for gate in circuit {
            state.apply(gate)?;
        }
        columns.push(state.amplitudes().to_vec());
    }
    Ok((0..dim)
        .map(|row| (0..dim).map(|col| columns[col][row]).collect())
        .collect())
}
