use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::gate::GateOp;
use crate::error::{Error, Result};

/// Standard QFT circuit on `n_q` qubits with the `+` sign convention:
/// `|j> -> N^{-1/2} * sum_k exp(+2 pi i k j / N) |k>`.
///
/// Layout: for each qubit `j`, a Hadamard followed by controlled phases
/// `2 pi / 2^{k-j+1}` from every later qubit `k`, then the bit-reversal swaps.
pub fn build_qft_circuit(n_q: usize) -> Result<Vec<GateOp>> {
    if n_q < 1 {
        return Err(Error::NqTooSmall);
    }
    let mut circuit = Vec::with_capacity(qft_gate_count(n_q) as usize);
    for j in 0..n_q {
        circuit.push(GateOp::Hadamard(j));
        for k in j + 1..n_q {
            circuit.push(GateOp::ControlledPhase {
                control: k,
                target: j,
                angle: PI / (1u64 << (k - j)) as f64,
            });
        }
    }
    for j in 0..n_q / 2 {
        circuit.push(GateOp::Swap(j, n_q - 1 - j));
    }
    Ok(circuit)
}

/// `n_q` Hadamards, `n_q(n_q-1)/2` controlled phases and `floor(n_q/2)` swaps.
pub fn qft_gate_count(n_q: usize) -> u64 {
    let n = n_q as u64;
    n * (n + 1) / 2 + n / 2
}

/// The QFT written out entrywise: `U[k][j] = exp(2 pi i k j / N) / sqrt(N)`.
pub fn qft_matrix(n_q: usize) -> Vec<Vec<Complex64>> {
    let dim = 1usize << n_q;
    let scale = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|k| {
            (0..dim)
                .map(|j| Complex64::from_polar(scale, TAU * ((k * j) % dim) as f64 / dim as f64))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{circuit_matrix, new_basis_state};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn single_qubit_qft_is_hadamard() {
        let c = build_qft_circuit(1).unwrap();
        assert_eq!(c, vec![GateOp::Hadamard(0)]);
        let m = circuit_matrix(&c, 1).unwrap();
        let h = FRAC_1_SQRT_2;
        let want = [[h, h], [h, -h]];
        for r in 0..2 {
            for col in 0..2 {
                assert!((m[r][col] - Complex64::new(want[r][col], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn two_qubit_qft_of_zero_is_uniform() {
        let mut s = new_basis_state(2, 0).unwrap();
        for g in build_qft_circuit(2).unwrap() {
            s.apply(&g).unwrap();
        }
        for a in s.amplitudes() {
            assert!((a - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_qubit_entry_k1_j1_is_i_over_2() {
        // exp(2 pi i / 4) / 2 = i / 2
        let m = circuit_matrix(&build_qft_circuit(2).unwrap(), 2).unwrap();
        assert!((m[1][1] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((qft_matrix(2)[1][1] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn gate_counts() {
        for n_q in 1..=8 {
            let c = build_qft_circuit(n_q).unwrap();
            let h = c
                .iter()
                .filter(|g| matches!(g, GateOp::Hadamard(_)))
                .count();
            let cp = c
                .iter()
                .filter(|g| matches!(g, GateOp::ControlledPhase { .. }))
                .count();
            let sw = c.iter().filter(|g| matches!(g, GateOp::Swap(..))).count();
            assert_eq!((h, cp, sw), (n_q, n_q * (n_q - 1) / 2, n_q / 2));
            assert_eq!(c.len() as u64, qft_gate_count(n_q));
        }
        assert_eq!(build_qft_circuit(0), Err(Error::NqTooSmall));
    }

    #[test]
    fn circuit_is_unitary_and_matches_direct_matrix() {
        for n_q in 1..=6 {
            let u = circuit_matrix(&build_qft_circuit(n_q).unwrap(), n_q).unwrap();
            let direct = qft_matrix(n_q);
            let dim = u.len();
            for r in 0..dim {
                for c in 0..dim {
                    assert!(
                        (u[r][c] - direct[r][c]).norm() < 1e-10,
                        "n_q={n_q} ({r},{c})"
                    );
                    let dot: Complex64 = (0..dim).map(|k| u[k][r].conj() * u[k][c]).sum();
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((dot - Complex64::new(want, 0.0)).norm() < 1e-10);
                }
            }
        }
    }
}
