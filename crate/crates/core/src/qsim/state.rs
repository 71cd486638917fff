use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register `new_basis_state` will allocate unless a cap is given.
pub const DEFAULT_QUBIT_CAP: usize = 24;

pub(crate) fn norm_tolerance(dim: usize) -> f64 {
    1e-12_f64.max(dim as f64 * 1e-15)
}

/// Complex amplitudes of an `n`-qubit register, `2^n` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
    unnormalized: bool,
}

/// `|index>` on `num_qubits` qubits, capped at [`DEFAULT_QUBIT_CAP`].
pub fn new_basis_state(num_qubits: usize, index: usize) -> Result<StateVector> {
    StateVector::basis_with_cap(num_qubits, index, DEFAULT_QUBIT_CAP)
}

impl StateVector {
    pub fn basis_with_cap(num_qubits: usize, index: usize, cap: usize) -> Result<Self> {
        check_size(num_qubits, cap)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, num_qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
            unnormalized: false,
        })
    }

    /// Equal superposition over all `2^n` basis states.
    pub fn uniform(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits, DEFAULT_QUBIT_CAP)?;
        let dim = 1usize << num_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: vec![amp; dim],
            unnormalized: false,
        })
    }

    /// Wraps a normalized amplitude vector whose length is a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        check_size(num_qubits, DEFAULT_QUBIT_CAP)?;
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > norm_tolerance(amplitudes.len()) {
            return Err(Error::NotNormalized {
                norm: norm_sqr.sqrt(),
            });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
            unnormalized: false,
        })
    }

    /// Wraps a projection residual; the norm is whatever the projection left.
    pub fn unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        Ok(Self {
            num_qubits,
            amplitudes,
            unnormalized: true,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn is_unnormalized(&self) -> bool {
        self.unnormalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; the qubits of `self` become the most significant ones.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let num_qubits = self.num_qubits + other.num_qubits;
        check_size(num_qubits, DEFAULT_QUBIT_CAP)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
            unnormalized: self.unnormalized || other.unnormalized,
        })
    }

    /// Bit mask selecting `qubit` inside a basis index.
    pub(crate) fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.num_qubits {
            return Err(Error::InvalidQubit {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(1 << (self.num_qubits - 1 - qubit))
    }
}

fn check_size(num_qubits: usize, cap: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::EmptyRegister);
    }
    if num_qubits > cap {
        return Err(Error::TooManyQubits {
            requested: num_qubits,
            cap,
        });
    }
    Ok(())
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}
