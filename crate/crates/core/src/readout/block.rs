use num_complex::Complex64;

use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::qsim::StateVector;

/// A real vector of `2^{n_q}` entries together with its Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    values: Vec<f64>,
    norm: f64,
}

impl BlockVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(values.len()));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(Self { values, norm })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn n_q(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    /// `values / norm`.
    pub fn normalized(&self) -> Vec<f64> {
        self.values.iter().map(|v| v / self.norm).collect()
    }
}

/// Loads `values / norm` into an `n_q`-qubit register.
///
/// The state preparation itself is not simulated gate by gate; it is charged
/// as `n_q^2 * 2^{n_q}` preparation units.
pub fn prepare_block_state(block: &BlockVector, ledger: &mut CostLedger) -> Result<StateVector> {
    if block.is_zero() {
        return Err(Error::ZeroBlock);
    }
    let amplitudes = block
        .normalized()
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    let state = StateVector::from_amplitudes(amplitudes)?;
    let n_q = block.n_q() as u64;
    ledger.state_prep_units += n_q * n_q * block.len() as u64;
    Ok(state)
}
