use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{Error, Result};

/// A unit vector `|e>` in a subsystem, stored sparsely as `(basis index, coefficient)`.
///
/// Measuring with the effect yields the probability `|<e|psi>|^2`, so the
/// coefficients are conjugated when taking overlaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementEffect {
    num_qubits: usize,
    coefficients: Vec<(usize, Complex64)>,
}

impl MeasurementEffect {
    pub fn new(num_qubits: usize, coefficients: Vec<(usize, Complex64)>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if let Some(&(index, _)) = coefficients.iter().find(|(i, _)| *i >= dim) {
            return Err(Error::IndexOutOfRange { index, num_qubits });
        }
        let norm_sqr: f64 = coefficients.iter().map(|(_, c)| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitEffect {
                norm: norm_sqr.sqrt(),
            });
        }
        Ok(Self {
            num_qubits,
            coefficients,
        })
    }

    /// `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        Self::new(num_qubits, vec![(index, Complex64::new(1.0, 0.0))])
    }

    /// `(|a> + phase |b>) / sqrt(2)`.
    pub fn pair(num_qubits: usize, a: usize, b: usize, phase: Complex64) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(
            num_qubits,
            vec![(a, Complex64::new(h, 0.0)), (b, phase * h)],
        )
    }

    /// Single-qubit `(|0> + exp(i phi) |1>) / sqrt(2)`.
    pub fn ancilla_phase(phi: f64) -> Self {
        Self::pair(1, 0, 1, Complex64::from_polar(1.0, phi)).expect("unit by construction")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn coefficients(&self) -> &[(usize, Complex64)] {
        &self.coefficients
    }

    /// Dense coefficient vector over the subsystem.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << self.num_qubits];
        for &(i, c) in &self.coefficients {
            v[i] += c;
        }
        v
    }

    /// `<e|v>` for a vector over the same subsystem.
    fn overlap(&self, amplitudes: &[Complex64]) -> Complex64 {
        self.coefficients
            .iter()
            .map(|&(i, c)| c.conj() * amplitudes[i])
            .sum()
    }
}

/// Projects the data register (qubits `1..`) of an ancilla-plus-data state onto `effect`.
///
/// Returns the unnormalized ancilla residual `r_a = sum_d conj(e_d) psi_(a,d)`
/// and its squared norm.
pub fn project_data_register(
    state: &StateVector,
    effect: &MeasurementEffect,
) -> Result<(StateVector, f64)> {
    let data_qubits = state.num_qubits().saturating_sub(1);
    if data_qubits == 0 || effect.num_qubits() != data_qubits {
        return Err(Error::DimensionMismatch {
            expected: data_qubits,
            actual: effect.num_qubits(),
        });
    }
    let data_dim = 1usize << data_qubits;
    let amps = state.amplitudes();
    let residual = vec![
        effect.overlap(&amps[..data_dim]),
        effect.overlap(&amps[data_dim..]),
    ];
    let probability = residual.iter().map(|r| r.norm_sqr()).sum();
    Ok((StateVector::unnormalized(residual)?, probability))
}

/// Joint probability `|(<ancilla| ⊗ <data|) psi|^2`.
pub fn effect_probability(
    state: &StateVector,
    data_effect: &MeasurementEffect,
    ancilla_effect: &MeasurementEffect,
) -> Result<f64> {
    if ancilla_effect.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: ancilla_effect.num_qubits(),
        });
    }
    let (residual, _) = project_data_register(state, data_effect)?;
    Ok(ancilla_effect.overlap(residual.amplitudes()).norm_sqr())
}

/// Draws `Binomial(shots, probability)` from a generator seeded with `seed`.
pub fn sample_binomial(probability: f64, shots: u64, seed: u64) -> Result<u64> {
    if shots < 1 {
        return Err(Error::NoShots);
    }
    let p = probability.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Binomial::new(shots, p).expect("p clamped to [0, 1]");
    Ok(dist.sample(&mut rng))
}

/// Finite-shot estimate of [`effect_probability`]: `(count, count / shots)`.
pub fn sample_effect(
    state: &StateVector,
    data_effect: &MeasurementEffect,
    ancilla_effect: &MeasurementEffect,
    shots: u64,
    seed: u64,
) -> Result<(u64, f64)> {
    if shots < 1 {
        return Err(Error::NoShots);
    }
    let p = effect_probability(state, data_effect, ancilla_effect)?;
    let count = sample_binomial(p, shots, seed)?;
    Ok((count, count as f64 / shots as f64))
}

/// One computational-basis measurement outcome drawn from `rng`.
pub fn sample_index<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> usize {
    let dist = WeightedIndex::new(state.probabilities()).expect("state has nonzero norm");
    dist.sample(rng)
}

/// Outcome histogram of `shots` computational-basis measurements.
pub fn sample_register(state: &StateVector, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots < 1 {
        return Err(Error::NoShots);
    }
    let dist = WeightedIndex::new(state.probabilities()).expect("state has nonzero norm");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; state.dim()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(counts)
}
