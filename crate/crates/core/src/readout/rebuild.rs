use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::block::BlockVector;
use super::schedule::{build_schedule, ReadoutRecord, Role, Target};
use crate::cost::CostLedger;
use crate::error::Result;
use crate::Mode;

/// Thresholds for declaring a sign test undecidable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RebuildOptions {
    /// Reference amplitude below which an exact-mode sign is ambiguous.
    pub exact_threshold: f64,
    /// Sampled-mode threshold is `sampled_factor / sqrt(shots)`.
    pub sampled_factor: f64,
}

impl Default for RebuildOptions {
    fn default() -> Self {
        Self {
            exact_threshold: 1e-9,
            sampled_factor: 3.0,
        }
    }
}

impl RebuildOptions {
    pub fn threshold(&self, mode: Mode, shots: u64) -> f64 {
        match mode {
            Mode::Exact => self.exact_threshold,
            Mode::Sampled => self.sampled_factor / (shots.max(1) as f64).sqrt(),
        }
    }
}

/// Normalized Fourier coefficients of a block plus the factor that restores
/// the unnormalized DFT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub coefficients: Vec<Complex64>,
    pub scale: f64,
    /// Coefficients whose sign test was undecidable and that were computed classically.
    pub ambiguous: BTreeSet<usize>,
    pub classical_fallbacks: usize,
    /// One-sigma shot-noise error per coefficient, in normalized units; zero in exact mode.
    pub std_errors: Vec<f64>,
}

impl SpectrumEstimate {
    /// Spectrum of an all-zero block.
    pub fn zero(len: usize) -> Self {
        Self {
            coefficients: vec![Complex64::new(0.0, 0.0); len],
            scale: 0.0,
            ambiguous: BTreeSet::new(),
            classical_fallbacks: 0,
            std_errors: vec![0.0; len],
        }
    }
}

/// `y_k = N^{-1/2} sum_j x_j exp(2 pi i j k / N)` for the normalized block.
fn classical_coefficient(x: &[f64], k: usize) -> Complex64 {
    let len = x.len();
    let sum: Complex64 = x
        .iter()
        .enumerate()
        .map(|(j, &v)| Complex64::from_polar(v, TAU * ((j * k) % len) as f64 / len as f64))
        .sum();
    sum / (len as f64).sqrt()
}

/// Rebuilds signed Fourier coefficients from a readout record.
///
/// Each projector leaves the ancilla in `(a|0> + b|1>)/sqrt(2)` with `a`
/// known from the input block and `|b| = sqrt(2 * magnitude)`. The sign of
/// `b` is whichever hypothesis best predicts the reference probability
/// `|a + s|b||^2 / 4`. When `|a|` is below the ambiguity threshold both
/// hypotheses coincide; that coefficient is then evaluated classically at a
/// cost of `N` fallback ops.
pub fn rebuild_phases(
    record: &ReadoutRecord,
    block: &BlockVector,
    options: &RebuildOptions,
    ledger: &mut CostLedger,
) -> Result<SpectrumEstimate> {
    let len = block.len();
    if block.is_zero() {
        return Ok(SpectrumEstimate::zero(len));
    }
    let schedule = build_schedule(block.n_q())?;
    let x = block.normalized();
    let threshold = options.threshold(record.mode, record.shots);

    let mut real = vec![0.0; len];
    let mut imag = vec![0.0; len];
    let mut var_real = vec![0.0; len];
    let mut var_imag = vec![0.0; len];
    let mut classical: BTreeMap<usize, Complex64> = BTreeMap::new();
    let mut ambiguous = BTreeSet::new();

    for (id, projector) in schedule.projectors().iter().enumerate() {
        let magnitude = record.get(id, Role::Magnitude)?.max(0.0);
        let reference = record.get(id, Role::Reference)?;
        let (a, unit) = match projector.target {
            Target::Zero => (x[0], 1.0),
            Target::Nyquist => (x[len / 2], 1.0),
            Target::Real(k) => ((x[k] + x[len - k]) * FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            Target::Imag(k) => ((x[k] - x[len - k]) * FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        };
        let b = (2.0 * magnitude).sqrt();
        let k = projector.target.coefficient(len);

        let fell_back = a.abs() < threshold && b >= threshold;
        let value = if fell_back {
            ambiguous.insert(k);
            let y = *classical.entry(k).or_insert_with(|| {
                ledger.fallback_ops += len as u64;
                ledger.classical_fallbacks += 1;
                classical_coefficient(&x, k)
            });
            match projector.target {
                Target::Imag(_) => y.im,
                _ => y.re,
            }
        } else {
            let miss = |s: f64| (reference - (a + s * b).powi(2) / 4.0).abs();
            let sign = if miss(-1.0) < miss(1.0) { -1.0 } else { 1.0 };
            sign * b * unit
        };

        let variance = if record.mode == Mode::Sampled && !fell_back {
            // sigma_|b| = sqrt((1 - m) / (2 shots)) from the binomial variance of m.
            unit * unit * (1.0 - magnitude).max(0.0) / (2.0 * record.shots as f64)
        } else {
            0.0
        };
        match projector.target {
            Target::Imag(k) => {
                imag[k] = value;
                var_imag[k] = variance;
            }
            _ => {
                real[k] = value;
                var_real[k] = variance;
            }
        }
    }

    let mut coefficients = vec![Complex64::new(0.0, 0.0); len];
    let mut std_errors = vec![0.0; len];
    coefficients[0] = Complex64::new(real[0], 0.0);
    std_errors[0] = var_real[0].sqrt();
    coefficients[len / 2] = Complex64::new(real[len / 2], 0.0);
    std_errors[len / 2] = var_real[len / 2].sqrt();
    for k in 1..len / 2 {
        coefficients[k] = Complex64::new(real[k], imag[k]);
        coefficients[len - k] = Complex64::new(real[k], -imag[k]);
        let sigma = (var_real[k] + var_imag[k]).sqrt();
        std_errors[k] = sigma;
        std_errors[len - k] = sigma;
    }

    Ok(SpectrumEstimate {
        coefficients,
        scale: block.norm() * (len as f64).sqrt(),
        classical_fallbacks: classical.len(),
        ambiguous,
        std_errors,
    })
}

/// `scale * coefficients`: the unnormalized DFT of the original block.
pub fn rescale_to_dft(estimate: &SpectrumEstimate) -> Vec<Complex64> {
    estimate
        .coefficients
        .iter()
        .map(|c| c * estimate.scale)
        .collect()
}
