//! Semi-quantum DFT: decimation-in-time down to `2^{n_q}`-point leaves, a
//! quantum node per leaf, and `n - n_q` classical butterfly levels on top.
//!
//! Sign convention throughout is `y_k = sum_j x_j exp(+2 pi i j k / N)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostLedger, DEFAULT_PRECISION_BITS};
use crate::error::{Error, Result};
use crate::readout::{build_schedule, execute_schedule, rebuild_phases, rescale_to_dft};
use crate::readout::{BlockVector, RebuildOptions};
use crate::{seed, Mode};

/// `2^n` real samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    values: Vec<f64>,
    n: usize,
}

impl RealSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(values.len()));
        }
        let n = values.len().trailing_zeros() as usize;
        Ok(Self { values, n })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `2^n` complex Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumVector {
    pub values: Vec<Complex64>,
}

impl SpectrumVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `|self_k - other_k|`.
    pub fn max_deviation(&self, other: &SpectrumVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Roots of unity `exp(2 pi i k / N)` for the largest transform size; smaller
/// levels index it with a stride.
#[derive(Debug, Clone)]
pub struct TwiddleTable {
    roots: Vec<Complex64>,
}

impl TwiddleTable {
    pub fn new(n: usize) -> Self {
        let size = 1usize << n;
        let roots = (0..size)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / size as f64))
            .collect();
        Self { roots }
    }

    pub fn size(&self) -> usize {
        self.roots.len()
    }

    /// `omega_size^k`; `size` must divide the table size.
    pub fn root(&self, size: usize, k: usize) -> Complex64 {
        debug_assert!(size > 0 && self.roots.len().is_multiple_of(size));
        let stride = self.roots.len() / size;
        self.roots[(k % size) * stride]
    }
}

/// O(N^2) reference transform.
pub fn direct_dft(signal: &RealSignal) -> SpectrumVector {
    let size = signal.len();
    let twiddles = TwiddleTable::new(signal.n());
    let values = (0..size)
        .map(|k| {
            signal
                .values()
                .iter()
                .enumerate()
                .map(|(j, &x)| twiddles.root(size, (j * k) % size) * x)
                .sum()
        })
        .collect();
    SpectrumVector { values }
}

/// Iterative radix-2 decimation-in-time FFT; charges one op per output per level.
pub fn classical_fft(signal: &RealSignal, ledger: &mut CostLedger) -> SpectrumVector {
    let size = signal.len();
    let n = signal.n();
    let twiddles = TwiddleTable::new(n);
    let mut a: Vec<Complex64> = (0..size)
        .map(|i| Complex64::new(signal.values()[reverse_bits(i, n)], 0.0))
        .collect();
    let mut len = 2;
    while len <= size {
        let half = len / 2;
        for chunk in a.chunks_mut(len) {
            for k in 0..half {
                let t = twiddles.root(len, k) * chunk[k + half];
                let e = chunk[k];
                chunk[k] = e + t;
                chunk[k + half] = e - t;
            }
        }
        ledger.classical_ops += size as u64;
        len *= 2;
    }
    SpectrumVector { values: a }
}

fn reverse_bits(i: usize, bits: usize) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS as usize - bits)
    }
}

/// Splits the signal into `2^{n - n_q}` leaves of `2^{n_q}` samples.
///
/// Leaf `r` holds the samples `x_j` with `j = reverse(r) (mod 2^{n - n_q})`,
/// in increasing `j`, so adjacent leaves are the even and odd halves of the
/// next level up.
pub fn decimate_leaves(signal: &RealSignal, n_q: usize) -> Result<Vec<Vec<f64>>> {
    let n = signal.n();
    if n_q > n {
        return Err(Error::NqExceedsN { n_q, n });
    }
    let levels = n - n_q;
    let stride = 1usize << levels;
    Ok((0..stride)
        .map(|r| {
            let residue = reverse_bits(r, levels);
            signal.values()[residue..]
                .iter()
                .step_by(stride)
                .copied()
                .collect()
        })
        .collect())
}

/// `y_k = even_{k mod N/2} + omega_N^k odd_{k mod N/2}` for `k = 0 .. N-1`.
pub fn butterfly_combine(
    even: &SpectrumVector,
    odd: &SpectrumVector,
    twiddles: &TwiddleTable,
    ledger: &mut CostLedger,
) -> Result<SpectrumVector> {
    if even.len() != odd.len() {
        return Err(Error::DimensionMismatch {
            expected: even.len(),
            actual: odd.len(),
        });
    }
    let half = even.len();
    let size = 2 * half;
    if size > twiddles.size() {
        return Err(Error::DimensionMismatch {
            expected: twiddles.size(),
            actual: size,
        });
    }
    let values = (0..size)
        .map(|k| even.values[k % half] + twiddles.root(size, k) * odd.values[k % half])
        .collect();
    ledger.classical_ops += size as u64;
    Ok(SpectrumVector { values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FftPlan {
    pub n_q: usize,
    pub mode: Mode,
    pub shots: u64,
    pub master_seed: u64,
    pub rebuild: RebuildOptions,
    /// Charge `2^n` data-movement ops per decimation level.
    pub charge_data_movement: bool,
    pub precision_bits: u64,
}

impl FftPlan {
    pub fn exact(n_q: usize) -> Self {
        Self {
            n_q,
            mode: Mode::Exact,
            shots: 0,
            master_seed: 0,
            rebuild: RebuildOptions::default(),
            charge_data_movement: false,
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }

    pub fn sampled(n_q: usize, shots: u64, master_seed: u64) -> Self {
        Self {
            mode: Mode::Sampled,
            shots,
            master_seed,
            ..Self::exact(n_q)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DftOutcome {
    pub spectrum: SpectrumVector,
    /// One-sigma shot-noise error per output coefficient; zero in exact mode.
    pub std_errors: Vec<f64>,
    pub ledger: CostLedger,
    /// Leaves that were all zero and skipped the quantum node.
    pub zero_leaves: usize,
}

struct Partial {
    values: Vec<Complex64>,
    variances: Vec<f64>,
}

fn evaluate_leaf(leaf: Vec<f64>, index: usize, plan: &FftPlan) -> Result<(Partial, CostLedger)> {
    let mut ledger = CostLedger::default();
    let len = leaf.len();
    let block = BlockVector::new(leaf)?;
    if block.is_zero() {
        let partial = Partial {
            values: vec![Complex64::new(0.0, 0.0); len],
            variances: vec![0.0; len],
        };
        return Ok((partial, ledger));
    }
    let schedule = build_schedule(block.n_q())?;
    let seed = seed::derive(plan.master_seed, index as u64);
    let record = execute_schedule(&block, &schedule, plan.mode, plan.shots, seed, &mut ledger)?;
    let estimate = rebuild_phases(&record, &block, &plan.rebuild, &mut ledger)?;
    ledger.node_accesses += 1;
    let variances = estimate
        .std_errors
        .iter()
        .map(|s| (s * estimate.scale).powi(2))
        .collect();
    Ok((
        Partial {
            values: rescale_to_dft(&estimate),
            variances,
        },
        ledger,
    ))
}

/// DFT of `signal` on a semi-quantum machine with `(plan.n_q + 1)`-qubit nodes.
///
/// `n_q = 0` runs the classical FFT. Otherwise each nonzero leaf is
/// evaluated on its own node (seeded from `(master_seed, leaf index)`, so the
/// result does not depend on evaluation order) and the leaf spectra are
/// merged by `n - n_q` butterfly levels.
pub fn semi_quantum_dft(signal: &RealSignal, plan: &FftPlan) -> Result<DftOutcome> {
    let n = signal.n();
    if plan.n_q > n {
        return Err(Error::NqExceedsN { n_q: plan.n_q, n });
    }
    if plan.mode == Mode::Sampled && plan.shots < 1 {
        return Err(Error::NoShots);
    }
    let mut ledger = CostLedger::default();
    ledger.set_memory(n, plan.n_q, plan.precision_bits);
    let levels = n - plan.n_q;
    if plan.charge_data_movement && plan.n_q > 0 {
        ledger.data_movement_ops += levels as u64 * signal.len() as u64;
    }

    if plan.n_q == 0 {
        let spectrum = classical_fft(signal, &mut ledger);
        return Ok(DftOutcome {
            std_errors: vec![0.0; spectrum.len()],
            spectrum,
            ledger,
            zero_leaves: 0,
        });
    }

    let leaves = decimate_leaves(signal, plan.n_q)?;
    let zero_leaves = leaves
        .iter()
        .filter(|l| l.iter().all(|&v| v == 0.0))
        .count();
    let evaluated: Vec<(Partial, CostLedger)> = leaves
        .into_par_iter()
        .enumerate()
        .map(|(i, leaf)| evaluate_leaf(leaf, i, plan))
        .collect::<Result<_>>()?;
    let mut level = Vec::with_capacity(evaluated.len());
    for (partial, leaf_ledger) in evaluated {
        ledger.absorb(&leaf_ledger);
        level.push(partial);
    }

    let twiddles = TwiddleTable::new(n);
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len() / 2);
        let mut pairs = level.into_iter();
        while let (Some(even), Some(odd)) = (pairs.next(), pairs.next()) {
            let half = even.values.len();
            let combined = butterfly_combine(
                &SpectrumVector {
                    values: even.values,
                },
                &SpectrumVector { values: odd.values },
                &twiddles,
                &mut ledger,
            )?;
            let variances = (0..2 * half)
                .map(|k| even.variances[k % half] + odd.variances[k % half])
                .collect();
            next.push(Partial {
                values: combined.values,
                variances,
            });
        }
        level = next;
    }
    let root = level.pop().expect("at least one leaf");
    Ok(DftOutcome {
        spectrum: SpectrumVector {
            values: root.values,
        },
        std_errors: root.variances.iter().map(|v| v.sqrt()).collect(),
        ledger,
        zero_leaves,
    })
}
