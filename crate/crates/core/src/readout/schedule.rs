use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::block::{prepare_block_state, BlockVector};
use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::qsim::{
    apply_controlled_circuit, build_qft_circuit, effect_probability, sample_binomial, GateOp,
    MeasurementEffect, StateVector,
};
use crate::{seed, Mode};

/// Which part of which Fourier coefficient a projector isolates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    /// `y_0`, always real.
    Zero,
    /// `y_{N/2}`, always real.
    Nyquist,
    /// `Re y_k` for `0 < k < N/2`.
    Real(usize),
    /// `Im y_k` for `0 < k < N/2`.
    Imag(usize),
}

impl Target {
    /// Index of the coefficient this target belongs to, for a block of size `len`.
    pub fn coefficient(&self, len: usize) -> usize {
        match *self {
            Target::Zero => 0,
            Target::Nyquist => len / 2,
            Target::Real(k) | Target::Imag(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Ancilla measured in `|1>`: the squared magnitude of the transformed branch.
    Magnitude,
    /// Ancilla measured in `(|0> + e^{i phi}|1>)/sqrt(2)`: interference with the known input.
    Reference,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Magnitude => "magnitude",
            Role::Reference => "reference",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub effect: MeasurementEffect,
    pub target: Target,
    /// Phase of the reference ancilla effect: 0, or pi/2 for imaginary parts.
    pub ancilla_phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEntry {
    pub projector: usize,
    pub role: Role,
    pub ancilla_phase: f64,
    pub target: Target,
}

impl ScheduleEntry {
    pub fn ancilla_effect(&self) -> MeasurementEffect {
        match self.role {
            Role::Magnitude => MeasurementEffect::basis(1, 1).expect("valid basis state"),
            Role::Reference => MeasurementEffect::ancilla_phase(self.ancilla_phase),
        }
    }
}

/// `N` data projectors, each measured with a magnitude and a reference ancilla effect.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutSchedule {
    n_q: usize,
    projectors: Vec<Projector>,
    entries: Vec<ScheduleEntry>,
}

impl ReadoutSchedule {
    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }
}

/// Projectors `|0>`, `|N/2>`, then `(|k> + |N-k>)/sqrt(2)` and
/// `(|k> - |N-k>)/sqrt(2)` for each `k = 1 .. N/2 - 1`.
pub fn build_schedule(n_q: usize) -> Result<ReadoutSchedule> {
    if n_q < 1 {
        return Err(Error::NqTooSmall);
    }
    let len = 1usize << n_q;
    let one = Complex64::new(1.0, 0.0);
    let mut projectors = vec![
        Projector {
            effect: MeasurementEffect::basis(n_q, 0)?,
            target: Target::Zero,
            ancilla_phase: 0.0,
        },
        Projector {
            effect: MeasurementEffect::basis(n_q, len / 2)?,
            target: Target::Nyquist,
            ancilla_phase: 0.0,
        },
    ];
    for k in 1..len / 2 {
        projectors.push(Projector {
            effect: MeasurementEffect::pair(n_q, k, len - k, one)?,
            target: Target::Real(k),
            ancilla_phase: 0.0,
        });
        projectors.push(Projector {
            effect: MeasurementEffect::pair(n_q, k, len - k, -one)?,
            target: Target::Imag(k),
            ancilla_phase: FRAC_PI_2,
        });
    }
    let entries = projectors
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            [Role::Magnitude, Role::Reference].map(|role| ScheduleEntry {
                projector: i,
                role,
                ancilla_phase: p.ancilla_phase,
                target: p.target,
            })
        })
        .collect();
    Ok(ReadoutSchedule {
        n_q,
        projectors,
        entries,
    })
}

/// Measured joint probabilities keyed by `(projector, role)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutRecord {
    pub measurements: BTreeMap<(usize, Role), f64>,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
}

impl ReadoutRecord {
    pub fn get(&self, projector: usize, role: Role) -> Result<f64> {
        self.measurements
            .get(&(projector, role))
            .copied()
            .ok_or(Error::IncompleteRecord {
                projector,
                role: role.as_str(),
            })
    }
}

/// `(|0>|X> + |1>QFT|X>)/sqrt(2)`: Hadamard on the ancilla, then the QFT on
/// the data register controlled by it.
pub(crate) fn controlled_qft_state(
    data: &StateVector,
    ledger: &mut CostLedger,
) -> Result<StateVector> {
    let n_q = data.num_qubits();
    let mut joint = crate::qsim::new_basis_state(1, 0)?.tensor(data)?;
    joint.apply(&GateOp::Hadamard(0))?;
    let circuit: Vec<GateOp> = build_qft_circuit(n_q)?
        .into_iter()
        .map(|g| g.shifted(1))
        .collect();
    ledger.quantum_gate_units += circuit.len() as u64;
    apply_controlled_circuit(joint, 0, &circuit)
}

/// Runs the node on `block` and fills every schedule entry.
///
/// Loads the block (charging preparation units), applies the
/// ancilla-controlled QFT, and evaluates each `(projector, role)` joint
/// probability, exactly or as a `shots`-sample binomial estimate. Each
/// entry's sampler is seeded from `(seed, entry index)`.
pub fn execute_schedule(
    block: &BlockVector,
    schedule: &ReadoutSchedule,
    mode: Mode,
    shots: u64,
    seed: u64,
    ledger: &mut CostLedger,
) -> Result<ReadoutRecord> {
    if block.n_q() != schedule.n_q() {
        return Err(Error::DimensionMismatch {
            expected: 1 << schedule.n_q(),
            actual: block.len(),
        });
    }
    if mode == Mode::Sampled && shots < 1 {
        return Err(Error::NoShots);
    }
    let data = prepare_block_state(block, ledger)?;
    let joint = controlled_qft_state(&data, ledger)?;
    let mut measurements = BTreeMap::new();
    for (i, entry) in schedule.entries().iter().enumerate() {
        let projector = &schedule.projectors()[entry.projector];
        let exact = effect_probability(&joint, &projector.effect, &entry.ancilla_effect())?;
        let p = match mode {
            Mode::Exact => exact,
            Mode::Sampled => {
                let count = sample_binomial(exact, shots, seed::derive(seed, i as u64))?;
                count as f64 / shots as f64
            }
        };
        measurements.insert((entry.projector, entry.role), p);
    }
    ledger.measurement_units += schedule.entries().len() as u64;
    Ok(ReadoutRecord {
        measurements,
        mode,
        shots: if mode == Mode::Exact { 0 } else { shots },
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn dense(e: &MeasurementEffect) -> Vec<Complex64> {
        e.to_dense()
    }

    #[test]
    fn schedule_for_four_points() {
        let s = build_schedule(2).unwrap();
        assert_eq!(s.projectors().len(), 4);
        assert_eq!(s.entries().len(), 8);
        let h = FRAC_1_SQRT_2;
        let c = |v: f64| Complex64::new(v, 0.0);
        let want = [
            vec![c(1.0), c(0.0), c(0.0), c(0.0)],
            vec![c(0.0), c(0.0), c(1.0), c(0.0)],
            vec![c(0.0), c(h), c(0.0), c(h)],
            vec![c(0.0), c(h), c(0.0), c(-h)],
        ];
        for (p, w) in s.projectors().iter().zip(&want) {
            let got = dense(&p.effect);
            for (a, b) in got.iter().zip(w) {
                assert!((a - b).norm() < 1e-15);
            }
        }
        assert_eq!(s.projectors()[3].ancilla_phase, FRAC_PI_2);
        assert_eq!(s.entries()[0].role, Role::Magnitude);
        assert_eq!(s.entries()[1].role, Role::Reference);
    }

    #[test]
    fn schedule_sizes() {
        let s = build_schedule(1).unwrap();
        assert_eq!(s.projectors().len(), 2);
        assert_eq!(s.entries().len(), 4);
        assert_eq!(s.projectors()[1].target, Target::Nyquist);
        let s = build_schedule(3).unwrap();
        assert_eq!(s.projectors().len(), 2 + 2 * (8 / 2 - 1));
        assert_eq!(s.entries().len(), 16);
        assert_eq!(build_schedule(0), Err(Error::NqTooSmall));
    }

    #[test]
    fn projectors_are_orthonormal() {
        for n_q in 1..=5 {
            let s = build_schedule(n_q).unwrap();
            let vs: Vec<Vec<Complex64>> = s.projectors().iter().map(|p| dense(&p.effect)).collect();
            for (i, a) in vs.iter().enumerate() {
                for (j, b) in vs.iter().enumerate() {
                    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot.re - want).abs() < 1e-12 && dot.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn delta_block_readout() {
        let block = BlockVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let s = build_schedule(2).unwrap();
        let mut ledger = CostLedger::default();
        let r = execute_schedule(&block, &s, Mode::Exact, 0, 0, &mut ledger).unwrap();
        // y_0 = 1/2, so |y_0|^2 / 2 = 1/8.
        assert!((r.get(0, Role::Magnitude).unwrap() - 0.125).abs() < 1e-15);
        assert!(r.get(3, Role::Magnitude).unwrap().abs() < 1e-15);
        assert_eq!(ledger.quantum_gate_units, 4);
        assert_eq!(ledger.measurement_units, 8);
        assert_eq!(ledger.state_prep_units, 16);
        assert_eq!(r.shots, 0);
    }

    #[test]
    fn imaginary_magnitude() {
        // x = (1, -1, 0, 0)/sqrt(2); y_1 = (1 - i)/(2 sqrt 2), so |y_1b|^2 = 1/8.
        let block = BlockVector::new(vec![1.0, -1.0, 0.0, 0.0]).unwrap();
        let s = build_schedule(2).unwrap();
        let mut ledger = CostLedger::default();
        let r = execute_schedule(&block, &s, Mode::Exact, 0, 0, &mut ledger).unwrap();
        assert!((r.get(3, Role::Magnitude).unwrap() - 0.125).abs() < 1e-15);
        assert!((r.get(3, Role::Reference).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn size_mismatch() {
        let block = BlockVector::new(vec![1.0; 8]).unwrap();
        let s = build_schedule(2).unwrap();
        let mut ledger = CostLedger::default();
        assert!(matches!(
            execute_schedule(&block, &s, Mode::Exact, 0, 0, &mut ledger),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sampled_record_is_seeded() {
        let block = BlockVector::new(vec![0.3, -1.2, 0.8, 0.1]).unwrap();
        let s = build_schedule(2).unwrap();
        let mut ledger = CostLedger::default();
        let a = execute_schedule(&block, &s, Mode::Sampled, 1000, 5, &mut ledger).unwrap();
        let b = execute_schedule(&block, &s, Mode::Sampled, 1000, 5, &mut ledger).unwrap();
        let c = execute_schedule(&block, &s, Mode::Sampled, 1000, 6, &mut ledger).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.measurements.values().all(|&p| (0.0..=1.0).contains(&p)));
        assert_eq!(
            execute_schedule(&block, &s, Mode::Sampled, 0, 5, &mut ledger),
            Err(Error::NoShots)
        );
    }
}
