//! Partitioned Grover search: the domain `0..2^n` is cut into `2^{n-n_q}`
//! contiguous sublists, each searched on an `n_q`-qubit node.
//!
//! The number of solutions per sublist is unknown to the node. A node search
//! runs rounds with guesses `M = 1, 2, 4, .., 2^{n_q}` on the `n_q`-qubit
//! register, then one round on the register doubled by the ancilla, where the
//! marked fraction is halved and a single iteration is exact when half the
//! sublist is marked. Every candidate is verified classically. Rejected and
//! found indices go into a per-sublist exclusion set, and the sublist is
//! searched again until a node search comes back empty.
//!
//! Oracle queries are split: the headline counter holds the iterations of
//! successful rounds (or of the first round when a sublist has no solution);
//! every other iteration is charged to `retry_oracle_queries`.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostLedger, DEFAULT_PRECISION_BITS};
use crate::error::{Error, Result};
use crate::qsim::{sample_index, StateVector};
use crate::{seed, Mode};

/// Exact-mode argmax ties within this margin go to the lowest index.
const TIE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOracle {
    n: usize,
    solutions: BTreeSet<usize>,
}

impl SearchOracle {
    pub fn new(n: usize, solutions: impl IntoIterator<Item = usize>) -> Result<Self> {
        let solutions: BTreeSet<usize> = solutions.into_iter().collect();
        if let Some(&bad) = solutions.iter().find(|&&x| x >> n != 0) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                num_qubits: n,
            });
        }
        Ok(Self { n, solutions })
    }

    pub fn from_predicate(n: usize, membership: impl Fn(usize) -> bool) -> Self {
        let solutions = (0..1usize << n).filter(|&x| membership(x)).collect();
        Self { n, solutions }
    }

    /// `m` distinct solutions drawn uniformly from `0..2^n`.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        let size = 1usize << n;
        if m > size {
            return Err(Error::GuessOutOfRange { guess: m, size });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            n,
            solutions: index::sample(&mut rng, size, m).into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn is_member(&self, x: usize) -> bool {
        self.solutions.contains(&x)
    }

    pub fn solution_count(&self) -> usize {
        self.solutions.len()
    }

    pub fn solutions(&self) -> &BTreeSet<usize> {
        &self.solutions
    }
}

/// Sublist `r` covers global indices `[r 2^{n_q}, (r+1) 2^{n_q})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublistPartition {
    pub n: usize,
    pub n_q: usize,
}

impl SublistPartition {
    pub fn new(n: usize, n_q: usize) -> Result<Self> {
        if n_q > n {
            return Err(Error::NqExceedsN { n_q, n });
        }
        Ok(Self { n, n_q })
    }

    pub fn sublist_count(&self) -> usize {
        1 << (self.n - self.n_q)
    }

    pub fn sublist_size(&self) -> usize {
        1 << self.n_q
    }

    pub fn offset(&self, r: usize) -> usize {
        r << self.n_q
    }

    pub fn range(&self, r: usize) -> std::ops::Range<usize> {
        self.offset(r)..self.offset(r + 1)
    }
}

/// Decomposition `|state> = alpha |alpha> + beta |beta>` into the uniform
/// superpositions over unmarked and marked indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchGeometry {
    pub theta: f64,
    pub alpha_proj: f64,
    pub beta_proj: f64,
}

impl SearchGeometry {
    /// Real projections of a state with real amplitudes; a projection onto an
    /// empty class is 0.
    pub fn of(state: &StateVector, marked: impl Fn(usize) -> bool) -> Self {
        let dim = state.dim();
        let (mut alpha, mut beta, mut m) = (0.0, 0.0, 0usize);
        for (i, a) in state.amplitudes().iter().enumerate() {
            if marked(i) {
                beta += a.re;
                m += 1;
            } else {
                alpha += a.re;
            }
        }
        let proj = |sum: f64, count: usize| {
            if count == 0 {
                0.0
            } else {
                sum / (count as f64).sqrt()
            }
        };
        Self {
            theta: (m as f64 / dim as f64).sqrt().asin(),
            alpha_proj: proj(alpha, dim - m),
            beta_proj: proj(beta, m),
        }
    }
}

/// Result of one node search on one sublist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverOutcome {
    pub sublist: usize,
    /// Global index of the last candidate, if any round produced one.
    pub measured: Option<usize>,
    pub verified: bool,
    /// Grover iterations summed over all rounds.
    pub iterations: u64,
    /// Iterations of the first round.
    pub first_round_iterations: u64,
    /// Iterations of the successful round; 0 when not verified.
    pub winning_iterations: u64,
    /// Rounds after the first.
    pub retries: u32,
}

/// Applies `G = (2|psi><psi| - I) O` in place, `|psi>` uniform.
fn grover_in_place(amps: &mut [Complex64], marked: &impl Fn(usize) -> bool) {
    for (i, a) in amps.iter_mut().enumerate() {
        if marked(i) {
            *a = -*a;
        }
    }
    let mean = amps.iter().sum::<Complex64>() / amps.len() as f64;
    for a in amps.iter_mut() {
        *a = 2.0 * mean - *a;
    }
}

/// One Grover iteration; charges one quantum oracle query.
pub fn grover_operator_apply(
    state: &StateVector,
    marked: impl Fn(usize) -> bool,
    ledger: &mut CostLedger,
) -> StateVector {
    let mut out = state.clone();
    grover_in_place(out.amplitudes_mut(), &marked);
    ledger.quantum_oracle_queries += 1;
    out
}

/// `t >= 0` maximizing `sin^2((2t+1) theta)`, `sin^2 theta = m / size`;
/// the smaller `t` wins near-ties.
pub fn plan_iterations(size: usize, m: usize) -> Result<usize> {
    if m < 1 || m > size {
        return Err(Error::GuessOutOfRange { guess: m, size });
    }
    let theta = (m as f64 / size as f64).sqrt().asin();
    let limit = (FRAC_PI_4 / theta).ceil() as usize + 2;
    let mut best = (0, theta.sin().powi(2));
    for t in 1..=limit {
        let p = ((2 * t + 1) as f64 * theta).sin().powi(2);
        if p > best.1 + TIE_MARGIN {
            best = (t, p);
        }
    }
    Ok(best.0)
}

/// Local register after `t` iterations from the uniform state.
fn amplified(num_qubits: usize, t: usize, marked: impl Fn(usize) -> bool) -> Result<StateVector> {
    let mut state = StateVector::uniform(num_qubits)?;
    let amps = state.amplitudes_mut();
    for _ in 0..t {
        grover_in_place(amps, &marked);
    }
    Ok(state)
}

/// Most likely non-excluded register index, or a single seeded draw.
fn measure(
    state: &StateVector,
    local_size: usize,
    excluded: &BTreeSet<usize>,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> Option<usize> {
    match mode {
        Mode::Exact => {
            let mut best: Option<(usize, f64)> = None;
            for (i, a) in state.amplitudes().iter().enumerate() {
                if excluded.contains(&(i % local_size)) {
                    continue;
                }
                let p = a.norm_sqr();
                if best.is_none_or(|(_, bp)| p > bp + TIE_MARGIN) {
                    best = Some((i, p));
                }
            }
            best.map(|(i, _)| i % local_size)
        }
        Mode::Sampled => {
            let x = sample_index(state, rng) % local_size;
            (!excluded.contains(&x)).then_some(x)
        }
    }
}

/// One node search on sublist `r`: guess-doubling rounds, then the
/// ancilla-doubled round, stopping at the first verified candidate.
///
/// Candidates land in `excluded` (local indices). Quantum queries are charged
/// to `ledger.quantum_oracle_queries` in full here; [`partition_search`]
/// splits them into headline and retry counters.
pub fn search_node(
    partition: &SublistPartition,
    r: usize,
    oracle: &SearchOracle,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    excluded: &mut BTreeSet<usize>,
    ledger: &mut CostLedger,
) -> Result<GroverOutcome> {
    let mut rounds = RoundStates::default();
    search_node_with(
        partition,
        r,
        oracle,
        mode,
        rng,
        excluded,
        ledger,
        &mut rounds,
    )
}

/// Amplified register of each round of one sublist. The oracle is never
/// masked, so a round prepares the same state in every node search.
#[derive(Default)]
struct RoundStates {
    states: Vec<Option<(u64, StateVector)>>,
}

impl RoundStates {
    fn get(
        &mut self,
        round: usize,
        n_q: usize,
        local: impl Fn(usize) -> bool,
    ) -> Result<&(u64, StateVector)> {
        if self.states.len() <= round {
            self.states.resize_with(round + 1, || None);
        }
        if self.states[round].is_none() {
            let size = 1usize << n_q;
            let entry = if round <= n_q {
                let t = plan_iterations(size, 1 << round)?;
                (t as u64, amplified(n_q, t, local)?)
            } else {
                (1, amplified(n_q + 1, 1, |i| i < size && local(i))?)
            };
            self.states[round] = Some(entry);
        }
        Ok(self.states[round].as_ref().expect("filled above"))
    }
}

#[allow(clippy::too_many_arguments)]
fn search_node_with(
    partition: &SublistPartition,
    r: usize,
    oracle: &SearchOracle,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    excluded: &mut BTreeSet<usize>,
    ledger: &mut CostLedger,
    rounds: &mut RoundStates,
) -> Result<GroverOutcome> {
    if r >= partition.sublist_count() {
        return Err(Error::IndexOutOfRange {
            index: r,
            num_qubits: partition.n - partition.n_q,
        });
    }
    let offset = partition.offset(r);
    let size = partition.sublist_size();
    let n_q = partition.n_q;
    let mut outcome = GroverOutcome {
        sublist: r,
        measured: None,
        verified: false,
        iterations: 0,
        first_round_iterations: 0,
        winning_iterations: 0,
        retries: 0,
    };

    if n_q == 0 {
        if excluded.insert(0) {
            ledger.classical_oracle_queries += 1;
            outcome.measured = Some(offset);
            outcome.verified = oracle.is_member(offset);
        }
        return Ok(outcome);
    }

    let local = |i: usize| oracle.is_member(offset + i);
    for round in 0..=n_q + 1 {
        if excluded.len() == size {
            break;
        }
        let (t, state) = rounds.get(round, n_q, local)?;
        let t = *t;
        ledger.quantum_oracle_queries += t;
        outcome.iterations += t;
        if round == 0 {
            outcome.first_round_iterations = t;
        } else {
            outcome.retries += 1;
        }
        let Some(x) = measure(state, size, excluded, mode, rng) else {
            continue;
        };
        excluded.insert(x);
        ledger.classical_oracle_queries += 1;
        outcome.measured = Some(offset + x);
        if local(x) {
            outcome.verified = true;
            outcome.winning_iterations = t;
            break;
        }
    }
    Ok(outcome)
}

/// Everything one sublist reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublistReport {
    pub sublist: usize,
    pub found: BTreeSet<usize>,
    pub searches: Vec<GroverOutcome>,
}

fn search_sublist(
    partition: &SublistPartition,
    r: usize,
    oracle: &SearchOracle,
    mode: Mode,
    master_seed: u64,
) -> Result<(SublistReport, CostLedger)> {
    let mut ledger = CostLedger::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, r as u64));
    let mut excluded = BTreeSet::new();
    let mut found = BTreeSet::new();
    let mut searches = Vec::new();
    let mut rounds = RoundStates::default();
    loop {
        let outcome = search_node_with(
            partition,
            r,
            oracle,
            mode,
            &mut rng,
            &mut excluded,
            &mut ledger,
            &mut rounds,
        )?;
        let verified = outcome.verified;
        if verified {
            found.insert(outcome.measured.expect("verified outcome has a candidate"));
        }
        searches.push(outcome);
        if !verified || excluded.len() == partition.sublist_size() {
            break;
        }
    }
    ledger.node_accesses = 1;

    let successful: u64 = searches.iter().map(|s| s.winning_iterations).sum();
    let headline = if found.is_empty() {
        searches[0].first_round_iterations
    } else {
        successful
    };
    ledger.retry_oracle_queries = ledger.quantum_oracle_queries - headline;
    ledger.quantum_oracle_queries = headline;
    Ok((
        SublistReport {
            sublist: r,
            found,
            searches,
        },
        ledger,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub solutions: BTreeSet<usize>,
    pub ledger: CostLedger,
    pub sublists: Vec<SublistReport>,
}

/// Searches every sublist (concurrently, each seeded from
/// `(master_seed, r)`) and returns the union of verified solutions.
///
/// `shots` is unused in exact mode; in sampled mode each round reads one
/// shot, and `shots` must be at least 1.
pub fn partition_search(
    oracle: &SearchOracle,
    n_q: usize,
    mode: Mode,
    shots: u64,
    master_seed: u64,
) -> Result<SearchOutcome> {
    let partition = SublistPartition::new(oracle.n(), n_q)?;
    if mode == Mode::Sampled && shots < 1 {
        return Err(Error::NoShots);
    }
    let results: Vec<(SublistReport, CostLedger)> = (0..partition.sublist_count())
        .into_par_iter()
        .map(|r| search_sublist(&partition, r, oracle, mode, master_seed))
        .collect::<Result<_>>()?;
    let mut ledger = CostLedger::default();
    ledger.set_memory(oracle.n(), n_q, DEFAULT_PRECISION_BITS);
    let mut solutions = BTreeSet::new();
    let mut sublists = Vec::with_capacity(results.len());
    for (report, sub) in results {
        ledger.absorb(&sub);
        solutions.extend(report.found.iter().copied());
        sublists.push(report);
    }
    Ok(SearchOutcome {
        solutions,
        ledger,
        sublists,
    })
}
