//! Operation ledgers, closed-form cost forecasts and scaling fits.
//!
//! Every big-O term is pinned to a concrete constant so that measured
//! counters can be compared with forecasts as exact integers:
//!
//! * one state-preparation unit per `n_q^2 * 2^{n_q}` loaded block,
//! * the QFT costs its standard gate count (see [`qft_gate_count`]),
//! * one classical op per butterfly output, i.e. `2^n` per combine level.
//!
//! Retry and fallback work is kept in separate counters so the headline
//! counters line up with the forecasts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::qft_gate_count;
use crate::search::plan_iterations;

/// Bits per real number in classical memory unless configured otherwise.
pub const DEFAULT_PRECISION_BITS: u64 = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    pub quantum_gate_units: u64,
    pub state_prep_units: u64,
    pub classical_ops: u64,
    pub quantum_oracle_queries: u64,
    pub classical_oracle_queries: u64,
    pub measurement_units: u64,
    pub node_accesses: u64,
    pub classical_bits: u64,
    pub qubit_count: u64,
    /// Classical ops spent evaluating coefficients whose sign test was undecidable.
    pub fallback_ops: u64,
    /// Number of coefficients evaluated classically.
    pub classical_fallbacks: u64,
    /// Quantum queries outside the headline round of each sublist.
    pub retry_oracle_queries: u64,
    /// Values moved during decimation, only charged when configured.
    pub data_movement_ops: u64,
}

/// Column names of [`CostLedger::values`], in order.
pub const LEDGER_FIELDS: [&str; 13] = [
    "quantum_gate_units",
    "state_prep_units",
    "classical_ops",
    "quantum_oracle_queries",
    "classical_oracle_queries",
    "measurement_units",
    "node_accesses",
    "classical_bits",
    "qubit_count",
    "fallback_ops",
    "classical_fallbacks",
    "retry_oracle_queries",
    "data_movement_ops",
];

impl CostLedger {
    /// Records the memory footprint of a run: `2^n * n_precision` classical
    /// bits against an `(n_q + 1)`-qubit node.
    pub fn set_memory(&mut self, n: usize, n_q: usize, precision_bits: u64) {
        self.classical_bits = (1u64 << n) * precision_bits;
        self.qubit_count = n_q as u64 + 1;
    }

    /// Folds `other` into `self`: sums, except `qubit_count` which takes the max.
    pub fn absorb(&mut self, other: &CostLedger) {
        self.quantum_gate_units += other.quantum_gate_units;
        self.state_prep_units += other.state_prep_units;
        self.classical_ops += other.classical_ops;
        self.quantum_oracle_queries += other.quantum_oracle_queries;
        self.classical_oracle_queries += other.classical_oracle_queries;
        self.measurement_units += other.measurement_units;
        self.node_accesses += other.node_accesses;
        self.classical_bits += other.classical_bits;
        self.qubit_count = self.qubit_count.max(other.qubit_count);
        self.fallback_ops += other.fallback_ops;
        self.classical_fallbacks += other.classical_fallbacks;
        self.retry_oracle_queries += other.retry_oracle_queries;
        self.data_movement_ops += other.data_movement_ops;
    }

    pub fn values(&self) -> [u64; 13] {
        [
            self.quantum_gate_units,
            self.state_prep_units,
            self.classical_ops,
            self.quantum_oracle_queries,
            self.classical_oracle_queries,
            self.measurement_units,
            self.node_accesses,
            self.classical_bits,
            self.qubit_count,
            self.fallback_ops,
            self.classical_fallbacks,
            self.retry_oracle_queries,
            self.data_movement_ops,
        ]
    }

    /// Counter by its field name.
    pub fn get(&self, name: &str) -> Option<u64> {
        LEDGER_FIELDS
            .iter()
            .position(|f| *f == name)
            .map(|i| self.values()[i])
    }

    /// Classical bits per qubit of the node.
    pub fn memory_ratio(&self) -> f64 {
        if self.qubit_count == 0 {
            return 0.0;
        }
        self.classical_bits as f64 / self.qubit_count as f64
    }
}

/// Componentwise sum of `ledgers`; the empty merge is the zero ledger.
pub fn merge<'a, I>(ledgers: I) -> CostLedger
where
    I: IntoIterator<Item = &'a CostLedger>,
{
    let mut total = CostLedger::default();
    for l in ledgers {
        total.absorb(l);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Search,
    Dft,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastTerm {
    pub name: String,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostForecast {
    pub algorithm: Algorithm,
    pub n: usize,
    pub n_q: usize,
    pub terms: Vec<ForecastTerm>,
}

impl CostForecast {
    fn new(algorithm: Algorithm, n: usize, n_q: usize, terms: &[(&str, u64)]) -> Self {
        Self {
            algorithm,
            n,
            n_q,
            terms: terms
                .iter()
                .map(|&(name, value)| ForecastTerm {
                    name: name.to_string(),
                    value,
                })
                .collect(),
        }
    }

    pub fn term(&self, name: &str) -> Option<u64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// Terms that name a ledger counter and disagree with it: `(name, forecast, measured)`.
    pub fn mismatches(&self, ledger: &CostLedger) -> Vec<(String, u64, u64)> {
        self.terms
            .iter()
            .filter_map(|t| {
                let measured = ledger.get(&t.name)?;
                (measured != t.value).then(|| (t.name.clone(), t.value, measured))
            })
            .collect()
    }
}

fn check_plan(n: usize, n_q: usize) -> Result<()> {
    if n_q > n {
        return Err(Error::NqExceedsN { n_q, n });
    }
    Ok(())
}

/// Partitioned search with one solution: `2^{n-n_q}` node accesses times the
/// optimal Grover iteration count of a `2^{n_q}` sublist.
///
/// `headline` charges every access at least one oracle call, so at `n_q = 0`
/// it is the classical scan cost `2^n`.
pub fn predict_search_cost(n: usize, n_q: usize) -> Result<CostForecast> {
    check_plan(n, n_q)?;
    let accesses = 1u64 << (n - n_q);
    let per_node = plan_iterations(1 << n_q, 1)? as u64;
    Ok(CostForecast::new(
        Algorithm::Search,
        n,
        n_q,
        &[
            ("node_accesses", accesses),
            ("queries_per_node", per_node),
            ("quantum_oracle_queries", accesses * per_node),
            ("headline", accesses * per_node.max(1)),
        ],
    ))
}

/// Semi-quantum DFT: state preparation `n_q^2 2^n`, QFT gates
/// `2^{n-n_q} (n_q(n_q+1)/2 + floor(n_q/2))`, classical `(n - n_q) 2^n`.
pub fn predict_dft_cost(n: usize, n_q: usize) -> Result<CostForecast> {
    check_plan(n, n_q)?;
    let size = 1u64 << n;
    let leaves = 1u64 << (n - n_q);
    let nq = n_q as u64;
    let (prep, qft, accesses, measurements) = if n_q == 0 {
        (0, 0, 0, 0)
    } else {
        (
            nq * nq * size,
            leaves * qft_gate_count(n_q),
            leaves,
            2 * size,
        )
    };
    let classical = (n - n_q) as u64 * size;
    Ok(CostForecast::new(
        Algorithm::Dft,
        n,
        n_q,
        &[
            ("state_prep_units", prep),
            ("quantum_gate_units", qft),
            ("classical_ops", classical),
            ("total", prep + qft + classical),
            ("node_accesses", accesses),
            ("measurement_units", measurements),
        ],
    ))
}

/// Least-squares slope of `log2(counter)` against `n_q`.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(&(_, bad)) = points.iter().find(|(_, y)| *y <= 0.0) {
        return Err(Error::NonPositiveCounter(bad));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ledger_strategy() -> impl Strategy<Value = CostLedger> {
        prop::array::uniform13(0u64..1_000_000).prop_map(|v| CostLedger {
            quantum_gate_units: v[0],
            state_prep_units: v[1],
            classical_ops: v[2],
            quantum_oracle_queries: v[3],
            classical_oracle_queries: v[4],
            measurement_units: v[5],
            node_accesses: v[6],
            classical_bits: v[7],
            qubit_count: v[8],
            fallback_ops: v[9],
            classical_fallbacks: v[10],
            retry_oracle_queries: v[11],
            data_movement_ops: v[12],
        })
    }

    proptest! {
        #[test]
        fn merge_is_order_independent(a in ledger_strategy(), b in ledger_strategy(), c in ledger_strategy()) {
            let abc = merge([&a, &b, &c]);
            prop_assert_eq!(abc, merge([&c, &a, &b]));
            prop_assert_eq!(abc, merge([&merge([&a, &b]), &c]));
            prop_assert_eq!(abc, merge([&a, &merge([&b, &c])]));
        }
    }

    #[test]
    fn merge_identities() {
        assert_eq!(merge([]), CostLedger::default());
        let l = CostLedger {
            classical_ops: 5,
            qubit_count: 3,
            ..Default::default()
        };
        assert_eq!(merge([&l]), l);
        let m = CostLedger {
            qubit_count: 2,
            ..Default::default()
        };
        assert_eq!(merge([&l, &m]).qubit_count, 3);
    }

    #[test]
    fn ledger_field_names_are_stable() {
        let l = CostLedger {
            retry_oracle_queries: 9,
            ..Default::default()
        };
        let json = serde_json::to_value(l).unwrap();
        let keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(|k| k.as_str())
            .collect();
        let mut want = LEDGER_FIELDS.to_vec();
        want.sort();
        let mut got = keys.clone();
        got.sort();
        assert_eq!(got, want);
        assert_eq!(l.get("retry_oracle_queries"), Some(9));
    }

    #[test]
    fn memory_accounting() {
        let mut l = CostLedger::default();
        l.set_memory(10, 3, DEFAULT_PRECISION_BITS);
        assert_eq!(l.classical_bits, 1024 * 64);
        assert_eq!(l.qubit_count, 4);
        assert_eq!(l.memory_ratio(), 1024.0 * 16.0);
    }

    #[test]
    fn search_forecasts() {
        let f = predict_search_cost(4, 4).unwrap();
        assert_eq!(f.term("node_accesses"), Some(1));
        assert_eq!(f.term("quantum_oracle_queries"), Some(3));
        let f = predict_search_cost(4, 0).unwrap();
        assert_eq!(f.term("node_accesses"), Some(16));
        assert_eq!(f.term("queries_per_node"), Some(0));
        assert_eq!(f.term("headline"), Some(16));
        let f = predict_search_cost(10, 4).unwrap();
        assert_eq!(f.term("quantum_oracle_queries"), Some(192));
        assert_eq!(
            predict_search_cost(3, 4),
            Err(Error::NqExceedsN { n_q: 4, n: 3 })
        );
    }

    #[test]
    fn dft_forecasts() {
        let f = predict_dft_cost(6, 0).unwrap();
        assert_eq!(f.term("state_prep_units"), Some(0));
        assert_eq!(f.term("quantum_gate_units"), Some(0));
        assert_eq!(f.term("classical_ops"), Some(6 * 64));
        assert_eq!(
            predict_dft_cost(6, 6).unwrap().term("classical_ops"),
            Some(0)
        );
        let f = predict_dft_cost(4, 2).unwrap();
        assert_eq!(f.term("state_prep_units"), Some(64));
        assert_eq!(f.term("quantum_gate_units"), Some(16));
        assert_eq!(f.term("classical_ops"), Some(32));
        assert_eq!(f.term("total"), Some(112));
    }

    #[test]
    fn forecast_monotonicity() {
        for n in 1..=12 {
            let mut last_search = u64::MAX;
            let mut last_classical = u64::MAX;
            for n_q in 0..=n {
                let headline = predict_search_cost(n, n_q)
                    .unwrap()
                    .term("headline")
                    .unwrap();
                assert!(headline <= last_search, "n={n} n_q={n_q}");
                last_search = headline;
                let c = predict_dft_cost(n, n_q)
                    .unwrap()
                    .term("classical_ops")
                    .unwrap();
                assert!(c < last_classical);
                last_classical = c;
            }
        }
    }

    #[test]
    fn scaling_fit() {
        let slope = fit_scaling_exponent(&[(2.0, 256.0), (4.0, 128.0), (6.0, 64.0)]).unwrap();
        assert!((slope + 0.5).abs() < 1e-12);
        let slope = fit_scaling_exponent(&[(1.0, 2.0), (2.0, 4.0), (3.0, 8.0)]).unwrap();
        assert!((slope - 1.0).abs() < 1e-12);
        assert_eq!(
            fit_scaling_exponent(&[(1.0, 2.0)]),
            Err(Error::TooFewPoints(1))
        );
        assert_eq!(
            fit_scaling_exponent(&[(1.0, 2.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(Error::NonPositiveCounter(0.0))
        );
    }
}
