use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use semiq_core::cost::{predict_dft_cost, CostLedger};
use semiq_core::fft::{decimate_leaves, direct_dft, semi_quantum_dft, FftPlan, RealSignal};
use semiq_core::qsim::{qft_gate_count, sample_register, StateVector};
use semiq_core::search::{grover_operator_apply, partition_search, plan_iterations, SearchOracle};
use semiq_core::Mode;

fn signal_strategy(max_n: usize) -> impl Strategy<Value = (RealSignal, usize)> {
    (1..=max_n)
        .prop_flat_map(|n| (prop::collection::vec(-4.0f64..4.0, 1 << n), 0..=n))
        .prop_map(|(v, q)| (RealSignal::new(v).unwrap(), q))
}

fn integer_signal_strategy(max_n: usize) -> impl Strategy<Value = (RealSignal, usize)> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop_oneof![2 => Just(0i32), 3 => -3i32..=3], 1 << n),
                0..=n,
            )
        })
        .prop_map(|(v, q)| {
            (
                RealSignal::new(v.into_iter().map(f64::from).collect()).unwrap(),
                q,
            )
        })
}

fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_independent_of_node_size((signal, n_q) in signal_strategy(8)) {
        let out = semi_quantum_dft(&signal, &FftPlan::exact(n_q)).unwrap();
        prop_assert!(out.spectrum.max_deviation(&direct_dft(&signal)) <= 1e-9);
    }

    #[test]
    fn integer_signals_with_zeros((signal, n_q) in integer_signal_strategy(7)) {
        let out = semi_quantum_dft(&signal, &FftPlan::exact(n_q)).unwrap();
        prop_assert!(out.spectrum.max_deviation(&direct_dft(&signal)) <= 1e-9);
        let size = 1u64 << signal.n();
        prop_assert_eq!(out.ledger.classical_ops, (signal.n() - n_q) as u64 * size);
        prop_assert_eq!(out.ledger.fallback_ops, out.ledger.classical_fallbacks << n_q);
        if n_q > 0 {
            let leaves = decimate_leaves(&signal, n_q).unwrap();
            let nonzero = leaves.iter().filter(|l| l.iter().any(|&v| v != 0.0)).count() as u64;
            let q = n_q as u64;
            prop_assert_eq!(out.ledger.state_prep_units, (nonzero * q * q) << n_q);
            prop_assert_eq!(out.ledger.quantum_gate_units, nonzero * qft_gate_count(n_q));
            prop_assert_eq!(out.ledger.node_accesses, nonzero);
        }
    }

    #[test]
    fn all_zero_signal(n in 0usize..=6, q in any::<usize>()) {
        let n_q = q % (n + 1);
        let signal = RealSignal::new(vec![0.0; 1 << n]).unwrap();
        let out = semi_quantum_dft(&signal, &FftPlan::exact(n_q)).unwrap();
        prop_assert!(out.spectrum.values.iter().all(|v| v.norm() == 0.0));
        prop_assert_eq!(out.ledger.state_prep_units + out.ledger.quantum_gate_units, 0);
    }

    #[test]
    fn hermitian_output((signal, n_q) in signal_strategy(8)) {
        let y = semi_quantum_dft(&signal, &FftPlan::exact(n_q)).unwrap().spectrum.values;
        let size = y.len();
        for k in 1..size {
            prop_assert!((y[size - k] - y[k].conj()).norm() <= 1e-9);
        }
    }

    #[test]
    fn parseval((signal, n_q) in signal_strategy(8)) {
        let y = semi_quantum_dft(&signal, &FftPlan::exact(n_q)).unwrap().spectrum.values;
        let lhs: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        let rhs = signal.len() as f64 * signal.values().iter().map(|v| v * v).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-6 * rhs.max(1.0));
    }

    #[test]
    fn linearity(
        n in 1usize..=7,
        seed in any::<u64>(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let n_q = (seed as usize) % (n + 1);
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let f: Vec<f64> = (0..1 << n).map(|_| next()).collect();
        let g: Vec<f64> = (0..1 << n).map(|_| next()).collect();
        let h: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let run = |v: Vec<f64>| semi_quantum_dft(&RealSignal::new(v).unwrap(), &FftPlan::exact(n_q)).unwrap().spectrum.values;
        let (yf, yg, yh) = (run(f), run(g), run(h));
        let combined: Vec<Complex64> = yf.iter().zip(&yg).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(max_dev(&yh, &combined) <= 1e-8);
    }

    #[test]
    fn exact_ledgers_match_forecast((signal, n_q) in signal_strategy(8)) {
        let out = semi_quantum_dft(&signal, &FftPlan::exact(n_q)).unwrap();
        let forecast = predict_dft_cost(signal.n(), n_q).unwrap();
        prop_assert!(forecast.mismatches(&out.ledger).is_empty(), "{:?}", forecast.mismatches(&out.ledger));
        prop_assert_eq!(out.ledger.classical_bits, (signal.len() as u64) * 64);
        prop_assert_eq!(out.ledger.qubit_count, n_q as u64 + 1);
    }

    #[test]
    fn search_is_complete(n in 0usize..=8, seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let m = (frac * (1usize << n) as f64).round() as usize;
        let oracle = SearchOracle::random(n, m, seed).unwrap();
        for n_q in 0..=n {
            let out = partition_search(&oracle, n_q, Mode::Exact, 1, seed).unwrap();
            prop_assert_eq!(&out.solutions, oracle.solutions());
            prop_assert_eq!(out.ledger.node_accesses, 1u64 << (n - n_q));
        }
    }

    #[test]
    fn sampled_search_never_reports_non_solutions(n in 1usize..=7, seed in any::<u64>(), m in 0usize..=8) {
        let m = m.min(1 << n);
        let oracle = SearchOracle::random(n, m, seed).unwrap();
        let n_q = (seed as usize) % (n + 1);
        let out = partition_search(&oracle, n_q, Mode::Sampled, 1, seed).unwrap();
        prop_assert!(out.solutions.is_subset(oracle.solutions()));
    }
}

/// Sampled success frequencies after `t` iterations approach
/// `sin^2((2t+1) theta)` within `5/sqrt(shots)` for at least 95% of seeds.
#[test]
fn sampled_success_statistics_converge() {
    for &(n_q, m) in &[(2usize, 1usize), (3, 2), (4, 1), (4, 5)] {
        let size = 1usize << n_q;
        let t = plan_iterations(size, 1).unwrap();
        let marked: BTreeSet<usize> = (0..m).map(|i| (3 * i + 1) % size).collect();
        let mut state = StateVector::uniform(n_q).unwrap();
        for _ in 0..t {
            state =
                grover_operator_apply(&state, |i| marked.contains(&i), &mut CostLedger::default());
        }
        let theta = (m as f64 / size as f64).sqrt().asin();
        let exact = ((2 * t + 1) as f64 * theta).sin().powi(2);
        for shots in [100u64, 10_000] {
            let ok = (0..100u64)
                .filter(|&seed| {
                    let counts = sample_register(&state, shots, seed).unwrap();
                    let hits: u64 = marked.iter().map(|&i| counts[i]).sum();
                    (hits as f64 / shots as f64 - exact).abs() < 5.0 / (shots as f64).sqrt()
                })
                .count();
            assert!(ok >= 95, "n_q={n_q} m={m} shots={shots}: {ok}");
        }
    }
}
