use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiq_core::cost::{predict_dft_cost, predict_search_cost, CostLedger, DEFAULT_PRECISION_BITS};
use semiq_core::fft::{direct_dft, semi_quantum_dft, FftPlan, RealSignal};
use semiq_core::qsim::StateVector;
use semiq_core::search::{grover_operator_apply, partition_search, SearchOracle};
use semiq_core::{seed, Mode};

use crate::args::{Command, RunConfig, SolutionSpec};
use crate::output::{render_csv, render_json};
use crate::run::run_experiment;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> RealSignal {
    RealSignal::new((0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .expect("power of two")
}

fn dft_checks(max_n: usize, master: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master, 1));
    let (mut worst, mut ledger_bad, mut memory_bad, mut runs) = (0.0f64, 0, 0, 0);
    for n in 1..=max_n {
        for _ in 0..3 {
            let signal = random_signal(n, &mut rng);
            let want = direct_dft(&signal);
            for n_q in 0..=n {
                let out = semi_quantum_dft(&signal, &FftPlan::exact(n_q)).expect("valid plan");
                worst = worst.max(out.spectrum.max_deviation(&want));
                let forecast = predict_dft_cost(n, n_q).expect("valid plan");
                ledger_bad += usize::from(!forecast.mismatches(&out.ledger).is_empty());
                memory_bad += usize::from(
                    out.ledger.classical_bits != (DEFAULT_PRECISION_BITS << n)
                        || out.ledger.qubit_count != n_q as u64 + 1,
                );
                runs += 1;
            }
        }
    }
    vec![
        Check {
            name: "dft-oracle",
            passed: worst <= 1e-9,
            detail: format!("{runs} runs, max deviation {worst:.3e}"),
        },
        Check {
            name: "dft-ledger",
            passed: ledger_bad == 0,
            detail: format!("{ledger_bad} of {runs} ledgers differ from the forecast"),
        },
        Check {
            name: "memory",
            passed: memory_bad == 0,
            detail: format!("{memory_bad} of {runs} runs misreport memory"),
        },
    ]
}

fn grover_check() -> Check {
    let mut worst = 0.0f64;
    for n_q in 1..=4 {
        let size = 1usize << n_q;
        for m in 0..=size {
            let theta = (m as f64 / size as f64).sqrt().asin();
            let mut state = StateVector::uniform(n_q).expect("small register");
            for t in 0..=10 {
                let mass: f64 = state.amplitudes()[..m].iter().map(|a| a.norm_sqr()).sum();
                worst = worst.max((mass - ((2 * t + 1) as f64 * theta).sin().powi(2)).abs());
                state = grover_operator_apply(&state, |i| i < m, &mut CostLedger::default());
            }
        }
    }
    Check {
        name: "grover-law",
        passed: worst <= 1e-10,
        detail: format!("max deviation {worst:.3e}"),
    }
}

fn search_checks(max_n: usize, master: u64) -> Vec<Check> {
    let max_n = max_n.min(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master, 2));
    let (mut incomplete, mut oracles) = (0, 0);
    for i in 0..20u64 {
        let n = rng.random_range(0..=max_n);
        let m = rng.random_range(0..=1usize << n);
        let oracle = SearchOracle::random(n, m, seed::derive(master, 100 + i)).expect("m fits");
        for n_q in 0..=n {
            let out =
                partition_search(&oracle, n_q, Mode::Exact, 1, master).expect("valid partition");
            incomplete += usize::from(&out.solutions != oracle.solutions());
        }
        oracles += 1;
    }
    let mut ledger_bad = 0;
    for x in 0..1usize << max_n {
        if x % 7 != 0 {
            continue;
        }
        let oracle = SearchOracle::new(max_n, [x]).expect("in range");
        for n_q in 0..=max_n {
            let out =
                partition_search(&oracle, n_q, Mode::Exact, 1, master).expect("valid partition");
            let forecast = predict_search_cost(max_n, n_q).expect("valid partition");
            ledger_bad += usize::from(!forecast.mismatches(&out.ledger).is_empty());
        }
    }
    vec![
        Check {
            name: "search-completeness",
            passed: incomplete == 0,
            detail: format!("{incomplete} incomplete runs over {oracles} oracles"),
        },
        Check {
            name: "search-ledger",
            passed: ledger_bad == 0,
            detail: format!("{ledger_bad} single-solution ledgers differ from the forecast"),
        },
    ]
}

fn determinism_check(n: usize, master: u64) -> Check {
    let n = n.clamp(2, 8);
    let dft = RunConfig {
        command: Command::DftSweep,
        n,
        n_q: (0..=n).collect(),
        mode: Mode::Sampled,
        shots: 200,
        seed: master,
        signal: Some(crate::args::SignalSource::Random),
        pad: false,
        solutions: None,
        outputs: Default::default(),
        precision_bits: DEFAULT_PRECISION_BITS,
        charge_data_movement: false,
    };
    let search = RunConfig {
        command: Command::SearchSweep,
        signal: None,
        solutions: Some(SolutionSpec::Random(3)),
        ..dft.clone()
    };
    let mut stable = true;
    for config in [dft, search] {
        let a = run_experiment(&config).expect("valid config");
        let b = run_experiment(&config).expect("valid config");
        stable &= render_csv(&a) == render_csv(&b) && render_json(&a) == render_json(&b);
    }
    Check {
        name: "determinism",
        passed: stable,
        detail: "repeated sampled sweeps render identical CSV and JSON".into(),
    }
}

/// Invariant checks at problem sizes up to `config.n`, seeded from `config.seed`.
pub fn run_verify(config: &RunConfig) -> VerifyReport {
    let mut checks = dft_checks(config.n, config.seed);
    checks.push(grover_check());
    checks.extend(search_checks(config.n, config.seed));
    checks.push(determinism_check(config.n, config.seed));
    VerifyReport { checks }
}
