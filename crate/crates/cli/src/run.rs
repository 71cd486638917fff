use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use semiq_core::cost::{predict_dft_cost, predict_search_cost, CostForecast, CostLedger};
use semiq_core::fft::{
    classical_fft, direct_dft, semi_quantum_dft, FftPlan, RealSignal, SpectrumVector,
};
use semiq_core::search::{partition_search, SearchOracle};
use semiq_core::{seed, Mode};
use serde::Serialize;

use crate::args::{Command, RunConfig, SignalSource, SolutionSpec};

/// Largest n checked against the quadratic DFT; above it the FFT is the oracle.
pub const DIRECT_ORACLE_MAX_N: usize = 14;
const SIGNAL_STREAM: u64 = 0x5167_6e61_6c00;
const ORACLE_STREAM: u64 = 0x4f72_6163_6c65;

#[derive(Debug)]
pub enum RunError {
    /// Input that parsed as flags but cannot be run (bad file contents, n_q > n).
    Input(String),
    Io(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(m) | RunError::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for RunError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    Direct,
    Fft,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DftPoint {
    /// Max `|y_k - oracle_k|`.
    pub deviation: f64,
    pub oracle: Oracle,
    pub zero_leaves: usize,
    pub max_std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchPoint {
    pub found: Vec<usize>,
    pub missed: usize,
    pub spurious: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub n: usize,
    pub n_q: usize,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    pub ledger: CostLedger,
    pub forecast: CostForecast,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dft: Option<DftPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub command: Command,
    pub n: usize,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<usize>>,
    pub points: Vec<PointResult>,
}

/// Loads a signal file: one real per line, blank lines ignored.
pub fn read_signal(path: &Path, pad: bool) -> Result<RealSignal, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            RunError::Input(format!(
                "{}:{}: `{line}` is not a number",
                path.display(),
                i + 1
            ))
        })?;
        if !v.is_finite() {
            return Err(RunError::Input(format!(
                "{}:{}: non-finite value",
                path.display(),
                i + 1
            )));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(RunError::Input(format!("{}: no samples", path.display())));
    }
    if !values.len().is_power_of_two() {
        if !pad {
            return Err(RunError::Input(format!(
                "{}: {} samples is not a power of two (use --pad to zero-pad)",
                path.display(),
                values.len()
            )));
        }
        values.resize(values.len().next_power_of_two(), 0.0);
    }
    RealSignal::new(values).map_err(|e| RunError::Input(e.to_string()))
}

pub fn build_signal(config: &RunConfig) -> Result<RealSignal, RunError> {
    let size = 1usize << config.n;
    let signal = match config.signal.as_ref().expect("dft config has a signal") {
        SignalSource::Ramp => RealSignal::new((1..=size).map(|v| v as f64).collect()),
        SignalSource::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(config.seed, SIGNAL_STREAM));
            RealSignal::new((0..size).map(|_| rng.random_range(-1.0..1.0)).collect())
        }
        SignalSource::File(path) => {
            let s = read_signal(path, config.pad)?;
            if config.n != 0 && s.n() != config.n {
                return Err(RunError::Input(format!(
                    "--n {} does not match the {} samples in {}",
                    config.n,
                    s.len(),
                    path.display()
                )));
            }
            return Ok(s);
        }
    };
    signal.map_err(|e| RunError::Input(e.to_string()))
}

pub fn build_oracle(config: &RunConfig) -> Result<SearchOracle, RunError> {
    let oracle = match config
        .solutions
        .as_ref()
        .expect("search config has solutions")
    {
        SolutionSpec::List(list) => SearchOracle::new(config.n, list.iter().copied()),
        SolutionSpec::Random(k) => {
            SearchOracle::random(config.n, *k, seed::derive(config.seed, ORACLE_STREAM))
        }
    };
    oracle.map_err(|e| RunError::Input(e.to_string()))
}

fn dft_point(
    signal: &RealSignal,
    reference: &SpectrumVector,
    oracle: Oracle,
    n_q: usize,
    config: &RunConfig,
) -> Result<PointResult, RunError> {
    let n = signal.n();
    let plan = FftPlan {
        n_q,
        mode: config.mode,
        shots: config.shots,
        master_seed: config.seed,
        charge_data_movement: config.charge_data_movement,
        precision_bits: config.precision_bits,
        ..FftPlan::exact(n_q)
    };
    let out = semi_quantum_dft(signal, &plan).map_err(|e| RunError::Input(format!("--nq: {e}")))?;
    let forecast = predict_dft_cost(n, n_q).map_err(|e| RunError::Input(format!("--nq: {e}")))?;
    Ok(PointResult {
        n,
        n_q,
        mode: config.mode,
        shots: config.shots,
        seed: config.seed,
        dft: Some(DftPoint {
            deviation: out.spectrum.max_deviation(reference),
            oracle,
            zero_leaves: out.zero_leaves,
            max_std_error: out.std_errors.iter().copied().fold(0.0, f64::max),
        }),
        search: None,
        ledger: out.ledger,
        forecast,
    })
}

fn search_point(
    oracle: &SearchOracle,
    n_q: usize,
    config: &RunConfig,
) -> Result<PointResult, RunError> {
    let n = oracle.n();
    let out = partition_search(oracle, n_q, config.mode, config.shots.max(1), config.seed)
        .map_err(|e| RunError::Input(format!("--nq: {e}")))?;
    let mut ledger = out.ledger;
    ledger.set_memory(n, n_q, config.precision_bits);
    let forecast =
        predict_search_cost(n, n_q).map_err(|e| RunError::Input(format!("--nq: {e}")))?;
    let truth = oracle.solutions();
    Ok(PointResult {
        n,
        n_q,
        mode: config.mode,
        shots: config.shots,
        seed: config.seed,
        ledger,
        forecast,
        dft: None,
        search: Some(SearchPoint {
            missed: truth.difference(&out.solutions).count(),
            spurious: out.solutions.difference(truth).count(),
            found: out.solutions.into_iter().collect(),
        }),
    })
}

/// Runs every point of a dft or search config; points are independent and
/// evaluated concurrently, results keep the config's point order.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentReport, RunError> {
    let (n, points, solutions) = match config.command {
        Command::DftRun | Command::DftSweep => {
            let signal = build_signal(config)?;
            let n = signal.n();
            if let Some(&bad) = config.n_q.iter().find(|&&q| q > n) {
                return Err(RunError::Input(format!(
                    "--nq: n_q = {bad} exceeds n = {n}"
                )));
            }
            let (reference, oracle) = if n <= DIRECT_ORACLE_MAX_N {
                (direct_dft(&signal), Oracle::Direct)
            } else {
                (
                    classical_fft(&signal, &mut CostLedger::default()),
                    Oracle::Fft,
                )
            };
            let points = config
                .n_q
                .par_iter()
                .map(|&q| dft_point(&signal, &reference, oracle, q, config))
                .collect::<Result<Vec<_>, _>>()?;
            (n, points, None)
        }
        Command::SearchRun | Command::SearchSweep => {
            let oracle = build_oracle(config)?;
            let points = config
                .n_q
                .par_iter()
                .map(|&q| search_point(&oracle, q, config))
                .collect::<Result<Vec<_>, _>>()?;
            let truth: BTreeSet<usize> = oracle.solutions().clone();
            (config.n, points, Some(truth.into_iter().collect()))
        }
        Command::Verify => {
            return Err(RunError::Input(
                "verify is not an experiment; use run_verify".into(),
            ))
        }
    };
    Ok(ExperimentReport {
        command: config.command,
        n,
        mode: config.mode,
        shots: config.shots,
        seed: config.seed,
        solutions,
        points,
    })
}
