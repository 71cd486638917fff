use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use semiq_core::cost::DEFAULT_PRECISION_BITS;
use semiq_core::Mode;
use serde::Serialize;

/// Bad command line; `message` names the offending flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    pub message: String,
}

impl UsageError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

/// What `parse_args` produced: a runnable config, or text clap wants printed
/// (`--help`, `--version`) with a successful exit.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Run(RunConfig),
    Display(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    DftRun,
    DftSweep,
    SearchRun,
    SearchSweep,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DftRun => "dft-run",
            Command::DftSweep => "dft-sweep",
            Command::SearchRun => "search-run",
            Command::SearchSweep => "search-sweep",
            Command::Verify => "verify",
        }
    }

    pub fn is_sweep(self) -> bool {
        matches!(self, Command::DftSweep | Command::SearchSweep)
    }

    pub fn is_search(self) -> bool {
        matches!(self, Command::SearchRun | Command::SearchSweep)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalSource {
    Ramp,
    Random,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionSpec {
    List(Vec<usize>),
    Random(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl OutputPaths {
    pub fn is_empty(&self) -> bool {
        self.csv.is_none() && self.json.is_none() && self.svg.is_none()
    }
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    /// One entry for single runs, every sweep point otherwise.
    pub n_q: Vec<usize>,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    /// DFT input; `None` for search and verify.
    pub signal: Option<SignalSource>,
    /// Zero-pad a file signal up to the next power of two.
    pub pad: bool,
    /// Search oracle; `None` for dft and verify.
    pub solutions: Option<SolutionSpec>,
    #[serde(skip)]
    pub outputs: OutputPaths,
    pub precision_bits: u64,
    pub charge_data_movement: bool,
}

const DEFAULT_SHOTS: u64 = 1000;
const DEFAULT_VERIFY_N: usize = 6;
/// Simulation cap: the DFT register and the search domain are held in memory.
const MAX_N: usize = 24;

#[derive(Parser, Debug)]
#[command(
    name = "semiq",
    version,
    about = "Semi-quantum search and DFT experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// One semi-quantum DFT run
    DftRun(Flags),
    /// Semi-quantum DFT over a range of node sizes
    DftSweep(Flags),
    /// One partitioned search run
    SearchRun(Flags),
    /// Partitioned search over a range of node sizes
    SearchSweep(Flags),
    /// Run the built-in invariant checks
    Verify(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// Problem size: 2^n samples or search elements
    #[arg(long)]
    n: Option<usize>,
    /// Node size n_q, or an inclusive range a..b for sweeps
    #[arg(long = "nq")]
    nq: Option<String>,
    /// exact or sampled
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Shots per measurement in sampled mode
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    /// Master seed for signals, oracles and shot sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Signal file: one real per line
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generated signal when no --input is given: ramp (1, 2, ..) or random
    #[arg(long, default_value = "ramp")]
    signal: String,
    /// Zero-pad the --input signal to a power of two
    #[arg(long)]
    pad: bool,
    /// Comma-separated solution indices
    #[arg(long)]
    solutions: Option<String>,
    /// Number of seeded random solutions
    #[arg(long = "random-solutions")]
    random_solutions: Option<usize>,
    /// Results table, one row per point
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Full report
    #[arg(long)]
    json: Option<PathBuf>,
    /// Cost-curve chart (sweeps only)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Bits per stored real in the memory accounting
    #[arg(long = "precision-bits", default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u64,
    /// Charge decimation data movement to its own counter
    #[arg(long = "charge-data-movement")]
    charge_data_movement: bool,
}

/// Parses `argv` (without the program name) into a validated config.
pub fn parse_args<I, S>(argv: I) -> Result<Parsed, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv =
        std::iter::once(std::ffi::OsString::from("semiq")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Ok(Parsed::Display(e.to_string()))
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Err(UsageError::new(e.to_string()))
                }
                _ => Err(UsageError::new(e.to_string().trim_end().to_string())),
            };
        }
    };
    let (command, flags) = match cli.command {
        Sub::DftRun(f) => (Command::DftRun, f),
        Sub::DftSweep(f) => (Command::DftSweep, f),
        Sub::SearchRun(f) => (Command::SearchRun, f),
        Sub::SearchSweep(f) => (Command::SearchSweep, f),
        Sub::Verify(f) => (Command::Verify, f),
    };
    validate(command, flags).map(Parsed::Run)
}

fn validate(command: Command, f: Flags) -> Result<RunConfig, UsageError> {
    let mode: Mode = f
        .mode
        .parse()
        .map_err(|e: String| UsageError::new(format!("--mode: {e}")))?;
    if mode == Mode::Sampled && f.shots == 0 {
        return Err(UsageError::new(
            "--shots must be at least 1 in sampled mode",
        ));
    }
    if f.precision_bits == 0 {
        return Err(UsageError::new("--precision-bits must be at least 1"));
    }

    let n = match (command, f.n) {
        (_, Some(n)) if n > MAX_N => {
            return Err(UsageError::new(format!(
                "--n {n} exceeds the simulation cap {MAX_N}"
            )))
        }
        (_, Some(n)) => n,
        (Command::Verify, None) => DEFAULT_VERIFY_N,
        (Command::DftRun | Command::DftSweep, None) if f.input.is_some() => 0,
        _ => return Err(UsageError::new(format!("{} requires --n", command.name()))),
    };

    let signal = if matches!(command, Command::DftRun | Command::DftSweep) {
        Some(match (&f.input, f.signal.as_str()) {
            (Some(path), _) => SignalSource::File(path.clone()),
            (None, "ramp") => SignalSource::Ramp,
            (None, "random") => SignalSource::Random,
            (None, other) => {
                return Err(UsageError::new(format!(
                    "--signal: unknown signal `{other}` (expected ramp or random)"
                )))
            }
        })
    } else {
        None
    };
    if f.pad && f.input.is_none() {
        return Err(UsageError::new("--pad requires --input"));
    }
    if f.svg.is_some() && !command.is_sweep() {
        return Err(UsageError::new("--svg is only available for sweeps"));
    }

    let solutions = if command.is_search() {
        Some(match (f.solutions.as_deref(), f.random_solutions) {
            (Some(_), Some(_)) => {
                return Err(UsageError::new(
                    "--solutions and --random-solutions are exclusive",
                ))
            }
            (Some(list), None) => SolutionSpec::List(parse_solution_list(list, n)?),
            (None, Some(k)) if k > 1 << n => {
                return Err(UsageError::new(format!(
                    "--random-solutions {k} exceeds the domain size {}",
                    1usize << n
                )))
            }
            (None, Some(k)) => SolutionSpec::Random(k),
            (None, None) => {
                return Err(UsageError::new(format!(
                    "{} requires --solutions or --random-solutions",
                    command.name()
                )))
            }
        })
    } else {
        None
    };

    // With an input file, n is only known after reading it; node sizes are
    // checked again then.
    let n_bound = if signal
        .as_ref()
        .is_some_and(|s| matches!(s, SignalSource::File(_)))
        && f.n.is_none()
    {
        MAX_N
    } else {
        n
    };
    let n_q = match (f.nq.as_deref(), command) {
        (Some(spec), _) => parse_nq(spec, n_bound, command.is_sweep())?,
        (None, Command::Verify) => Vec::new(),
        (None, c) if c.is_sweep() => (0..=n).collect(),
        (None, c) => return Err(UsageError::new(format!("{} requires --nq", c.name()))),
    };

    Ok(RunConfig {
        command,
        n,
        n_q,
        mode,
        shots: if mode == Mode::Exact { 0 } else { f.shots },
        seed: f.seed,
        signal,
        pad: f.pad,
        solutions,
        outputs: OutputPaths {
            csv: f.csv,
            json: f.json,
            svg: f.svg,
        },
        precision_bits: f.precision_bits,
        charge_data_movement: f.charge_data_movement,
    })
}

fn parse_index(text: &str, flag: &str) -> Result<usize, UsageError> {
    text.trim()
        .parse()
        .map_err(|_| UsageError::new(format!("{flag}: `{text}` is not a non-negative integer")))
}

fn parse_nq(spec: &str, n: usize, allow_range: bool) -> Result<Vec<usize>, UsageError> {
    let points: Vec<usize> = match spec.split_once("..") {
        Some((lo, hi)) => {
            if !allow_range {
                return Err(UsageError::new("--nq: ranges are only valid for sweeps"));
            }
            let (lo, hi) = (parse_index(lo, "--nq")?, parse_index(hi, "--nq")?);
            if lo > hi {
                return Err(UsageError::new(format!("--nq: empty range {lo}..{hi}")));
            }
            (lo..=hi).collect()
        }
        None => vec![parse_index(spec, "--nq")?],
    };
    if let Some(&bad) = points.iter().find(|&&q| q > n) {
        return Err(UsageError::new(format!(
            "--nq: n_q = {bad} exceeds n = {n}"
        )));
    }
    Ok(points)
}

fn parse_solution_list(list: &str, n: usize) -> Result<Vec<usize>, UsageError> {
    let mut out = Vec::new();
    for item in list.split(',').filter(|s| !s.trim().is_empty()) {
        let x = parse_index(item, "--solutions")?;
        if x >> n != 0 {
            return Err(UsageError::new(format!(
                "--solutions: index {x} is outside 0..{}",
                1usize << n
            )));
        }
        out.push(x);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(argv: &[&str]) -> Result<RunConfig, UsageError> {
        match parse_args(argv.iter().copied())? {
            Parsed::Run(c) => Ok(c),
            Parsed::Display(_) => panic!("unexpected display"),
        }
    }

    #[test]
    fn dft_run() {
        let c = run(&["dft-run", "--n", "4", "--nq", "2", "--mode", "exact"]).unwrap();
        assert_eq!(c.command, Command::DftRun);
        assert_eq!((c.n, c.n_q.clone(), c.mode), (4, vec![2], Mode::Exact));
        assert_eq!(c.signal, Some(SignalSource::Ramp));
        assert_eq!(c.shots, 0);
    }

    #[test]
    fn nq_exceeding_n() {
        let e = run(&["dft-run", "--n", "4", "--nq", "5"]).unwrap_err();
        assert!(
            e.message.contains("--nq") && e.message.contains("exceeds"),
            "{e}"
        );
    }

    #[test]
    fn sweep_range() {
        let c = run(&[
            "search-sweep",
            "--n",
            "10",
            "--nq",
            "0..10",
            "--solutions",
            "1",
            "--seed",
            "7",
        ])
        .unwrap();
        assert_eq!(c.n_q.len(), 11);
        assert_eq!(c.solutions, Some(SolutionSpec::List(vec![1])));
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn rejections_name_the_flag() {
        let cases: &[(&[&str], &str)] = &[
            (&["dft-run", "--n", "4", "--nq", "0..2"], "--nq"),
            (&["dft-run", "--n", "4", "--nq", "x"], "--nq"),
            (&["dft-run", "--nq", "1"], "--n"),
            (
                &["dft-run", "--n", "4", "--nq", "1", "--mode", "noisy"],
                "--mode",
            ),
            (
                &[
                    "dft-run", "--n", "4", "--nq", "1", "--mode", "sampled", "--shots", "0",
                ],
                "--shots",
            ),
            (
                &["dft-run", "--n", "4", "--nq", "1", "--signal", "sine"],
                "--signal",
            ),
            (
                &["dft-run", "--n", "4", "--nq", "1", "--svg", "a.svg"],
                "--svg",
            ),
            (&["search-run", "--n", "3", "--nq", "1"], "--solutions"),
            (
                &["search-run", "--n", "3", "--nq", "1", "--solutions", "8"],
                "--solutions",
            ),
            (
                &[
                    "search-run",
                    "--n",
                    "3",
                    "--nq",
                    "1",
                    "--random-solutions",
                    "9",
                ],
                "--random-solutions",
            ),
            (&["dft-run", "--n", "4", "--nq", "1", "--bogus"], "--bogus"),
        ];
        for (argv, flag) in cases {
            let e = run(argv).unwrap_err();
            assert!(e.message.contains(flag), "{argv:?}: {e}");
        }
    }

    #[test]
    fn verify_defaults() {
        let c = run(&["verify"]).unwrap();
        assert_eq!(c.n, DEFAULT_VERIFY_N);
        assert!(c.solutions.is_none() && c.signal.is_none());
    }

    #[test]
    fn help_is_displayed() {
        assert!(matches!(parse_args(["--help"]), Ok(Parsed::Display(_))));
    }
}
