//! Simulator for a semi-quantum computer: small `(n_q + 1)`-qubit quantum
//! nodes driven by a classical orchestrator.
//!
//! Two workloads are implemented on top of an exact statevector simulator:
//!
//! * [`search`]: Grover search run independently on `2^{n - n_q}` sublists,
//! * [`fft`]: a DFT whose bottom `n_q` recursion levels are replaced by a
//!   quantum node that reads out full complex Fourier coefficients
//!   ([`readout`]) and whose upper levels are classical butterflies.
//!
//! Every pipeline accumulates a [`cost::CostLedger`] whose counters are
//! comparable one-to-one with the closed forms in [`cost`].

pub mod cost;
pub mod error;
pub mod fft;
pub mod qsim;
pub mod readout;
pub mod search;
pub mod seed;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// How probabilities are read off a quantum node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Probabilities computed exactly from inner products.
    Exact,
    /// Probabilities estimated from a finite number of seeded shots.
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            other => Err(format!(
                "unknown mode `{other}` (expected exact or sampled)"
            )),
        }
    }
}
