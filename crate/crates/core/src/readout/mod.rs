//! Full complex DFT of a real block on one quantum node.
//!
//! The block is amplitude-encoded into the data register, an ancilla in
//! `|+>` controls a QFT on the data, and the joint state is then
//! measured against `N` pairwise-orthogonal data projectors, two ancilla
//! effects each. The projectors pair conjugate indices `k` and `N - k`, so
//! each one isolates either the real or the imaginary part of a Fourier
//! coefficient. The ancilla `|0>` branch carries the known input, which
//! lets the classical side decide the sign of every magnitude.

mod block;
mod rebuild;
mod schedule;

pub use block::{prepare_block_state, BlockVector};
pub use rebuild::{rebuild_phases, rescale_to_dft, RebuildOptions, SpectrumEstimate};
pub use schedule::{
    build_schedule, execute_schedule, Projector, ReadoutRecord, ReadoutSchedule, Role,
    ScheduleEntry, Target,
};
