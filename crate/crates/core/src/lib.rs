//! Single-machine scheduling with release dates, due dates and compressible
//! processing times, minimizing maximum lateness under a compression budget.
//!
//! Schedules are built by the ED heuristic, analysed through their kernels,
//! regularized, and then compressed by one of three algorithms. Exhaustive
//! oracles certify results on small instances.

pub mod algorithms;
pub mod ed;
pub mod error;
pub mod gen;
pub mod io;
pub mod kernel;
pub mod model;
pub mod oracle;
pub mod verify;

pub use algorithms::{
    algorithm1, algorithm2, algorithm3, algorithm3_stage1, algorithm3_stage2, is_well_balanced, solve, Algorithm,
    RunTrace, SolveOutcome, TerminalReason,
};
pub use ed::{ed_schedule, initial_schedule};
pub use error::{Error, Result};
pub use kernel::{decompose_kernel, delta_min, extract_kernels, is_regular, overflow_jobs, regularize, Kernel};
pub use model::{canonical_timing, CompressionVector, Cost, Instance, Job, JobIdx, Schedule, Time};
pub use oracle::{oracle_compressible, oracle_generic, OracleLimits};
