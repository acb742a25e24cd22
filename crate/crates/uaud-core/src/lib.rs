//! Exact density computations on discrete abelian groups.
//!
//! The crate evaluates upper densities and uniform (Banach) upper densities
//! exactly on finite groups, exactly for periodic subsets of the integer
//! lattice, and as windowed finite-scale estimates otherwise. On top of the
//! density engine it builds greedy difference-set covers with checkable
//! certificates, bounded-degree greedy partitions, Folner-style windows,
//! the fattening construction, and a verifier that machine-checks the
//! relations between all of these on desk-scale instances.
//!
//! Everything is exact integer or rational arithmetic; identical inputs and
//! seeds produce identical outputs, including all certificate witnesses.

pub mod cover;
pub mod density;
pub mod group;
pub mod job;
pub mod partition;
pub mod rat;
pub mod set;
pub mod verify;
pub mod window;

pub use cover::{gap_statistics, greedy_packing_complement, syndetic_certificate,
    verify_translates_cover, CoverCertificate, GapStatistics};
pub use density::{density_def1_finite, density_def2_finite, periodic_banach_oracle,
    uniform_upper_density_windows, upper_density_sequence, DensityReport, Exactness,
    ScaleRecord};
pub use group::{farey_subgroup, Element, Group, GroupSpec};
pub use job::{run_job, JobCommand, JobOptions, JobSpec};
pub use partition::{fatten, folner_box, greedy_partition, local_count, packing_bound_check,
    PartitionCertificate};
pub use rat::Rat;
pub use set::{MeasureSpec, SetSpec};
pub use verify::{run_suite, suite_names, syndetic_pipeline, CheckFailure, CheckResult,
    PipelineReport};
pub use window::{window_points, TranslateSearch, WindowFamily, WindowShape};

use thiserror::Error as ThisError;

/// Errors shared across the crate.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidGroupSpec(String),
    #[error("element is not canonical: {0}")]
    NotCanonical(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("invalid set spec: {0}")]
    InvalidSetSpec(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("translate search must specify a range: {0}")]
    MustSpecifyRange(String),
    #[error("brute-force cap exceeded: group order {order} > cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("set has zero density: {0}")]
    ZeroDensity(String),
    #[error("packing condition fails: {witness}")]
    PackingViolated { witness: String },
    #[error("pipeline stage '{stage}' failed: {reason}")]
    PipelineStage { stage: String, reason: String },
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
