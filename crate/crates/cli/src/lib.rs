//! Ensemble runner, file formats, and command line for the
//! pulsed-optomechanics phase-space simulator.
//!
//! The numerical kernels live in `phasespace-core`; this crate adds
//! parallel ensemble execution, configuration files, CSV/JSON/SVG
//! outputs, binary accumulator dumps, and the `phasespace` binary.

pub mod compare;
pub mod config;
pub mod dump;
pub mod ensemble;
pub mod report;
pub mod svg;

/// Process exit code for an engine error:
/// 2 = configuration, 3 = divergence, 4 = statistics, 5 = truncation.
pub fn exit_code(e: &phasespace_core::Error) -> i32 {
    use phasespace_core::Error::*;
    match e {
        InvalidParams(_) | InvalidConfig(_) => 2,
        Divergence { .. } | DivergenceBudgetExceeded { .. } => 3,
        InsufficientBatches { .. } | DegenerateGain | ZeroConditioningVariance
        | OrderingTagMissing => 4,
        Truncation { .. } | StepSize { .. } => 5,
    }
}
