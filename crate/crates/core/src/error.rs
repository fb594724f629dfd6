use thiserror::Error;

/// Errors raised by the simulator, the workload builder and the optimizers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("minimum granularity must be non-zero")]
    ZeroGranularity,

    #[error("parameter `{name}` = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange {
        name: &'static str,
        value: u64,
        lo: u64,
        hi: u64,
    },

    #[error("task {0} is not blocked and cannot be woken")]
    NotBlocked(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("simulation deadlocked at {at_ns} ns with {blocked} blocked tasks")]
    Deadlock { at_ns: u64, blocked: usize },

    #[error("design must have exactly 3 factors, got {0}")]
    UnsupportedDesign(usize),

    #[error("least-squares system is singular")]
    SingularFit,

    #[error("no residual degrees of freedom left for significance tests")]
    NoDegreesOfFreedom,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
