//! The three tunable scheduler parameters and the period/slice arithmetic
//! derived from them.

use crate::error::{Error, Result};

/// Lower bound for latency and minimum granularity, in ns.
pub const PARAM_MIN_NS: u64 = 100_000;
/// Upper bound shared by all three parameters, in ns.
pub const PARAM_MAX_NS: u64 = 1_000_000_000;

/// Latency, minimum granularity and wakeup granularity, all in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchedParams {
    pub latency_ns: u64,
    pub min_gran_ns: u64,
    pub wakeup_gran_ns: u64,
}

impl SchedParams {
    /// Builds a parameter triple after checking the documented ranges.
    pub fn new(latency_ns: u64, min_gran_ns: u64, wakeup_gran_ns: u64) -> Result<Self> {
        check("latency", latency_ns, PARAM_MIN_NS, PARAM_MAX_NS)?;
        check("min_gran", min_gran_ns, PARAM_MIN_NS, PARAM_MAX_NS)?;
        check("wakeup_gran", wakeup_gran_ns, 0, PARAM_MAX_NS)?;
        Ok(Self::unchecked(latency_ns, min_gran_ns, wakeup_gran_ns))
    }

    /// Builds a triple without range checks. The parameter-discovery
    /// routines produce values outside the documented ranges.
    pub const fn unchecked(latency_ns: u64, min_gran_ns: u64, wakeup_gran_ns: u64) -> Self {
        Self {
            latency_ns,
            min_gran_ns,
            wakeup_gran_ns,
        }
    }
}

impl Default for SchedParams {
    /// Mainline 2.6.23 defaults: 20 ms latency, 4 ms minimum granularity,
    /// 10 ms wakeup granularity.
    fn default() -> Self {
        Self::unchecked(20_000_000, 4_000_000, 10_000_000)
    }
}

fn check(name: &'static str, value: u64, lo: u64, hi: u64) -> Result<()> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}

/// Number of tasks that fit into one latency window at minimum granularity,
/// floored and clamped to at least one.
pub fn compute_nr_latency(params: &SchedParams) -> Result<u64> {
    if params.min_gran_ns == 0 {
        return Err(Error::ZeroGranularity);
    }
    Ok((params.latency_ns / params.min_gran_ns).max(1))
}

/// Period over which every runnable task should run once.
///
/// The stretched branch uses `min_gran * num_tasks`, which equals
/// `latency * num_tasks / nr_latency` without the double truncation.
pub fn compute_sched_period(params: &SchedParams, num_tasks: u64) -> Result<u64> {
    let nr_latency = compute_nr_latency(params)?;
    let num_tasks = num_tasks.max(1);
    if num_tasks <= nr_latency {
        Ok(params.latency_ns)
    } else {
        Ok(params.min_gran_ns.saturating_mul(num_tasks))
    }
}

/// Equal-weight share of the period plus the wakeup allowance.
pub fn compute_time_slice(params: &SchedParams, num_tasks: u64) -> Result<u64> {
    let num_tasks = num_tasks.max(1);
    let period = compute_sched_period(params, num_tasks)?;
    Ok(period / num_tasks + params.wakeup_gran_ns)
}
