//! Scheduler autotuning toolkit.
//!
//! A deterministic CFS-style simulator runs a hackbench-like workload; three
//! optimizers search the scheduler parameter space for the shortest
//! turnaround: particle swarm over all three parameters, golden-section
//! search over the scheduling period, and a response-surface study that
//! picks the swarm's own hyperparameters.

pub mod error;
pub mod experiment;
pub mod golden;
pub mod params;
pub mod pso;
pub mod rng;
pub mod rsm;
pub mod sim;
pub mod trace;
pub mod workload;

pub use error::{Error, Result};
pub use golden::{Discovery, GoldenConfig};
pub use params::{compute_nr_latency, compute_sched_period, compute_time_slice, SchedParams};
pub use pso::PsoConfig;
pub use sim::{run_simulation, SimConfig, SimResult};
pub use trace::OptTrace;
pub use workload::{Workload, WorkloadSpec};
