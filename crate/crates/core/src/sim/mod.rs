//! CFS-style scheduling engine.

mod engine;
mod runqueue;

pub use engine::{run_simulation, SimConfig, SimEvent, SimResult, Simulation};
pub use runqueue::{wake_task, RunQueue, TaskState, TaskStatus};
