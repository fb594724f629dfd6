use crate::error::{Error, Result};
use crate::params::{compute_time_slice, SchedParams};
use crate::sim::runqueue::{wake_task, RunQueue, TaskState, TaskStatus};
use crate::workload::{NextOp, Workload, WorkloadSpec};

/// Engine knobs that are not scheduler parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimConfig {
    pub num_cpus: u32,
    pub ns_per_jiffy: u64,
    pub max_jiffies: u64,
    /// Wall-clock cost of switching a CPU to a different task.
    pub switch_cost_ns: u64,
    /// The engine draws no random numbers; the seed is carried so that
    /// output files can record it.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_cpus: 1,
            ns_per_jiffy: 1_000_000,
            max_jiffies: 10_000_000,
            switch_cost_ns: 10_000,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_cpus == 0 {
            return Err(Error::Config("num_cpus must be >= 1".into()));
        }
        if self.ns_per_jiffy == 0 {
            return Err(Error::Config("ns_per_jiffy must be >= 1".into()));
        }
        if self.max_jiffies == 0 {
            return Err(Error::Config("max_jiffies must be >= 1".into()));
        }
        Ok(())
    }

    pub fn cap_ns(&self) -> u64 {
        self.max_jiffies.saturating_mul(self.ns_per_jiffy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimResult {
    pub turnaround_jiffies: u64,
    pub turnaround_ns: u64,
    pub messages_delivered: u64,
    pub context_switches: u64,
    pub completed: bool,
    /// Sum of execution time charged to all tasks.
    pub total_exec_ns: u64,
}

/// Notifications emitted while the engine runs. Used by tests and tooling
/// to check scheduling invariants from the outside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimEvent {
    Dispatch {
        at_ns: u64,
        cpu: usize,
        task: usize,
        vruntime_ns: u64,
        slice_ns: u64,
        /// Smallest vruntime still waiting in the queue.
        queued_min_vruntime_ns: Option<u64>,
    },
    Charge {
        at_ns: u64,
        task: usize,
        delta_ns: u64,
        vruntime_ns: u64,
        min_vruntime_ns: u64,
    },
    Wake {
        at_ns: u64,
        task: usize,
        vruntime_ns: u64,
    },
    Preempt {
        at_ns: u64,
        task: usize,
    },
    /// All idle CPUs have been offered work.
    Settled {
        at_ns: u64,
        idle_cpus: usize,
        runnable: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CpuState {
    Idle,
    Switching { task: usize, until: u64 },
    Running { task: usize, until: u64, cost: u64 },
}

#[derive(Debug, Clone)]
struct Cpu {
    state: CpuState,
    last_task: Option<usize>,
    slice_left: u64,
    /// No operation has started yet in the current slice.
    fresh: bool,
}

impl Cpu {
    fn until(&self) -> Option<u64> {
        match self.state {
            CpuState::Idle => None,
            CpuState::Switching { until, .. } | CpuState::Running { until, .. } => Some(until),
        }
    }
}

/// Event-driven single-queue CFS-style engine.
///
/// Time advances from one operation boundary to the next. A dispatched task
/// always completes at least one workload operation; further operations are
/// started only while they fit in the remaining slice. When the slice runs
/// out and another task is queued, the task goes back on the queue.
pub struct Simulation {
    params: SchedParams,
    config: SimConfig,
    workload: Workload,
    tasks: Vec<TaskState>,
    rq: RunQueue,
    cpus: Vec<Cpu>,
    now: u64,
    finished_at: u64,
    done: usize,
    delivered: u64,
    context_switches: u64,
}

impl Simulation {
    pub fn new(params: SchedParams, workload: Workload, config: SimConfig) -> Result<Self> {
        config.validate()?;
        if params.min_gran_ns == 0 {
            return Err(Error::ZeroGranularity);
        }
        let n = workload.num_tasks();
        if n == 0 {
            return Err(Error::Config("workload has no tasks".into()));
        }
        let tasks: Vec<TaskState> = (0..n).map(TaskState::new).collect();
        let mut rq = RunQueue::new();
        for t in &tasks {
            rq.insert(t);
        }
        let cpus = (0..config.num_cpus)
            .map(|_| Cpu {
                state: CpuState::Idle,
                last_task: None,
                slice_left: 0,
                fresh: true,
            })
            .collect();
        Ok(Self {
            params,
            config,
            workload,
            tasks,
            rq,
            cpus,
            now: 0,
            finished_at: 0,
            done: 0,
            delivered: 0,
            context_switches: 0,
        })
    }

    pub fn tasks(&self) -> &[TaskState] {
        &self.tasks
    }

    pub fn workload(&self) -> &Workload {
        &self.workload
    }

    pub fn runqueue(&self) -> &RunQueue {
        &self.rq
    }

    pub fn run(&mut self) -> Result<SimResult> {
        self.run_observed(|_| {})
    }

    pub fn run_observed<F: FnMut(&SimEvent)>(&mut self, mut observe: F) -> Result<SimResult> {
        let cap = self.config.cap_ns();
        loop {
            self.fill_idle(&mut observe)?;
            if self.done == self.tasks.len() {
                return Ok(self.result(self.finished_at, true));
            }
            let next = self
                .cpus
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.until().map(|t| (t, i)))
                .min();
            let Some((at, cpu)) = next else {
                let blocked = self
                    .tasks
                    .iter()
                    .filter(|t| t.status == TaskStatus::Blocked)
                    .count();
                return Err(Error::Deadlock {
                    at_ns: self.now,
                    blocked,
                });
            };
            if at > cap {
                self.now = cap;
                return Ok(self.result(cap, false));
            }
            self.now = at;
            self.complete(cpu, &mut observe)?;
        }
    }

    fn result(&self, turnaround_ns: u64, completed: bool) -> SimResult {
        SimResult {
            turnaround_jiffies: turnaround_ns.div_ceil(self.config.ns_per_jiffy),
            turnaround_ns,
            messages_delivered: self.delivered,
            context_switches: self.context_switches,
            completed,
            total_exec_ns: self.tasks.iter().map(|t| t.exec_total_ns).sum(),
        }
    }

    fn running_count(&self) -> usize {
        self.tasks
            .iter()
            .filter(|t| t.status == TaskStatus::Running)
            .count()
    }

    fn running_min_vruntime(&self) -> Option<u64> {
        self.cpus
            .iter()
            .filter_map(|c| match c.state {
                CpuState::Idle => None,
                CpuState::Switching { task, .. } | CpuState::Running { task, .. } => {
                    Some(self.tasks[task].vruntime_ns)
                }
            })
            .min()
    }

    fn update_min_vruntime(&mut self) {
        let running = self.running_min_vruntime();
        self.rq.update_min_vruntime(running);
    }

    fn slice_for_current_load(&self) -> Result<u64> {
        let nr_running = (self.rq.len() + self.running_count()) as u64;
        compute_time_slice(&self.params, nr_running)
    }

    fn fill_idle<F: FnMut(&SimEvent)>(&mut self, observe: &mut F) -> Result<()> {
        for cpu in 0..self.cpus.len() {
            while self.cpus[cpu].state == CpuState::Idle {
                let Some(task) = self.rq.pop_next() else {
                    break;
                };
                self.dispatch(cpu, task, observe)?;
            }
        }
        observe(&SimEvent::Settled {
            at_ns: self.now,
            idle_cpus: self
                .cpus
                .iter()
                .filter(|c| c.state == CpuState::Idle)
                .count(),
            runnable: self.rq.len(),
        });
        Ok(())
    }

    fn dispatch<F: FnMut(&SimEvent)>(
        &mut self,
        cpu: usize,
        task: usize,
        observe: &mut F,
    ) -> Result<()> {
        self.tasks[task].status = TaskStatus::Running;
        let slice = self.slice_for_current_load()?;
        observe(&SimEvent::Dispatch {
            at_ns: self.now,
            cpu,
            task,
            vruntime_ns: self.tasks[task].vruntime_ns,
            slice_ns: slice,
            queued_min_vruntime_ns: self.rq.head().map(|(v, _)| v),
        });
        let switching = matches!(self.cpus[cpu].last_task, Some(prev) if prev != task);
        let c = &mut self.cpus[cpu];
        c.slice_left = slice;
        c.fresh = true;
        c.last_task = Some(task);
        if switching {
            self.context_switches += 1;
            c.state = CpuState::Switching {
                task,
                until: self.now + self.config.switch_cost_ns,
            };
            self.update_min_vruntime();
            Ok(())
        } else {
            c.state = CpuState::Idle;
            self.start_op(cpu, task, observe)
        }
    }

    /// Starts the task's next operation on `cpu`, or releases the CPU if the
    /// task finished, blocked or ran out of slice.
    fn start_op<F: FnMut(&SimEvent)>(
        &mut self,
        cpu: usize,
        task: usize,
        observe: &mut F,
    ) -> Result<()> {
        match self.workload.next_op(task) {
            NextOp::Done => {
                self.tasks[task].status = TaskStatus::Done;
                self.done += 1;
                self.finished_at = self.now;
                self.cpus[cpu].state = CpuState::Idle;
            }
            NextOp::Blocked => {
                self.workload.mark_blocked(task);
                self.tasks[task].status = TaskStatus::Blocked;
                self.cpus[cpu].state = CpuState::Idle;
            }
            NextOp::Ready { cost_ns } => {
                let c = &self.cpus[cpu];
                if !c.fresh && cost_ns > c.slice_left {
                    if !self.rq.is_empty() {
                        self.tasks[task].status = TaskStatus::Runnable;
                        self.rq.insert(&self.tasks[task]);
                        self.cpus[cpu].state = CpuState::Idle;
                        observe(&SimEvent::Preempt {
                            at_ns: self.now,
                            task,
                        });
                        self.update_min_vruntime();
                        return Ok(());
                    }
                    // Nobody else wants the CPU: start a new slice.
                    let slice = self.slice_for_current_load()?;
                    let c = &mut self.cpus[cpu];
                    c.slice_left = slice;
                    c.fresh = true;
                }
                let c = &mut self.cpus[cpu];
                c.fresh = false;
                c.state = CpuState::Running {
                    task,
                    until: self.now + cost_ns,
                    cost: cost_ns,
                };
            }
        }
        self.update_min_vruntime();
        Ok(())
    }

    fn complete<F: FnMut(&SimEvent)>(&mut self, cpu: usize, observe: &mut F) -> Result<()> {
        match self.cpus[cpu].state {
            CpuState::Idle => Ok(()),
            CpuState::Switching { task, .. } => self.start_op(cpu, task, observe),
            CpuState::Running { task, cost, .. } => {
                let effect = self.workload.perform_op(task);
                self.tasks[task].charge(cost);
                let c = &mut self.cpus[cpu];
                c.slice_left = c.slice_left.saturating_sub(cost);
                if effect.delivered {
                    self.delivered += 1;
                }
                self.update_min_vruntime();
                observe(&SimEvent::Charge {
                    at_ns: self.now,
                    task,
                    delta_ns: cost,
                    vruntime_ns: self.tasks[task].vruntime_ns,
                    min_vruntime_ns: self.rq.min_vruntime_ns(),
                });
                for woken in effect.wakes {
                    wake_task(&mut self.rq, &mut self.tasks[woken])?;
                    observe(&SimEvent::Wake {
                        at_ns: self.now,
                        task: woken,
                        vruntime_ns: self.tasks[woken].vruntime_ns,
                    });
                }
                self.start_op(cpu, task, observe)
            }
        }
    }
}

/// Builds the workload and runs it to completion or to the jiffy cap.
pub fn run_simulation(
    params: &SchedParams,
    workload: &WorkloadSpec,
    config: &SimConfig,
) -> Result<SimResult> {
    let workload = Workload::build(workload)?;
    Simulation::new(*params, workload, config.clone())?.run()
}
