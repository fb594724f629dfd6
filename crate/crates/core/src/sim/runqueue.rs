use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Lifecycle of a simulated task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskStatus {
    Runnable,
    Running,
    Blocked,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskState {
    pub id: usize,
    pub vruntime_ns: u64,
    pub status: TaskStatus,
    pub exec_total_ns: u64,
}

impl TaskState {
    pub fn new(id: usize) -> Self {
        Self {
            id,
            vruntime_ns: 0,
            status: TaskStatus::Runnable,
            exec_total_ns: 0,
        }
    }

    /// Accounts `delta_ns` of execution against the task.
    pub fn charge(&mut self, delta_ns: u64) {
        self.vruntime_ns += delta_ns;
        self.exec_total_ns += delta_ns;
    }
}

/// Ready tasks ordered by `(vruntime, id)`.
#[derive(Debug, Clone, Default)]
pub struct RunQueue {
    ready: BTreeSet<(u64, usize)>,
    min_vruntime_ns: u64,
}

impl RunQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.ready.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ready.is_empty()
    }

    pub fn min_vruntime_ns(&self) -> u64 {
        self.min_vruntime_ns
    }

    pub fn insert(&mut self, task: &TaskState) {
        self.ready.insert((task.vruntime_ns, task.id));
    }

    /// Smallest `(vruntime, id)` key currently queued.
    pub fn head(&self) -> Option<(u64, usize)> {
        self.ready.first().copied()
    }

    /// The task that has received the least CPU, ties to the lower id.
    pub fn pick_next(&self) -> Option<usize> {
        self.head().map(|(_, id)| id)
    }

    pub fn pop_next(&mut self) -> Option<usize> {
        self.ready.pop_first().map(|(_, id)| id)
    }

    /// Advances `min_vruntime` towards the smallest vruntime among running
    /// tasks and the queue head. Never moves backwards.
    pub fn update_min_vruntime(&mut self, running_min: Option<u64>) {
        let candidate = match (running_min, self.head().map(|(v, _)| v)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if let Some(c) = candidate {
            self.min_vruntime_ns = self.min_vruntime_ns.max(c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.ready.iter().copied()
    }
}

/// Moves a blocked task back onto the queue, lifting its vruntime to the
/// queue's floor so a long sleeper cannot monopolise the CPU.
pub fn wake_task(rq: &mut RunQueue, task: &mut TaskState) -> Result<()> {
    if task.status != TaskStatus::Blocked {
        return Err(Error::NotBlocked(task.id));
    }
    task.status = TaskStatus::Runnable;
    task.vruntime_ns = task.vruntime_ns.max(rq.min_vruntime_ns);
    rq.insert(task);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(id: usize, vr: u64) -> TaskState {
        TaskState {
            vruntime_ns: vr,
            ..TaskState::new(id)
        }
    }

    #[test]
    fn picks_min_vruntime() {
        let mut rq = RunQueue::new();
        rq.insert(&task(0, 5));
        rq.insert(&task(1, 3));
        assert_eq!(rq.pick_next(), Some(1));
    }

    #[test]
    fn ties_go_to_lower_id() {
        let mut rq = RunQueue::new();
        rq.insert(&task(1, 3));
        rq.insert(&task(0, 3));
        assert_eq!(rq.pick_next(), Some(0));
    }

    #[test]
    fn empty_queue_is_idle() {
        assert_eq!(RunQueue::new().pick_next(), None);
    }

    fn rq_with_floor(floor: u64) -> RunQueue {
        let mut rq = RunQueue::new();
        rq.update_min_vruntime(Some(floor));
        rq
    }

    #[test]
    fn wake_lifts_to_floor() {
        let mut rq = rq_with_floor(10_000);
        let mut t = task(4, 0);
        t.status = TaskStatus::Blocked;
        wake_task(&mut rq, &mut t).unwrap();
        assert_eq!(t.vruntime_ns, 10_000);
        assert_eq!(t.status, TaskStatus::Runnable);
        assert_eq!(rq.head(), Some((10_000, 4)));
    }

    #[test]
    fn wake_keeps_larger_vruntime() {
        let mut rq = rq_with_floor(10_000);
        let mut t = task(4, 50_000);
        t.status = TaskStatus::Blocked;
        wake_task(&mut rq, &mut t).unwrap();
        assert_eq!(t.vruntime_ns, 50_000);
    }

    #[test]
    fn waking_runnable_task_fails() {
        let mut rq = RunQueue::new();
        let mut t = task(2, 0);
        assert_eq!(wake_task(&mut rq, &mut t), Err(Error::NotBlocked(2)));
        assert!(rq.is_empty());
    }

    #[test]
    fn min_vruntime_never_decreases() {
        let mut rq = rq_with_floor(100);
        rq.update_min_vruntime(Some(50));
        assert_eq!(rq.min_vruntime_ns(), 100);
        rq.update_min_vruntime(None);
        assert_eq!(rq.min_vruntime_ns(), 100);
    }
}
