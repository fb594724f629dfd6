//! Hackbench-style chat workload: groups of senders and receivers, one
//! bounded FIFO channel per (sender, receiver) pair, each task driven as a
//! resumable finite-state machine.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Shape and cost model of a hackbench run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorkloadSpec {
    pub groups: u32,
    /// Senders per group; each group has as many receivers.
    pub fanout: u32,
    /// Messages per sender-receiver pair.
    pub msgs: u32,
    pub msg_cost_send_ns: u64,
    pub msg_cost_recv_ns: u64,
    pub channel_capacity: u32,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        Self {
            groups: 5,
            fanout: 20,
            msgs: 1,
            msg_cost_send_ns: 750_000,
            msg_cost_recv_ns: 750_000,
            channel_capacity: 64,
        }
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.groups == 0 {
            return Err(Error::Config("groups must be >= 1".into()));
        }
        if self.fanout == 0 {
            return Err(Error::Config("fanout must be >= 1".into()));
        }
        if self.channel_capacity == 0 {
            return Err(Error::Config("channel_capacity must be >= 1".into()));
        }
        Ok(())
    }

    pub fn num_tasks(&self) -> usize {
        self.groups as usize * 2 * self.fanout as usize
    }

    pub fn num_channels(&self) -> usize {
        self.groups as usize * self.fanout as usize * self.fanout as usize
    }

    /// Messages that a complete run must deliver.
    pub fn expected_deliveries(&self) -> u64 {
        self.num_channels() as u64 * u64::from(self.msgs)
    }
}

/// Bounded FIFO between one sender and one receiver.
#[derive(Debug, Clone)]
pub struct Channel {
    pub sender_id: usize,
    pub receiver_id: usize,
    pub queue: VecDeque<u64>,
    pub capacity: usize,
}

impl Channel {
    pub fn is_full(&self) -> bool {
        self.queue.len() >= self.capacity
    }
}

/// Resumable per-task state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsmState {
    Sender {
        next_receiver: u32,
        next_msg: u32,
    },
    Receiver {
        received: u64,
        expected: u64,
        /// Round-robin position over this receiver's senders.
        cursor: u32,
    },
}

/// FSM-level status after a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Runnable,
    Blocked,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub consumed_ns: u64,
    pub status: StepStatus,
    /// Tasks that were blocked and became runnable because of this step.
    pub wakes: Vec<usize>,
}

/// What the task would do if given the CPU now.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextOp {
    Ready { cost_ns: u64 },
    Blocked,
    Done,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpEffect {
    pub wakes: Vec<usize>,
    pub delivered: bool,
}

/// Instantiated workload: FSMs, channels and the blocked flags used to
/// decide who gets woken.
#[derive(Debug, Clone)]
pub struct Workload {
    spec: WorkloadSpec,
    fsm: Vec<FsmState>,
    channels: Vec<Channel>,
    waiting: Vec<bool>,
    delivered: u64,
}

impl Workload {
    pub fn build(spec: &WorkloadSpec) -> Result<Self> {
        spec.validate()?;
        let f = spec.fanout as usize;
        let n = spec.num_tasks();
        let mut fsm = Vec::with_capacity(n);
        for _ in 0..spec.groups {
            fsm.extend((0..f).map(|_| FsmState::Sender {
                next_receiver: 0,
                next_msg: 0,
            }));
            fsm.extend((0..f).map(|_| FsmState::Receiver {
                received: 0,
                expected: f as u64 * u64::from(spec.msgs),
                cursor: 0,
            }));
        }
        let mut channels = Vec::with_capacity(spec.num_channels());
        for g in 0..spec.groups as usize {
            for s in 0..f {
                for r in 0..f {
                    channels.push(Channel {
                        sender_id: g * 2 * f + s,
                        receiver_id: g * 2 * f + f + r,
                        queue: VecDeque::new(),
                        capacity: spec.channel_capacity as usize,
                    });
                }
            }
        }
        Ok(Self {
            spec: spec.clone(),
            fsm,
            channels,
            waiting: vec![false; n],
            delivered: 0,
        })
    }

    pub fn spec(&self) -> &WorkloadSpec {
        &self.spec
    }

    pub fn num_tasks(&self) -> usize {
        self.fsm.len()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn fsm(&self, task: usize) -> &FsmState {
        &self.fsm[task]
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn residual_messages(&self) -> usize {
        self.channels.iter().map(|c| c.queue.len()).sum()
    }

    pub fn is_done(&self, task: usize) -> bool {
        matches!(self.next_op(task), NextOp::Done)
    }

    fn fanout(&self) -> usize {
        self.spec.fanout as usize
    }

    /// (group, index within the sender or receiver half).
    fn locate(&self, task: usize) -> (usize, usize) {
        let f = self.fanout();
        (task / (2 * f), task % (2 * f) % f)
    }

    fn channel_index(&self, group: usize, sender: usize, receiver: usize) -> usize {
        let f = self.fanout();
        group * f * f + sender * f + receiver
    }

    /// Channel a receiver would read next, scanning from its cursor.
    fn next_nonempty(&self, task: usize, cursor: u32) -> Option<usize> {
        let f = self.fanout();
        let (g, r) = self.locate(task);
        (0..f)
            .map(|k| (cursor as usize + k) % f)
            .find(|&s| !self.channels[self.channel_index(g, s, r)].queue.is_empty())
    }

    pub fn next_op(&self, task: usize) -> NextOp {
        match self.fsm[task] {
            FsmState::Sender {
                next_receiver,
                next_msg,
            } => {
                if next_msg >= self.spec.msgs {
                    return NextOp::Done;
                }
                let (g, s) = self.locate(task);
                let ch = &self.channels[self.channel_index(g, s, next_receiver as usize)];
                if ch.is_full() {
                    NextOp::Blocked
                } else {
                    NextOp::Ready {
                        cost_ns: self.spec.msg_cost_send_ns,
                    }
                }
            }
            FsmState::Receiver {
                received,
                expected,
                cursor,
            } => {
                if received >= expected {
                    NextOp::Done
                } else if self.next_nonempty(task, cursor).is_some() {
                    NextOp::Ready {
                        cost_ns: self.spec.msg_cost_recv_ns,
                    }
                } else {
                    NextOp::Blocked
                }
            }
        }
    }

    /// Performs one atomic send or receive. Panics if the task has no ready
    /// operation; callers check [`Workload::next_op`] first.
    pub fn perform_op(&mut self, task: usize) -> OpEffect {
        let f = self.fanout();
        let (g, idx) = self.locate(task);
        match self.fsm[task] {
            FsmState::Sender {
                next_receiver,
                next_msg,
            } => {
                let ci = self.channel_index(g, idx, next_receiver as usize);
                let ch = &mut self.channels[ci];
                assert!(next_msg < self.spec.msgs && !ch.is_full(), "send not ready");
                ch.queue.push_back(u64::from(next_msg));
                let receiver = ch.receiver_id;
                let (nr, nm) = if next_receiver as usize + 1 == f {
                    (0, next_msg + 1)
                } else {
                    (next_receiver + 1, next_msg)
                };
                self.fsm[task] = FsmState::Sender {
                    next_receiver: nr,
                    next_msg: nm,
                };
                let mut effect = OpEffect::default();
                if self.waiting[receiver] {
                    self.waiting[receiver] = false;
                    effect.wakes.push(receiver);
                }
                effect
            }
            FsmState::Receiver {
                received,
                expected,
                cursor,
            } => {
                let s = self.next_nonempty(task, cursor).expect("receive not ready");
                let ci = self.channel_index(g, s, idx);
                let ch = &mut self.channels[ci];
                let was_full = ch.is_full();
                ch.queue.pop_front();
                let sender = ch.sender_id;
                self.fsm[task] = FsmState::Receiver {
                    received: received + 1,
                    expected,
                    cursor: ((s + 1) % f) as u32,
                };
                self.delivered += 1;
                let mut effect = OpEffect {
                    wakes: Vec::new(),
                    delivered: true,
                };
                // The sender only waits on the channel it is currently targeting.
                if was_full && self.waiting[sender] {
                    if let FsmState::Sender { next_receiver, .. } = self.fsm[sender] {
                        if next_receiver as usize == idx {
                            self.waiting[sender] = false;
                            effect.wakes.push(sender);
                        }
                    }
                }
                effect
            }
        }
    }

    /// Records that the task went to sleep waiting on a channel.
    pub fn mark_blocked(&mut self, task: usize) {
        self.waiting[task] = true;
    }

    pub fn is_waiting(&self, task: usize) -> bool {
        self.waiting[task]
    }

    /// Runs the task's FSM for at most `budget_ns` of work. Operations are
    /// atomic: one that does not fit in the remaining budget is not started.
    pub fn step(&mut self, task: usize, budget_ns: u64) -> StepOutcome {
        let mut consumed = 0u64;
        let mut wakes = Vec::new();
        loop {
            match self.next_op(task) {
                NextOp::Done => {
                    return StepOutcome {
                        consumed_ns: consumed,
                        status: StepStatus::Done,
                        wakes,
                    }
                }
                NextOp::Blocked => {
                    self.mark_blocked(task);
                    return StepOutcome {
                        consumed_ns: consumed,
                        status: StepStatus::Blocked,
                        wakes,
                    };
                }
                NextOp::Ready { cost_ns } => {
                    if cost_ns > budget_ns - consumed {
                        return StepOutcome {
                            consumed_ns: consumed,
                            status: StepStatus::Runnable,
                            wakes,
                        };
                    }
                    consumed += cost_ns;
                    wakes.extend(self.perform_op(task).wakes);
                }
            }
        }
    }
}
