//! Brute-force reference simulator. Advances time in fixed 1 µs ticks,
//! scans a plain vector for the least-served task and keeps its own copy of
//! the sender/receiver state machines. Shares no code with the engine.

use std::collections::VecDeque;

pub const TICK_NS: u64 = 1_000;

#[derive(Clone, Copy, Debug)]
pub struct OracleParams {
    pub latency_ns: u64,
    pub min_gran_ns: u64,
    pub wakeup_gran_ns: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleWorkload {
    pub groups: usize,
    pub fanout: usize,
    pub msgs: usize,
    pub send_ns: u64,
    pub recv_ns: u64,
    pub capacity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub turnaround_ns: u64,
    pub messages_delivered: u64,
    pub context_switches: u64,
    pub completed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum St {
    Ready,
    Running,
    Asleep,
    Finished,
}

#[derive(Clone, Copy, Debug)]
enum Role {
    Tx { sent: usize },
    Rx { got: usize, next_from: usize },
}

struct T {
    vr: u64,
    st: St,
    role: Role,
    sleeping_on_channel: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Phase {
    Free,
    Switch(u64),
    Work(u64, u64),
}

struct C {
    cur: Option<usize>,
    last: Option<usize>,
    phase: Phase,
    slice_ticks_left: u64,
    untouched: bool,
}

struct World {
    p: OracleParams,
    w: OracleWorkload,
    tasks: Vec<T>,
    chans: Vec<VecDeque<usize>>,
    cpus: Vec<C>,
    min_vr: u64,
    delivered: u64,
    switches: u64,
    switch_ticks: u64,
}

impl World {
    fn per_group(&self) -> usize {
        2 * self.w.fanout
    }

    fn chan(&self, g: usize, s: usize, r: usize) -> usize {
        g * self.w.fanout * self.w.fanout + s * self.w.fanout + r
    }

    fn where_is(&self, t: usize) -> (usize, usize, bool) {
        let g = t / self.per_group();
        let k = t % self.per_group();
        if k < self.w.fanout {
            (g, k, true)
        } else {
            (g, k - self.w.fanout, false)
        }
    }

    fn slice_ns(&self, n: u64) -> u64 {
        let mut nr_lat = self.p.latency_ns / self.p.min_gran_ns;
        if nr_lat == 0 {
            nr_lat = 1;
        }
        let period = if n > nr_lat {
            n * self.p.min_gran_ns
        } else {
            self.p.latency_ns
        };
        period / n + self.p.wakeup_gran_ns
    }

    fn runnable_count(&self) -> u64 {
        let queued = self.tasks.iter().filter(|t| t.st == St::Ready).count();
        let on_cpu = self.cpus.iter().filter(|c| c.cur.is_some()).count();
        (queued + on_cpu) as u64
    }

    fn least_served(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, t) in self.tasks.iter().enumerate() {
            if t.st != St::Ready {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if t.vr < self.tasks[b].vr => best = Some(i),
                _ => {}
            }
        }
        best
    }

    fn refresh_min_vr(&mut self) {
        let mut cand: Option<u64> = None;
        for c in &self.cpus {
            if let Some(t) = c.cur {
                let v = self.tasks[t].vr;
                cand = Some(cand.map_or(v, |x: u64| x.min(v)));
            }
        }
        if let Some(h) = self.least_served() {
            let v = self.tasks[h].vr;
            cand = Some(cand.map_or(v, |x: u64| x.min(v)));
        }
        if let Some(c) = cand {
            if c > self.min_vr {
                self.min_vr = c;
            }
        }
    }

    /// Cost of the next operation, or None plus "finished?" flag.
    fn next_cost(&self, t: usize) -> Result<u64, bool> {
        let (g, idx, is_tx) = self.where_is(t);
        match self.tasks[t].role {
            Role::Tx { sent } => {
                let _ = is_tx;
                if sent == self.w.fanout * self.w.msgs {
                    return Err(true);
                }
                let r = sent % self.w.fanout;
                if self.chans[self.chan(g, idx, r)].len() >= self.w.capacity {
                    Err(false)
                } else {
                    Ok(self.w.send_ns)
                }
            }
            Role::Rx { got, next_from } => {
                if got == self.w.fanout * self.w.msgs {
                    return Err(true);
                }
                let any = (0..self.w.fanout)
                    .map(|k| (next_from + k) % self.w.fanout)
                    .any(|s| !self.chans[self.chan(g, s, idx)].is_empty());
                if any {
                    Ok(self.w.recv_ns)
                } else {
                    Err(false)
                }
            }
        }
    }

    fn wake(&mut self, t: usize) {
        let task = &mut self.tasks[t];
        task.sleeping_on_channel = false;
        task.st = St::Ready;
        if task.vr < self.min_vr {
            task.vr = self.min_vr;
        }
    }

    fn apply(&mut self, t: usize) {
        let (g, idx, _) = self.where_is(t);
        let f = self.w.fanout;
        match self.tasks[t].role {
            Role::Tx { sent } => {
                let r = sent % f;
                let ch = self.chan(g, idx, r);
                self.chans[ch].push_back(sent);
                self.tasks[t].role = Role::Tx { sent: sent + 1 };
                let rx = g * self.per_group() + f + r;
                self.refresh_min_vr();
                if self.tasks[rx].sleeping_on_channel {
                    self.wake(rx);
                }
            }
            Role::Rx { got, next_from } => {
                let s = (0..f)
                    .map(|k| (next_from + k) % f)
                    .find(|&s| !self.chans[self.chan(g, s, idx)].is_empty())
                    .unwrap();
                let ch = self.chan(g, s, idx);
                let was_full = self.chans[ch].len() >= self.w.capacity;
                self.chans[ch].pop_front();
                self.delivered += 1;
                self.tasks[t].role = Role::Rx {
                    got: got + 1,
                    next_from: (s + 1) % f,
                };
                let tx = g * self.per_group() + s;
                self.refresh_min_vr();
                if was_full && self.tasks[tx].sleeping_on_channel {
                    if let Role::Tx { sent } = self.tasks[tx].role {
                        if sent % f == idx {
                            self.wake(tx);
                        }
                    }
                }
            }
        }
    }

    fn begin(&mut self, c: usize, t: usize) {
        match self.next_cost(t) {
            Err(finished) => {
                self.tasks[t].st = if finished { St::Finished } else { St::Asleep };
                if !finished {
                    self.tasks[t].sleeping_on_channel = true;
                }
                self.cpus[c].cur = None;
                self.cpus[c].phase = Phase::Free;
            }
            Ok(cost) => {
                let ticks = cost / TICK_NS;
                if !self.cpus[c].untouched && ticks > self.cpus[c].slice_ticks_left {
                    if self.least_served().is_some() {
                        self.tasks[t].st = St::Ready;
                        self.cpus[c].cur = None;
                        self.cpus[c].phase = Phase::Free;
                        self.refresh_min_vr();
                        return;
                    }
                    let n = self.runnable_count();
                    self.cpus[c].slice_ticks_left = self.slice_ns(n) / TICK_NS;
                    self.cpus[c].untouched = true;
                }
                self.cpus[c].untouched = false;
                self.cpus[c].phase = Phase::Work(ticks, cost);
            }
        }
        self.refresh_min_vr();
    }

    fn put_on_cpu(&mut self, c: usize, t: usize) {
        self.tasks[t].st = St::Running;
        self.cpus[c].cur = Some(t);
        let n = self.runnable_count();
        let slice = self.slice_ns(n);
        // Slices are kept in whole ticks; every cost in use is a tick multiple
        // so flooring only matters when comparing against op costs.
        self.cpus[c].slice_ticks_left = slice / TICK_NS;
        self.cpus[c].untouched = true;
        let other = matches!(self.cpus[c].last, Some(prev) if prev != t);
        self.cpus[c].last = Some(t);
        if other {
            self.switches += 1;
            self.cpus[c].phase = Phase::Switch(self.switch_ticks);
            self.refresh_min_vr();
        } else {
            self.begin(c, t);
        }
    }

    fn offer_work(&mut self) {
        for c in 0..self.cpus.len() {
            while self.cpus[c].phase == Phase::Free {
                match self.least_served() {
                    Some(t) => self.put_on_cpu(c, t),
                    None => break,
                }
            }
        }
    }

    fn finish_phase(&mut self, c: usize) {
        let t = self.cpus[c].cur.unwrap();
        match self.cpus[c].phase {
            Phase::Switch(_) => self.begin(c, t),
            Phase::Work(_, cost) => {
                self.tasks[t].vr += cost;
                self.apply(t);
                self.begin(c, t);
            }
            Phase::Free => unreachable!(),
        }
    }
}

/// Runs the reference simulator. All costs must be whole microseconds.
pub fn simulate(
    p: OracleParams,
    w: OracleWorkload,
    num_cpus: usize,
    switch_cost_ns: u64,
    cap_ns: u64,
) -> OracleResult {
    for v in [w.send_ns, w.recv_ns, switch_cost_ns] {
        assert_eq!(v % TICK_NS, 0, "oracle needs microsecond-aligned costs");
    }
    let n = w.groups * 2 * w.fanout;
    let tasks = (0..n)
        .map(|t| {
            let is_tx = t % (2 * w.fanout) < w.fanout;
            T {
                vr: 0,
                st: St::Ready,
                role: if is_tx {
                    Role::Tx { sent: 0 }
                } else {
                    Role::Rx {
                        got: 0,
                        next_from: 0,
                    }
                },
                sleeping_on_channel: false,
            }
        })
        .collect();
    let mut world = World {
        p,
        w,
        tasks,
        chans: vec![VecDeque::new(); w.groups * w.fanout * w.fanout],
        cpus: (0..num_cpus)
            .map(|_| C {
                cur: None,
                last: None,
                phase: Phase::Free,
                slice_ticks_left: 0,
                untouched: true,
            })
            .collect(),
        min_vr: 0,
        delivered: 0,
        switches: 0,
        switch_ticks: switch_cost_ns / TICK_NS,
    };
    let mut now = 0u64;
    loop {
        loop {
            world.offer_work();
            let due = world
                .cpus
                .iter()
                .position(|c| matches!(c.phase, Phase::Switch(0) | Phase::Work(0, _)));
            match due {
                Some(c) => world.finish_phase(c),
                None => break,
            }
        }
        if world.tasks.iter().all(|t| t.st == St::Finished) {
            return OracleResult {
                turnaround_ns: now,
                messages_delivered: world.delivered,
                context_switches: world.switches,
                completed: true,
            };
        }
        assert!(
            world.cpus.iter().any(|c| c.phase != Phase::Free),
            "oracle deadlock"
        );
        if now + TICK_NS > cap_ns {
            return OracleResult {
                turnaround_ns: cap_ns,
                messages_delivered: world.delivered,
                context_switches: world.switches,
                completed: false,
            };
        }
        now += TICK_NS;
        for c in &mut world.cpus {
            match &mut c.phase {
                Phase::Switch(left) => *left -= 1,
                Phase::Work(left, _) => {
                    *left -= 1;
                    c.slice_ticks_left = c.slice_ticks_left.saturating_sub(1);
                }
                Phase::Free => {}
            }
        }
    }
}
