//! Golden-section search over the scheduling period, and the two mappings
//! from a target period back to concrete scheduler parameters.

use crate::error::{Error, Result};
use crate::params::SchedParams;
use crate::sim::{run_simulation, SimConfig};
use crate::trace::OptTrace;
use crate::workload::WorkloadSpec;

/// `(3 - sqrt 5) / 2`, the short fraction of a golden split.
pub const RHO: f64 = 0.381_966_011_250_105_1;

/// Task count the discovery routines are built around (5 groups of 40).
pub const DISCOVERY_TASKS: u64 = 200;

const ALG1_LATENCY_NS: u64 = 19_900_000;
const ALG1_PERIOD_CAP_NS: u64 = 200_000_000_000;
const ALG2_PERIOD_CAP_NS: u64 = 1_000_000_000;
const ALG2_SMALL_LATENCY_NS: u64 = 20_000_000;
const ALG2_MIN_GRAN_NS: u64 = 100_000;

/// How a target period is turned into parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discovery {
    /// More tasks than fit in one latency window: fixed latency, the period
    /// is carried by the minimum granularity.
    Alg1,
    /// Few tasks: the latency is the period.
    Alg2,
}

impl Discovery {
    pub fn discover(self, sched_period_ns: u64) -> Result<SchedParams> {
        match self {
            Discovery::Alg1 => discover_params_alg1(sched_period_ns),
            Discovery::Alg2 => discover_params_alg2(sched_period_ns),
        }
    }

    /// Default search bracket `(a0, b0)` in ns.
    pub fn default_bracket(self) -> (f64, f64) {
        match self {
            Discovery::Alg1 => (2e7, 2.01e11),
            Discovery::Alg2 => (1e5, 2e9),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Discovery::Alg1 => 1,
            Discovery::Alg2 => 2,
        }
    }
}

pub fn discover_params_alg1(sched_period_ns: u64) -> Result<SchedParams> {
    if sched_period_ns < 20_000_000 {
        return Err(Error::Domain(format!(
            "algorithm 1 needs a period of at least 20000000 ns, got {sched_period_ns}"
        )));
    }
    let (period, wakeup) = split_excess(sched_period_ns, ALG1_PERIOD_CAP_NS);
    Ok(SchedParams::unchecked(
        ALG1_LATENCY_NS,
        period / DISCOVERY_TASKS,
        wakeup,
    ))
}

pub fn discover_params_alg2(sched_period_ns: u64) -> Result<SchedParams> {
    if sched_period_ns < 100_000 {
        return Err(Error::Domain(format!(
            "algorithm 2 needs a period of at least 100000 ns, got {sched_period_ns}"
        )));
    }
    let (period, wakeup) = split_excess(sched_period_ns, ALG2_PERIOD_CAP_NS);
    let latency = period;
    let min_gran = if latency < ALG2_SMALL_LATENCY_NS {
        period / DISCOVERY_TASKS
    } else {
        ALG2_MIN_GRAN_NS
    };
    Ok(SchedParams::unchecked(latency, min_gran, wakeup))
}

/// Anything above `cap` becomes wakeup granularity.
fn split_excess(period: u64, cap: u64) -> (u64, u64) {
    if period > cap {
        (cap, period - cap)
    } else {
        (period, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenConfig {
    pub a0: f64,
    pub b0: f64,
    pub rho: f64,
    /// Stop once the bracket is narrower than this.
    pub tol: f64,
    pub max_evals: usize,
    pub discovery: Discovery,
}

impl GoldenConfig {
    pub fn new(discovery: Discovery) -> Self {
        let (a0, b0) = discovery.default_bracket();
        Self {
            a0,
            b0,
            rho: RHO,
            tol: 1e6,
            max_evals: 30,
            discovery,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a0.is_nan() || self.b0.is_nan() || self.a0 >= self.b0 {
            return Err(Error::Domain(format!(
                "bracket [{}, {}] is empty",
                self.a0, self.b0
            )));
        }
        if !(self.rho > 0.0 && self.rho < 0.5) {
            return Err(Error::Domain(format!("rho {} outside (0, 0.5)", self.rho)));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Domain(format!("tolerance {} is negative", self.tol)));
        }
        if self.max_evals < 2 {
            return Err(Error::Config("max_evals must be >= 2".into()));
        }
        Ok(())
    }
}

/// Bracket and inner points between iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenState {
    pub a: f64,
    pub b: f64,
    pub a1: f64,
    pub b1: f64,
    pub f_a1: f64,
    pub f_b1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenOutcome {
    pub trace: OptTrace,
    /// Bracket in force when each evaluation was made.
    pub eval_brackets: Vec<(f64, f64)>,
    /// Bracket after 0, 1, 2, ... iterations.
    pub brackets: Vec<(f64, f64)>,
    /// Fresh evaluations per iteration, starting with iteration 1.
    pub fresh_per_iteration: Vec<usize>,
}

impl GoldenOutcome {
    pub fn minimizer(&self) -> f64 {
        self.trace.best_point[0]
    }
}

/// Golden-section minimization of `f` on `[a0, b0]`. After the two initial
/// probes each iteration evaluates exactly one new point.
pub fn golden_section_search<F>(mut f: F, config: &GoldenConfig) -> Result<GoldenOutcome>
where
    F: FnMut(f64) -> f64,
{
    config.validate()?;
    let rho = config.rho;
    let mut trace = OptTrace::new();
    let mut eval_brackets = Vec::new();
    let (mut a, mut b) = (config.a0, config.b0);
    let mut brackets = vec![(a, b)];
    let mut fresh_per_iteration = Vec::new();

    let mut probe = |x: f64, iteration: u32, a: f64, b: f64, trace: &mut OptTrace| {
        let y = f(x);
        trace.record(iteration, 0, vec![x], y);
        eval_brackets.push((a, b));
        trace.evaluations.last().unwrap().response
    };

    let mut state = GoldenState {
        a,
        b,
        a1: a + rho * (b - a),
        b1: b - rho * (b - a),
        f_a1: 0.0,
        f_b1: 0.0,
    };
    state.f_a1 = probe(state.a1, 1, a, b, &mut trace);
    state.f_b1 = probe(state.b1, 1, a, b, &mut trace);

    let mut iteration = 1u32;
    while b - a >= config.tol && trace.len() < config.max_evals {
        iteration += 1;
        if state.f_a1 < state.f_b1 {
            b = state.b1;
            state.b1 = state.a1;
            state.f_b1 = state.f_a1;
            state.a1 = a + rho * (b - a);
            state.f_a1 = probe(state.a1, iteration, a, b, &mut trace);
        } else {
            a = state.a1;
            state.a1 = state.b1;
            state.f_a1 = state.f_b1;
            state.b1 = b - rho * (b - a);
            state.f_b1 = probe(state.b1, iteration, a, b, &mut trace);
        }
        state.a = a;
        state.b = b;
        brackets.push((a, b));
        fresh_per_iteration.push(1);
    }
    Ok(GoldenOutcome {
        trace,
        eval_brackets,
        brackets,
        fresh_per_iteration,
    })
}

/// One scheduler evaluation made during a golden-section tuning run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEval {
    pub period_ns: u64,
    pub params: SchedParams,
    pub response_jiffies: u64,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenTuning {
    pub outcome: GoldenOutcome,
    pub evals: Vec<PeriodEval>,
}

/// Searches the scheduling period with the configured discovery routine,
/// scoring each period by simulated turnaround in jiffies.
pub fn tune_scheduler_golden(
    workload: &WorkloadSpec,
    sim: &SimConfig,
    config: &GoldenConfig,
) -> Result<GoldenTuning> {
    config.validate()?;
    workload.validate()?;
    sim.validate()?;
    let mut evals = Vec::new();
    let mut failure = None;
    let outcome = golden_section_search(
        |p| {
            let period_ns = p.round() as u64;
            let run = config
                .discovery
                .discover(period_ns)
                .and_then(|params| Ok((params, run_simulation(&params, workload, sim)?)));
            match run {
                Ok((params, r)) => {
                    evals.push(PeriodEval {
                        period_ns,
                        params,
                        response_jiffies: r.turnaround_jiffies,
                        completed: r.completed,
                    });
                    r.turnaround_jiffies as f64
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            }
        },
        config,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(GoldenTuning { outcome, evals })
}
