//! End-to-end pipelines shared by the CLI and the acceptance suite.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::golden::{tune_scheduler_golden, GoldenConfig, GoldenTuning};
use crate::params::{SchedParams, PARAM_MAX_NS, PARAM_MIN_NS};
use crate::pso::{run_pso, PsoConfig};
use crate::sim::{run_simulation, SimConfig, SimResult};
use crate::trace::OptTrace;
use crate::workload::WorkloadSpec;

/// Search box for (latency, min_gran, wakeup_gran) in raw nanoseconds.
pub fn scheduler_bounds() -> Vec<(f64, f64)> {
    let (lo, hi) = (PARAM_MIN_NS as f64, PARAM_MAX_NS as f64);
    vec![(lo, hi), (lo, hi), (0.0, hi)]
}

/// Rounds a swarm position to integer nanoseconds.
pub fn params_from_position(x: &[f64]) -> SchedParams {
    let ns = |v: f64| v.round().max(0.0) as u64;
    SchedParams::unchecked(ns(x[0]), ns(x[1]).max(1), ns(x[2]))
}

/// Turnaround in jiffies for a swarm position. Runs that hit the jiffy cap
/// score `max_jiffies`.
pub fn scheduler_objective<'a>(
    workload: &'a WorkloadSpec,
    sim: &'a SimConfig,
) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    move |x| match run_simulation(&params_from_position(x), workload, sim) {
        Ok(r) => r.turnaround_jiffies as f64,
        Err(_) => f64::NAN,
    }
}

/// PSO over the three scheduler parameters.
pub fn tune_scheduler_pso(
    workload: &WorkloadSpec,
    sim: &SimConfig,
    config: &PsoConfig,
) -> Result<OptTrace> {
    workload.validate()?;
    sim.validate()?;
    run_pso(scheduler_objective(workload, sim), config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub workload: WorkloadSpec,
    pub sim: SimConfig,
    /// Swarm settings; the seed is replaced by each entry of `seeds`.
    pub pso: PsoConfig,
    pub golden: Vec<GoldenConfig>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pso,
    GoldenAlg1,
    GoldenAlg2,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Pso => "pso",
            Method::GoldenAlg1 => "golden-alg1",
            Method::GoldenAlg2 => "golden-alg2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: Method,
    pub seed: u64,
    pub best_response: f64,
    pub evals_to_best: usize,
    pub total_evals: usize,
    /// Golden rows: evaluations the swarm (same seed) needed to first match
    /// this row's best. Empty for swarm rows.
    pub pso_evals_to_match: Option<usize>,
    /// Golden rows: evaluations this search needed to match the swarm's
    /// best, if it ever did.
    pub evals_to_match_pso: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub pso_traces: Vec<(u64, OptTrace)>,
    pub golden_runs: Vec<(Method, GoldenTuning)>,
}

/// Runs the swarm once per seed and each golden variant once (the search is
/// deterministic), on identical workloads, and tabulates the best responses
/// and convergence speeds.
pub fn compare_experiment(config: &CompareConfig) -> Result<Comparison> {
    if config.golden.is_empty() {
        return Err(Error::Config(
            "comparison needs at least one golden variant".into(),
        ));
    }
    if config.seeds.is_empty() {
        return Err(Error::Config("comparison needs at least one seed".into()));
    }
    let golden_runs = config
        .golden
        .iter()
        .map(|g| {
            let method = match g.discovery.number() {
                1 => Method::GoldenAlg1,
                _ => Method::GoldenAlg2,
            };
            tune_scheduler_golden(&config.workload, &config.sim, g).map(|t| (method, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let pso_traces = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let pso = PsoConfig {
                seed,
                ..config.pso.clone()
            };
            tune_scheduler_pso(&config.workload, &config.sim, &pso).map(|t| (seed, t))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (seed, trace) in &pso_traces {
        rows.push(CompareRow {
            method: Method::Pso,
            seed: *seed,
            best_response: trace.best_response,
            evals_to_best: trace.evals_to_best,
            total_evals: trace.len(),
            pso_evals_to_match: None,
            evals_to_match_pso: None,
        });
        for (method, g) in &golden_runs {
            let gt = &g.outcome.trace;
            rows.push(CompareRow {
                method: *method,
                seed: *seed,
                best_response: gt.best_response,
                evals_to_best: gt.evals_to_best,
                total_evals: gt.len(),
                pso_evals_to_match: trace.evals_to_reach(gt.best_response),
                evals_to_match_pso: gt.evals_to_reach(trace.best_response),
            });
        }
    }
    Ok(Comparison {
        rows,
        pso_traces,
        golden_runs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(msgs, result)` per simulated point.
    pub points: Vec<(u32, SimResult)>,
}

/// Simulates the workload at each message count and fits turnaround
/// jiffies against messages per pair with a least-squares line.
pub fn validate_linearity(
    msgs_list: &[u32],
    base: &WorkloadSpec,
    sim: &SimConfig,
    params: &SchedParams,
) -> Result<LinearFit> {
    let mut distinct = msgs_list.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Config(format!(
            "linearity check needs at least 3 distinct message counts, got {}",
            distinct.len()
        )));
    }
    let points = msgs_list
        .par_iter()
        .map(|&msgs| {
            let spec = WorkloadSpec {
                msgs,
                ..base.clone()
            };
            run_simulation(params, &spec, sim).map(|r| (msgs, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|(m, r)| (f64::from(*m), r.turnaround_jiffies as f64))
        .collect();
    let (slope, intercept, r_squared) = least_squares_line(&xy);
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        points,
    })
}

/// Slope, intercept and R² of the ordinary least-squares line.
pub fn least_squares_line(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, intercept, r_squared)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_rounding() {
        let p = params_from_position(&[1e5 + 0.6, 2.5e6 - 0.4, 0.2]);
        assert_eq!(p, SchedParams::unchecked(100_001, 2_500_000, 0));
    }

    #[test]
    fn line_fit_exact() {
        let (m, b, r2) = least_squares_line(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert!((m - 2.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linearity_needs_three_points() {
        let spec = WorkloadSpec {
            groups: 1,
            fanout: 2,
            ..WorkloadSpec::default()
        };
        let sim = SimConfig::default();
        let err = validate_linearity(&[5, 5], &spec, &sim, &SchedParams::default());
        assert!(matches!(err, Err(Error::Config(_))));
        let fit = validate_linearity(&[0, 3, 6], &spec, &sim, &SchedParams::default()).unwrap();
        assert_eq!(fit.points[0].1.messages_delivered, 0);
        assert!(fit.r_squared > 0.9);
    }
}
