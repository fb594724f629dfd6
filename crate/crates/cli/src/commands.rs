//! One function per subcommand.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use schedtune::experiment::{
    compare_experiment, params_from_position, scheduler_bounds, scheduler_objective,
    tune_scheduler_pso, validate_linearity, CompareConfig,
};
use schedtune::golden::{tune_scheduler_golden, Discovery};
use schedtune::rsm::{
    analyze_design, box_behnken_design, pso_factors, recommended_pso_hyperparameters,
    run_meta_study, Branch, FittedSurface, MetaResponse, RsmStudy, DEFAULT_ALPHA,
};
use schedtune::{
    run_simulation, GoldenConfig, OptTrace, PsoConfig, SchedParams, SimConfig, WorkloadSpec,
};

use crate::output::{fmt_f64, fmt_jiffies, fmt_opt, write_csv, write_plot, Header};
use crate::settings::{parse_list, parse_u32, parse_u64, CliError, CliResult, Layered};

pub struct Io {
    pub output: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Io {
    /// The summary goes to stdout unless stdout carries the CSV.
    fn summary(&self, text: &str) {
        if self.output.is_some() {
            print!("{text}");
        } else {
            eprint!("{text}");
        }
    }
}

fn push_workload(h: &mut Header, w: &WorkloadSpec) {
    h.push("workload.groups", w.groups);
    h.push("workload.fanout", w.fanout);
    h.push("workload.msgs", w.msgs);
    h.push("workload.send_cost_ns", w.msg_cost_send_ns);
    h.push("workload.recv_cost_ns", w.msg_cost_recv_ns);
    h.push("workload.capacity", w.channel_capacity);
}

fn push_sim(h: &mut Header, s: &SimConfig) {
    h.push("sim.cpus", s.num_cpus);
    h.push("sim.ns_per_jiffy", s.ns_per_jiffy);
    h.push("sim.max_jiffies", s.max_jiffies);
    h.push("sim.switch_cost_ns", s.switch_cost_ns);
}

fn push_sched(h: &mut Header, p: &SchedParams) {
    h.push("sched.latency_ns", p.latency_ns);
    h.push("sched.min_gran_ns", p.min_gran_ns);
    h.push("sched.wakeup_gran_ns", p.wakeup_gran_ns);
}

fn push_pso(h: &mut Header, c: &PsoConfig, with_weights: bool) {
    if with_weights {
        h.push("pso.w", fmt_f64(c.w));
        h.push("pso.phi_p", fmt_f64(c.phi_p));
        h.push("pso.phi_g", fmt_f64(c.phi_g));
    }
    h.push("pso.particles", c.n_particles);
    h.push("pso.iters", c.max_iters);
}

fn push_golden(h: &mut Header, prefix: &str, c: &GoldenConfig) {
    h.push(&format!("{prefix}.algo"), c.discovery.number());
    h.push(&format!("{prefix}.a0"), fmt_f64(c.a0));
    h.push(&format!("{prefix}.b0"), fmt_f64(c.b0));
    h.push(&format!("{prefix}.tol"), fmt_f64(c.tol));
    h.push(&format!("{prefix}.max_evals"), c.max_evals);
}

fn base(l: &Layered, command: &'static str) -> CliResult<(u64, WorkloadSpec, SimConfig, Header)> {
    let seed = l.seed()?;
    let w = l.workload()?;
    let s = l.sim(seed)?;
    let mut h = Header::new(command, seed);
    push_workload(&mut h, &w);
    push_sim(&mut h, &s);
    Ok((seed, w, s, h))
}

fn running_best_series(name: &str, trace: &OptTrace) -> Vec<(String, f64, f64)> {
    trace
        .running_best()
        .into_iter()
        .enumerate()
        .map(|(i, y)| (name.to_string(), (i + 1) as f64, y))
        .collect()
}

pub fn simulate(l: &Layered, io: &Io) -> CliResult<()> {
    let (_, w, s, mut h) = base(l, "simulate")?;
    let p = l.sched()?;
    push_sched(&mut h, &p);
    let r = run_simulation(&p, &w, &s)?;
    let mut text = String::new();
    writeln!(text, "turnaround_jiffies = {}", r.turnaround_jiffies).unwrap();
    writeln!(text, "turnaround_ns = {}", r.turnaround_ns).unwrap();
    writeln!(text, "messages_delivered = {}", r.messages_delivered).unwrap();
    writeln!(text, "context_switches = {}", r.context_switches).unwrap();
    writeln!(text, "completed = {}", r.completed).unwrap();
    print!("{text}");
    if let Some(path) = &io.output {
        let row = vec![
            r.turnaround_jiffies.to_string(),
            r.turnaround_ns.to_string(),
            r.messages_delivered.to_string(),
            r.context_switches.to_string(),
            r.completed.to_string(),
        ];
        write_csv(
            Some(path),
            &h,
            &[
                "turnaround_jiffies",
                "turnaround_ns",
                "messages_delivered",
                "context_switches",
                "completed",
            ],
            &[row],
        )?;
    }
    Ok(())
}

pub fn pso(l: &Layered, io: &Io) -> CliResult<()> {
    let (seed, w, s, mut h) = base(l, "pso")?;
    let cfg = l.pso(scheduler_bounds(), seed)?;
    push_pso(&mut h, &cfg, true);
    let trace = tune_scheduler_pso(&w, &s, &cfg)?;
    let best = trace.running_best();
    let rows: Vec<Vec<String>> = trace
        .evaluations
        .iter()
        .zip(&best)
        .map(|(e, g)| {
            let p = params_from_position(&e.point);
            vec![
                e.iteration.to_string(),
                e.slot.to_string(),
                p.latency_ns.to_string(),
                p.min_gran_ns.to_string(),
                p.wakeup_gran_ns.to_string(),
                fmt_jiffies(e.response),
                fmt_jiffies(*g),
            ]
        })
        .collect();
    write_csv(
        io.output.as_deref(),
        &h,
        &[
            "iter",
            "particle",
            "x1_ns",
            "x2_ns",
            "x3_ns",
            "response_jiffies",
            "global_best",
        ],
        &rows,
    )?;
    if let Some(path) = &io.plot {
        write_plot(path, &h, &running_best_series("pso", &trace))?;
    }
    let p = params_from_position(&trace.best_point);
    io.summary(&format!(
        "best_response_jiffies = {}\nbest_latency_ns = {}\nbest_min_gran_ns = {}\nbest_wakeup_gran_ns = {}\nevals_to_best = {}\niters_to_converge = {}\n",
        fmt_jiffies(trace.best_response),
        p.latency_ns,
        p.min_gran_ns,
        p.wakeup_gran_ns,
        trace.evals_to_best,
        trace.iters_to_converge
    ));
    Ok(())
}

pub fn golden(l: &Layered, io: &Io) -> CliResult<()> {
    let (_, w, s, mut h) = base(l, "golden")?;
    let discovery = l.discovery("golden.algo", l.raw("golden.algo").unwrap_or("1"))?;
    let cfg = l.golden(discovery)?;
    push_golden(&mut h, "golden", &cfg);
    let t = tune_scheduler_golden(&w, &s, &cfg)?;
    let rows: Vec<Vec<String>> = t
        .evals
        .iter()
        .zip(&t.outcome.eval_brackets)
        .enumerate()
        .map(|(i, (e, (a, b)))| {
            vec![
                (i + 1).to_string(),
                e.period_ns.to_string(),
                e.params.latency_ns.to_string(),
                e.params.min_gran_ns.to_string(),
                e.params.wakeup_gran_ns.to_string(),
                e.response_jiffies.to_string(),
                format!("{a:.0}"),
                format!("{b:.0}"),
            ]
        })
        .collect();
    write_csv(
        io.output.as_deref(),
        &h,
        &[
            "eval",
            "P_ns",
            "latency_ns",
            "min_gran_ns",
            "wakeup_ns",
            "response_jiffies",
            "a_ns",
            "b_ns",
        ],
        &rows,
    )?;
    if let Some(path) = &io.plot {
        write_plot(path, &h, &running_best_series("golden", &t.outcome.trace))?;
    }
    let best = &t.evals[t.outcome.trace.evals_to_best - 1];
    io.summary(&format!(
        "best_response_jiffies = {}\nbest_period_ns = {}\nevals_to_best = {}\ntotal_evals = {}\n",
        best.response_jiffies,
        best.period_ns,
        t.outcome.trace.evals_to_best,
        t.evals.len()
    ));
    Ok(())
}

/// Reads the `rsum` column (and `r_star`/`i_star` when present) from a CSV
/// whose `#` lines are comments.
/// `(r_star, i_star, rsum)` for one design row.
type ResponseRow = (Option<f64>, Option<u32>, f64);

fn read_responses(path: &Path) -> CliResult<Vec<ResponseRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Usage(e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let rsum = col("rsum")
        .ok_or_else(|| CliError::Usage(format!("{} has no rsum column", path.display())))?;
    let (r_star, i_star) = (col("r_star"), col("i_star"));
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Usage(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let y = crate::settings::parse_f64("rsum", field(rsum))?;
        let r = r_star
            .filter(|&i| !field(i).is_empty())
            .map(|i| crate::settings::parse_f64("r_star", field(i)))
            .transpose()?;
        let n = i_star
            .filter(|&i| !field(i).is_empty())
            .map(|i| parse_u32("i_star", field(i)))
            .transpose()?;
        out.push((r, n, y));
    }
    Ok(out)
}

fn coef_rows(label: &str, study: &RsmStudy, fit: &FittedSurface) -> Vec<Vec<String>> {
    fit.tests
        .iter()
        .zip(&fit.term_names)
        .map(|(t, name)| {
            vec![
                label.to_string(),
                name.clone(),
                fmt_f64(t.estimate),
                fmt_f64(t.std_error),
                fmt_f64(t.t),
                fmt_f64(t.p_value),
                (t.p_value < study.alpha).to_string(),
            ]
        })
        .collect()
}

fn coef_table(label: &str, study: &RsmStudy, fit: &FittedSurface) -> String {
    let mut s = format!("{label} model ({} residual dof)\n", fit.model.dof);
    writeln!(
        s,
        "  {:<16} {:>16} {:>14} {:>10} {:>10}",
        "term", "estimate", "std_error", "t", "p"
    )
    .unwrap();
    for r in coef_rows(label, study, fit) {
        let mark = if r[6] == "true" { " *" } else { "" };
        let num = |v: &str| v.parse::<f64>().unwrap_or(f64::NAN);
        writeln!(
            s,
            "  {:<16} {:>16.6} {:>14.6} {:>10.4} {:>10.4}{mark}",
            r[1],
            num(&r[2]),
            num(&r[3]),
            num(&r[4]),
            num(&r[5])
        )
        .unwrap();
    }
    s
}

pub fn rsm(
    l: &Layered,
    io: &Io,
    responses: Option<&Path>,
    coef_output: Option<&Path>,
) -> CliResult<()> {
    let (seed, w, s, mut h) = base(l, "rsm")?;
    let reps = l.u64("rsm.center_replicates", 2)? as usize;
    let alpha = l.f64("rsm.alpha", DEFAULT_ALPHA)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!("alpha {alpha} outside (0, 1)")));
    }
    h.push("rsm.center_replicates", reps);
    h.push("rsm.alpha", fmt_f64(alpha));
    let factors = pso_factors();

    let (natural, meta, study) = if let Some(path) = responses {
        let design = box_behnken_design(&factors, reps)?;
        let read = read_responses(path)?;
        if read.len() != design.len() {
            return Err(CliError::Usage(format!(
                "{} responses for a {}-run design",
                read.len(),
                design.len()
            )));
        }
        h.push("rsm.responses", path.display());
        let y: Vec<f64> = read.iter().map(|r| r.2).collect();
        let study = analyze_design(&design, &y, alpha)?;
        let natural = design
            .runs
            .iter()
            .map(|r| r.natural.clone())
            .collect::<Vec<_>>();
        (natural, read, study)
    } else {
        let base_cfg = l.pso(scheduler_bounds(), seed)?;
        push_pso(&mut h, &base_cfg, false);
        let m = run_meta_study(
            &factors,
            reps,
            &base_cfg,
            scheduler_objective(&w, &s),
            seed,
            alpha,
        )?;
        let natural = m.rows.iter().map(|r| r.natural.clone()).collect::<Vec<_>>();
        let meta = m
            .rows
            .iter()
            .map(|r| {
                let MetaResponse {
                    r_star,
                    i_star,
                    rsum,
                } = r.response;
                (Some(r_star), Some(i_star), rsum)
            })
            .collect();
        (natural, meta, m.study)
    };

    let rows: Vec<Vec<String>> = natural
        .iter()
        .zip(&meta)
        .enumerate()
        .map(|(i, (n, (r, it, y)))| {
            vec![
                (i + 1).to_string(),
                fmt_f64(n[0]),
                fmt_f64(n[1]),
                fmt_f64(n[2]),
                r.map_or_else(String::new, fmt_jiffies),
                it.map_or_else(String::new, |v| v.to_string()),
                fmt_jiffies(*y),
            ]
        })
        .collect();
    write_csv(
        io.output.as_deref(),
        &h,
        &["run", "w", "phi_p", "phi_g", "r_star", "i_star", "rsum"],
        &rows,
    )?;
    if let Some(path) = coef_output {
        let mut all = coef_rows("full", &study, &study.full);
        all.extend(coef_rows("accepted", &study, &study.accepted));
        write_csv(
            Some(path),
            &h,
            &[
                "model",
                "term",
                "estimate",
                "std_error",
                "t",
                "p_value",
                "significant",
            ],
            &all,
        )?;
    }
    if let Some(path) = &io.plot {
        let pts: Vec<(String, f64, f64)> = meta
            .iter()
            .enumerate()
            .map(|(i, m)| ("rsum".to_string(), (i + 1) as f64, m.2))
            .collect();
        write_plot(path, &h, &pts)?;
    }

    let (rw, rp, rg) = recommended_pso_hyperparameters(&study)?;
    let rec = &study.recommendation;
    let mut text = coef_table("full", &study, &study.full);
    let dropped: Vec<&str> = study
        .dropped
        .iter()
        .map(|&f| study.factors[f].name.as_str())
        .collect();
    writeln!(
        text,
        "dropped factors: {}",
        if dropped.is_empty() {
            "none".into()
        } else {
            dropped.join(", ")
        }
    )
    .unwrap();
    if !dropped.is_empty() {
        text.push_str(&coef_table("accepted", &study, &study.accepted));
    }
    let branch = match rec.branch {
        Branch::Stationary => "stationary point",
        Branch::DescentPath => "descent path",
    };
    writeln!(
        text,
        "recommendation via {branch}; eigenvalues {:?}",
        rec.eigenvalues
    )
    .unwrap();
    writeln!(
        text,
        "recommended w = {rw:.4}, phi_p = {rp:.4}, phi_g = {rg:.4}"
    )
    .unwrap();
    io.summary(&text);
    Ok(())
}

pub fn validate(l: &Layered, io: &Io) -> CliResult<()> {
    let (_, w, s, mut h) = base(l, "validate")?;
    let p = l.sched()?;
    push_sched(&mut h, &p);
    let msgs = parse_list(
        "validate.msgs",
        l.raw("validate.msgs")
            .unwrap_or("10,20,30,40,50,60,70,80,90,100"),
        parse_u32,
    )?;
    h.push(
        "validate.msgs",
        msgs.iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    let fit = validate_linearity(&msgs, &w, &s, &p)?;
    let rows: Vec<Vec<String>> = fit
        .points
        .iter()
        .map(|(m, r)| {
            vec![
                m.to_string(),
                r.turnaround_jiffies.to_string(),
                r.messages_delivered.to_string(),
                r.completed.to_string(),
            ]
        })
        .collect();
    write_csv(
        io.output.as_deref(),
        &h,
        &[
            "msgs",
            "turnaround_jiffies",
            "messages_delivered",
            "completed",
        ],
        &rows,
    )?;
    if let Some(path) = &io.plot {
        let pts: Vec<(String, f64, f64)> = fit
            .points
            .iter()
            .map(|(m, r)| {
                (
                    "turnaround".to_string(),
                    f64::from(*m),
                    r.turnaround_jiffies as f64,
                )
            })
            .collect();
        write_plot(path, &h, &pts)?;
    }
    io.summary(&format!(
        "slope = {:.6}\nintercept = {:.6}\nr_squared = {:.6}\n",
        fit.slope, fit.intercept, fit.r_squared
    ));
    Ok(())
}

pub fn compare(l: &Layered, io: &Io) -> CliResult<()> {
    let (seed, w, s, mut h) = base(l, "compare")?;
    let pso = l.pso(scheduler_bounds(), seed)?;
    push_pso(&mut h, &pso, true);
    let seeds = parse_list(
        "compare.seeds",
        l.raw("compare.seeds").unwrap_or("1,2,3,4,5"),
        parse_u64,
    )?;
    let algos = parse_list(
        "compare.algos",
        l.raw("compare.algos").unwrap_or("1,2"),
        |k, v| match parse_u32(k, v)? {
            1 => Ok(Discovery::Alg1),
            2 => Ok(Discovery::Alg2),
            n => Err(CliError::Usage(format!(
                "`{k}`: algorithm {n} is not 1 or 2"
            ))),
        },
    )?;
    let golden = algos
        .iter()
        .map(|&d| l.golden(d))
        .collect::<CliResult<Vec<_>>>()?;
    h.push(
        "compare.seeds",
        seeds
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    for g in &golden {
        push_golden(&mut h, &format!("golden{}", g.discovery.number()), g);
    }
    let cmp = compare_experiment(&CompareConfig {
        workload: w,
        sim: s,
        pso,
        golden,
        seeds,
    })?;
    let rows: Vec<Vec<String>> = cmp
        .rows
        .iter()
        .map(|r| {
            vec![
                r.method.label().to_string(),
                r.seed.to_string(),
                fmt_jiffies(r.best_response),
                r.evals_to_best.to_string(),
                r.total_evals.to_string(),
                fmt_opt(r.pso_evals_to_match),
                fmt_opt(r.evals_to_match_pso),
            ]
        })
        .collect();
    write_csv(
        io.output.as_deref(),
        &h,
        &[
            "method",
            "seed",
            "best_response",
            "evals_to_best",
            "total_evals",
            "pso_evals_to_match",
            "evals_to_match_pso",
        ],
        &rows,
    )?;
    if let Some(path) = &io.plot {
        let mut pts = Vec::new();
        for (seed, t) in &cmp.pso_traces {
            pts.extend(running_best_series(&format!("pso-seed{seed}"), t));
        }
        for (m, g) in &cmp.golden_runs {
            pts.extend(running_best_series(m.label(), &g.outcome.trace));
        }
        write_plot(path, &h, &pts)?;
    }
    let mut text = format!(
        "{:<12} {:>6} {:>10} {:>8} {:>8}\n",
        "method", "seed", "best", "to_best", "evals"
    );
    for r in &cmp.rows {
        writeln!(
            text,
            "{:<12} {:>6} {:>10} {:>8} {:>8}",
            r.method.label(),
            r.seed,
            fmt_jiffies(r.best_response),
            r.evals_to_best,
            r.total_evals
        )
        .unwrap();
    }
    io.summary(&text);
    Ok(())
}
