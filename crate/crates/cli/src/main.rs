use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;
mod settings;

use settings::{CliError, Layered, SEED_ENV};

/// Simulate a fair-share scheduler under a message-passing workload and tune
/// its parameters.
#[derive(Debug, Parser)]
#[command(name = "schedtune", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and print its turnaround.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sched: SchedFlags,
    },
    /// Tune all three scheduler parameters with a particle swarm.
    Pso {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pso: PsoFlags,
    },
    /// Tune the scheduling period with golden-section search.
    Golden {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        golden: GoldenFlags,
    },
    /// Box-Behnken study of the swarm hyperparameters.
    Rsm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pso: PsoFlags,
        /// Centre-point replicates in the design.
        #[arg(long)]
        center_replicates: Option<String>,
        /// Significance level for screening.
        #[arg(long)]
        alpha: Option<String>,
        /// Analyse responses from a CSV with an `rsum` column instead of
        /// running the swarm.
        #[arg(long)]
        responses: Option<PathBuf>,
        /// Also write the coefficient table here.
        #[arg(long)]
        coef_output: Option<PathBuf>,
    },
    /// Check that turnaround grows linearly with message count.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sched: SchedFlags,
        /// Comma-separated message counts.
        #[arg(long = "msgs-list")]
        msgs_list: Option<String>,
    },
    /// Run the swarm and golden variants on the same workload.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pso: PsoFlags,
        #[command(flatten)]
        golden: GoldenFlags,
        /// Comma-separated swarm seeds.
        #[arg(long)]
        seeds: Option<String>,
        /// Comma-separated golden discovery algorithms.
        #[arg(long)]
        algos: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write `series,x,y` plot data here.
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
    /// Master seed (falls back to the CFS_AUTOTUNE_SEED variable).
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    groups: Option<String>,
    #[arg(long)]
    fanout: Option<String>,
    #[arg(long)]
    msgs: Option<String>,
    #[arg(long = "send-cost")]
    send_cost: Option<String>,
    #[arg(long = "recv-cost")]
    recv_cost: Option<String>,
    #[arg(long)]
    capacity: Option<String>,
    #[arg(long)]
    cpus: Option<String>,
    #[arg(long = "ns-per-jiffy")]
    ns_per_jiffy: Option<String>,
    #[arg(long = "max-jiffies")]
    max_jiffies: Option<String>,
    #[arg(long = "switch-cost")]
    switch_cost: Option<String>,
}

#[derive(Debug, Args)]
struct SchedFlags {
    #[arg(long)]
    latency: Option<String>,
    #[arg(long = "min-gran")]
    min_gran: Option<String>,
    #[arg(long = "wakeup-gran")]
    wakeup_gran: Option<String>,
}

#[derive(Debug, Args)]
struct PsoFlags {
    #[arg(long)]
    w: Option<String>,
    #[arg(long = "phi-p")]
    phi_p: Option<String>,
    #[arg(long = "phi-g")]
    phi_g: Option<String>,
    #[arg(long)]
    particles: Option<String>,
    #[arg(long)]
    iters: Option<String>,
}

#[derive(Debug, Args)]
struct GoldenFlags {
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    a0: Option<String>,
    #[arg(long)]
    b0: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "max-evals")]
    max_evals: Option<String>,
}

impl Common {
    fn layer(&self, allowed: &[&str]) -> Result<Layered, CliError> {
        let file = match &self.config {
            Some(p) => settings::load_config(p)?,
            None => Default::default(),
        };
        let mut l = Layered::new(file, std::env::var(SEED_ENV).ok());
        l.restrict_sections(allowed)?;
        l.set("seed", self.seed.as_ref());
        l.set("workload.groups", self.groups.as_ref());
        l.set("workload.fanout", self.fanout.as_ref());
        l.set("workload.msgs", self.msgs.as_ref());
        l.set("workload.send_cost_ns", self.send_cost.as_ref());
        l.set("workload.recv_cost_ns", self.recv_cost.as_ref());
        l.set("workload.capacity", self.capacity.as_ref());
        l.set("sim.cpus", self.cpus.as_ref());
        l.set("sim.ns_per_jiffy", self.ns_per_jiffy.as_ref());
        l.set("sim.max_jiffies", self.max_jiffies.as_ref());
        l.set("sim.switch_cost_ns", self.switch_cost.as_ref());
        Ok(l)
    }

    fn io(&self) -> commands::Io {
        commands::Io {
            output: self.output.clone(),
            plot: self.emit_plot_data.clone(),
        }
    }
}

impl SchedFlags {
    fn apply(&self, l: &mut Layered) {
        l.set("sched.latency_ns", self.latency.as_ref());
        l.set("sched.min_gran_ns", self.min_gran.as_ref());
        l.set("sched.wakeup_gran_ns", self.wakeup_gran.as_ref());
    }
}

impl PsoFlags {
    fn apply(&self, l: &mut Layered) {
        l.set("pso.w", self.w.as_ref());
        l.set("pso.phi_p", self.phi_p.as_ref());
        l.set("pso.phi_g", self.phi_g.as_ref());
        l.set("pso.particles", self.particles.as_ref());
        l.set("pso.iters", self.iters.as_ref());
    }
}

impl GoldenFlags {
    fn apply(&self, l: &mut Layered) {
        l.set("golden.algo", self.algo.as_ref());
        l.set("golden.a0", self.a0.as_ref());
        l.set("golden.b0", self.b0.as_ref());
        l.set("golden.tol", self.tol.as_ref());
        l.set("golden.max_evals", self.max_evals.as_ref());
    }
}

const BASE: [&str; 2] = ["workload", "sim"];

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { common, sched } => {
            let mut l = common.layer(&[&BASE[..], &["sched"]].concat())?;
            sched.apply(&mut l);
            commands::simulate(&l, &common.io())
        }
        Command::Pso { common, pso } => {
            let mut l = common.layer(&[&BASE[..], &["pso"]].concat())?;
            pso.apply(&mut l);
            commands::pso(&l, &common.io())
        }
        Command::Golden { common, golden } => {
            let mut l = common.layer(&[&BASE[..], &["golden"]].concat())?;
            golden.apply(&mut l);
            commands::golden(&l, &common.io())
        }
        Command::Rsm {
            common,
            pso,
            center_replicates,
            alpha,
            responses,
            coef_output,
        } => {
            let mut l = common.layer(&[&BASE[..], &["pso", "rsm"]].concat())?;
            pso.apply(&mut l);
            l.set("rsm.center_replicates", center_replicates.as_ref());
            l.set("rsm.alpha", alpha.as_ref());
            commands::rsm(
                &l,
                &common.io(),
                responses.as_deref(),
                coef_output.as_deref(),
            )
        }
        Command::Validate {
            common,
            sched,
            msgs_list,
        } => {
            let mut l = common.layer(&[&BASE[..], &["sched", "validate"]].concat())?;
            sched.apply(&mut l);
            l.set("validate.msgs", msgs_list.as_ref());
            commands::validate(&l, &common.io())
        }
        Command::Compare {
            common,
            pso,
            golden,
            seeds,
            algos,
        } => {
            let mut l = common.layer(&[&BASE[..], &["pso", "golden", "compare"]].concat())?;
            pso.apply(&mut l);
            golden.apply(&mut l);
            l.set("compare.seeds", seeds.as_ref());
            l.set("compare.algos", algos.as_ref());
            commands::compare(&l, &common.io())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
