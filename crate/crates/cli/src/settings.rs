//! Flat `key = value` config files, flag overrides and typed resolution.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use schedtune::golden::Discovery;
use schedtune::{GoldenConfig, PsoConfig, SchedParams, SimConfig, WorkloadSpec};

pub const SEED_ENV: &str = "CFS_AUTOTUNE_SEED";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed config, invalid ranges. Exit code 2.
    Usage(String),
    /// Failure while running a pipeline. Exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<schedtune::Error> for CliError {
    fn from(e: schedtune::Error) -> Self {
        use schedtune::Error as E;
        match e {
            E::ZeroGranularity
            | E::ParamOutOfRange { .. }
            | E::Config(_)
            | E::Domain(_)
            | E::UnsupportedDesign(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Every key a config file may set, with its section.
pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "workload.groups",
    "workload.fanout",
    "workload.msgs",
    "workload.send_cost_ns",
    "workload.recv_cost_ns",
    "workload.capacity",
    "sim.cpus",
    "sim.ns_per_jiffy",
    "sim.max_jiffies",
    "sim.switch_cost_ns",
    "sched.latency_ns",
    "sched.min_gran_ns",
    "sched.wakeup_gran_ns",
    "pso.w",
    "pso.phi_p",
    "pso.phi_g",
    "pso.particles",
    "pso.iters",
    "golden.algo",
    "golden.a0",
    "golden.b0",
    "golden.tol",
    "golden.max_evals",
    "rsm.center_replicates",
    "rsm.alpha",
    "validate.msgs",
    "compare.seeds",
    "compare.algos",
];

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; a repeated key is an error.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", n + 1))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KNOWN_KEYS.contains(&k) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{k}`",
                n + 1
            )));
        }
        if v.is_empty() {
            return Err(CliError::Usage(format!(
                "config line {}: empty value for `{k}`",
                n + 1
            )));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key `{k}`",
                n + 1
            )));
        }
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Integer input; scientific notation is accepted when it names an integer.
pub fn parse_u64(key: &str, s: &str) -> CliResult<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| CliError::Usage(format!("`{key}`: `{s}` is not a number")))?;
    if !f.is_finite() || f < 0.0 || f.fract() != 0.0 || f > 9.007_199_254_740_992e15 {
        return Err(CliError::Usage(format!(
            "`{key}`: `{s}` is not a non-negative integer"
        )));
    }
    Ok(f as u64)
}

pub fn parse_u32(key: &str, s: &str) -> CliResult<u32> {
    let v = parse_u64(key, s)?;
    u32::try_from(v).map_err(|_| CliError::Usage(format!("`{key}`: {v} is too large")))
}

pub fn parse_f64(key: &str, s: &str) -> CliResult<f64> {
    let f: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("`{key}`: `{s}` is not a number")))?;
    if !f.is_finite() {
        return Err(CliError::Usage(format!("`{key}`: `{s}` is not finite")));
    }
    Ok(f)
}

pub fn parse_list<T>(
    key: &str,
    s: &str,
    item: fn(&str, &str) -> CliResult<T>,
) -> CliResult<Vec<T>> {
    let parts: Vec<&str> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(CliError::Usage(format!("`{key}`: empty list")));
    }
    parts.into_iter().map(|p| item(key, p)).collect()
}

/// Config file values overlaid with flag values, plus the seed fallback.
#[derive(Debug, Clone, Default)]
pub struct Layered {
    values: BTreeMap<String, String>,
    env_seed: Option<String>,
}

impl Layered {
    pub fn new(file: BTreeMap<String, String>, env_seed: Option<String>) -> Self {
        Self {
            values: file,
            env_seed,
        }
    }

    pub fn set(&mut self, key: &str, value: Option<&String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.clone());
        }
    }

    /// Rejects file keys from sections the subcommand does not use.
    pub fn restrict_sections(&self, allowed: &[&str]) -> CliResult<()> {
        for k in self.values.keys() {
            let section = k.split_once('.').map_or("", |(s, _)| s);
            if !section.is_empty() && !allowed.contains(&section) {
                return Err(CliError::Usage(format!(
                    "key `{k}` does not apply to this subcommand"
                )));
            }
        }
        Ok(())
    }

    fn get<T>(&self, key: &str, default: T, parse: fn(&str, &str) -> CliResult<T>) -> CliResult<T> {
        self.values.get(key).map_or(Ok(default), |v| parse(key, v))
    }

    pub fn u64(&self, key: &str, default: u64) -> CliResult<u64> {
        self.get(key, default, parse_u64)
    }

    pub fn u32(&self, key: &str, default: u32) -> CliResult<u32> {
        self.get(key, default, parse_u32)
    }

    pub fn f64(&self, key: &str, default: f64) -> CliResult<f64> {
        self.get(key, default, parse_f64)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag or file `seed`, then the environment, then 0.
    pub fn seed(&self) -> CliResult<u64> {
        match (self.values.get("seed"), &self.env_seed) {
            (Some(v), _) => parse_u64("seed", v),
            (None, Some(v)) => parse_u64(SEED_ENV, v),
            (None, None) => Ok(0),
        }
    }

    pub fn workload(&self) -> CliResult<WorkloadSpec> {
        let d = WorkloadSpec::default();
        let w = WorkloadSpec {
            groups: self.u32("workload.groups", d.groups)?,
            fanout: self.u32("workload.fanout", d.fanout)?,
            msgs: self.u32("workload.msgs", d.msgs)?,
            msg_cost_send_ns: self.u64("workload.send_cost_ns", d.msg_cost_send_ns)?,
            msg_cost_recv_ns: self.u64("workload.recv_cost_ns", d.msg_cost_recv_ns)?,
            channel_capacity: self.u32("workload.capacity", d.channel_capacity)?,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn sim(&self, seed: u64) -> CliResult<SimConfig> {
        let d = SimConfig::default();
        let s = SimConfig {
            num_cpus: self.u32("sim.cpus", d.num_cpus)?,
            ns_per_jiffy: self.u64("sim.ns_per_jiffy", d.ns_per_jiffy)?,
            max_jiffies: self.u64("sim.max_jiffies", d.max_jiffies)?,
            switch_cost_ns: self.u64("sim.switch_cost_ns", d.switch_cost_ns)?,
            rng_seed: seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn sched(&self) -> CliResult<SchedParams> {
        let d = SchedParams::default();
        Ok(SchedParams::new(
            self.u64("sched.latency_ns", d.latency_ns)?,
            self.u64("sched.min_gran_ns", d.min_gran_ns)?,
            self.u64("sched.wakeup_gran_ns", d.wakeup_gran_ns)?,
        )?)
    }

    pub fn pso(&self, bounds: Vec<(f64, f64)>, seed: u64) -> CliResult<PsoConfig> {
        let d = PsoConfig::tuned(bounds, seed);
        let c = PsoConfig {
            w: self.f64("pso.w", d.w)?,
            phi_p: self.f64("pso.phi_p", d.phi_p)?,
            phi_g: self.f64("pso.phi_g", d.phi_g)?,
            n_particles: self.u64("pso.particles", d.n_particles as u64)? as usize,
            max_iters: self.u32("pso.iters", d.max_iters)?,
            ..d
        };
        c.validate()?;
        Ok(c)
    }

    pub fn golden(&self, discovery: Discovery) -> CliResult<GoldenConfig> {
        let d = GoldenConfig::new(discovery);
        let c = GoldenConfig {
            a0: self.f64("golden.a0", d.a0)?,
            b0: self.f64("golden.b0", d.b0)?,
            tol: self.f64("golden.tol", d.tol)?,
            max_evals: self.u64("golden.max_evals", d.max_evals as u64)? as usize,
            ..d
        };
        c.validate()?;
        Ok(c)
    }

    pub fn discovery(&self, key: &str, s: &str) -> CliResult<Discovery> {
        match parse_u32(key, s)? {
            1 => Ok(Discovery::Alg1),
            2 => Ok(Discovery::Alg2),
            n => Err(CliError::Usage(format!(
                "`{key}`: algorithm {n} is not 1 or 2"
            ))),
        }
    }
}
