//! Canonical particle swarm optimization with inertia weight.
//!
//! Each particle keeps a velocity, a position and its personal best; the
//! swarm keeps the global best. Per iteration every particle draws two
//! scalars `r_p, r_g ~ U[0, 1]` and moves by
//!
//! ```text
//! v <- w v + phi_p r_p (p - x) + phi_g r_g (g - x)
//! x <- x + v
//! ```
//!
//! Positions are clamped to the search box and the velocity component of a
//! clamped coordinate is zeroed. Velocities start at zero and positions
//! uniformly in the box. The global best is refreshed once per iteration,
//! after all particles have been evaluated, so evaluations inside an
//! iteration are independent and run in parallel.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{SeededStream, UnitSource};
use crate::trace::OptTrace;

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    /// Inertia weight.
    pub w: f64,
    /// Cognitive (personal best) weight.
    pub phi_p: f64,
    /// Social (global best) weight.
    pub phi_g: f64,
    pub n_particles: usize,
    pub max_iters: u32,
    /// Per-dimension `(lo, hi)`; the length fixes the dimension.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
}

impl PsoConfig {
    /// Hyperparameters chosen by the response-surface study.
    pub const TUNED_W: f64 = 0.4365;
    pub const TUNED_PHI: f64 = 3.020;

    pub fn tuned(bounds: Vec<(f64, f64)>, seed: u64) -> Self {
        Self {
            w: Self::TUNED_W,
            phi_p: Self::TUNED_PHI,
            phi_g: Self::TUNED_PHI,
            n_particles: 20,
            max_iters: 30,
            bounds,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::Config("n_particles must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if self.bounds.is_empty() {
            return Err(Error::Config(
                "bounds must have at least one dimension".into(),
            ));
        }
        if let Some((d, _)) = self
            .bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| lo.is_nan() || hi.is_nan() || lo > hi)
        {
            return Err(Error::Config(format!("bounds[{d}] has lo > hi")));
        }
        if ![self.w, self.phi_p, self.phi_g]
            .iter()
            .all(|h| h.is_finite())
        {
            return Err(Error::Config("hyperparameters must be finite".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// Personal best position.
    pub p: Vec<f64>,
    /// Response at `p`.
    pub p_f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub g: Vec<f64>,
    pub g_f: f64,
}

/// New velocity for one particle given the swarm best and its two draws.
pub fn update_velocity(
    particle: &Particle,
    g: &[f64],
    config: &PsoConfig,
    r_p: f64,
    r_g: f64,
) -> Vec<f64> {
    particle
        .v
        .iter()
        .zip(&particle.x)
        .zip(&particle.p)
        .zip(g)
        .map(|(((&v, &x), &p), &g)| {
            config.w * v + config.phi_p * r_p * (p - x) + config.phi_g * r_g * (g - x)
        })
        .collect()
}

/// Moves the particle by its velocity and clamps it into the box; a clamped
/// coordinate loses its velocity. Returns the new position.
pub fn update_position(particle: &mut Particle, bounds: &[(f64, f64)]) -> Vec<f64> {
    for ((x, v), &(lo, hi)) in particle.x.iter_mut().zip(particle.v.iter_mut()).zip(bounds) {
        let moved = *x + *v;
        if moved < lo {
            *x = lo;
            *v = 0.0;
        } else if moved > hi {
            *x = hi;
            *v = 0.0;
        } else {
            *x = moved;
        }
    }
    particle.x.clone()
}

/// Runs the swarm with per-particle streams derived from `config.seed`.
pub fn run_pso<F>(objective: F, config: &PsoConfig) -> Result<OptTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let sources = (0..config.n_particles)
        .map(|i| SeededStream::substream(config.seed, i))
        .collect();
    run_pso_with(objective, config, sources).map(|(trace, _)| trace)
}

/// Runs the swarm drawing particle `i`'s random numbers from `sources[i]`:
/// first `dim` draws place it, then two draws (`r_p`, `r_g`) per iteration.
pub fn run_pso_with<F, S>(
    objective: F,
    config: &PsoConfig,
    mut sources: Vec<S>,
) -> Result<(OptTrace, SwarmState)>
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: UnitSource,
{
    config.validate()?;
    if sources.len() != config.n_particles {
        return Err(Error::Config(format!(
            "{} random sources for {} particles",
            sources.len(),
            config.n_particles
        )));
    }
    let dim = config.dim();
    let particles = sources
        .iter_mut()
        .map(|src| {
            let x: Vec<f64> = config
                .bounds
                .iter()
                .map(|&(lo, hi)| lo + src.next_unit() * (hi - lo))
                .collect();
            Particle {
                p: x.clone(),
                x,
                v: vec![0.0; dim],
                p_f: f64::INFINITY,
            }
        })
        .collect();
    let mut swarm = SwarmState {
        particles,
        g: vec![0.0; dim],
        g_f: f64::INFINITY,
    };
    let mut trace = OptTrace::new();
    evaluate(&objective, &mut swarm, &mut trace, 1);

    for iteration in 2..=config.max_iters + 1 {
        let g = swarm.g.clone();
        for (particle, src) in swarm.particles.iter_mut().zip(sources.iter_mut()) {
            let r_p = src.next_unit();
            let r_g = src.next_unit();
            particle.v = update_velocity(particle, &g, config, r_p, r_g);
            update_position(particle, &config.bounds);
        }
        evaluate(&objective, &mut swarm, &mut trace, iteration);
    }
    Ok((trace, swarm))
}

/// Evaluates every particle and merges the responses in index order.
fn evaluate<F>(objective: &F, swarm: &mut SwarmState, trace: &mut OptTrace, iteration: u32)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let responses: Vec<f64> = swarm
        .particles
        .par_iter()
        .map(|p| objective(&p.x))
        .collect();
    for (i, (particle, f)) in swarm.particles.iter_mut().zip(responses).enumerate() {
        trace.record(iteration, i as u32, particle.x.clone(), f);
        let f = if f.is_finite() { f } else { f64::INFINITY };
        if f < particle.p_f {
            particle.p_f = f;
            particle.p = particle.x.clone();
        }
        if f < swarm.g_f {
            swarm.g_f = f;
            swarm.g = particle.x.clone();
        }
    }
}
