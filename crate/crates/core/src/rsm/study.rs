//! Response-surface study of the swarm's own hyperparameters: run the PSO
//! at every design point, fit, screen out inert factors, and recommend.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pso::{run_pso, PsoConfig};
use crate::rng::derive_seed;
use crate::rsm::design::{box_behnken_design, DesignMatrix, FactorSpec};
use crate::rsm::model::{fit_quadratic_rows, term_factors, term_names, QuadraticModel};
use crate::rsm::recommend::{recommend_optimum, Recommendation};
use crate::rsm::significance::{coefficient_significance, CoefTest};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Outcome of one swarm run used as a design response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaResponse {
    /// R*: best response reached.
    pub r_star: f64,
    /// I*: iteration at which it was first reached.
    pub i_star: u32,
    /// `r_star + i_star`.
    pub rsum: f64,
}

impl MetaResponse {
    pub fn new(r_star: f64, i_star: u32) -> Self {
        Self {
            r_star,
            i_star,
            rsum: r_star + f64::from(i_star),
        }
    }
}

/// Runs the swarm with the given hyperparameters and summarises it.
pub fn meta_objective<F>(
    w: f64,
    phi_p: f64,
    phi_g: f64,
    pso_base: &PsoConfig,
    objective: F,
) -> Result<MetaResponse>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let config = PsoConfig {
        w,
        phi_p,
        phi_g,
        ..pso_base.clone()
    };
    let trace = run_pso(objective, &config)?;
    Ok(MetaResponse::new(
        trace.best_response,
        trace.iters_to_converge,
    ))
}

/// A model fitted on a subset of the design factors.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedSurface {
    /// Indices into the study's factor list, in model order.
    pub factors: Vec<usize>,
    pub model: QuadraticModel,
    pub tests: Vec<CoefTest>,
    pub term_names: Vec<String>,
}

impl FittedSurface {
    fn fit(design: &DesignMatrix, responses: &[f64], factors: &[usize]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = design
            .runs
            .iter()
            .map(|r| factors.iter().map(|&f| r.coded[f]).collect())
            .collect();
        let model = fit_quadratic_rows(&rows, responses)?;
        let tests = coefficient_significance(&model)?;
        let names: Vec<&str> = factors
            .iter()
            .map(|&f| design.factors[f].name.as_str())
            .collect();
        Ok(Self {
            factors: factors.to_vec(),
            term_names: term_names(&names),
            model,
            tests,
        })
    }

    /// Smallest p-value among the terms that involve model factor `local`.
    fn factor_min_p(&self, local: usize) -> f64 {
        term_factors(self.factors.len())
            .iter()
            .zip(&self.tests)
            .filter(|(fs, _)| fs.contains(&local))
            .map(|(_, t)| t.p_value)
            .fold(f64::INFINITY, f64::min)
    }

    /// Test for a named term, e.g. `"phi_p"` or `"w:phi_g"`.
    pub fn test(&self, term: &str) -> Option<&CoefTest> {
        self.term_names
            .iter()
            .position(|n| n == term)
            .map(|i| &self.tests[i])
    }

    /// Whether any term involving the study factor `factor` is significant.
    pub fn factor_significant(&self, factor: usize, alpha: f64) -> bool {
        self.factors
            .iter()
            .position(|&f| f == factor)
            .is_some_and(|local| self.factor_min_p(local) < alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsmStudy {
    pub factors: Vec<FactorSpec>,
    pub alpha: f64,
    /// Full second-order model over every factor.
    pub full: FittedSurface,
    /// Model after backward elimination of inert factors.
    pub accepted: FittedSurface,
    /// Factors removed, in removal order.
    pub dropped: Vec<usize>,
    /// Recommendation in the accepted model's coded coordinates.
    pub recommendation: Recommendation,
    /// Recommended point in natural units over all factors; dropped
    /// factors sit at their mid level.
    pub natural: Vec<f64>,
}

/// Fits the full quadratic, then repeatedly removes the factor whose
/// strongest term is weakest as long as none of its terms is significant at
/// `alpha`, refits, and runs canonical analysis on the surviving model.
pub fn analyze_design(design: &DesignMatrix, responses: &[f64], alpha: f64) -> Result<RsmStudy> {
    let all: Vec<usize> = (0..design.factors.len()).collect();
    let full = FittedSurface::fit(design, responses, &all)?;
    let mut accepted = full.clone();
    let mut dropped = Vec::new();
    while accepted.factors.len() > 1 {
        let weakest = (0..accepted.factors.len())
            .map(|local| (local, accepted.factor_min_p(local)))
            .filter(|&(_, p)| p >= alpha)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((local, _)) = weakest else {
            break;
        };
        dropped.push(accepted.factors[local]);
        let keep: Vec<usize> = accepted
            .factors
            .iter()
            .copied()
            .filter(|f| !dropped.contains(f))
            .collect();
        accepted = FittedSurface::fit(design, responses, &keep)?;
    }
    let recommendation = recommend_optimum(&accepted.model);
    let mut natural: Vec<f64> = design.factors.iter().map(|f| f.mid).collect();
    for (local, &f) in accepted.factors.iter().enumerate() {
        natural[f] = design.factors[f].to_natural(recommendation.coded[local]);
    }
    Ok(RsmStudy {
        factors: design.factors.clone(),
        alpha,
        full,
        accepted,
        dropped,
        recommendation,
        natural,
    })
}

/// Recommended `(w, phi_p, phi_g)`. A cognitive weight that was screened
/// out takes the social weight's value.
pub fn recommended_pso_hyperparameters(study: &RsmStudy) -> Result<(f64, f64, f64)> {
    let idx = |name: &str| {
        study
            .factors
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::Config(format!("study has no factor {name}")))
    };
    let (w, p, g) = (idx("w")?, idx("phi_p")?, idx("phi_g")?);
    let phi_p = if study.dropped.contains(&p) {
        study.natural[g]
    } else {
        study.natural[p]
    };
    Ok((study.natural[w], phi_p, study.natural[g]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaRow {
    /// 1-based run number in design order.
    pub run: usize,
    pub natural: Vec<f64>,
    pub seed: u64,
    pub response: MetaResponse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaStudy {
    pub design: DesignMatrix,
    pub rows: Vec<MetaRow>,
    pub study: RsmStudy,
}

/// Runs the full meta-optimization: one swarm per Box-Behnken row, each
/// seeded from `master_seed` and the row index, then [`analyze_design`] on
/// the `rsum` column. The factors must be `w`, `phi_p`, `phi_g` in order.
pub fn run_meta_study<F>(
    factors: &[FactorSpec],
    center_replicates: usize,
    pso_base: &PsoConfig,
    objective: F,
    master_seed: u64,
    alpha: f64,
) -> Result<MetaStudy>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let design = box_behnken_design(factors, center_replicates)?;
    let rows = design
        .runs
        .par_iter()
        .enumerate()
        .map(|(i, run)| {
            let seed = derive_seed(master_seed, i as u64);
            let base = PsoConfig {
                seed,
                ..pso_base.clone()
            };
            let n = &run.natural;
            meta_objective(n[0], n[1], n[2], &base, &objective).map(|response| MetaRow {
                run: i + 1,
                natural: n.clone(),
                seed,
                response,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rsum: Vec<f64> = rows.iter().map(|r| r.response.rsum).collect();
    let study = analyze_design(&design, &rsum, alpha)?;
    Ok(MetaStudy {
        design,
        rows,
        study,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rsm::design::pso_factors;

    #[test]
    fn rsum_arithmetic() {
        let r = MetaResponse::new(4_294_667_315.0, 5);
        assert_eq!(r.rsum, 4_294_667_320.0);
        let r = MetaResponse::new(4_294_667_318.0, 4);
        assert_eq!(r.rsum, 4_294_667_322.0);
    }

    #[test]
    fn constant_objective_meta() {
        let base = PsoConfig {
            n_particles: 4,
            max_iters: 3,
            ..PsoConfig::tuned(vec![(0.0, 1.0); 3], 1)
        };
        let r = meta_objective(0.45, 2.0, 2.0, &base, |_| 9.0).unwrap();
        assert_eq!(r, MetaResponse::new(9.0, 1));
        assert_eq!(r.rsum, 10.0);
    }

    #[test]
    fn screening_keeps_active_factors() {
        let design = box_behnken_design(&pso_factors(), 2).unwrap();
        // phi_p has no effect; small deterministic noise keeps dof meaningful.
        let y: Vec<f64> = design
            .runs
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let x = &r.coded;
                100.0 + 20.0 * x[0] - 30.0 * x[2]
                    + 25.0 * x[2] * x[2]
                    + 15.0 * x[0] * x[0]
                    + [0.3, -0.2, 0.1, -0.4, 0.2, 0.0, -0.1][i % 7]
            })
            .collect();
        let study = analyze_design(&design, &y, DEFAULT_ALPHA).unwrap();
        assert_eq!(study.dropped, vec![1]);
        assert_eq!(study.accepted.factors, vec![0, 2]);
        let (w, phi_p, phi_g) = recommended_pso_hyperparameters(&study).unwrap();
        assert_eq!(phi_p, phi_g);
        // Minimizer of 20a + 15a² is a = -2/3; of -30c + 25c² is c = 0.6.
        assert!((w - (0.45 - 0.45 * 2.0 / 3.0)).abs() < 0.01);
        assert!((phi_g - 3.2).abs() < 0.02);
    }
}
