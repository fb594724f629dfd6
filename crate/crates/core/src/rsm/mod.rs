//! Response-surface methodology: Box-Behnken designs, second-order
//! least-squares models, coefficient t-tests and canonical analysis.

mod design;
mod model;
mod recommend;
mod significance;
mod study;

pub use design::{box_behnken_design, pso_factors, DesignMatrix, DesignRun, FactorSpec};
pub use model::{
    fit_quadratic_rows, n_terms, quadratic_terms, term_factors, term_names, QuadraticModel,
};
pub use recommend::{descent_path, recommend_optimum, Branch, Recommendation, PATH_STEP};
pub use significance::{coefficient_significance, student_t_two_sided, CoefTest};
pub use study::{
    analyze_design, meta_objective, recommended_pso_hyperparameters, run_meta_study, FittedSurface,
    MetaResponse, MetaRow, MetaStudy, RsmStudy, DEFAULT_ALPHA,
};

use crate::error::Result;

/// Full quadratic fit over all of the design's factors.
pub fn fit_quadratic(design: &DesignMatrix, responses: &[f64]) -> Result<QuadraticModel> {
    fit_quadratic_rows(&design.coded_rows(), responses)
}
