use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::rsm::model::QuadraticModel;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefTest {
    pub index: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
}

impl CoefTest {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Two-sided tail probability of Student's t with `dof` degrees of freedom,
/// `P(|T| >= |t|) = I_{dof/(dof+t²)}(dof/2, 1/2)`.
pub fn student_t_two_sided(t: f64, dof: usize) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let nu = dof as f64;
    let x = nu / (nu + t * t);
    beta_reg(nu / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// t statistics and p-values for every coefficient.
pub fn coefficient_significance(model: &QuadraticModel) -> Result<Vec<CoefTest>> {
    if model.dof == 0 {
        return Err(Error::NoDegreesOfFreedom);
    }
    Ok(model
        .beta
        .iter()
        .zip(&model.coef_std_errors)
        .enumerate()
        .map(|(index, (&estimate, &std_error))| {
            let t = if estimate == 0.0 {
                0.0
            } else if std_error == 0.0 {
                estimate.signum() * f64::INFINITY
            } else {
                estimate / std_error
            };
            CoefTest {
                index,
                estimate,
                std_error,
                t,
                p_value: student_t_two_sided(t, model.dof),
            }
        })
        .collect())
}
