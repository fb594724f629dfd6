use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Second-order polynomial in `k` coded factors.
///
/// Coefficient order: intercept, linear terms, pure squares, then the
/// interactions `x_i x_j` for `i < j` in lexicographic order. For three
/// factors that is `1, x1, x2, x3, x1², x2², x3², x1x2, x1x3, x2x3`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    pub k: usize,
    /// Coefficients with the intercept in the original response units.
    pub beta: Vec<f64>,
    /// Amount subtracted from the responses before solving.
    pub offset: f64,
    pub residual_variance: f64,
    pub coef_std_errors: Vec<f64>,
    pub dof: usize,
    pub residuals: Vec<f64>,
    /// Coded design rows the model was fitted on.
    pub rows: Vec<Vec<f64>>,
}

pub fn n_terms(k: usize) -> usize {
    1 + 2 * k + k * (k.saturating_sub(1)) / 2
}

/// Regressor vector for one coded point.
pub fn quadratic_terms(x: &[f64]) -> Vec<f64> {
    let k = x.len();
    let mut t = Vec::with_capacity(n_terms(k));
    t.push(1.0);
    t.extend_from_slice(x);
    t.extend(x.iter().map(|v| v * v));
    for i in 0..k {
        for j in i + 1..k {
            t.push(x[i] * x[j]);
        }
    }
    t
}

/// Human-readable term names for the given factor names.
pub fn term_names(factors: &[&str]) -> Vec<String> {
    let k = factors.len();
    let mut names = vec!["(Intercept)".to_string()];
    names.extend(factors.iter().map(|f| f.to_string()));
    names.extend(factors.iter().map(|f| format!("{f}^2")));
    for i in 0..k {
        for j in i + 1..k {
            names.push(format!("{}:{}", factors[i], factors[j]));
        }
    }
    names
}

/// Which factors a coefficient involves.
pub fn term_factors(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    out.extend((0..k).map(|i| vec![i]));
    out.extend((0..k).map(|i| vec![i]));
    for i in 0..k {
        for j in i + 1..k {
            out.push(vec![i, j]);
        }
    }
    out
}

impl QuadraticModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        quadratic_terms(x)
            .iter()
            .zip(&self.beta)
            .map(|(t, b)| t * b)
            .sum()
    }

    /// Linear coefficients `b`.
    pub fn linear(&self) -> Vec<f64> {
        self.beta[1..=self.k].to_vec()
    }

    /// Symmetric matrix `B` with `y = b0 + b·x + xᵀ B x`.
    pub fn quadratic_matrix(&self) -> DMatrix<f64> {
        let k = self.k;
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            m[(i, i)] = self.beta[1 + k + i];
        }
        let mut idx = 1 + 2 * k;
        for i in 0..k {
            for j in i + 1..k {
                m[(i, j)] = self.beta[idx] / 2.0;
                m[(j, i)] = self.beta[idx] / 2.0;
                idx += 1;
            }
        }
        m
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let b = DVector::from_vec(self.linear());
        let g = b + 2.0 * self.quadratic_matrix() * DVector::from_column_slice(x);
        g.iter().copied().collect()
    }
}

/// Ordinary least squares of `responses` on the full quadratic in the coded
/// rows. Responses are shifted by their minimum before solving; the shift is
/// folded back into the intercept.
pub fn fit_quadratic_rows(rows: &[Vec<f64>], responses: &[f64]) -> Result<QuadraticModel> {
    let n = rows.len();
    if n == 0 || responses.len() != n {
        return Err(Error::Config(format!(
            "{} responses for {} design rows",
            responses.len(),
            n
        )));
    }
    let k = rows[0].len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::Config("design rows differ in length".into()));
    }
    let p = n_terms(k);
    if n < p {
        return Err(Error::SingularFit);
    }
    let offset = responses.iter().copied().fold(f64::INFINITY, f64::min);
    let x = DMatrix::from_fn(n, p, |i, j| quadratic_terms(&rows[i])[j]);
    let y = DVector::from_iterator(n, responses.iter().map(|r| r - offset));

    let sv = x.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 || sv.min() <= smax * 1e-10 {
        return Err(Error::SingularFit);
    }
    let xtx = x.transpose() * &x;
    let lu = xtx.clone().full_piv_lu();
    let beta = lu.solve(&(x.transpose() * &y)).ok_or(Error::SingularFit)?;
    let xtx_inv = lu.try_inverse().ok_or(Error::SingularFit)?;

    let resid = &y - &x * &beta;
    let dof = n - p;
    let rss = resid.norm_squared();
    let residual_variance = if dof > 0 { rss / dof as f64 } else { f64::NAN };
    let coef_std_errors = (0..p)
        .map(|j| (residual_variance * xtx_inv[(j, j)]).sqrt())
        .collect();
    let mut beta: Vec<f64> = beta.iter().copied().collect();
    beta[0] += offset;
    Ok(QuadraticModel {
        k,
        beta,
        offset,
        residual_variance,
        coef_std_errors,
        dof,
        residuals: resid.iter().copied().collect(),
        rows: rows.to_vec(),
    })
}
