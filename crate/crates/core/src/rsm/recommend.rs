use nalgebra::{DVector, SymmetricEigen};

use crate::rsm::model::QuadraticModel;

/// Coded step length along the descent path.
pub const PATH_STEP: f64 = 0.05;
const MAX_PATH_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The stationary point lies in the coded cube and is recommended.
    Stationary,
    /// Best point on the steepest-descent path from the centre.
    DescentPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub coded: Vec<f64>,
    pub predicted: f64,
    pub branch: Branch,
    /// `x_s = -B⁻¹ b / 2`, restricted to the non-degenerate eigenspace.
    pub stationary_point: Option<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Factors along which the surface is flat at the stationary point.
    pub free_axes: Vec<usize>,
    /// Points visited on the descent path (empty on the stationary branch).
    pub path: Vec<Vec<f64>>,
}

impl Recommendation {
    /// The stationary point is a minimum (all curvature non-negative).
    pub fn is_minimum(&self) -> bool {
        self.eigenvalues.iter().all(|&l| l >= 0.0)
    }
}

/// Canonical analysis of the fitted surface.
///
/// If the stationary point exists and lies in `[-1, 1]^k` it is returned,
/// whatever the signs of the eigenvalues (a saddle is reported through
/// `eigenvalues`). Otherwise the steepest-descent path is followed from the
/// centre in steps of [`PATH_STEP`] until it reaches the cube boundary or
/// the predicted response stops decreasing.
pub fn recommend_optimum(model: &QuadraticModel) -> Recommendation {
    let k = model.k;
    let eig = SymmetricEigen::new(model.quadratic_matrix());
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let scale = eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
        .max(model.linear().iter().map(|b| b.abs()).fold(0.0, f64::max));
    let eps = 1e-9 * scale.max(1.0);
    let b = DVector::from_vec(model.linear());

    let mut free_axes = Vec::new();
    let mut xs = DVector::zeros(k);
    let mut exists = true;
    for (i, &lambda) in eigenvalues.iter().enumerate() {
        let q = eig.eigenvectors.column(i);
        let qb = q.dot(&b);
        if lambda.abs() <= eps {
            if qb.abs() > eps {
                exists = false;
            } else {
                free_axes.extend(
                    q.iter()
                        .enumerate()
                        .filter(|(_, c)| c.abs() > 0.5)
                        .map(|(j, _)| j),
                );
            }
        } else {
            xs -= q * (qb / (2.0 * lambda));
        }
    }
    let stationary_point = exists.then(|| xs.iter().copied().collect::<Vec<f64>>());

    if let Some(xs) = &stationary_point {
        if xs.iter().all(|v| v.abs() <= 1.0 + 1e-12) {
            return Recommendation {
                predicted: model.predict(xs),
                coded: xs.clone(),
                branch: Branch::Stationary,
                stationary_point,
                eigenvalues,
                free_axes,
                path: Vec::new(),
            };
        }
    }

    let path = descent_path(model);
    let coded = path.last().cloned().unwrap_or_else(|| vec![0.0; k]);
    Recommendation {
        predicted: model.predict(&coded),
        coded,
        branch: Branch::DescentPath,
        stationary_point,
        eigenvalues,
        free_axes,
        path,
    }
}

/// Steepest-descent path from the origin; the last point is the best one.
pub fn descent_path(model: &QuadraticModel) -> Vec<Vec<f64>> {
    let mut x = vec![0.0; model.k];
    let mut f = model.predict(&x);
    let mut path = vec![x.clone()];
    for _ in 0..MAX_PATH_STEPS {
        let g = model.gradient(&x);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let dir: Vec<f64> = g.iter().map(|v| -v / norm).collect();
        // Shorten the final step so the path ends on the cube face.
        let mut step = PATH_STEP;
        for (xi, di) in x.iter().zip(&dir) {
            if *di > 0.0 {
                step = step.min((1.0 - xi) / di);
            } else if *di < 0.0 {
                step = step.min((-1.0 - xi) / di);
            }
        }
        if step <= 1e-12 {
            break;
        }
        let next: Vec<f64> = x
            .iter()
            .zip(&dir)
            .map(|(xi, di)| (xi + step * di).clamp(-1.0, 1.0))
            .collect();
        let fn_ = model.predict(&next);
        if fn_ >= f {
            break;
        }
        x = next;
        f = fn_;
        path.push(x.clone());
        if step < PATH_STEP {
            break;
        }
    }
    path
}
