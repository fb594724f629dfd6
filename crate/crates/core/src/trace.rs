//! Optimization history shared by all optimizers.

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Iteration the evaluation belongs to, 1-based; initialization is 1.
    pub iteration: u32,
    /// Particle index for swarm runs, 0 otherwise.
    pub slot: u32,
    pub point: Vec<f64>,
    /// Objective value; non-finite values are stored as `+inf`.
    pub response: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptTrace {
    pub evaluations: Vec<Evaluation>,
    /// R*: smallest response seen.
    pub best_response: f64,
    pub best_point: Vec<f64>,
    /// 1-based index of the first evaluation attaining `best_response`.
    pub evals_to_best: usize,
    /// I*: iteration at which the best value was first reached.
    pub iters_to_converge: u32,
    /// 1-based indices of evaluations whose objective was not finite.
    pub nonfinite: Vec<usize>,
}

impl OptTrace {
    pub fn new() -> Self {
        Self {
            best_response: f64::INFINITY,
            ..Self::default()
        }
    }

    /// Appends an evaluation and updates the best-so-far bookkeeping.
    /// Returns true when the response strictly improved on the best.
    pub fn record(&mut self, iteration: u32, slot: u32, point: Vec<f64>, response: f64) -> bool {
        let response = if response.is_finite() {
            response
        } else {
            self.nonfinite.push(self.evaluations.len() + 1);
            f64::INFINITY
        };
        let improved = response < self.best_response;
        if improved {
            self.best_response = response;
            self.best_point = point.clone();
            self.evals_to_best = self.evaluations.len() + 1;
            self.iters_to_converge = iteration;
        }
        self.evaluations.push(Evaluation {
            iteration,
            slot,
            point,
            response,
        });
        improved
    }

    pub fn len(&self) -> usize {
        self.evaluations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evaluations.is_empty()
    }

    /// Best-so-far response after each evaluation.
    pub fn running_best(&self) -> Vec<f64> {
        self.evaluations
            .iter()
            .scan(f64::INFINITY, |best, e| {
                *best = best.min(e.response);
                Some(*best)
            })
            .collect()
    }

    /// 1-based index of the first evaluation whose response is at or below
    /// `target`, if any.
    pub fn evals_to_reach(&self, target: f64) -> Option<usize> {
        self.evaluations
            .iter()
            .position(|e| e.response <= target)
            .map(|i| i + 1)
    }
}
