//! Fixtures shared by the benchmarks in `benches/`.

use schedtune::rsm::{box_behnken_design, pso_factors, DesignMatrix};
use schedtune::{SchedParams, WorkloadSpec};

/// Workloads of increasing size, labelled by task count.
pub fn workloads() -> Vec<(String, WorkloadSpec)> {
    [(1, 5), (2, 10), (5, 20)]
        .into_iter()
        .map(|(groups, fanout)| {
            let w = WorkloadSpec {
                groups,
                fanout,
                ..WorkloadSpec::default()
            };
            (format!("{}-tasks", w.num_tasks()), w)
        })
        .collect()
}

/// Short slices force many preemptions; long ones run each op to the end.
pub fn slice_regimes() -> [(&'static str, SchedParams); 2] {
    [
        ("short-slices", SchedParams::unchecked(400_000, 100_000, 0)),
        ("defaults", SchedParams::default()),
    ]
}

/// Three-factor design with a smooth response plus fixed jitter.
pub fn synthetic_study() -> (DesignMatrix, Vec<f64>) {
    let design = box_behnken_design(&pso_factors(), 2).expect("valid factors");
    let y = design
        .runs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let x = &r.coded;
            50.0 + 4.0 * x[0] - 6.0 * x[2]
                + 5.0 * x[2] * x[2]
                + 2.0 * x[0] * x[2]
                + [0.3, -0.1, 0.2, -0.25, 0.05][i % 5]
        })
        .collect();
    (design, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for (_, w) in workloads() {
            w.validate().unwrap();
        }
        let (d, y) = synthetic_study();
        assert_eq!(d.len(), y.len());
    }
}
