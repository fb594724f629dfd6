use crate::error::{Error, Result};

/// A factor tested at three equally spaced levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSpec {
    pub name: String,
    pub low: f64,
    pub mid: f64,
    pub high: f64,
}

impl FactorSpec {
    pub fn new(name: impl Into<String>, low: f64, mid: f64, high: f64) -> Self {
        Self {
            name: name.into(),
            low,
            mid,
            high,
        }
    }

    fn half_range(&self) -> f64 {
        (self.high - self.low) / 2.0
    }

    pub fn to_coded(&self, natural: f64) -> f64 {
        (natural - self.mid) / self.half_range()
    }

    pub fn to_natural(&self, coded: f64) -> f64 {
        self.mid + coded * self.half_range()
    }

    pub fn validate(&self) -> Result<()> {
        if self.low < self.mid && self.mid < self.high {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "factor {} needs low < mid < high",
                self.name
            )))
        }
    }
}

/// The PSO hyperparameter factors at their study levels.
pub fn pso_factors() -> [FactorSpec; 3] {
    [
        FactorSpec::new("w", 0.0, 0.45, 0.9),
        FactorSpec::new("phi_p", 0.0, 2.0, 4.0),
        FactorSpec::new("phi_g", 0.0, 2.0, 4.0),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignRun {
    pub coded: Vec<f64>,
    pub natural: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub factors: Vec<FactorSpec>,
    pub runs: Vec<DesignRun>,
}

impl DesignMatrix {
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn coded_rows(&self) -> Vec<Vec<f64>> {
        self.runs.iter().map(|r| r.coded.clone()).collect()
    }
}

/// Three-factor Box-Behnken design in canonical order: for each factor pair
/// (1,2), (1,3), (2,3) the four corners (-,-), (+,-), (-,+), (+,+) with the
/// third factor at its centre, followed by the centre replicates.
pub fn box_behnken_design(
    factors: &[FactorSpec],
    center_replicates: usize,
) -> Result<DesignMatrix> {
    if factors.len() != 3 {
        return Err(Error::UnsupportedDesign(factors.len()));
    }
    for f in factors {
        f.validate()?;
    }
    let mut coded = Vec::with_capacity(12 + center_replicates);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for (si, sj) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let mut row = vec![0.0; 3];
            row[i] = si;
            row[j] = sj;
            coded.push(row);
        }
    }
    coded.extend((0..center_replicates).map(|_| vec![0.0; 3]));
    let runs = coded
        .into_iter()
        .map(|c| DesignRun {
            natural: c
                .iter()
                .zip(factors)
                .map(|(&x, f)| f.to_natural(x))
                .collect(),
            coded: c,
        })
        .collect();
    Ok(DesignMatrix {
        factors: factors.to_vec(),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_runs_with_a_centre_coordinate() {
        let d = box_behnken_design(&pso_factors(), 2).unwrap();
        assert_eq!(d.len(), 14);
        assert!(d.runs.iter().all(|r| r.coded.contains(&0.0)));
        assert_eq!(d.runs[12].natural, vec![0.45, 2.0, 2.0]);
        assert_eq!(d.runs[1].natural, vec![0.9, 0.0, 2.0]);
    }

    #[test]
    fn needs_three_factors() {
        let f = pso_factors();
        assert_eq!(
            box_behnken_design(&f[..2], 2),
            Err(Error::UnsupportedDesign(2))
        );
    }

    #[test]
    fn coding_round_trip() {
        for f in pso_factors() {
            for x in [f.low, f.mid, f.high, 0.123, 3.7] {
                assert!((f.to_natural(f.to_coded(x)) - x).abs() < 1e-12);
            }
            assert_eq!(f.to_coded(f.low), -1.0);
            assert_eq!(f.to_coded(f.mid), 0.0);
            assert_eq!(f.to_coded(f.high), 1.0);
        }
    }
}
