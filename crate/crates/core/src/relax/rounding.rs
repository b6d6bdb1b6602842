use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seeding::{self, DOMAIN_CUT};

use super::{objective_value, Assignment, RelaxError, VectorSolution, WeightedInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingConfig {
    pub n_cuts: usize,
    pub seed: u64,
    /// Pulls each variable vector toward `±v0` before cutting; 0 is plain
    /// random-hyperplane rounding.
    pub rotation: f64,
    /// Shrinks the `v0` component of hyperplane normals, favouring
    /// hyperplanes that contain `v0`'s direction less often; 0 is uniform.
    pub bias: f64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        RoundingConfig {
            n_cuts: 200,
            seed: 0,
            rotation: 0.0,
            bias: 0.0,
        }
    }
}

/// Result of the best cut, with the cut index that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedAssignment {
    pub assignment: Assignment,
    pub cut: usize,
}

fn rotate(sol: &VectorSolution, gamma: f64) -> Result<Vec<Vec<f64>>, RelaxError> {
    let v0 = sol.v0().to_vec();
    sol.rows()
        .enumerate()
        .map(|(p, v)| {
            if p == 0 || gamma == 0.0 {
                return Ok(v.to_vec());
            }
            let c: f64 = v.iter().zip(&v0).map(|(a, b)| a * b).sum();
            let s = if c >= 0.0 { 1.0 } else { -1.0 };
            let mixed: Vec<f64> = v
                .iter()
                .zip(&v0)
                .map(|(a, b)| (1.0 - gamma) * a + gamma * s * b)
                .collect();
            let n = mixed.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-12 {
                return Err(RelaxError::DegenerateRotation(p - 1));
            }
            Ok(mixed.into_iter().map(|x| x / n).collect())
        })
        .collect()
}

/// Cuts the vector configuration with `n_cuts` random hyperplanes through the
/// origin. A variable is true iff its vector lies on the same side as `v0`.
/// Returns the best cut; ties go to the lowest cut index. Cut `k` draws its
/// normal from its own seeded stream, so the result does not depend on how
/// cuts are scheduled across threads.
pub fn round_hyperplane(
    sol: &VectorSolution,
    inst: &WeightedInstance,
    config: &RoundingConfig,
) -> Result<RoundedAssignment, RelaxError> {
    if config.n_cuts == 0 {
        return Err(RelaxError::NoCuts);
    }
    if !(0.0..=1.0).contains(&config.rotation) {
        return Err(RelaxError::InvalidRotation(config.rotation));
    }
    let rows = rotate(sol, config.rotation)?;
    let v0 = &rows[0];
    let dim = sol.dim;

    let cuts: Vec<Assignment> = (0..config.n_cuts)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeding::stream(config.seed, DOMAIN_CUT, k as u64);
            let mut r: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            if config.bias != 0.0 {
                let along: f64 = r.iter().zip(v0).map(|(a, b)| a * b).sum();
                for (x, b) in r.iter_mut().zip(v0) {
                    *x -= config.bias * along * b;
                }
            }
            let side = |v: &[f64]| v.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() >= 0.0;
            let truth = side(v0);
            let values: Vec<bool> = rows[1..].iter().map(|v| side(v) == truth).collect();
            let objective = objective_value(inst, &values).expect("one value per variable");
            Assignment { values, objective }
        })
        .collect();

    let (cut, assignment) = cuts
        .into_iter()
        .enumerate()
        .reduce(|best, cur| if cur.1.objective > best.1.objective { cur } else { best })
        .expect("n_cuts >= 1");
    Ok(RoundedAssignment { assignment, cut })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relax::WeightedClause;
    use crate::tor2sat::{Clause, Literal};

    fn inst(n: usize) -> WeightedInstance {
        WeightedInstance::from_clauses(
            n,
            (0..n)
                .map(|i| WeightedClause::new(Clause::unit(Literal::pos(i)), 1.0))
                .collect(),
        )
    }

    #[test]
    fn aligned_vectors_round_true() {
        let sol = VectorSolution::from_rows(&vec![vec![0.3, 0.4, 0.5]; 4]);
        let r = round_hyperplane(&sol, &inst(3), &RoundingConfig::default()).unwrap();
        assert_eq!(r.assignment.values, vec![true; 3]);
        assert_eq!(r.cut, 0);
    }

    #[test]
    fn antipodal_vector_rounds_false_on_every_cut() {
        let sol = VectorSolution::from_rows(&[vec![1.0, 2.0], vec![-1.0, -2.0]]);
        // Negative literal so every cut has the same objective; best is cut 0.
        let i = WeightedInstance::from_clauses(1, vec![WeightedClause::new(Clause::unit(Literal::neg(0)), 1.0)]);
        for n_cuts in [1, 5, 50] {
            let cfg = RoundingConfig { n_cuts, ..RoundingConfig::default() };
            let r = round_hyperplane(&sol, &i, &cfg).unwrap();
            assert_eq!(r.assignment.values, vec![false]);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let sol = VectorSolution::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.2, 0.9, 0.1],
            vec![-0.1, 0.3, 0.9],
            vec![0.0, -0.7, 0.7],
        ]);
        let i = inst(3);
        let cfg = RoundingConfig { n_cuts: 17, seed: 99, rotation: 0.3, bias: 0.2 };
        let a = round_hyperplane(&sol, &i, &cfg).unwrap();
        let b = round_hyperplane(&sol, &i, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn full_rotation_snaps_to_truth_side() {
        let sol = VectorSolution::from_rows(&[vec![1.0, 0.0], vec![0.1, 1.0], vec![-0.1, 1.0]]);
        let cfg = RoundingConfig { rotation: 1.0, ..RoundingConfig::default() };
        let r = round_hyperplane(&sol, &inst(2), &cfg).unwrap();
        assert_eq!(r.assignment.values, vec![true, false]);
    }

    #[test]
    fn argument_errors() {
        let sol = VectorSolution::from_rows(&[vec![1.0], vec![1.0]]);
        let cfg = RoundingConfig { n_cuts: 0, ..RoundingConfig::default() };
        assert!(matches!(round_hyperplane(&sol, &inst(1), &cfg), Err(RelaxError::NoCuts)));
        let cfg = RoundingConfig { rotation: 1.5, ..RoundingConfig::default() };
        assert!(matches!(round_hyperplane(&sol, &inst(1), &cfg), Err(RelaxError::InvalidRotation(_))));
    }
}
