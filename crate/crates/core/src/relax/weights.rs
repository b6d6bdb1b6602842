use serde::{Deserialize, Serialize};

use crate::tor2sat::{Clause, ClauseSet, Literal};

use super::RelaxError;

/// Degree-gradient score of an edge whose endpoint degrees are
/// `d_minus <= d_plus`: `(d⁺ − d⁻)/(d⁺ + d⁻) · ln(d⁺ + d⁻)`.
///
/// Grows with the relative gradient and, for a fixed relative gradient, with
/// the absolute degrees.
pub fn gradient_f(d_minus: u32, d_plus: u32) -> Result<f64, RelaxError> {
    if d_minus == 0 || d_plus == 0 || d_minus > d_plus {
        return Err(RelaxError::InvalidDegree(d_minus, d_plus));
    }
    let (lo, hi) = (d_minus as f64, d_plus as f64);
    let sum = lo + hi;
    Ok((hi - lo) / sum * sum.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedClause {
    pub a: Literal,
    pub b: Literal,
    pub weight: f64,
}

impl WeightedClause {
    pub fn new(clause: Clause, weight: f64) -> Self {
        WeightedClause {
            a: clause.a,
            b: clause.b,
            weight,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.a == self.b
    }

    pub fn satisfied(&self, assignment: &[bool]) -> bool {
        self.a.eval(assignment) || self.b.eval(assignment)
    }
}

/// Weighted MAX2SAT instance over `num_vars` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedInstance {
    pub num_vars: usize,
    pub clauses: Vec<WeightedClause>,
    pub alpha: f64,
    /// Normalization of the 1-link weights (reciprocal of the gradient sum).
    pub c1: f64,
    /// Normalization of the 2-link weights (reciprocal of their count).
    pub c2: f64,
    /// `(d⁻, d⁺)` per variable; empty for instances not derived from a graph.
    pub degree_pairs: Vec<(u32, u32)>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl WeightedInstance {
    /// Instance with explicit weights and no degree information.
    pub fn from_clauses(num_vars: usize, clauses: Vec<WeightedClause>) -> Self {
        WeightedInstance {
            num_vars,
            clauses,
            alpha: f64::NAN,
            c1: f64::NAN,
            c2: f64::NAN,
            degree_pairs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn two_link_count(&self) -> usize {
        self.clauses.iter().filter(|c| !c.is_unit()).count()
    }

    pub fn two_link_weight(&self) -> f64 {
        self.clauses
            .iter()
            .filter(|c| !c.is_unit())
            .map(|c| c.weight)
            .sum()
    }

    pub fn one_link_weight(&self) -> f64 {
        self.clauses
            .iter()
            .filter(|c| c.is_unit())
            .map(|c| c.weight)
            .sum()
    }

    /// Total clause weight touching each variable.
    pub fn var_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.num_vars];
        for c in &self.clauses {
            w[c.a.var] += c.weight;
            if c.b.var != c.a.var {
                w[c.b.var] += c.weight;
            }
        }
        w
    }
}

/// Weighted instance from 2-link clauses and per-variable degree pairs.
pub fn build_weighted(
    clauses: &ClauseSet,
    degree_pairs: &[(u32, u32)],
    alpha: f64,
) -> Result<WeightedInstance, RelaxError> {
    if degree_pairs.len() != clauses.num_vars {
        return Err(RelaxError::DegreeCountMismatch {
            vars: clauses.num_vars,
            pairs: degree_pairs.len(),
        });
    }
    let f = degree_pairs
        .iter()
        .map(|&(lo, hi)| gradient_f(lo, hi))
        .collect::<Result<Vec<_>, _>>()?;
    let mut inst = weighted_from_gradients(clauses, &f, alpha)?;
    inst.degree_pairs = degree_pairs.to_vec();
    Ok(inst)
}

/// Weighted instance from 2-link clauses and per-variable gradient scores.
///
/// Each 2-link clause weighs `α/m₂`; variable `i` gets the 1-link clause
/// `x_i ∨ x_i` of weight `(1−α)·f_i/Σf`.
pub fn weighted_from_gradients(
    clauses: &ClauseSet,
    f: &[f64],
    alpha: f64,
) -> Result<WeightedInstance, RelaxError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(RelaxError::InvalidAlpha(alpha));
    }
    if f.len() != clauses.num_vars {
        return Err(RelaxError::DegreeCountMismatch {
            vars: clauses.num_vars,
            pairs: f.len(),
        });
    }
    if clauses.clauses.iter().any(Clause::is_unit) {
        return Err(RelaxError::UnexpectedUnitClause);
    }

    let mut warnings = Vec::new();
    let m2 = clauses.len();
    let c2 = if m2 > 0 { 1.0 / m2 as f64 } else { 0.0 };
    if m2 == 0 && alpha > 0.0 {
        warnings.push("no 2-link clauses; only degree-gradient clauses remain".to_string());
    }
    let f_sum: f64 = f.iter().sum();
    let c1 = if f_sum > 0.0 { 1.0 / f_sum } else { 0.0 };

    let mut weighted: Vec<WeightedClause> = clauses
        .clauses
        .iter()
        .map(|&c| WeightedClause::new(c, c2 * alpha))
        .collect();

    if f_sum > 0.0 {
        weighted.extend(
            f.iter()
                .enumerate()
                .map(|(i, &fi)| WeightedClause::new(Clause::unit(Literal::pos(i)), c1 * (1.0 - alpha) * fi)),
        );
    } else if alpha < 1.0 && clauses.num_vars > 0 {
        warnings.push("all degree gradients are zero; 1-link clauses skipped".to_string());
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    Ok(WeightedInstance {
        num_vars: clauses.num_vars,
        clauses: weighted,
        alpha,
        c1,
        c2,
        degree_pairs: Vec::new(),
        warnings,
    })
}

/// Boolean assignment with the total weight of the clauses it satisfies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<bool>,
    pub objective: f64,
}

/// Sum of the weights of satisfied clauses.
pub fn objective_value(inst: &WeightedInstance, values: &[bool]) -> Result<f64, RelaxError> {
    if values.len() != inst.num_vars {
        return Err(RelaxError::AssignmentLength {
            expected: inst.num_vars,
            got: values.len(),
        });
    }
    Ok(inst
        .clauses
        .iter()
        .filter(|c| c.satisfied(values))
        .map(|c| c.weight)
        .sum())
}
