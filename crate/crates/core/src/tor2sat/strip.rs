use std::collections::VecDeque;

use super::{Clause, ClauseSet, Literal};

/// Outcome of non-conflict stripping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripResult {
    /// Variables fixed to `true` because their positive literal satisfied
    /// every remaining clause containing them, in fixing order.
    pub fixed: Vec<usize>,
    /// Variables that occur in no clause at all.
    pub unconstrained: Vec<usize>,
    /// Original variable index of each residual variable.
    pub residual_vars: Vec<usize>,
    /// Remaining clauses, re-indexed over `residual_vars`.
    pub residual: ClauseSet,
    /// Number of fixing waves until the fixpoint.
    pub rounds: usize,
}

impl StripResult {
    /// Lifts a residual assignment back to the original variables; stripped
    /// and unconstrained variables are `true`.
    pub fn lift(&self, residual_assignment: &[bool]) -> Vec<bool> {
        assert_eq!(residual_assignment.len(), self.residual_vars.len());
        let n = self.fixed.len() + self.unconstrained.len() + self.residual_vars.len();
        let mut full = vec![true; n];
        for (r, &orig) in self.residual_vars.iter().enumerate() {
            full[orig] = residual_assignment[r];
        }
        full
    }
}

/// Repeatedly fixes every variable that occurs only positively in the live
/// clauses (its initial direction satisfies all of them) and drops the
/// clauses it satisfies, until no such variable remains.
pub fn strip_nonconflict(clauses: &ClauseSet) -> StripResult {
    let n = clauses.num_vars;
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut neg_count = vec![0usize; n];
    for (ci, c) in clauses.clauses.iter().enumerate() {
        for lit in c.literals() {
            occurs[lit.var].push(ci);
            if lit.negated {
                neg_count[lit.var] += 1;
            }
        }
    }

    let mut live = vec![true; clauses.len()];
    let mut done = vec![false; n];
    let mut unconstrained = Vec::new();
    let mut fixed = Vec::new();
    let mut wave: VecDeque<usize> = VecDeque::new();
    for v in 0..n {
        if occurs[v].is_empty() {
            done[v] = true;
            unconstrained.push(v);
        } else if neg_count[v] == 0 {
            done[v] = true;
            wave.push_back(v);
        }
    }

    let mut rounds = 0;
    while !wave.is_empty() {
        rounds += 1;
        let mut next = VecDeque::new();
        while let Some(v) = wave.pop_front() {
            fixed.push(v);
            for &ci in &occurs[v] {
                if !live[ci] {
                    continue;
                }
                live[ci] = false;
                for lit in clauses.clauses[ci].literals() {
                    if lit.negated {
                        neg_count[lit.var] -= 1;
                        if neg_count[lit.var] == 0 && !done[lit.var] {
                            done[lit.var] = true;
                            next.push_back(lit.var);
                        }
                    }
                }
            }
        }
        wave = next;
    }

    let residual_vars: Vec<usize> = (0..n).filter(|&v| !done[v]).collect();
    let mut remap = vec![usize::MAX; n];
    for (r, &v) in residual_vars.iter().enumerate() {
        remap[v] = r;
    }
    let map_lit = |l: Literal| Literal {
        var: remap[l.var],
        negated: l.negated,
    };
    let residual_clauses = clauses
        .clauses
        .iter()
        .zip(&live)
        .filter(|(_, &alive)| alive)
        .map(|(c, _)| Clause::new(map_lit(c.a), map_lit(c.b)))
        .collect();

    StripResult {
        fixed,
        unconstrained,
        residual: ClauseSet::new(residual_vars.len(), residual_clauses),
        residual_vars,
        rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(a: i64, b: i64) -> Clause {
        let lit = |x: i64| Literal::new(x.unsigned_abs() as usize - 1, x > 0);
        Clause::new(lit(a), lit(b))
    }

    #[test]
    fn positive_only_variable_is_fixed() {
        let cs = ClauseSet::new(3, vec![cl(1, -2), cl(1, 3), cl(-2, -3), cl(2, 3)]);
        let r = strip_nonconflict(&cs);
        assert_eq!(r.fixed, vec![0]);
        assert_eq!(r.residual_vars, vec![1, 2]);
        assert_eq!(r.residual.len(), 2);
    }

    #[test]
    fn chain_strips_across_waves() {
        // x1 pure; removing (x1 ∨ ¬x2) makes x2 pure; then x3.
        let cs = ClauseSet::new(3, vec![cl(1, -2), cl(2, -3), cl(3, 1)]);
        let r = strip_nonconflict(&cs);
        assert_eq!(r.fixed, vec![0, 1, 2]);
        assert_eq!(r.rounds, 3);
        assert!(r.residual.is_empty());
        assert!(cs.all_satisfied(&r.lift(&[])));
    }

    #[test]
    fn unconstrained_variables_reported_separately() {
        let cs = ClauseSet::new(3, vec![cl(1, -2), cl(-1, 2)]);
        let r = strip_nonconflict(&cs);
        assert_eq!(r.unconstrained, vec![2]);
        assert!(r.fixed.is_empty());
        assert_eq!(r.residual_vars, vec![0, 1]);
    }

    #[test]
    fn residual_variables_have_negative_occurrences() {
        let cs = ClauseSet::new(4, vec![cl(1, 2), cl(-1, -2), cl(3, -4), cl(-3, 1)]);
        let r = strip_nonconflict(&cs);
        for v in 0..r.residual.num_vars {
            assert!(r
                .residual
                .clauses
                .iter()
                .flat_map(|c| c.literals())
                .any(|l| l.var == v && l.negated));
        }
    }

    #[test]
    fn lift_places_residual_values() {
        let cs = ClauseSet::new(3, vec![cl(2, 3), cl(-2, -3), cl(1, -2)]);
        let r = strip_nonconflict(&cs);
        assert_eq!(r.fixed, vec![0]);
        assert_eq!(r.lift(&[false, true]), vec![true, false, true]);
    }
}
