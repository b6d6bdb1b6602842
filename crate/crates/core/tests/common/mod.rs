//! Instance generators and independent oracles shared by the integration
//! tests. Nothing here calls the library's own solvers.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

use torinfer::ingest::{AsPath, Asn, Edge};
use torinfer::relax::WeightedInstance;
use torinfer::relmap::Label;
use torinfer::tor2sat::{Clause, ClauseSet, Literal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_literal(rng: &mut ChaCha8Rng, n: usize, p_positive: f64) -> Literal {
    Literal::new(rng.random_range(0..n), rng.random_bool(p_positive))
}

/// Random 2-CNF with `n` variables and `m` two-literal clauses.
pub fn random_2cnf(rng: &mut ChaCha8Rng, n: usize, m: usize, p_positive: f64) -> ClauseSet {
    let clauses = (0..m)
        .map(|_| {
            Clause::new(
                random_literal(rng, n, p_positive),
                random_literal(rng, n, p_positive),
            )
        })
        .collect();
    ClauseSet::new(n, clauses)
}

/// Random 2-CNF whose clauses each mention two different variables, the
/// shape of clauses built from adjacent link pairs. Needs `n >= 2`.
pub fn random_two_link(rng: &mut ChaCha8Rng, n: usize, m: usize, p_positive: f64) -> ClauseSet {
    let clauses = (0..m)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            Clause::new(
                Literal::new(a, rng.random_bool(p_positive)),
                Literal::new(b, rng.random_bool(p_positive)),
            )
        })
        .collect();
    ClauseSet::new(n, clauses)
}

fn lit_true(l: Literal, values: &[bool]) -> bool {
    values[l.var] != l.negated
}

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |mask| (0..n).map(|i| mask >> i & 1 == 1).collect())
}

/// Exhaustive satisfiability check.
pub fn brute_force_sat(cs: &ClauseSet) -> bool {
    assignments(cs.num_vars).any(|v| {
        cs.clauses
            .iter()
            .all(|c| lit_true(c.a, &v) || lit_true(c.b, &v))
    })
}

/// Largest number of simultaneously satisfied clauses.
pub fn brute_force_max_clauses(cs: &ClauseSet) -> usize {
    assignments(cs.num_vars)
        .map(|v| {
            cs.clauses
                .iter()
                .filter(|c| lit_true(c.a, &v) || lit_true(c.b, &v))
                .count()
        })
        .max()
        .unwrap_or(0)
}

pub fn weighted_value(inst: &WeightedInstance, values: &[bool]) -> f64 {
    inst.clauses
        .iter()
        .filter(|c| lit_true(c.a, values) || lit_true(c.b, values))
        .map(|c| c.weight)
        .sum()
}

/// Largest satisfied weight over all assignments.
pub fn brute_force_max_weight(inst: &WeightedInstance) -> f64 {
    assignments(inst.num_vars)
        .map(|v| weighted_value(inst, &v))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random gradient scores in `[0, 3)`, a few of them exactly zero.
pub fn random_gradients(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                rng.random_range(0.0..3.0)
            }
        })
        .collect()
}

/// One step of a path: `U` customer to provider, `D` provider to customer,
/// `S` sibling.
fn step_char(labels: &BTreeMap<Edge, Label>, from: Asn, to: Asn) -> char {
    match labels[&Edge::new(from, to)] {
        Label::Sibling => 'S',
        Label::CustomerProvider { customer, .. } if customer == from => 'U',
        Label::CustomerProvider { .. } => 'D',
    }
}

/// Valley-free check as a regular expression over step letters: uphill and
/// sibling steps, then downhill and sibling steps.
pub fn regex_valid(path: &AsPath, labels: &BTreeMap<Edge, Label>) -> bool {
    let steps: String = path
        .asns()
        .windows(2)
        .map(|w| step_char(labels, w[0], w[1]))
        .collect();
    Regex::new("^[US]*[DS]*$").unwrap().is_match(&steps)
}
