//! Reduction of the type-of-relationship problem to 2SAT.
//!
//! Every non-sibling edge gets a boolean variable: `true` keeps the initial
//! (degree-gradient) direction, `false` reverses it. Every adjacent-link pair
//! becomes the clause "at least one of the two arrows enters the middle AS",
//! which is violated exactly by the valley pattern (provider-to-customer
//! followed by customer-to-provider).

mod implication;
mod strip;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AdjacentPair, AsGraph, Asn, Edge};

pub use implication::{build_implication_graph, solve_2sat, ImplicationGraph};
pub use strip::{strip_nonconflict, StripResult};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Tor2SatError {
    #[error("adjacent pair {0:?} references edge {1} with no orientation")]
    UnknownEdge(AdjacentPair, Edge),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn new(var: usize, positive: bool) -> Self {
        Literal {
            var,
            negated: !positive,
        }
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }

    /// Vertex of this literal in the implication graph.
    pub fn node(self) -> usize {
        2 * self.var + self.negated as usize
    }

    /// DIMACS integer: 1-based, negative when negated.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

/// Disjunction of two literals; `a == b` is a 1-link clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub a: Literal,
    pub b: Literal,
}

impl Clause {
    pub fn new(a: Literal, b: Literal) -> Self {
        if a <= b {
            Clause { a, b }
        } else {
            Clause { a: b, b: a }
        }
    }

    pub fn unit(a: Literal) -> Self {
        Clause { a, b: a }
    }

    pub fn is_unit(&self) -> bool {
        self.a == self.b
    }

    pub fn satisfied(&self, assignment: &[bool]) -> bool {
        self.a.eval(assignment) || self.b.eval(assignment)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> {
        let second = (!self.is_unit()).then_some(self.b);
        std::iter::once(self.a).chain(second)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl ClauseSet {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Self {
        for c in &clauses {
            assert!(
                c.a.var < num_vars && c.b.var < num_vars,
                "clause {c:?} out of range for {num_vars} variables"
            );
        }
        ClauseSet { num_vars, clauses }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn satisfied_count(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.satisfied(assignment))
            .count()
    }

    pub fn all_satisfied(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.satisfied(assignment))
    }

    /// DIMACS-style dump for cross-checking with external solvers.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len()).unwrap();
        for c in &self.clauses {
            if c.is_unit() {
                writeln!(out, "{} 0", c.a.to_dimacs()).unwrap();
            } else {
                writeln!(out, "{} {} 0", c.a.to_dimacs(), c.b.to_dimacs()).unwrap();
            }
        }
        out
    }
}

/// Customer-to-provider direction of every non-sibling edge: `(tail, head)`
/// with the tail being the customer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Orientation {
    dir: BTreeMap<Edge, (Asn, Asn)>,
}

impl Orientation {
    pub fn insert(&mut self, tail: Asn, head: Asn) {
        self.dir.insert(Edge::new(tail, head), (tail, head));
    }

    pub fn get(&self, e: &Edge) -> Option<(Asn, Asn)> {
        self.dir.get(e).copied()
    }

    pub fn head(&self, e: &Edge) -> Option<Asn> {
        self.get(e).map(|(_, h)| h)
    }

    pub fn len(&self) -> usize {
        self.dir.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dir.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, (Asn, Asn))> + '_ {
        self.dir.iter().map(|(e, d)| (*e, *d))
    }
}

/// Directs every non-sibling edge from the lower-degree endpoint to the
/// higher-degree endpoint; equal degrees go from lower to higher ASN.
pub fn orient_by_gradient(graph: &AsGraph, siblings: &BTreeSet<Edge>) -> Orientation {
    let mut orientation = Orientation::default();
    for e in graph.edges() {
        if siblings.contains(e) {
            continue;
        }
        let (dl, dh) = (graph.degree(e.lo), graph.degree(e.hi));
        if dh >= dl {
            orientation.insert(e.lo, e.hi);
        } else {
            orientation.insert(e.hi, e.lo);
        }
    }
    orientation
}

/// 2SAT encoding of a path set under an initial orientation.
#[derive(Debug, Clone)]
pub struct EdgeClauses {
    /// Variable index to edge.
    pub vars: Vec<Edge>,
    pub index: BTreeMap<Edge, usize>,
    pub clauses: ClauseSet,
    /// Adjacent pair that produced each clause, parallel to `clauses`.
    pub origins: Vec<AdjacentPair>,
}

impl EdgeClauses {
    pub fn var_of(&self, e: &Edge) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn to_dimacs(&self, orientation: &Orientation) -> String {
        let mut out = String::from("c tor2sat clauses; x_i true keeps tail->head\n");
        for (i, e) in self.vars.iter().enumerate() {
            if let Some((t, h)) = orientation.get(e) {
                writeln!(out, "c var {} {}->{}", i + 1, t, h).unwrap();
            }
        }
        out.push_str(&self.clauses.to_dimacs());
        out
    }
}

/// One clause per adjacent pair whose two links are both non-sibling.
///
/// For edge `{u,v}` with middle AS `v`, the literal states "the arrow enters
/// `v`"; it is positive iff the initial orientation already points into `v`.
pub fn build_clauses(
    pairs: &BTreeSet<AdjacentPair>,
    orientation: &Orientation,
    siblings: &BTreeSet<Edge>,
) -> Result<EdgeClauses, Tor2SatError> {
    let vars: Vec<Edge> = orientation.iter().map(|(e, _)| e).collect();
    let index: BTreeMap<Edge, usize> = vars.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    let mut clauses = Vec::new();
    let mut origins = Vec::new();
    for pair in pairs {
        let (e1, e2) = (pair.first(), pair.second());
        if siblings.contains(&e1) || siblings.contains(&e2) {
            continue;
        }
        let literal = |e: Edge| -> Result<Literal, Tor2SatError> {
            let var = *index.get(&e).ok_or(Tor2SatError::UnknownEdge(*pair, e))?;
            let head = orientation.head(&e).expect("indexed edge is oriented");
            Ok(Literal::new(var, head == pair.v))
        };
        clauses.push(Clause::new(literal(e1)?, literal(e2)?));
        origins.push(*pair);
    }

    Ok(EdgeClauses {
        clauses: ClauseSet::new(vars.len(), clauses),
        vars,
        index,
        origins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(Asn, Asn)]) -> AsGraph {
        AsGraph::from_edges(edges.iter().map(|&(a, b)| Edge::new(a, b)))
    }

    #[test]
    fn gradient_orientation() {
        // deg(1)=1, deg(2)=3, deg(3)=1, deg(4)=1
        let g = graph(&[(1, 2), (2, 3), (2, 4)]);
        let o = orient_by_gradient(&g, &BTreeSet::new());
        assert_eq!(o.get(&Edge::new(1, 2)), Some((1, 2)));
        assert_eq!(o.get(&Edge::new(2, 3)), Some((3, 2)));
    }

    #[test]
    fn gradient_tie_breaks_by_asn() {
        let g = graph(&[(9, 5)]);
        for _ in 0..3 {
            let o = orient_by_gradient(&g, &BTreeSet::new());
            assert_eq!(o.get(&Edge::new(5, 9)), Some((5, 9)));
        }
    }

    #[test]
    fn sibling_edges_unoriented() {
        let g = graph(&[(1, 2), (2, 3)]);
        let sib: BTreeSet<Edge> = [Edge::new(1, 2)].into();
        let o = orient_by_gradient(&g, &sib);
        assert_eq!(o.len(), 1);
        assert!(o.get(&Edge::new(1, 2)).is_none());
    }

    fn orientation(arcs: &[(Asn, Asn)]) -> Orientation {
        let mut o = Orientation::default();
        for &(t, h) in arcs {
            o.insert(t, h);
        }
        o
    }

    #[test]
    fn both_arrows_entering_middle_gives_positive_clause() {
        let o = orientation(&[(1, 2), (3, 2)]);
        let pairs: BTreeSet<_> = [AdjacentPair::new(1, 2, 3)].into();
        let ec = build_clauses(&pairs, &o, &BTreeSet::new()).unwrap();
        let c = ec.clauses.clauses[0];
        assert!(!c.a.negated && !c.b.negated);
        // Only both-reversed (both arrows leave 2) falsifies it.
        let falsifying: Vec<_> = [[false, false], [false, true], [true, false], [true, true]]
            .into_iter()
            .filter(|a| !c.satisfied(a))
            .collect();
        assert_eq!(falsifying, vec![[false, false]]);
    }

    #[test]
    fn both_arrows_leaving_middle_gives_negative_clause() {
        let o = orientation(&[(2, 1), (2, 3)]);
        let pairs: BTreeSet<_> = [AdjacentPair::new(1, 2, 3)].into();
        let ec = build_clauses(&pairs, &o, &BTreeSet::new()).unwrap();
        let c = ec.clauses.clauses[0];
        assert!(c.a.negated && c.b.negated);
        assert!(!c.satisfied(&[true, true]));
    }

    #[test]
    fn sibling_pair_produces_no_clause() {
        let o = orientation(&[(3, 2)]);
        let pairs: BTreeSet<_> = [AdjacentPair::new(1, 2, 3)].into();
        let sib: BTreeSet<Edge> = [Edge::new(1, 2)].into();
        let ec = build_clauses(&pairs, &o, &sib).unwrap();
        assert!(ec.clauses.is_empty());
        assert_eq!(ec.vars, vec![Edge::new(2, 3)]);
    }

    #[test]
    fn unknown_edge_is_an_error() {
        let o = orientation(&[(1, 2)]);
        let pairs: BTreeSet<_> = [AdjacentPair::new(1, 2, 3)].into();
        assert!(matches!(
            build_clauses(&pairs, &o, &BTreeSet::new()),
            Err(Tor2SatError::UnknownEdge(_, e)) if e == Edge::new(2, 3)
        ));
    }

    #[test]
    fn dimacs_dump() {
        let cs = ClauseSet::new(2, vec![Clause::new(Literal::pos(0), Literal::neg(1)), Clause::unit(Literal::pos(1))]);
        assert_eq!(cs.to_dimacs(), "p cnf 2 2\n1 -2 0\n2 0\n");
    }
}
