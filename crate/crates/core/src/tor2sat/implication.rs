use crate::scc::{tarjan, Csr};

use super::{ClauseSet, Literal};

/// Implication graph of a 2SAT instance: vertex `2*var` is `x_var`, vertex
/// `2*var + 1` is its negation.
#[derive(Debug, Clone)]
pub struct ImplicationGraph {
    pub num_vars: usize,
    pub graph: Csr,
}

impl ImplicationGraph {
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn arc_count(&self) -> usize {
        self.graph.arc_count()
    }

    pub fn has_arc(&self, from: Literal, to: Literal) -> bool {
        self.graph.has_arc(from.node(), to.node())
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for (_, t) in self.graph.arcs() {
            deg[t] += 1;
        }
        deg
    }
}

/// Clause `a ∨ b` yields arcs `¬a → b` and `¬b → a`; a 1-link clause `a ∨ a`
/// yields the single arc `¬a → a`.
pub fn build_implication_graph(clauses: &ClauseSet) -> ImplicationGraph {
    let mut arcs = Vec::with_capacity(2 * clauses.len());
    for c in &clauses.clauses {
        arcs.push((c.a.negate().node(), c.b.node()));
        if !c.is_unit() {
            arcs.push((c.b.negate().node(), c.a.node()));
        }
    }
    ImplicationGraph {
        num_vars: clauses.num_vars,
        graph: Csr::from_arcs(2 * clauses.num_vars, &arcs),
    }
}

/// Decides satisfiability from the SCC structure and, when satisfiable,
/// returns an assignment: `x` is true iff `¬x` precedes `x` topologically.
pub fn solve_2sat(g: &ImplicationGraph) -> Option<Vec<bool>> {
    let comps = tarjan(&g.graph);
    // Component ids are a reverse topological order.
    (0..g.num_vars)
        .map(|v| {
            let pos = comps.id[Literal::pos(v).node()];
            let neg = comps.id[Literal::neg(v).node()];
            (pos != neg).then_some(pos < neg)
        })
        .collect()
}
