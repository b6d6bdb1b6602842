//! Strongly connected components of a directed graph (iterative Tarjan).

/// Directed graph in compressed sparse row form over vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Csr {
    /// Builds the adjacency from arcs. Arc order within a source is preserved.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(s, t) in arcs {
            assert!(s < n && t < n, "arc {s}->{t} out of range for {n} vertices");
            offsets[s + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; arcs.len()];
        for &(s, t) in arcs {
            targets[fill[s]] = t;
            fill[s] += 1;
        }
        Csr { offsets, targets }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_arc(&self, s: usize, t: usize) -> bool {
        self.successors(s).contains(&t)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |s| self.successors(s).iter().map(move |&t| (s, t)))
    }
}

/// Component labelling. Components are numbered in completion order, which is
/// a reverse topological order of the condensation: an arc between two
/// different components always goes from a higher id to a lower id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub id: Vec<usize>,
}

impl Components {
    /// Vertices grouped by component id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.count];
        for (v, &c) in self.id.iter().enumerate() {
            groups[c].push(v);
        }
        groups
    }
}

pub fn tarjan(graph: &Csr) -> Components {
    const UNSET: usize = usize::MAX;
    let n = graph.vertex_count();
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut comp = vec![UNSET; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    // (vertex, next successor position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut timer = 0usize;
    let mut count = 0usize;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        call.push((root, 0));
        index[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = graph.successors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w] == UNSET {
                    index[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }

            call.pop();
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
        }
    }

    Components { count, id: comp }
}
