//! Ingestion of AS paths from a line-oriented text format.
//!
//! One path per line, whitespace-separated decimal ASNs, `#` starts a comment.
//! Paths are normalized (prepending collapsed), loops are rejected, and
//! duplicates are collapsed. Two-AS paths contribute edges and degrees but no
//! adjacent-link pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Asn = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("no paths: input contained no usable AS path")]
    NoPaths,
}

/// Undirected link between two ASs, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub lo: Asn,
    pub hi: Asn,
}

impl Edge {
    /// Panics on a self-loop; normalized paths never produce one.
    pub fn new(a: Asn, b: Asn) -> Self {
        assert_ne!(a, b, "self-loop edge {a}-{b}");
        if a < b {
            Edge { lo: a, hi: b }
        } else {
            Edge { lo: b, hi: a }
        }
    }

    pub fn contains(&self, asn: Asn) -> bool {
        self.lo == asn || self.hi == asn
    }

    /// The endpoint that is not `asn`.
    pub fn other(&self, asn: Asn) -> Asn {
        if self.lo == asn {
            self.hi
        } else {
            self.lo
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// A normalized AS path: at least two ASs, no consecutive repeats, no loops.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AsPath(Vec<Asn>);

impl AsPath {
    /// Collapses prepending and rejects loops. Returns `None` for paths that
    /// are shorter than two ASs after collapsing or that revisit an AS.
    pub fn normalize(raw: &[Asn]) -> Option<Self> {
        let mut asns: Vec<Asn> = raw.to_vec();
        asns.dedup();
        if asns.len() < 2 {
            return None;
        }
        let distinct: BTreeSet<Asn> = asns.iter().copied().collect();
        if distinct.len() != asns.len() {
            return None;
        }
        Some(AsPath(asns))
    }

    pub fn asns(&self) -> &[Asn] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of links in the path.
    pub fn link_count(&self) -> usize {
        self.0.len() - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    /// Consecutive link pairs as canonical [`AdjacentPair`]s.
    pub fn pairs(&self) -> impl Iterator<Item = AdjacentPair> + '_ {
        self.0
            .windows(3)
            .map(|w| AdjacentPair::new(w[0], w[1], w[2]))
    }
}

impl fmt::Display for AsPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, asn) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{asn}")?;
        }
        Ok(())
    }
}

/// Two consecutive links `{u,v}`, `{v,w}` sharing the middle AS `v`.
///
/// Identity ignores traversal direction: `u < w` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjacentPair {
    pub u: Asn,
    pub v: Asn,
    pub w: Asn,
}

impl AdjacentPair {
    pub fn new(u: Asn, v: Asn, w: Asn) -> Self {
        assert!(u != v && v != w && u != w, "degenerate pair {u} {v} {w}");
        if u < w {
            AdjacentPair { u, v, w }
        } else {
            AdjacentPair { u: w, v, w: u }
        }
    }

    pub fn first(&self) -> Edge {
        Edge::new(self.u, self.v)
    }

    pub fn second(&self) -> Edge {
        Edge::new(self.v, self.w)
    }
}

/// Undirected simple AS graph with degrees.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AsGraph {
    edges: BTreeSet<Edge>,
    degree: BTreeMap<Asn, u32>,
}

impl AsGraph {
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let mut degree = BTreeMap::new();
        for e in &edges {
            *degree.entry(e.lo).or_insert(0) += 1;
            *degree.entry(e.hi).or_insert(0) += 1;
        }
        AsGraph { edges, degree }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Asn> + '_ {
        self.degree.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.degree.len()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Degree of `asn`, zero if absent.
    pub fn degree(&self, asn: Asn) -> u32 {
        self.degree.get(&asn).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> &BTreeMap<Asn, u32> {
        &self.degree
    }
}

/// Counters for lines dropped or merged while parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub lines: usize,
    pub bad_token: usize,
    pub loops: usize,
    pub too_short: usize,
    pub duplicates: usize,
}

/// Deduplicated paths together with their graph and unique adjacent pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    paths: Vec<AsPath>,
    graph: AsGraph,
    pairs: BTreeSet<AdjacentPair>,
}

impl PathSet {
    /// Builds a path set from already-normalized paths. Duplicates collapse.
    pub fn from_paths(paths: impl IntoIterator<Item = AsPath>) -> Self {
        let unique: BTreeSet<AsPath> = paths.into_iter().collect();
        let paths: Vec<AsPath> = unique.into_iter().collect();
        let graph = build_graph(&paths);
        let pairs = extract_pairs(&paths);
        PathSet {
            paths,
            graph,
            pairs,
        }
    }

    /// Paths in canonical (lexicographic) order.
    pub fn paths(&self) -> &[AsPath] {
        &self.paths
    }

    pub fn graph(&self) -> &AsGraph {
        &self.graph
    }

    pub fn pairs(&self) -> &BTreeSet<AdjacentPair> {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Serializes in the input format, one path per line, canonical order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.paths {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

/// Parses the path text format into a normalized [`PathSet`].
pub fn parse_paths(text: &str) -> Result<(PathSet, ParseStats), IngestError> {
    let mut stats = ParseStats::default();
    let mut seen = BTreeSet::new();

    'lines: for line in text.lines() {
        let body = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if body.trim().is_empty() {
            continue;
        }
        stats.lines += 1;

        let mut raw = Vec::new();
        for tok in body.split_whitespace() {
            match tok.parse::<Asn>() {
                Ok(asn) if asn > 0 => raw.push(asn),
                _ => {
                    stats.bad_token += 1;
                    continue 'lines;
                }
            }
        }

        let mut collapsed = raw.clone();
        collapsed.dedup();
        if collapsed.len() < 2 {
            stats.too_short += 1;
            continue;
        }
        match AsPath::normalize(&raw) {
            Some(path) => {
                if !seen.insert(path) {
                    stats.duplicates += 1;
                }
            }
            None => stats.loops += 1,
        }
    }

    if stats.bad_token + stats.loops > 0 {
        log::warn!(
            "dropped {} lines with bad tokens and {} loop paths",
            stats.bad_token,
            stats.loops
        );
    }
    if seen.is_empty() {
        return Err(IngestError::NoPaths);
    }
    Ok((PathSet::from_paths(seen), stats))
}

pub fn build_graph(paths: &[AsPath]) -> AsGraph {
    AsGraph::from_edges(paths.iter().flat_map(|p| p.edges()))
}

pub fn extract_pairs(paths: &[AsPath]) -> BTreeSet<AdjacentPair> {
    paths.iter().flat_map(|p| p.pairs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(asns: &[Asn]) -> AsPath {
        AsPath::normalize(asns).unwrap()
    }

    #[test]
    fn duplicate_lines_collapse() {
        let (set, stats) = parse_paths("1 2 3\n1 2 3\n").unwrap();
        assert_eq!(set.paths(), &[p(&[1, 2, 3])]);
        assert_eq!(stats.duplicates, 1);
        let edges: Vec<Edge> = set.graph().edges().iter().copied().collect();
        assert_eq!(edges, vec![Edge::new(1, 2), Edge::new(2, 3)]);
        assert_eq!(
            set.pairs().iter().copied().collect::<Vec<_>>(),
            vec![AdjacentPair::new(1, 2, 3)]
        );
    }

    #[test]
    fn prepending_collapses() {
        let (set, _) = parse_paths("1 1 2 2 3").unwrap();
        assert_eq!(set.paths(), &[p(&[1, 2, 3])]);
    }

    #[test]
    fn loops_rejected_and_short_paths_kept() {
        let (set, stats) = parse_paths("1 2 1\n1 2\n").unwrap();
        assert_eq!(stats.loops, 1);
        assert_eq!(set.paths(), &[p(&[1, 2])]);
        assert_eq!(set.graph().edge_count(), 1);
        assert!(set.pairs().is_empty());
    }

    #[test]
    fn bad_tokens_and_comments() {
        let text = "# header\n1 x 3\n4 5 # trailing\n\n0 7\n9\n";
        let (set, stats) = parse_paths(text).unwrap();
        assert_eq!(stats.bad_token, 2);
        assert_eq!(stats.too_short, 1);
        assert_eq!(stats.lines, 4);
        assert_eq!(set.paths(), &[p(&[4, 5])]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(parse_paths("").unwrap_err(), IngestError::NoPaths);
        assert_eq!(parse_paths("# only\n1 1\n").unwrap_err(), IngestError::NoPaths);
    }

    #[test]
    fn graph_degrees() {
        let g = build_graph(&[p(&[1, 2, 3])]);
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(g.degree(2), 2);
        let g2 = build_graph(&[p(&[1, 2]), p(&[2, 3]), p(&[1, 2, 3])]);
        assert_eq!(g, g2);
    }

    #[test]
    fn pair_extraction() {
        let pairs = extract_pairs(&[p(&[1, 2, 3, 4])]);
        assert_eq!(
            pairs.into_iter().collect::<Vec<_>>(),
            vec![AdjacentPair::new(1, 2, 3), AdjacentPair::new(2, 3, 4)]
        );
        // Reversal is the same configuration.
        assert_eq!(extract_pairs(&[p(&[1, 2, 3]), p(&[3, 2, 1])]).len(), 1);
        assert_eq!(extract_pairs(&[p(&[1, 2, 3]), p(&[4, 2, 3])]).len(), 2);
    }

    #[test]
    fn pair_edges_are_graph_edges() {
        let (set, _) = parse_paths("1 2 3 4\n5 3 2\n6 2 7\n").unwrap();
        for pair in set.pairs() {
            assert!(set.graph().contains_edge(&pair.first()));
            assert!(set.graph().contains_edge(&pair.second()));
            assert_ne!(pair.first(), pair.second());
        }
    }
}
