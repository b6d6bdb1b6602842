//! Path validity, orientation agreement and reachability-based ranking.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AsPath, Asn, Edge};
use crate::relmap::{Label, RelationshipMap};
use crate::scc::{tarjan, Csr};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("edge {0} has no relationship label")]
    Unlabeled(Edge),
    #[error("relationship maps cover different edge sets")]
    EdgeSetMismatch,
}

/// Direction of one traversal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Up,
    Down,
    Sibling,
}

pub fn step(labels: &BTreeMap<Edge, Label>, from: Asn, to: Asn) -> Result<Step, MetricsError> {
    let e = Edge::new(from, to);
    match labels.get(&e) {
        None => Err(MetricsError::Unlabeled(e)),
        Some(Label::Sibling) => Ok(Step::Sibling),
        Some(Label::CustomerProvider { customer, .. }) if *customer == from => Ok(Step::Up),
        Some(Label::CustomerProvider { .. }) => Ok(Step::Down),
    }
}

/// Valley-free check: no downhill step may be followed, anywhere later, by an
/// uphill step. Sibling steps are neutral.
pub fn path_valid(path: &AsPath, labels: &BTreeMap<Edge, Label>) -> Result<bool, MetricsError> {
    let mut downhill = false;
    for w in path.asns().windows(2) {
        match step(labels, w[0], w[1])? {
            Step::Up if downhill => return Ok(false),
            Step::Up | Step::Sibling => {}
            Step::Down => downhill = true,
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub total: usize,
    pub valid: usize,
    pub fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_path: Option<Vec<bool>>,
}

/// Validity over paths with at least two links; single-link paths are always
/// valid and are not counted. An empty count reports a fraction of 1.
pub fn validity(
    paths: &[AsPath],
    relmap: &RelationshipMap,
    keep_per_path: bool,
) -> Result<ValidityReport, MetricsError> {
    let labels = relmap.labels();
    let flags = paths
        .iter()
        .filter(|p| p.link_count() >= 2)
        .map(|p| path_valid(p, &labels))
        .collect::<Result<Vec<bool>, _>>()?;
    let valid = flags.iter().filter(|&&v| v).count();
    let total = flags.len();
    Ok(ValidityReport {
        total,
        valid,
        fraction: if total == 0 { 1.0 } else { valid as f64 / total as f64 },
        per_path: keep_per_path.then_some(flags),
    })
}

/// Fraction of edges directed in both maps that point the same way. Edges that
/// are siblings in either map are skipped; with no such edges the result is 1.
pub fn agreement(a: &RelationshipMap, b: &RelationshipMap) -> Result<f64, MetricsError> {
    let (la, lb) = (a.labels(), b.labels());
    if la.len() != lb.len() || la.keys().zip(lb.keys()).any(|(x, y)| x != y) {
        return Err(MetricsError::EdgeSetMismatch);
    }
    let mut common = 0usize;
    let mut same = 0usize;
    for (x, y) in la.values().zip(lb.values()) {
        if let (
            Label::CustomerProvider { customer: ca, .. },
            Label::CustomerProvider { customer: cb, .. },
        ) = (x, y)
        {
            common += 1;
            if ca == cb {
                same += 1;
            }
        }
    }
    Ok(if common == 0 {
        1.0
    } else {
        same as f64 / common as f64
    })
}

/// Number of ASs each AS reaches through provider-to-customer steps only.
/// Members of one strongly connected component reach each other and share a
/// value. Sibling links are not traversed.
pub fn reachability(relmap: &RelationshipMap) -> BTreeMap<Asn, usize> {
    let asns: Vec<Asn> = relmap.degrees().into_keys().collect();
    let pos: BTreeMap<Asn, usize> = asns.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let arcs: Vec<(usize, usize)> = relmap
        .labels()
        .values()
        .filter_map(|l| match l {
            Label::CustomerProvider { customer, provider } => Some((pos[provider], pos[customer])),
            Label::Sibling => None,
        })
        .collect();
    let g = Csr::from_arcs(asns.len(), &arcs);
    let comps = tarjan(&g);

    // Successor components always have lower ids, so ascending order sees
    // every successor's closure before it is needed.
    let words = asns.len().div_ceil(64);
    let members = comps.members();
    let mut closure: Vec<Vec<u64>> = Vec::with_capacity(comps.count);
    for (c, group) in members.iter().enumerate() {
        let mut bits = vec![0u64; words];
        for &v in group {
            bits[v / 64] |= 1 << (v % 64);
            for &w in g.successors(v) {
                let cw = comps.id[w];
                if cw != c {
                    for (b, x) in bits.iter_mut().zip(&closure[cw]) {
                        *b |= x;
                    }
                }
            }
        }
        closure.push(bits);
    }

    asns.iter()
        .enumerate()
        .map(|(i, &asn)| {
            let ones: u32 = closure[comps.id[i]].iter().map(|w| w.count_ones()).sum();
            (asn, ones as usize - 1)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub asn: Asn,
    pub degree: u32,
    pub reach: usize,
    /// 0 is the top level (largest reach).
    pub level: usize,
    /// ASs at strictly higher levels.
    pub depth: usize,
    /// ASs at the same level.
    pub width: usize,
    /// Reaches nobody for free.
    pub is_leaf: bool,
}

/// Hierarchy levels ordered by decreasing reach; entries sorted by level, then
/// ASN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyRank {
    pub entries: Vec<RankEntry>,
}

impl HierarchyRank {
    pub fn get(&self, asn: Asn) -> Option<&RankEntry> {
        self.entries.iter().find(|e| e.asn == asn)
    }

    pub fn level_count(&self) -> usize {
        self.entries.last().map_or(0, |e| e.level + 1)
    }

    pub fn top_level(&self) -> Vec<Asn> {
        self.entries
            .iter()
            .filter(|e| e.level == 0)
            .map(|e| e.asn)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("asn,degree,reach,level,depth,width,is_leaf\n");
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.asn, e.degree, e.reach, e.level, e.depth, e.width, e.is_leaf
            )
            .unwrap();
        }
        out
    }
}

pub fn rank(relmap: &RelationshipMap) -> HierarchyRank {
    rank_from_reach(&reachability(relmap), &relmap.degrees())
}

/// Levels, depth and width from a reach map.
pub fn rank_from_reach(reach: &BTreeMap<Asn, usize>, degrees: &BTreeMap<Asn, u32>) -> HierarchyRank {
    let mut by_reach: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in reach.values() {
        *by_reach.entry(r).or_insert(0) += 1;
    }
    // Descending reach → (level, depth, width).
    let mut levels: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    let mut above = 0;
    for (level, (&r, &count)) in by_reach.iter().rev().enumerate() {
        levels.insert(r, (level, above, count));
        above += count;
    }
    let mut entries: Vec<RankEntry> = reach
        .iter()
        .map(|(&asn, &r)| {
            let (level, depth, width) = levels[&r];
            RankEntry {
                asn,
                degree: degrees.get(&asn).copied().unwrap_or(0),
                reach: r,
                level,
                depth,
                width,
                is_leaf: r == 0,
            }
        })
        .collect();
    entries.sort_by_key(|e| (e.level, e.asn));
    HierarchyRank { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relmap::{Provenance, Rel, RelRecord};

    fn c2p(customer: Asn, provider: Asn) -> RelRecord {
        RelRecord {
            a: customer,
            b: provider,
            rel: Rel::CustomerToProvider,
            prov: Provenance::Rounded,
        }
    }

    fn sib(a: Asn, b: Asn) -> RelRecord {
        RelRecord {
            a,
            b,
            rel: Rel::Sibling,
            prov: Provenance::Sibling,
        }
    }

    fn map(recs: Vec<RelRecord>) -> RelationshipMap {
        RelationshipMap::new(recs).unwrap()
    }

    fn path(asns: &[Asn]) -> AsPath {
        AsPath::normalize(asns).unwrap()
    }

    #[test]
    fn valley_free_patterns() {
        // 1 -> 2 -> 3 <- 4 <- 5 (3 at the top)
        let m = map(vec![c2p(1, 2), c2p(2, 3), c2p(4, 3), c2p(5, 4)]);
        let l = m.labels();
        assert!(path_valid(&path(&[1, 2, 3, 4, 5]), &l).unwrap());
        assert!(path_valid(&path(&[3, 2, 1]), &l).unwrap());
        // down then up
        let v = map(vec![c2p(4, 3), c2p(4, 6)]);
        assert!(!path_valid(&path(&[3, 4, 6]), &v.labels()).unwrap());
        let valley = map(vec![c2p(2, 1), c2p(2, 3)]);
        assert!(!path_valid(&path(&[1, 2, 3]), &valley.labels()).unwrap());
    }

    #[test]
    fn siblings_are_neutral() {
        // up, sibling, down
        let m = map(vec![c2p(1, 2), sib(2, 3), c2p(4, 3)]);
        assert!(path_valid(&path(&[1, 2, 3, 4]), &m.labels()).unwrap());
        // down, sibling, up
        let m = map(vec![c2p(2, 1), sib(2, 3), c2p(3, 4)]);
        assert!(!path_valid(&path(&[1, 2, 3, 4]), &m.labels()).unwrap());
    }

    #[test]
    fn unlabeled_edge_is_an_error() {
        let m = map(vec![c2p(1, 2)]);
        assert_eq!(
            path_valid(&path(&[1, 2, 3]), &m.labels()),
            Err(MetricsError::Unlabeled(Edge::new(2, 3)))
        );
    }

    #[test]
    fn validity_skips_single_link_paths() {
        let m = map(vec![c2p(2, 1), c2p(2, 3)]);
        let r = validity(&[path(&[1, 2]), path(&[1, 2, 3])], &m, true).unwrap();
        assert_eq!((r.total, r.valid), (1, 0));
        assert_eq!(r.per_path, Some(vec![false]));
    }

    #[test]
    fn agreement_fractions() {
        let a = map(vec![c2p(1, 2), c2p(3, 4), c2p(5, 6), c2p(7, 8)]);
        assert_eq!(agreement(&a, &a).unwrap(), 1.0);
        let rev = map(vec![c2p(2, 1), c2p(4, 3), c2p(6, 5), c2p(8, 7)]);
        assert_eq!(agreement(&a, &rev).unwrap(), 0.0);
        let half = map(vec![c2p(2, 1), c2p(4, 3), c2p(5, 6), c2p(7, 8)]);
        assert_eq!(agreement(&a, &half).unwrap(), 0.5);
        let other = map(vec![c2p(1, 2)]);
        assert_eq!(agreement(&a, &other), Err(MetricsError::EdgeSetMismatch));
    }

    #[test]
    fn reach_chain_cycle_star() {
        let chain = reachability(&map(vec![c2p(1, 2)]));
        assert_eq!((chain[&2], chain[&1]), (1, 0));

        // Provider cycle 1 -> 2 -> 4 -> 1 with customer 3 of 1: every cycle
        // member reaches the other two and 3.
        let cyc = reachability(&map(vec![c2p(2, 1), c2p(4, 2), c2p(1, 4), c2p(3, 1)]));
        assert_eq!((cyc[&1], cyc[&2], cyc[&4], cyc[&3]), (3, 3, 3, 0));

        let star = reachability(&map((1..=5).map(|l| c2p(l, 100)).collect()));
        assert_eq!(star[&100], 5);
        assert!((1..=5).all(|l| star[&l] == 0));
    }

    #[test]
    fn rank_single_scc() {
        let r = rank(&map(vec![c2p(2, 1), c2p(3, 2), c2p(1, 3)]));
        assert_eq!(r.level_count(), 1);
        assert!(r.entries.iter().all(|e| e.depth == 0 && e.width == 3));
    }

    #[test]
    fn rank_chain() {
        let r = rank(&map(vec![c2p(1, 2), c2p(2, 3)]));
        let top = r.get(3).unwrap();
        assert_eq!((top.reach, top.depth, top.width), (2, 0, 1));
        assert_eq!(r.get(2).unwrap().depth, 1);
        let leaf = r.get(1).unwrap();
        assert_eq!((leaf.depth, leaf.is_leaf), (2, true));
        assert_eq!(r.level_count(), 3);
    }
}
