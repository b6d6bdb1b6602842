//! Synthetic customer-provider hierarchies with valley-free paths.
//!
//! Tier 0 is the top. Every tier-1 AS buys transit from every tier-0 AS;
//! deeper ASs have one primary provider assigned round-robin in the tier above
//! and, with probability `multihoming`, a secondary provider at a fixed
//! per-tier offset from the primary, which keeps provider loads balanced.
//! Paths climb from a random AS and then descend. A `noise` fraction of
//! paths is corrupted, either by replacing one interior hop with a random AS
//! (which adds links absent from the hierarchy and skews degrees) or by a
//! valley through a multihomed AS.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::{AsGraph, AsPath, Asn, Edge};
use crate::relmap::{Provenance, Rel, RelRecord, RelationshipMap};
use crate::seeding::{self, DOMAIN_SYNTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// One interior AS replaced by a random AS not on the path.
    HopSubstitution,
    /// `[q, p1, c, p2, ...]`: customer `c` passes routes between two of its
    /// providers.
    RouteLeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// AS count per tier, top first. At least two tiers.
    pub tiers: Vec<usize>,
    pub paths: usize,
    /// Fraction of corrupted paths.
    pub noise: f64,
    pub noise_kind: NoiseKind,
    pub multihoming: f64,
    /// Probability of taking one more step while climbing or descending.
    pub continue_prob: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            tiers: vec![4, 16, 60, 120],
            paths: 10_000,
            noise: 0.0,
            noise_kind: NoiseKind::HopSubstitution,
            multihoming: 0.5,
            continue_prob: 0.8,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    /// ASNs per tier, top first.
    pub tiers: Vec<Vec<Asn>>,
    pub truth: RelationshipMap,
    pub paths: Vec<AsPath>,
    pub corrupted: usize,
}

impl SynthData {
    pub fn tier1(&self) -> &[Asn] {
        &self.tiers[0]
    }

    pub fn paths_text(&self) -> String {
        let mut out = String::new();
        for p in &self.paths {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }

    /// True when every provider has a strictly larger degree than each of
    /// its customers in the graph spanned by the generated paths.
    pub fn gradient_consistent(&self) -> bool {
        let graph = AsGraph::from_edges(self.paths.iter().flat_map(|p| p.edges()));
        self.truth.edges.iter().all(|r| {
            graph.contains_edge(&r.edge()) && graph.degree(r.b) > graph.degree(r.a)
        })
    }
}

struct Topology {
    providers: Vec<Vec<usize>>,
    customers: Vec<Vec<usize>>,
}

fn build_topology(tiers: &[Vec<usize>], multihoming: f64, rng: &mut ChaCha8Rng) -> Topology {
    let n: usize = tiers.iter().map(Vec::len).sum();
    let mut providers = vec![Vec::new(); n];
    let mut customers = vec![Vec::new(); n];
    let mut link = |c: usize, p: usize| {
        providers[c].push(p);
        customers[p].push(c);
    };
    for t in 1..tiers.len() {
        let above = &tiers[t - 1];
        if t == 1 {
            for &c in &tiers[1] {
                for &p in above {
                    link(c, p);
                }
            }
            continue;
        }
        let offset = if above.len() > 1 {
            rng.random_range(1..above.len())
        } else {
            0
        };
        for (i, &c) in tiers[t].iter().enumerate() {
            let primary = i % above.len();
            link(c, above[primary]);
            if offset > 0 && rng.random_bool(multihoming) {
                link(c, above[(primary + offset) % above.len()]);
            }
        }
    }
    Topology {
        providers,
        customers,
    }
}

fn climb(top: &Topology, start: usize, p: f64, rng: &mut ChaCha8Rng, path: &mut Vec<usize>) {
    let mut cur = start;
    while !top.providers[cur].is_empty() && rng.random_bool(p) {
        let Some(&next) = top.providers[cur].choose(rng) else { break };
        if path.contains(&next) {
            break;
        }
        path.push(next);
        cur = next;
    }
}

fn descend(top: &Topology, p: f64, rng: &mut ChaCha8Rng, path: &mut Vec<usize>) {
    let mut cur = *path.last().expect("non-empty path");
    loop {
        let options: Vec<usize> = top.customers[cur]
            .iter()
            .copied()
            .filter(|c| !path.contains(c))
            .collect();
        if options.is_empty() || !rng.random_bool(p) {
            break;
        }
        cur = *options.choose(rng).unwrap();
        path.push(cur);
    }
}

pub fn generate(config: &SynthConfig) -> SynthData {
    assert!(config.tiers.len() >= 2, "need at least two tiers");
    assert!(config.tiers.iter().all(|&t| t > 0), "empty tier");
    let mut rng = seeding::stream(config.seed, DOMAIN_SYNTH, 0);

    let n: usize = config.tiers.iter().sum();
    let asns: Vec<Asn> = rand::seq::index::sample(&mut rng, 64_000, n)
        .into_iter()
        .map(|i| i as Asn + 1)
        .collect();
    let mut tiers_idx = Vec::new();
    let mut next = 0;
    for &size in &config.tiers {
        tiers_idx.push((next..next + size).collect::<Vec<usize>>());
        next += size;
    }
    let top = build_topology(&tiers_idx, config.multihoming, &mut rng);

    let mut records = Vec::new();
    for (c, provs) in top.providers.iter().enumerate() {
        for &p in provs {
            records.push(RelRecord {
                a: asns[c],
                b: asns[p],
                rel: Rel::CustomerToProvider,
                prov: Provenance::GroundTruth,
            });
        }
    }
    let truth = RelationshipMap::new(records).expect("generated topology is simple");

    let mut paths: Vec<Vec<usize>> = Vec::with_capacity(config.paths);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    // Cover every link: customer, provider, then keep climbing.
    for (c, provs) in top.providers.iter().enumerate() {
        for &p in provs {
            let mut path = vec![c, p];
            climb(&top, p, config.continue_prob, &mut rng, &mut path);
            if seen.insert(path.clone()) {
                paths.push(path);
            }
        }
    }

    let clean_target = config.paths - (config.noise * config.paths as f64).round() as usize;
    let mut stalled = 0;
    while paths.len() < clean_target && stalled < 100 * config.paths {
        let start = rng.random_range(0..n);
        let mut path = vec![start];
        climb(&top, start, config.continue_prob, &mut rng, &mut path);
        descend(&top, config.continue_prob, &mut rng, &mut path);
        if path.len() >= 3 && seen.insert(path.clone()) {
            paths.push(path);
        } else {
            stalled += 1;
        }
    }

    let clean = paths.len();
    let multihomed: Vec<usize> = (0..n).filter(|&v| top.providers[v].len() >= 2).collect();
    let mut corrupted = 0;
    while paths.len() < config.paths && stalled < 100 * config.paths {
        let path = match config.noise_kind {
            NoiseKind::HopSubstitution => {
                let mut path = paths[rng.random_range(0..clean)].clone();
                if path.len() < 3 {
                    stalled += 1;
                    continue;
                }
                let pos = rng.random_range(1..path.len() - 1);
                let sub = rng.random_range(0..n);
                if path.contains(&sub) {
                    stalled += 1;
                    continue;
                }
                path[pos] = sub;
                path
            }
            NoiseKind::RouteLeak => {
                let Some(&c) = multihomed.choose(&mut rng) else { break };
                let pair: Vec<usize> = top.providers[c].choose_multiple(&mut rng, 2).copied().collect();
                let (p1, p2) = (pair[0], pair[1]);
                let mut path = Vec::new();
                if let Some(&q) = top.providers[p1].choose(&mut rng) {
                    if !top.providers[p2].contains(&q) {
                        path.push(q);
                    }
                }
                path.extend([p1, c, p2]);
                climb(&top, p2, config.continue_prob, &mut rng, &mut path);
                path
            }
        };
        let distinct = path.iter().collect::<BTreeSet<_>>().len() == path.len();
        if distinct && seen.insert(path.clone()) {
            paths.push(path);
            corrupted += 1;
        } else {
            stalled += 1;
        }
    }

    let paths = paths
        .into_iter()
        .map(|p| {
            let mapped: Vec<Asn> = p.into_iter().map(|i| asns[i]).collect();
            AsPath::normalize(&mapped).expect("generated paths are loop-free")
        })
        .collect();

    SynthData {
        tiers: tiers_idx
            .iter()
            .map(|t| t.iter().map(|&i| asns[i]).collect())
            .collect(),
        truth,
        paths,
        corrupted,
    }
}

impl SynthData {
    pub fn truth_edges(&self) -> BTreeSet<Edge> {
        self.truth.edges.iter().map(RelRecord::edge).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;

    #[test]
    fn clean_paths_are_valid_under_truth() {
        let data = generate(&SynthConfig {
            paths: 2000,
            ..SynthConfig::default()
        });
        assert_eq!(data.paths.len(), 2000);
        assert_eq!(data.corrupted, 0);
        let v = metrics::validity(&data.paths, &data.truth, false).unwrap();
        assert_eq!(v.valid, v.total);
        assert!(data.gradient_consistent());
    }

    #[test]
    fn route_leaks_are_valleys() {
        let data = generate(&SynthConfig {
            paths: 2000,
            noise: 0.05,
            noise_kind: NoiseKind::RouteLeak,
            ..SynthConfig::default()
        });
        assert_eq!(data.corrupted, 100);
        let v = metrics::validity(&data.paths, &data.truth, false).unwrap();
        assert_eq!(v.total - v.valid, 100);
    }

    #[test]
    fn hop_substitution_adds_links() {
        let data = generate(&SynthConfig {
            paths: 2000,
            noise: 0.05,
            ..SynthConfig::default()
        });
        assert_eq!(data.corrupted, 100);
        let truth = data.truth_edges();
        let spurious = data.paths[data.paths.len() - 100..]
            .iter()
            .filter(|p| p.edges().any(|e| !truth.contains(&e)))
            .count();
        assert!(spurious > 0);
        let distinct: BTreeSet<_> = data.paths.iter().collect();
        assert_eq!(distinct.len(), data.paths.len());
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SynthConfig {
            paths: 500,
            ..SynthConfig::default()
        };
        assert_eq!(generate(&cfg).paths, generate(&cfg).paths);
        let other = generate(&SynthConfig { seed: 2, ..cfg.clone() });
        assert_ne!(generate(&cfg).paths, other.paths);
    }
}
