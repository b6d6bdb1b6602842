//! Inferred per-edge relationships and their JSON form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Asn, Edge};

#[derive(Debug, Error)]
pub enum RelMapError {
    #[error("invalid relationship JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("edge {0} listed more than once")]
    DuplicateEdge(Edge),
    #[error("self-loop record {0}-{0}")]
    SelfLoop(Asn),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rel {
    /// `a` is a customer of `b`.
    #[serde(rename = "c2p")]
    CustomerToProvider,
    #[serde(rename = "sibling")]
    Sibling,
}

/// Which stage decided an edge's label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FixedByStripping,
    Rounded,
    GradientDefault,
    Sibling,
    /// Known relationship, e.g. from a synthetic hierarchy.
    GroundTruth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelRecord {
    pub a: Asn,
    pub b: Asn,
    pub rel: Rel,
    pub prov: Provenance,
}

impl RelRecord {
    pub fn edge(&self) -> Edge {
        Edge::new(self.a, self.b)
    }
}

/// Relationship of an edge, independent of record orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    CustomerProvider { customer: Asn, provider: Asn },
    Sibling,
}

/// One record per edge, sorted by edge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationshipMap {
    pub edges: Vec<RelRecord>,
}

impl RelationshipMap {
    pub fn new(mut edges: Vec<RelRecord>) -> Result<Self, RelMapError> {
        for r in &edges {
            if r.a == r.b {
                return Err(RelMapError::SelfLoop(r.a));
            }
        }
        edges.sort_by_key(RelRecord::edge);
        if let Some(w) = edges.windows(2).find(|w| w[0].edge() == w[1].edge()) {
            return Err(RelMapError::DuplicateEdge(w[0].edge()));
        }
        Ok(RelationshipMap { edges })
    }

    pub fn from_json(text: &str) -> Result<Self, RelMapError> {
        let raw: RelationshipMap = serde_json::from_str(text)?;
        Self::new(raw.edges)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("relationship map serializes");
        s.push('\n');
        s
    }

    pub fn labels(&self) -> BTreeMap<Edge, Label> {
        self.edges
            .iter()
            .map(|r| {
                let label = match r.rel {
                    Rel::CustomerToProvider => Label::CustomerProvider {
                        customer: r.a,
                        provider: r.b,
                    },
                    Rel::Sibling => Label::Sibling,
                };
                (r.edge(), label)
            })
            .collect()
    }

    /// Degree of every AS appearing in the map.
    pub fn degrees(&self) -> BTreeMap<Asn, u32> {
        let mut deg = BTreeMap::new();
        for r in &self.edges {
            *deg.entry(r.a).or_insert(0) += 1;
            *deg.entry(r.b).or_insert(0) += 1;
        }
        deg
    }

    pub fn sibling_count(&self) -> usize {
        self.edges.iter().filter(|r| r.rel == Rel::Sibling).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let map = RelationshipMap::new(vec![RelRecord {
            a: 701,
            b: 1,
            rel: Rel::CustomerToProvider,
            prov: Provenance::Rounded,
        }])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&map.to_json()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"edges":[{"a":701,"b":1,"rel":"c2p","prov":"rounded"}]})
        );
        assert_eq!(RelationshipMap::from_json(&map.to_json()).unwrap(), map);
    }

    #[test]
    fn duplicate_edges_rejected() {
        let rec = |a, b| RelRecord {
            a,
            b,
            rel: Rel::Sibling,
            prov: Provenance::Sibling,
        };
        assert!(matches!(
            RelationshipMap::new(vec![rec(1, 2), rec(2, 1)]),
            Err(RelMapError::DuplicateEdge(_))
        ));
    }
}
