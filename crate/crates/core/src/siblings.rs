//! Sibling links from WHOIS organization names.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ingest::{AsGraph, Asn, Edge};

/// Leading tokens too generic to identify an organization.
const STOP_WORDS: &[&str] = &["THE", "NET", "COM", "INC", "LTD", "GMBH", "CORP"];

/// Shortest leading token accepted by the similar-name rule.
const MIN_PREFIX_TOKEN: usize = 4;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrgStats {
    pub records: usize,
    pub duplicates: usize,
    pub rejected: usize,
}

/// Parses `ASN<TAB>OrgName` lines. Later lines win on duplicate ASNs.
pub fn load_orgs(text: &str) -> (BTreeMap<Asn, String>, OrgStats) {
    let mut orgs = BTreeMap::new();
    let mut stats = OrgStats::default();
    for line in text.lines() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((asn, name)) = line.split_once('\t') else {
            stats.rejected += 1;
            continue;
        };
        let name = name.trim();
        let asn = match asn.trim().parse::<Asn>() {
            Ok(a) if a > 0 && !name.is_empty() => a,
            _ => {
                stats.rejected += 1;
                continue;
            }
        };
        if orgs.insert(asn, name.to_string()).is_some() {
            stats.duplicates += 1;
        }
        stats.records += 1;
    }
    (orgs, stats)
}

/// Uppercases, turns punctuation into spaces and collapses whitespace.
pub fn normalize_name(name: &str) -> String {
    let mapped: String = name
        .chars()
        .map(|c| {
            if c.is_alphanumeric() {
                c.to_ascii_uppercase()
            } else {
                ' '
            }
        })
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Name with its trailing run of digits removed, if it had one.
fn strip_trailing_digits(norm: &str) -> &str {
    norm.trim_end_matches(|c: char| c.is_ascii_digit()).trim_end()
}

fn leading_alpha_token(norm: &str) -> Option<&str> {
    norm.split(' ')
        .find(|t| t.chars().all(|c| c.is_alphabetic()))
}

/// Whether two WHOIS organization names denote the same organization.
///
/// Names match when they are equal after normalization, equal after dropping
/// a trailing digit run (`ATT-37` / `ATT-38`), or share a distinctive leading
/// alphabetic token (`UUNET South Africa` / `UUNET Germany`).
pub fn same_org(a: &str, b: &str) -> bool {
    let na = normalize_name(a);
    let nb = normalize_name(b);
    if na.is_empty() || nb.is_empty() {
        return false;
    }
    if na == nb {
        return true;
    }

    let (sa, sb) = (strip_trailing_digits(&na), strip_trailing_digits(&nb));
    if !sa.is_empty() && sa == sb {
        return true;
    }

    match (leading_alpha_token(&na), leading_alpha_token(&nb)) {
        (Some(ta), Some(tb)) => {
            ta == tb && ta.chars().count() >= MIN_PREFIX_TOKEN && !STOP_WORDS.contains(&ta)
        }
        _ => false,
    }
}

/// Graph edges whose endpoints belong to the same organization.
pub fn infer_siblings(orgs: &BTreeMap<Asn, String>, graph: &AsGraph) -> BTreeSet<Edge> {
    graph
        .edges()
        .iter()
        .filter(|e| match (orgs.get(&e.lo), orgs.get(&e.hi)) {
            (Some(a), Some(b)) => same_org(a, b),
            _ => false,
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_basic() {
        let (orgs, stats) = load_orgs("701\tUUNET\n");
        assert_eq!(orgs.get(&701).map(String::as_str), Some("UUNET"));
        assert_eq!(stats.duplicates, 0);
    }

    #[test]
    fn load_duplicates_last_wins() {
        let (orgs, stats) = load_orgs("701\tA\n701\tB\n");
        assert_eq!(orgs.len(), 1);
        assert_eq!(orgs[&701], "B");
        assert_eq!(stats.duplicates, 1);
    }

    #[test]
    fn load_rejects_malformed() {
        let (orgs, stats) = load_orgs("701\t  \nabc\tX\n702 Y\n");
        assert!(orgs.is_empty());
        assert_eq!(stats.rejected, 3);
    }

    #[test]
    fn matching_rules() {
        assert!(same_org("ATT-37", "ATT-38"));
        assert!(same_org("UUNET South Africa", "UUNET Germany"));
        assert!(!same_org("Sprint", "Level 3"));
        assert!(same_org("level3, inc.", "LEVEL3 INC"));
        // Digit-only names have no base left to compare.
        assert!(!same_org("37", "38"));
        // Short and generic leading tokens do not count as similar.
        assert!(!same_org("ABC Telecom", "ABC Cable"));
        assert!(!same_org("Corp One", "Corp Two"));
        assert!(!same_org("The Foo", "The Bar"));
    }

    #[test]
    fn normalization_idempotent() {
        for s in ["  Foo--Bar,  inc. ", "ATT-37", "uunet  germany"] {
            let n = normalize_name(s);
            assert_eq!(normalize_name(&n), n);
        }
    }

    #[test]
    fn siblings_only_on_edges() {
        let graph = AsGraph::from_edges([Edge::new(701, 702), Edge::new(702, 1)]);
        let (orgs, _) = load_orgs("701\tUUNET South Africa\n702\tUUNET Germany\n703\tUUNET\n1\tOther\n");
        let sib = infer_siblings(&orgs, &graph);
        assert_eq!(sib.into_iter().collect::<Vec<_>>(), vec![Edge::new(701, 702)]);
        assert!(infer_siblings(&BTreeMap::new(), &graph).is_empty());
    }
}
