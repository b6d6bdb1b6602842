//! End-to-end inference: siblings, gradient orientation, clauses, stripping,
//! weighting, relaxation, rounding and composition of the relationship map.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Asn, Edge, PathSet};
use crate::metrics::{self, MetricsError, ValidityReport};
use crate::relax::{
    self, brute_force_opt, build_weighted, round_hyperplane, solve_relaxation, RelaxError,
    RoundingConfig, SolverConfig, WeightedInstance,
};
use crate::relmap::{Provenance, Rel, RelMapError, RelRecord, RelationshipMap};
use crate::siblings::infer_siblings;
use crate::tor2sat::{
    build_clauses, build_implication_graph, orient_by_gradient, strip_nonconflict, Tor2SatError,
};

/// Residual instances up to this many variables are cross-checked against
/// exhaustive search.
pub const ORACLE_CHECK_VARS: usize = 12;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Tor2Sat(#[from] Tor2SatError),
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    RelMap(#[from] RelMapError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub seed: u64,
    pub n_cuts: usize,
    pub rotation: f64,
    pub bias: f64,
    pub restarts: usize,
    pub dim: Option<usize>,
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            alpha: 0.5,
            seed: 0,
            n_cuts: 200,
            rotation: 0.0,
            bias: 0.0,
            restarts: solver.restarts,
            dim: None,
            tolerance: solver.tolerance,
            max_iters: solver.max_iters,
        }
    }
}

impl RunConfig {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            dim: self.dim,
            tolerance: self.tolerance,
            max_iters: self.max_iters,
            restarts: self.restarts,
            seed: self.seed,
        }
    }

    pub fn rounding(&self) -> RoundingConfig {
        RoundingConfig {
            n_cuts: self.n_cuts,
            seed: self.seed,
            rotation: self.rotation,
            bias: self.bias,
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        RunConfig {
            alpha,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub ases: usize,
    pub links: usize,
    pub paths: usize,
    pub unique_pairs: usize,
    pub siblings: usize,
    /// Non-sibling links, one boolean variable each.
    pub variables: usize,
    pub two_link_clauses: usize,
    pub implication_vertices: usize,
    pub implication_arcs: usize,
    pub stripped_edges: usize,
    pub unconstrained_edges: usize,
    pub stripped_fraction: f64,
    pub strip_rounds: usize,
    pub residual_ases: usize,
    pub residual_implication_arcs: usize,
    pub m1: usize,
    pub m2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSummary {
    pub dim: usize,
    pub objective: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingSummary {
    pub objective: f64,
    pub cut: usize,
    pub two_link_satisfied: usize,
    /// Exhaustive optimum of the residual instance when it is small enough.
    pub oracle_objective: Option<f64>,
    pub oracle_match: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total: Duration,
    pub relaxation: Duration,
    pub rounding: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub counts: Counts,
    pub validity: ValidityReport,
    pub provenance: BTreeMap<String, usize>,
    pub relaxation: Option<RelaxationSummary>,
    pub rounding: Option<RoundingSummary>,
    pub warnings: Vec<String>,
    /// Wall-clock timings; kept out of the serialized report so that
    /// repeated runs produce identical files.
    #[serde(skip)]
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct Inference {
    pub relmap: RelationshipMap,
    pub report: RunReport,
    /// Weighted residual instance handed to the relaxation, if any.
    pub residual_instance: Option<WeightedInstance>,
}

fn prov_key(p: Provenance) -> String {
    serde_json::to_value(p)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Runs the full inference on a path set.
pub fn infer(
    paths: &PathSet,
    orgs: Option<&BTreeMap<Asn, String>>,
    config: &RunConfig,
) -> Result<Inference, PipelineError> {
    let started = Instant::now();
    let mut warnings = Vec::new();
    let graph = paths.graph();

    let siblings: BTreeSet<Edge> = orgs.map(|o| infer_siblings(o, graph)).unwrap_or_default();
    let orientation = orient_by_gradient(graph, &siblings);
    let encoded = build_clauses(paths.pairs(), &orientation, &siblings)?;
    let implication = build_implication_graph(&encoded.clauses);
    let strip = strip_nonconflict(&encoded.clauses);
    let residual_implication = build_implication_graph(&strip.residual);

    let residual_edges: Vec<Edge> = strip.residual_vars.iter().map(|&v| encoded.vars[v]).collect();
    let residual_ases: BTreeSet<Asn> = residual_edges.iter().flat_map(|e| [e.lo, e.hi]).collect();

    let mut values = vec![true; encoded.vars.len()];
    let mut provenance = vec![Provenance::FixedByStripping; encoded.vars.len()];
    for &v in &strip.unconstrained {
        provenance[v] = Provenance::GradientDefault;
    }

    let mut relaxation = None;
    let mut rounding = None;
    let mut residual_instance = None;
    let mut timing = Timing::default();

    if !strip.residual_vars.is_empty() {
        let degree_pairs: Vec<(u32, u32)> = residual_edges
            .iter()
            .map(|e| {
                let (a, b) = (graph.degree(e.lo), graph.degree(e.hi));
                (a.min(b), a.max(b))
            })
            .collect();
        let inst = build_weighted(&strip.residual, &degree_pairs, config.alpha)?;
        warnings.extend(inst.warnings.iter().cloned());

        let t = Instant::now();
        let sol = solve_relaxation(&inst, &config.solver())?;
        timing.relaxation = t.elapsed();
        relaxation = Some(RelaxationSummary {
            dim: sol.dim,
            objective: sol.objective,
            iterations: sol.iterations,
            grad_norm: sol.grad_norm,
            restart: sol.restart,
        });

        let t = Instant::now();
        let rounded = round_hyperplane(&sol, &inst, &config.rounding())?;
        timing.rounding = t.elapsed();

        // Variables carrying no weight are not decided by the objective.
        let var_weights = inst.var_weights();
        let mut residual_values = rounded.assignment.values.clone();
        for (r, &orig) in strip.residual_vars.iter().enumerate() {
            if var_weights[r] > 0.0 {
                values[orig] = residual_values[r];
                provenance[orig] = Provenance::Rounded;
            } else {
                residual_values[r] = true;
                values[orig] = true;
                provenance[orig] = Provenance::GradientDefault;
            }
        }
        let objective = relax::objective_value(&inst, &residual_values)?;

        let (oracle_objective, oracle_match) = if inst.num_vars <= ORACLE_CHECK_VARS {
            let opt = brute_force_opt(&inst)?;
            let matched = objective >= opt.objective - 1e-9;
            if !matched {
                warnings.push(format!(
                    "rounding objective {objective} below exhaustive optimum {}",
                    opt.objective
                ));
            }
            (Some(opt.objective), Some(matched))
        } else {
            (None, None)
        };

        rounding = Some(RoundingSummary {
            objective,
            cut: rounded.cut,
            two_link_satisfied: strip.residual.satisfied_count(&residual_values),
            oracle_objective,
            oracle_match,
        });
        residual_instance = Some(inst);
    }

    let mut records = Vec::with_capacity(graph.edge_count());
    for e in graph.edges() {
        let record = match encoded.var_of(e) {
            None => RelRecord {
                a: e.lo,
                b: e.hi,
                rel: Rel::Sibling,
                prov: Provenance::Sibling,
            },
            Some(v) => {
                let (tail, head) = orientation.get(e).expect("variable edges are oriented");
                let (a, b) = if values[v] { (tail, head) } else { (head, tail) };
                RelRecord {
                    a,
                    b,
                    rel: Rel::CustomerToProvider,
                    prov: provenance[v],
                }
            }
        };
        records.push(record);
    }
    let relmap = RelationshipMap::new(records)?;

    let mut prov_counts = BTreeMap::new();
    for r in &relmap.edges {
        *prov_counts.entry(prov_key(r.prov)).or_insert(0) += 1;
    }

    let variables = encoded.vars.len();
    let stripped = strip.fixed.len() + strip.unconstrained.len();
    let counts = Counts {
        ases: graph.node_count(),
        links: graph.edge_count(),
        paths: paths.paths().len(),
        unique_pairs: paths.pairs().len(),
        siblings: siblings.len(),
        variables,
        two_link_clauses: encoded.clauses.len(),
        implication_vertices: implication.vertex_count(),
        implication_arcs: implication.arc_count(),
        stripped_edges: strip.fixed.len(),
        unconstrained_edges: strip.unconstrained.len(),
        stripped_fraction: if variables == 0 {
            0.0
        } else {
            stripped as f64 / variables as f64
        },
        strip_rounds: strip.rounds,
        residual_ases: residual_ases.len(),
        residual_implication_arcs: residual_implication.arc_count(),
        m1: strip.residual.num_vars,
        m2: strip.residual.len(),
    };

    let validity = metrics::validity(paths.paths(), &relmap, false)?;
    timing.total = started.elapsed();
    log::info!(
        "alpha {}: {} links, {} residual variables, {:.4}% valid paths in {:?}",
        config.alpha,
        counts.links,
        counts.m1,
        100.0 * validity.fraction,
        timing.total
    );

    Ok(Inference {
        relmap,
        report: RunReport {
            config: config.clone(),
            counts,
            validity,
            provenance: prov_counts,
            relaxation,
            rounding,
            warnings,
            timing,
        },
        residual_instance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub valid_pct: f64,
    pub agree_alpha0_pct: f64,
    pub agree_alpha1_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,valid_pct,agree_alpha0_pct,agree_alpha1_pct\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.4},{:.4},{:.4}",
                r.alpha, r.valid_pct, r.agree_alpha0_pct, r.agree_alpha1_pct
            )
            .unwrap();
        }
        out
    }
}

/// Runs the inference for every alpha and compares each orientation with the
/// alpha = 0 and alpha = 1 orientations. Sweep points run in parallel on the
/// current rayon pool; results do not depend on the pool size.
pub fn alpha_sweep(
    paths: &PathSet,
    orgs: Option<&BTreeMap<Asn, String>>,
    alphas: &[f64],
    config: &RunConfig,
) -> Result<SweepTable, PipelineError> {
    let mut points: Vec<f64> = vec![0.0, 1.0];
    for &a in alphas {
        if !points.contains(&a) {
            points.push(a);
        }
    }
    let runs: Vec<Inference> = points
        .par_iter()
        .map(|&a| infer(paths, orgs, &config.with_alpha(a)))
        .collect::<Result<_, _>>()?;
    let at = |a: f64| &runs[points.iter().position(|&p| p == a).expect("alpha was run")];
    let (zero, one) = (&at(0.0).relmap, &at(1.0).relmap);

    let rows = alphas
        .iter()
        .map(|&a| {
            let run = at(a);
            Ok(SweepRow {
                alpha: a,
                valid_pct: 100.0 * run.report.validity.fraction,
                agree_alpha0_pct: 100.0 * metrics::agreement(&run.relmap, zero)?,
                agree_alpha1_pct: 100.0 * metrics::agreement(&run.relmap, one)?,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_paths;

    #[test]
    fn tiny_fixture_runs_end_to_end() {
        let (paths, _) = parse_paths("1 2 3\n4 2 5\n3 2 4\n5 2 1\n6 7 2 8\n").unwrap();
        let run = infer(&paths, None, &RunConfig::default()).unwrap();
        assert_eq!(run.relmap.edges.len(), paths.graph().edge_count());
        assert_eq!(run.report.counts.links, paths.graph().edge_count());
    }

    #[test]
    fn siblings_are_labeled() {
        let (paths, _) = parse_paths("1 2 3\n").unwrap();
        let orgs: BTreeMap<Asn, String> = [(1, "ATT-1".into()), (2, "ATT-2".into())].into();
        let run = infer(&paths, Some(&orgs), &RunConfig::default()).unwrap();
        let sib = run.relmap.edges.iter().find(|r| r.edge() == Edge::new(1, 2)).unwrap();
        assert_eq!((sib.rel, sib.prov), (Rel::Sibling, Provenance::Sibling));
        assert_eq!(run.report.counts.siblings, 1);
    }

    #[test]
    fn sweep_rows_are_deterministic() {
        let (paths, _) = parse_paths("1 2 3\n3 2 1 4\n4 1 5\n5 1 2\n2 3 6\n6 3 5\n").unwrap();
        let cfg = RunConfig {
            seed: 5,
            ..RunConfig::default()
        };
        let a = alpha_sweep(&paths, None, &[0.0, 0.5, 1.0], &cfg).unwrap();
        let b = alpha_sweep(&paths, None, &[0.0, 0.5, 1.0], &cfg).unwrap();
        assert_eq!(a.rows.len(), 3);
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows[0].agree_alpha0_pct, 100.0);
        assert_eq!(a.rows[2].agree_alpha1_pct, 100.0);
    }
}
