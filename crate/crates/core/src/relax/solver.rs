use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::seeding::{self, DOMAIN_RESTART};

use super::{RelaxError, WeightedInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Vector dimension; defaults to `min(n+1, ceil(sqrt(2n))+1)`.
    pub dim: Option<usize>,
    /// Stop once the Riemannian gradient norm falls below this.
    pub tolerance: f64,
    /// Iterations per restart, coordinate sweeps and gradient steps combined.
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dim: None,
            tolerance: 1e-7,
            max_iters: 5000,
            restarts: 3,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn resolved_dim(&self, num_vars: usize) -> usize {
        self.dim
            .unwrap_or_else(|| default_dim(num_vars))
            .clamp(1, num_vars + 1)
    }
}

fn default_dim(n: usize) -> usize {
    let low_rank = (2.0 * n as f64).sqrt().ceil() as usize + 1;
    (n + 1).min(low_rank)
}

/// Unit vectors for the truth vector `v0` and each variable. The vector of
/// `¬x_i` is `−v_i`, so antipodality holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorSolution {
    pub dim: usize,
    pub num_vars: usize,
    /// Row-major, `num_vars + 1` rows; row 0 is `v0`.
    coords: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub restart: usize,
}

impl VectorSolution {
    /// From explicit rows (`rows[0]` is `v0`); rows are normalized.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(1, Vec::len);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "ragged vector rows");
            let n = norm(r);
            coords.extend(r.iter().map(|x| x / n));
        }
        VectorSolution {
            dim,
            num_vars: rows.len().saturating_sub(1),
            coords,
            objective: f64::NAN,
            iterations: 0,
            grad_norm: f64::NAN,
            restart: 0,
        }
    }

    /// Boolean embedding: `v_i = v0` when true, `−v0` when false.
    pub fn from_assignment(values: &[bool], dim: usize) -> Self {
        let mut v0 = vec![0.0; dim];
        v0[0] = 1.0;
        let mut rows = vec![v0.clone()];
        for &b in values {
            let s = if b { 1.0 } else { -1.0 };
            rows.push(v0.iter().map(|x| s * x).collect());
        }
        Self::from_rows(&rows)
    }

    pub fn v0(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    /// Vector of variable `i`.
    pub fn var(&self, i: usize) -> &[f64] {
        let s = (i + 1) * self.dim;
        &self.coords[s..s + self.dim]
    }

    fn row(&self, p: usize) -> &[f64] {
        &self.coords[p * self.dim..(p + 1) * self.dim]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sign(negated: bool) -> f64 {
    if negated {
        -1.0
    } else {
        1.0
    }
}

/// Relaxed objective `Σ w/4 · (3 + v0·a + v0·b − a·b)` evaluated clause by
/// clause.
pub fn relaxed_objective(inst: &WeightedInstance, sol: &VectorSolution) -> f64 {
    let v0 = sol.v0();
    inst.clauses
        .iter()
        .map(|c| {
            let (sa, sb) = (sign(c.a.negated), sign(c.b.negated));
            let (va, vb) = (sol.var(c.a.var), sol.var(c.b.var));
            let ab = if c.a.var == c.b.var {
                sa * sb
            } else {
                sa * sb * dot(va, vb)
            };
            c.weight / 4.0 * (3.0 + sa * dot(v0, va) + sb * dot(v0, vb) - ab)
        })
        .sum()
}

/// The relaxed objective as `constant + Σ_{p<q} A_pq v_p·v_q` over rows
/// `p = 0..=n` (row 0 is `v0`).
struct Coupling {
    constant: f64,
    rows: Vec<Vec<(usize, f64)>>,
}

impl Coupling {
    fn new(inst: &WeightedInstance) -> Self {
        let n = inst.num_vars;
        let mut raw: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + 1];
        let mut add = |p: usize, q: usize, w: f64| {
            raw[p].push((q, w));
            raw[q].push((p, w));
        };
        let mut constant = 0.0;
        for c in &inst.clauses {
            let w = c.weight;
            let (sa, sb) = (sign(c.a.negated), sign(c.b.negated));
            let (pa, pb) = (c.a.var + 1, c.b.var + 1);
            if c.a == c.b {
                constant += w / 2.0;
                add(0, pa, w / 2.0 * sa);
            } else if pa == pb {
                // x ∨ ¬x
                constant += w;
            } else {
                constant += 0.75 * w;
                add(0, pa, w / 4.0 * sa);
                add(0, pb, w / 4.0 * sb);
                add(pa, pb, -w / 4.0 * sa * sb);
            }
        }
        let rows = raw
            .into_iter()
            .map(|mut r| {
                r.sort_by_key(|&(q, _)| q);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(r.len());
                for (q, w) in r {
                    match merged.last_mut() {
                        Some((lq, lw)) if *lq == q => *lw += w,
                        _ => merged.push((q, w)),
                    }
                }
                merged.retain(|&(_, w)| w != 0.0);
                merged
            })
            .collect();
        Coupling { constant, rows }
    }

    fn field(&self, coords: &[f64], dim: usize, p: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for &(q, w) in &self.rows[p] {
            let vq = &coords[q * dim..(q + 1) * dim];
            for (o, x) in out.iter_mut().zip(vq) {
                *o += w * x;
            }
        }
    }

    /// Objective value and Riemannian gradient norm; the gradient itself is
    /// written row by row into `out`.
    fn gradient(&self, coords: &[f64], dim: usize, out: &mut [f64]) -> (f64, f64) {
        let mut pair_sum = 0.0;
        let mut grad_sq = 0.0;
        for p in 0..self.rows.len() {
            let g = &mut out[p * dim..(p + 1) * dim];
            self.field(coords, dim, p, g);
            let vp = &coords[p * dim..(p + 1) * dim];
            let gv = dot(g, vp);
            pair_sum += gv;
            for (gi, vi) in g.iter_mut().zip(vp) {
                *gi -= gv * vi;
                grad_sq += *gi * *gi;
            }
        }
        (self.constant + 0.5 * pair_sum, grad_sq.sqrt())
    }

    /// Objective value and Riemannian gradient norm at `coords`.
    fn evaluate(&self, coords: &[f64], dim: usize) -> (f64, f64) {
        let mut g = vec![0.0; dim];
        let mut pair_sum = 0.0;
        let mut grad_sq = 0.0;
        for p in 0..self.rows.len() {
            self.field(coords, dim, p, &mut g);
            let vp = &coords[p * dim..(p + 1) * dim];
            let gv = dot(&g, vp);
            pair_sum += gv;
            grad_sq += g.iter().zip(vp).map(|(gi, vi)| (gi - gv * vi).powi(2)).sum::<f64>();
        }
        (self.constant + 0.5 * pair_sum, grad_sq.sqrt())
    }
}

/// Coordinate sweeps quickly find the right basin but converge slowly on
/// ill-conditioned instances; the remaining iterations use gradient steps.
const COORDINATE_SWEEPS: usize = 50;

/// Window of the nonmonotone acceptance test.
const BB_MEMORY: usize = 10;

/// Riemannian gradient ascent with Barzilai-Borwein step sizes, a
/// nonmonotone Armijo test, and row normalization as the retraction.
/// Returns iterations used, final objective, and final gradient norm.
fn barzilai_borwein(
    coupling: &Coupling,
    coords: &mut Vec<f64>,
    dim: usize,
    tolerance: f64,
    max_iters: usize,
) -> (usize, f64, f64) {
    let lipschitz = coupling
        .rows
        .iter()
        .map(|r| r.iter().map(|(_, w)| w.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if lipschitz == 0.0 {
        let (f, g) = coupling.evaluate(coords, dim);
        return (0, f, g);
    }
    let (tau_min, tau_max) = (1e-6 / lipschitz, 1e6 / lipschitz);
    let mut tau = 1.0 / lipschitz;

    let mut grad = vec![0.0; coords.len()];
    let (mut f, mut gn) = coupling.gradient(coords, dim, &mut grad);
    let mut trial = vec![0.0; coords.len()];
    let mut trial_grad = vec![0.0; coords.len()];
    let mut history = std::collections::VecDeque::from([f]);
    let mut iterations = 0;

    while gn >= tolerance && iterations < max_iters {
        let reference = history.iter().copied().fold(f64::INFINITY, f64::min);
        let mut step = tau;
        let mut accepted = None;
        for _ in 0..50 {
            for ((t, x), d) in trial.iter_mut().zip(coords.iter()).zip(&grad) {
                *t = x + step * d;
            }
            for row in trial.chunks_mut(dim) {
                let r = norm(row);
                row.iter_mut().for_each(|x| *x /= r);
            }
            let (ft, gt) = coupling.gradient(&trial, dim, &mut trial_grad);
            if ft >= reference + 1e-4 * step * gn * gn {
                accepted = Some((ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((ft, gt)) = accepted else { break };

        let (mut ss, mut sy, mut yy) = (0.0, 0.0, 0.0);
        for i in 0..coords.len() {
            let s = trial[i] - coords[i];
            // Gradient change of the minimization form, -f.
            let y = grad[i] - trial_grad[i];
            ss += s * s;
            sy += s * y;
            yy += y * y;
        }
        tau = if sy <= 0.0 {
            tau_max
        } else if iterations % 2 == 0 {
            ss / sy
        } else {
            sy / yy
        }
        .clamp(tau_min, tau_max);

        std::mem::swap(coords, &mut trial);
        std::mem::swap(&mut grad, &mut trial_grad);
        (f, gn) = (ft, gt);
        history.push_back(f);
        if history.len() > BB_MEMORY {
            history.pop_front();
        }
        iterations += 1;
        if iterations % 100 == 0 {
            log::trace!("gradient step {iterations} objective {f:.12} grad {gn:.3e}");
        }
    }
    (iterations, f, gn)
}

/// Maximizes the relaxed objective over unit vectors. Starts with
/// block-coordinate ascent (the objective is linear in each single vector, so
/// each update sets it to its normalized local field), then switches to
/// Riemannian gradient steps. Keeps the best of `restarts` random starts.
pub fn solve_relaxation(
    inst: &WeightedInstance,
    config: &SolverConfig,
) -> Result<VectorSolution, RelaxError> {
    let n = inst.num_vars;
    let dim = config.resolved_dim(n);
    let coupling = Coupling::new(inst);
    let restarts = config.restarts.max(1);

    let mut best_converged: Option<VectorSolution> = None;
    let mut best_any: Option<VectorSolution> = None;

    for restart in 0..restarts {
        let mut rng = seeding::stream(config.seed, DOMAIN_RESTART, restart as u64);
        let mut coords = vec![0.0; (n + 1) * dim];
        for row in coords.chunks_mut(dim) {
            loop {
                for x in row.iter_mut() {
                    *x = rng.sample(StandardNormal);
                }
                let r = norm(row);
                if r > 1e-12 {
                    row.iter_mut().for_each(|x| *x /= r);
                    break;
                }
            }
        }

        let mut g = vec![0.0; dim];
        let (mut objective, mut grad_norm) = coupling.evaluate(&coords, dim);
        let mut iterations = 0;
        let sweeps = config.max_iters.min(COORDINATE_SWEEPS);
        while grad_norm >= config.tolerance && iterations < sweeps {
            for p in 0..=n {
                coupling.field(&coords, dim, p, &mut g);
                let gn = norm(&g);
                if gn > 0.0 {
                    for (x, gi) in coords[p * dim..(p + 1) * dim].iter_mut().zip(&g) {
                        *x = gi / gn;
                    }
                }
            }
            iterations += 1;
            (objective, grad_norm) = coupling.evaluate(&coords, dim);
            log::trace!("restart {restart} sweep {iterations} objective {objective:.12} grad {grad_norm:.3e}");
        }
        if grad_norm >= config.tolerance && iterations < config.max_iters {
            let bb = barzilai_borwein(&coupling, &mut coords, dim, config.tolerance, config.max_iters - iterations);
            iterations += bb.0;
            (objective, grad_norm) = (bb.1, bb.2);
        }
        log::debug!(
            "restart {restart}: {iterations} iterations, objective {objective:.12}, grad {grad_norm:.3e}"
        );

        let sol = VectorSolution {
            dim,
            num_vars: n,
            coords,
            objective,
            iterations,
            grad_norm,
            restart,
        };
        let better = |cur: &Option<VectorSolution>| cur.as_ref().is_none_or(|b| sol.objective > b.objective);
        if grad_norm < config.tolerance && better(&best_converged) {
            best_converged = Some(sol.clone());
        }
        if better(&best_any) {
            best_any = Some(sol);
        }
    }

    match best_converged {
        Some(sol) => Ok(sol),
        None => {
            let best = best_any.expect("at least one restart ran");
            Err(RelaxError::NotConverged {
                iterations: best.iterations,
                grad_norm: best.grad_norm,
                best: Box::new(best),
            })
        }
    }
}

impl VectorSolution {
    /// Cosine between `v0` and the vector of variable `i`.
    pub fn alignment(&self, i: usize) -> f64 {
        dot(self.v0(), self.var(i))
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..=self.num_vars).map(move |p| self.row(p))
    }
}
