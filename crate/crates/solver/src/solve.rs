//! The bound-gap-driven search loop.

use std::collections::HashMap;
use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use kofn_core::joint::JointPomdp;

use crate::alpha::{AlphaSet, AlphaVector};
use crate::sawtooth::SawtoothUpper;
use crate::sparse::SparsePomdp;

#[derive(Debug, Clone)]
pub struct SolveParams {
    /// Target gap (in reward units) at the initial belief.
    pub precision: f64,
    pub timeout: Duration,
    /// Optional hard cap on search iterations (mostly for tests).
    pub max_iterations: Option<u64>,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            precision: 1e-2,
            timeout: Duration::from_secs(3600),
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// Timeout or iteration cap hit; the returned bounds are still valid.
    NonConvergence,
}

/// One convergence-trace sample.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub wall_s: f64,
    pub lower_at_b0: f64,
    pub upper_at_b0: f64,
    pub alpha_count: usize,
}

#[derive(Debug, Clone)]
pub struct BoundPair {
    pub lower: AlphaSet,
    pub upper: SawtoothUpper,
    pub gap_at_b0: f64,
}

impl BoundPair {
    pub fn lower_at(&self, b: &[f64]) -> f64 {
        self.lower.value(b)
    }

    pub fn upper_at(&self, b: &[f64]) -> f64 {
        self.upper.value(b)
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub bounds: BoundPair,
    pub status: SolveStatus,
    pub iterations: u64,
    pub wall_s: f64,
    pub trace: Vec<TraceRow>,
    /// Profiling counters: (descent nodes, backups, descent seconds, backup seconds).
    pub stats: (u64, u64, f64, f64),
}

pub fn write_trace_csv<W: Write>(trace: &[TraceRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "wall_s,lower,upper,alpha_count")?;
    for row in trace {
        writeln!(
            w,
            "{},{},{},{}",
            row.wall_s, row.lower_at_b0, row.upper_at_b0, row.alpha_count
        )?;
    }
    Ok(())
}

/// Registry of sampled beliefs with L1-tolerance deduplication.
struct BeliefRegistry {
    beliefs: Vec<Vec<f64>>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

const DEDUP_TOL: f64 = 1e-9;

impl BeliefRegistry {
    fn new() -> Self {
        BeliefRegistry {
            beliefs: Vec::new(),
            buckets: HashMap::new(),
        }
    }

    fn quantize(b: &[f64]) -> Vec<i64> {
        b.iter().map(|x| (x / (DEDUP_TOL * 8.0)).round() as i64).collect()
    }

    fn insert(&mut self, b: &[f64]) {
        let key = Self::quantize(b);
        if let Some(ids) = self.buckets.get(&key) {
            for &i in ids {
                let l1: f64 = self.beliefs[i]
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).abs())
                    .sum();
                if l1 <= DEDUP_TOL {
                    return;
                }
            }
        }
        let id = self.beliefs.len();
        self.beliefs.push(b.to_vec());
        self.buckets.entry(key).or_default().push(id);
    }

    fn clear(&mut self) {
        self.beliefs.clear();
        self.buckets.clear();
    }
}

struct Child {
    post: Vec<f64>,
    support: Vec<u32>,
    prob: f64,
    ub: f64,
}

struct Search<'a> {
    p: &'a SparsePomdp,
    lower: AlphaSet,
    upper: SawtoothUpper,
    /// Beliefs sampled since the last prune.
    sampled: BeliefRegistry,
    /// One witness belief per surviving alpha-vector from the last prune,
    /// plus the root; keeps prune passes bounded.
    witnesses: Vec<Vec<f64>>,
    /// The first `protected` vectors (the blind-policy floor) are exempt
    /// from pruning so the lower bound stays sane far from the tree.
    protected: usize,
}

impl<'a> Search<'a> {
    /// Q-value of (b, a) under the sawtooth upper bound; also returns the
    /// per-class posteriors (with supports, probabilities, and upper
    /// values) so the caller can reuse them.
    fn q_upper(&self, b: &[f64], a: usize) -> (f64, Vec<Child>) {
        let pred = self.p.predict(b, a);
        let mut q = self.p.expected_reward(b, a);
        let mut children = Vec::new();
        for class in &self.p.obs_classes[a] {
            if let Some((post, support, norm)) = self.p.condition_with_support(&pred, class) {
                let prob = norm * class.multiplicity;
                let ub = self.upper.value(&post);
                q += self.p.gamma * prob * ub;
                children.push(Child {
                    post,
                    support,
                    prob,
                    ub,
                });
            }
        }
        (q, children)
    }

    /// Point-based backup at `b`: adds one alpha-vector (labeled with the
    /// maximizing action) and one sawtooth point. `exempt` forces the
    /// sawtooth point to be stored (used for the root belief).
    ///
    /// The per-action work is independent and runs in parallel; selection
    /// happens afterwards in fixed action order, so the result is
    /// identical to a sequential sweep.
    fn backup(&mut self, b: &[f64], exempt: bool) {
        let n_states = self.p.n_states;
        let chunk = (self.p.n_actions / rayon::current_num_threads()).max(1);
        let per_action: Vec<(Vec<f64>, f64, f64)> = (0..self.p.n_actions)
            .into_par_iter()
            .with_min_len(chunk)
            .map(|a| {
                let pred = self.p.predict(b, a);
                // G(s') aggregates (class multiplicity) x weight x best alpha.
                let mut g = vec![0.0; n_states];
                let mut q_ub = self.p.expected_reward(b, a);
                for class in &self.p.obs_classes[a] {
                    if let Some((post, support, norm)) =
                        self.p.condition_with_support(&pred, class)
                    {
                        let (idx, _) = self.lower.best_on_support(&support, &post);
                        let alpha = &self.lower.vectors[idx].values;
                        for sp in 0..n_states {
                            let w = class.weight[sp];
                            if w != 0.0 {
                                g[sp] += class.multiplicity * w * alpha[sp];
                            }
                        }
                        q_ub += self.p.gamma * norm * class.multiplicity * self.upper.value(&post);
                    }
                }
                let mut values = Vec::with_capacity(n_states);
                for s in 0..n_states {
                    let mut acc = self.p.r(s, a);
                    for &(sp, t) in &self.p.trans[a][s] {
                        acc += self.p.gamma * t * g[sp as usize];
                    }
                    values.push(acc);
                }
                let dot: f64 = values.iter().zip(b).map(|(x, y)| x * y).sum();
                (values, dot, q_ub)
            })
            .collect();

        let mut best_vec: Option<AlphaVector> = None;
        let mut best_dot = f64::NEG_INFINITY;
        let mut best_q = f64::NEG_INFINITY;
        for (a, (values, dot, q_ub)) in per_action.into_iter().enumerate() {
            if dot > best_dot {
                best_dot = dot;
                best_vec = Some(AlphaVector { values, action: a });
            }
            if q_ub > best_q {
                best_q = q_ub;
            }
        }
        self.lower.vectors.push(best_vec.expect("actions exist"));
        self.upper.add(b, best_q, exempt);
        self.sampled.insert(b);
    }

    /// Keep alpha-vectors that are the maximizer at at least one belief in
    /// the working registry (root, previous witnesses, and everything
    /// sampled since the last prune); everything else is dominated across
    /// that set. Surviving vectors record fresh witnesses so later prunes
    /// stay bounded.
    fn prune_lower(&mut self, b0: &[f64]) {
        if self.lower.vectors.len() - self.protected < 2 {
            return;
        }
        let mut registry = BeliefRegistry::new();
        registry.insert(b0);
        for b in &self.witnesses {
            registry.insert(b);
        }
        for b in &self.sampled.beliefs {
            registry.insert(b);
        }
        let chunk = (registry.beliefs.len() / rayon::current_num_threads()).max(1);
        let winners: Vec<usize> = registry
            .beliefs
            .par_iter()
            .with_min_len(chunk)
            .map(|b| self.lower.best(b).0)
            .collect();
        let mut keep = vec![false; self.lower.vectors.len()];
        for k in keep.iter_mut().take(self.protected) {
            *k = true;
        }
        for &w in &winners {
            keep[w] = true;
        }
        // Remap witnesses: one belief per surviving non-protected vector.
        let mut witness_of: Vec<Option<Vec<f64>>> = vec![None; self.lower.vectors.len()];
        for (b, &w) in registry.beliefs.iter().zip(&winners) {
            if witness_of[w].is_none() {
                witness_of[w] = Some(b.clone());
            }
        }
        let vectors = std::mem::take(&mut self.lower.vectors);
        let mut kept_vectors = Vec::with_capacity(vectors.len());
        let mut witnesses = Vec::new();
        for ((v, k), w) in vectors.into_iter().zip(keep).zip(witness_of) {
            if k {
                kept_vectors.push(v);
                if let Some(b) = w {
                    witnesses.push(b);
                }
            }
        }
        self.lower.vectors = kept_vectors;
        self.witnesses = witnesses;
        self.sampled.clear();
    }
}

/// Solve the POMDP to `precision` at its initial belief, or until timeout.
pub fn solve(pomdp: &JointPomdp, params: &SolveParams) -> SolveOutcome {
    let sparse = SparsePomdp::from_joint(pomdp);
    solve_sparse(&sparse, params)
}

pub fn solve_sparse(pomdp: &SparsePomdp, params: &SolveParams) -> SolveOutcome {
    let start = Instant::now();
    let b0 = pomdp.b0.clone();
    let mut upper = SawtoothUpper::fast_informed(pomdp);
    upper.insert_threshold = (0.01 * params.precision).max(1e-9);
    let lower = AlphaSet::blind(pomdp);
    let protected = lower.len();
    let mut search = Search {
        p: pomdp,
        lower,
        upper,
        sampled: BeliefRegistry::new(),
        witnesses: Vec::new(),
        protected,
    };
    search.sampled.insert(&b0);

    let inv_gamma = 1.0 / pomdp.gamma;
    // Depth beyond which the discounted gap target exceeds the value range
    // and descent cannot be useful.
    let (r_lo, r_hi) = pomdp.reward_range();
    let value_range = (r_hi - r_lo) / (1.0 - pomdp.gamma) + 1.0;
    let max_depth = ((value_range / params.precision).ln() / inv_gamma.ln()).ceil() as usize + 2;

    let mut trace: Vec<TraceRow> = Vec::new();
    let mut trace_stride = 1u64;
    let mut iterations = 0u64;
    let mut status = SolveStatus::NonConvergence;
    let mut n_nodes = 0u64;
    let mut n_backups = 0u64;
    let mut t_descent = 0.0f64;
    let mut t_backup = 0.0f64;
    let mut last_lower_prune_len = search.lower.len();
    let mut last_upper_prune_len = 0usize;

    loop {
        let lower0 = search.lower.value(&b0);
        let upper0 = search.upper.value(&b0);
        if iterations % trace_stride == 0 {
            trace.push(TraceRow {
                wall_s: start.elapsed().as_secs_f64(),
                lower_at_b0: lower0,
                upper_at_b0: upper0,
                alpha_count: search.lower.len(),
            });
            if trace.len() > 8192 {
                let kept: Vec<TraceRow> =
                    trace.iter().step_by(2).copied().collect();
                trace = kept;
                trace_stride *= 2;
            }
        }
        if upper0 - lower0 <= params.precision {
            status = SolveStatus::Converged;
            break;
        }
        if start.elapsed() >= params.timeout {
            break;
        }
        if let Some(cap) = params.max_iterations {
            if iterations >= cap {
                break;
            }
        }

        // Sample a path from b0 guided by the bound gap.
        let t0 = Instant::now();
        let mut path: Vec<Vec<f64>> = Vec::new();
        let mut b = b0.clone();
        let mut depth = 0usize;
        let mut target = params.precision; // precision * gamma^{-depth}
        loop {
            let gap = search.upper.value(&b) - search.lower.value(&b);
            if gap <= target || depth >= max_depth {
                break;
            }
            path.push(b.clone());
            // Upper-bound-greedy action (ties to the lowest index).
            let chunk = (pomdp.n_actions / rayon::current_num_threads()).max(1);
            let per_action: Vec<(f64, Vec<Child>)> = (0..pomdp.n_actions)
                .into_par_iter()
                .with_min_len(chunk)
                .map(|a| search.q_upper(&b, a))
                .collect();
            let mut best_q = f64::NEG_INFINITY;
            let mut best_children: Vec<Child> = Vec::new();
            for (q, children) in per_action {
                if q > best_q {
                    best_q = q;
                    best_children = children;
                }
            }
            // Observation branch maximizing probability-weighted excess gap.
            let child_target = target * inv_gamma;
            let mut best_excess = 0.0;
            let mut next_b: Option<Vec<f64>> = None;
            for child in &best_children {
                let (_, lo) = search.lower.best_on_support(&child.support, &child.post);
                let child_gap = child.ub - lo;
                let excess = child.prob * (child_gap - child_target);
                if excess > best_excess {
                    best_excess = excess;
                    next_b = Some(child.post.clone());
                }
            }
            match next_b {
                Some(nb) => {
                    b = nb;
                    depth += 1;
                    target = child_target;
                }
                None => break,
            }
        }

        t_descent += t0.elapsed().as_secs_f64();
        n_nodes += path.len() as u64;

        // Backups bottom-up along the path (the root is path[0]).
        let t1 = Instant::now();
        for (i, b) in path.iter().enumerate().rev() {
            search.backup(b, i == 0);
            n_backups += 1;
        }
        if path.is_empty() {
            // Root already inside its target but not inside `precision`:
            // back it up directly to keep tightening.
            search.backup(&b0, true);
            n_backups += 1;
        }
        t_backup += t1.elapsed().as_secs_f64();

        iterations += 1;
        // Prune on growth: unpruned vectors make every backup's argmax
        // scans proportionally slower.
        if search.lower.len() >= last_lower_prune_len + 256 {
            search.prune_lower(&b0);
            last_lower_prune_len = search.lower.len();
        }
        if search.upper.n_points() >= last_upper_prune_len + 512 {
            search.upper.prune(&[&b0]);
            last_upper_prune_len = search.upper.n_points();
        }
    }

    // Final prune keeps the reported sets tidy.
    search.prune_lower(&b0);
    search.upper.prune(&[&b0]);
    let lower0 = search.lower.value(&b0);
    let upper0 = search.upper.value(&b0);
    trace.push(TraceRow {
        wall_s: start.elapsed().as_secs_f64(),
        lower_at_b0: lower0,
        upper_at_b0: upper0,
        alpha_count: search.lower.len(),
    });

    SolveOutcome {
        bounds: BoundPair {
            lower: search.lower,
            upper: search.upper,
            gap_at_b0: upper0 - lower0,
        },
        status,
        iterations,
        wall_s: start.elapsed().as_secs_f64(),
        trace,
        stats: (n_nodes, n_backups, t_descent, t_backup),
    }
}
