//! Periodic inspect-then-repair heuristic and its exhaustive grid search.
//!
//! The rule has three parameters: the inspection interval, how many
//! components to inspect per round (those with the largest belief failure
//! mass first), and the minimum observed damage level that triggers a
//! repair. Because a component cannot inspect and repair in the same step,
//! repairs execute on the step after the triggering inspection.

use rayon::prelude::*;

use crate::belief::Belief;
use crate::env::{rollout, EVAL_HORIZON};
use crate::model::{ComponentAction, SystemModel};
use crate::policy::{PolicyFactory, SystemPolicy};

/// Admissible inspection intervals: 1..=20.
pub const MAX_INTERVAL: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeuristicParams {
    /// Inspect every `inspect_interval` steps (at t = 0, interval, ...).
    pub inspect_interval: usize,
    /// Number of components inspected per round.
    pub n_inspect: usize,
    /// Minimum observed damage-state index that triggers repair (1 or 2).
    pub repair_threshold: usize,
}

impl HeuristicParams {
    pub fn validate(&self, n: usize) -> bool {
        (1..=MAX_INTERVAL).contains(&self.inspect_interval)
            && (1..=n).contains(&self.n_inspect)
            && (1..=2).contains(&self.repair_threshold)
    }
}

/// Joint action the heuristic takes at step `t`.
///
/// `pending_repair` marks components whose last inspection met the repair
/// threshold; they are repaired now and take precedence over inspection.
pub fn heuristic_act(
    params: &HeuristicParams,
    beliefs: &Belief,
    t: usize,
    pending_repair: &[bool],
) -> Vec<ComponentAction> {
    let n = beliefs.n();
    let mut actions = vec![ComponentAction::DoNothing; n];
    for (m, &pending) in pending_repair.iter().enumerate() {
        if pending {
            actions[m] = ComponentAction::Repair;
        }
    }
    if t % params.inspect_interval == 0 {
        // Rank non-repairing components by failure mass, ties by index.
        let mut candidates: Vec<usize> = (0..n).filter(|&m| !pending_repair[m]).collect();
        candidates.sort_by(|&a, &b| {
            beliefs.per_component[b][2]
                .partial_cmp(&beliefs.per_component[a][2])
                .unwrap()
                .then(a.cmp(&b))
        });
        for &m in candidates.iter().take(params.n_inspect) {
            actions[m] = ComponentAction::Inspect;
        }
    }
    actions
}

/// Stateful wrapper implementing [`SystemPolicy`].
pub struct HeuristicPolicy {
    pub params: HeuristicParams,
    pending_repair: Vec<bool>,
    n: usize,
}

impl HeuristicPolicy {
    pub fn new(params: HeuristicParams, n: usize) -> HeuristicPolicy {
        HeuristicPolicy {
            params,
            pending_repair: vec![false; n],
            n,
        }
    }
}

impl SystemPolicy for HeuristicPolicy {
    fn begin_episode(&mut self) {
        self.pending_repair = vec![false; self.n];
    }

    fn act(&mut self, beliefs: &Belief, t: usize) -> Vec<ComponentAction> {
        let actions = heuristic_act(&self.params, beliefs, t, &self.pending_repair);
        for (m, a) in actions.iter().enumerate() {
            if *a == ComponentAction::Repair {
                self.pending_repair[m] = false;
            }
        }
        actions
    }

    fn observe(&mut self, actions: &[ComponentAction], observations: &[usize]) {
        for m in 0..self.n {
            if actions[m] == ComponentAction::Inspect
                && observations[m] >= self.params.repair_threshold
            {
                self.pending_repair[m] = true;
            }
        }
    }
}

/// Mean, 95% confidence half-width, and rollout count of one grid cell.
#[derive(Debug, Clone, Copy)]
pub struct CellStats {
    pub mean: f64,
    pub ci_half_width: f64,
    pub rollouts: usize,
}

#[derive(Debug, Clone)]
pub struct GridSearchOutcome {
    pub best_params: HeuristicParams,
    pub best: CellStats,
    /// Every evaluated cell, in grid iteration order.
    pub cells: Vec<(HeuristicParams, CellStats)>,
}

fn evaluate_cell(
    model: &SystemModel,
    params: HeuristicParams,
    rollouts: usize,
    horizon: usize,
    seed: u64,
) -> CellStats {
    let costs: Vec<f64> = (0..rollouts as u64)
        .into_par_iter()
        .map(|i| {
            let mut policy = HeuristicPolicy::new(params, model.n());
            rollout(model, &mut policy, horizon, crate::rng::derive_seed(seed, &[i]))
        })
        .collect();
    stats_from(&costs)
}

fn stats_from(costs: &[f64]) -> CellStats {
    let n = costs.len();
    let mean = costs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        costs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n as f64 - 1.0)
    } else {
        0.0
    };
    CellStats {
        mean,
        ci_half_width: 1.96 * (var / n as f64).sqrt(),
        rollouts: n,
    }
}

/// Exhaustive search over the full admissible grid with common random
/// numbers: rollout `i` uses the same environment seed in every cell.
pub fn grid_search(model: &SystemModel, rollouts: usize, seed: u64) -> GridSearchOutcome {
    grid_search_with_horizon(model, rollouts, EVAL_HORIZON, seed)
}

pub fn grid_search_with_horizon(
    model: &SystemModel,
    rollouts: usize,
    horizon: usize,
    seed: u64,
) -> GridSearchOutcome {
    let n = model.n();
    let mut grid = Vec::new();
    for inspect_interval in 1..=MAX_INTERVAL {
        for n_inspect in 1..=n {
            for repair_threshold in 1..=2 {
                grid.push(HeuristicParams {
                    inspect_interval,
                    n_inspect,
                    repair_threshold,
                });
            }
        }
    }
    let cells: Vec<(HeuristicParams, CellStats)> = grid
        .into_par_iter()
        .map(|p| (p, evaluate_cell(model, p, rollouts, horizon, seed)))
        .collect();
    let (best_params, best) = cells
        .iter()
        .cloned()
        .min_by(|a, b| a.1.mean.partial_cmp(&b.1.mean).unwrap())
        .expect("non-empty grid");
    GridSearchOutcome {
        best_params,
        best,
        cells,
    }
}

/// Re-evaluate one parameter combination with the same seeding scheme the
/// grid uses (for audits).
pub fn audit_cell(
    model: &SystemModel,
    params: HeuristicParams,
    rollouts: usize,
    seed: u64,
) -> CellStats {
    evaluate_cell(model, params, rollouts, EVAL_HORIZON, seed)
}

/// CSV export of the full grid: params, mean, CI bounds.
pub fn write_grid_csv<W: std::io::Write>(
    outcome: &GridSearchOutcome,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(
        w,
        "inspect_interval,n_inspect,repair_threshold,mean,ci_low,ci_high,rollouts"
    )?;
    for (p, s) in &outcome.cells {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.inspect_interval,
            p.n_inspect,
            p.repair_threshold,
            s.mean,
            s.mean - s.ci_half_width,
            s.mean + s.ci_half_width,
            s.rollouts
        )?;
    }
    Ok(())
}

/// Factory for parallel evaluation.
pub struct HeuristicFactory {
    pub params: HeuristicParams,
    pub n: usize,
}

impl PolicyFactory for HeuristicFactory {
    fn make(&self, _rollout_index: u64) -> Box<dyn SystemPolicy + '_> {
        Box::new(HeuristicPolicy::new(self.params, self.n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_paper_system, RiskMode, SystemModel, Variant};

    const DN: ComponentAction = ComponentAction::DoNothing;
    const INS: ComponentAction = ComponentAction::Inspect;
    const REP: ComponentAction = ComponentAction::Repair;

    #[test]
    fn every_trigger_fires_with_interval_one() {
        let params = HeuristicParams {
            inspect_interval: 1,
            n_inspect: 4,
            repair_threshold: 1,
        };
        let mut policy = HeuristicPolicy::new(params, 4);
        policy.begin_episode();
        let b = Belief::uniform_initial([0.6, 0.4, 0.0], 4);
        let a0 = policy.act(&b, 0);
        assert_eq!(a0, vec![INS; 4]);
        policy.observe(&a0, &[2, 2, 2, 2]);
        let a1 = policy.act(&b, 1);
        assert_eq!(a1, vec![REP; 4]);
    }

    #[test]
    fn long_interval_inspects_once_within_the_horizon() {
        let params = HeuristicParams {
            inspect_interval: 20,
            n_inspect: 1,
            repair_threshold: 2,
        };
        let mut policy = HeuristicPolicy::new(params, 2);
        policy.begin_episode();
        let b = Belief::uniform_initial([0.6, 0.4, 0.0], 2);
        let mut inspections = 0;
        for t in 0..20 {
            let a = policy.act(&b, t);
            inspections += a.iter().filter(|&&x| x == INS).count();
            policy.observe(&a, &[0, 0]);
        }
        assert_eq!(inspections, 1);
    }

    #[test]
    fn highest_failure_mass_is_inspected_first() {
        let params = HeuristicParams {
            inspect_interval: 1,
            n_inspect: 1,
            repair_threshold: 2,
        };
        let mut b = Belief::uniform_initial([0.5, 0.5, 0.0], 2);
        b.per_component[0] = [0.0, 0.0, 1.0];
        let actions = heuristic_act(&params, &b, 0, &[false, false]);
        assert_eq!(actions, vec![INS, DN]);
    }

    #[test]
    fn grid_search_on_a_free_model_returns_zero() {
        // Zero out every cost: all cells evaluate to exactly zero.
        let base = build_paper_system(2, 1, Variant::NoMobilization).unwrap();
        let mut components = base.components.clone();
        for c in &mut components {
            c.cost_repair = 0.0;
            c.cost_inspect = 0.0;
        }
        let free = SystemModel::new(
            components,
            1,
            0.0,
            0.0,
            0.8,
            [0.6, 0.4, 0.0],
            RiskMode::NextStateClosedForm,
        )
        .unwrap();
        assert_eq!(free.c_f, 0.0);
        let out = grid_search(&free, 8, 42);
        assert_eq!(out.best.mean, 0.0);
        assert!(out.cells.iter().all(|(_, s)| s.mean == 0.0));
        assert_eq!(out.cells.len(), 20 * 2 * 2);
    }

    #[test]
    fn best_cell_is_minimal_and_audit_reproduces_it() {
        let m = build_paper_system(2, 2, Variant::NoMobilization).unwrap();
        let out = grid_search(&m, 200, 11);
        for (_, s) in &out.cells {
            assert!(out.best.mean <= s.mean + 1e-12);
        }
        let again = audit_cell(&m, out.best_params, 200, 11);
        assert_eq!(again.mean, out.best.mean);
    }
}
