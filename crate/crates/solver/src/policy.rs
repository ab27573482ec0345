//! Policies extracted from solver bounds.
//!
//! The greedy policy takes the action label of the maximizing
//! alpha-vector. The look-ahead policy improves on it by evaluating each
//! action's expected immediate reward plus the discounted lower-bound
//! value at the updated beliefs, skipping zero-probability observation
//! branches. Both are deterministic functions of the belief, so decisions
//! are memoized on the belief's bit pattern — across rollouts, identical
//! action/observation histories reproduce bit-identical beliefs.

use dashmap::DashMap;

use kofn_core::belief::Belief;
use kofn_core::joint::{decode_action, JointPomdp};
use kofn_core::model::ComponentAction;
use kofn_core::policy::{PolicyFactory, SystemPolicy};

use crate::alpha::AlphaSet;
use crate::solve::BoundPair;
use crate::sparse::SparsePomdp;

/// Greedy action at `b`: the label of the maximizing alpha-vector.
pub fn greedy_policy(bounds: &BoundPair, b: &[f64]) -> usize {
    let (idx, _) = bounds.lower.best(b);
    bounds.lower.vectors[idx].action
}

/// One-step look-ahead action at `b` (Bellman lookahead against the
/// alpha-vector lower bound).
pub fn lookahead_policy(bounds: &BoundPair, pomdp: &SparsePomdp, b: &[f64]) -> usize {
    lookahead_action(&bounds.lower, pomdp, b)
}

fn lookahead_action(lower: &AlphaSet, pomdp: &SparsePomdp, b: &[f64]) -> usize {
    let mut best_a = 0usize;
    let mut best_q = f64::NEG_INFINITY;
    for a in 0..pomdp.n_actions {
        let mut q = pomdp.expected_reward(b, a);
        if pomdp.gamma > 0.0 {
            let pred = pomdp.predict(b, a);
            for class in &pomdp.obs_classes[a] {
                if let Some((post, norm)) = pomdp.condition(&pred, class) {
                    q += pomdp.gamma * norm * class.multiplicity * lower.value(&post);
                }
            }
        }
        if q > best_q {
            best_q = q;
            best_a = a;
        }
    }
    best_a
}

fn belief_key(b: &[f64]) -> Vec<u64> {
    b.iter().map(|x| x.to_bits()).collect()
}

/// Shared state for look-ahead evaluation: the sparse model, the lower
/// bound, and a concurrent decision cache.
pub struct LookaheadCore {
    pub pomdp: SparsePomdp,
    pub lower: AlphaSet,
    n_components: usize,
    cache: DashMap<Vec<u64>, usize>,
}

impl LookaheadCore {
    pub fn new(joint: &JointPomdp, lower: AlphaSet) -> LookaheadCore {
        LookaheadCore {
            pomdp: SparsePomdp::from_joint(joint),
            lower,
            n_components: joint.n_components,
            cache: DashMap::new(),
        }
    }

    pub fn action_for(&self, joint_belief: &[f64]) -> usize {
        let key = belief_key(joint_belief);
        if let Some(a) = self.cache.get(&key) {
            return *a;
        }
        let a = lookahead_action(&self.lower, &self.pomdp, joint_belief);
        self.cache.insert(key, a);
        a
    }
}

/// Per-rollout policy handle over a shared [`LookaheadCore`].
pub struct LookaheadSystemPolicy<'a> {
    core: &'a LookaheadCore,
}

impl SystemPolicy for LookaheadSystemPolicy<'_> {
    fn begin_episode(&mut self) {}

    fn act(&mut self, beliefs: &Belief, _t: usize) -> Vec<ComponentAction> {
        let joint = beliefs.joint();
        decode_action(self.core.action_for(&joint), self.core.n_components)
    }
}

pub struct LookaheadFactory {
    pub core: LookaheadCore,
}

impl PolicyFactory for LookaheadFactory {
    fn make(&self, _rollout_index: u64) -> Box<dyn SystemPolicy + '_> {
        Box::new(LookaheadSystemPolicy { core: &self.core })
    }
}

/// Greedy (alpha-label) policy adapter with the same caching scheme.
pub struct GreedyFactory {
    pub lower: AlphaSet,
    pub n_components: usize,
    cache: DashMap<Vec<u64>, usize>,
}

impl GreedyFactory {
    pub fn new(lower: AlphaSet, n_components: usize) -> GreedyFactory {
        GreedyFactory {
            lower,
            n_components,
            cache: DashMap::new(),
        }
    }
}

struct GreedySystemPolicy<'a> {
    f: &'a GreedyFactory,
}

impl SystemPolicy for GreedySystemPolicy<'_> {
    fn begin_episode(&mut self) {}

    fn act(&mut self, beliefs: &Belief, _t: usize) -> Vec<ComponentAction> {
        let joint = beliefs.joint();
        let key = belief_key(&joint);
        let action = match self.f.cache.get(&key) {
            Some(a) => *a,
            None => {
                let (idx, _) = self.f.lower.best(&joint);
                let a = self.f.lower.vectors[idx].action;
                self.f.cache.insert(key, a);
                a
            }
        };
        decode_action(action, self.f.n_components)
    }
}

impl PolicyFactory for GreedyFactory {
    fn make(&self, _rollout_index: u64) -> Box<dyn SystemPolicy + '_> {
        Box::new(GreedySystemPolicy { f: self })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::AlphaVector;
    use crate::sawtooth::SawtoothUpper;

    fn single_vector_bounds(values: Vec<f64>, action: usize, pomdp: &SparsePomdp) -> BoundPair {
        BoundPair {
            lower: AlphaSet {
                vectors: vec![AlphaVector { values, action }],
            },
            upper: SawtoothUpper::qmdp(pomdp),
            gap_at_b0: f64::INFINITY,
        }
    }

    fn tiny_pomdp(gamma: f64) -> JointPomdp {
        // Two states, two actions, identity-ish structure, 2 observations.
        JointPomdp {
            n_components: 1,
            n_states: 2,
            n_actions: 2,
            n_obs: 2,
            // a0 keeps the state, a1 swaps it.
            transition: vec![
                1.0, 0.0, 0.0, 1.0, // s0: a0 -> s0, a1 -> s1
                0.0, 1.0, 1.0, 0.0, // s1: a0 -> s1, a1 -> s0
            ],
            // Uniform observations.
            observation: vec![0.5; 2 * 2 * 2],
            // r(s0, a0)=1, r(s0, a1)=0, r(s1, *)=0.
            reward: vec![1.0, 0.0, 0.0, 0.0],
            gamma,
            b0_joint: vec![0.5, 0.5],
        }
    }

    #[test]
    fn greedy_single_vector_returns_its_label() {
        let joint = tiny_pomdp(0.8);
        let sp = SparsePomdp::from_joint(&joint);
        let bounds = single_vector_bounds(vec![0.0, 0.0], 1, &sp);
        assert_eq!(greedy_policy(&bounds, &[1.0, 0.0]), 1);
        assert_eq!(greedy_policy(&bounds, &[0.0, 1.0]), 1);
    }

    #[test]
    fn greedy_compares_dot_products() {
        let joint = tiny_pomdp(0.8);
        let sp = SparsePomdp::from_joint(&joint);
        let mut bounds = single_vector_bounds(vec![1.0, 0.0], 0, &sp);
        bounds.lower.vectors.push(AlphaVector {
            values: vec![0.0, 1.0],
            action: 1,
        });
        assert_eq!(greedy_policy(&bounds, &[0.7, 0.3]), 0);
        assert_eq!(greedy_policy(&bounds, &[0.3, 0.7]), 1);
    }

    #[test]
    fn zero_discount_lookahead_is_myopic() {
        let joint = tiny_pomdp(0.0);
        let sp = SparsePomdp::from_joint(&joint);
        let bounds = single_vector_bounds(vec![100.0, 100.0], 1, &sp);
        // Immediate reward favors a0 in s0.
        assert_eq!(lookahead_policy(&bounds, &sp, &[1.0, 0.0]), 0);
    }

    #[test]
    fn lookahead_matches_brute_force_bellman_with_single_alpha() {
        let joint = tiny_pomdp(0.8);
        let sp = SparsePomdp::from_joint(&joint);
        let alpha = vec![2.0, -1.0];
        let bounds = single_vector_bounds(alpha.clone(), 0, &sp);
        for b in [[0.5, 0.5], [0.9, 0.1], [0.2, 0.8]] {
            // Brute force over all raw observations (not classes).
            let mut best = (f64::NEG_INFINITY, 0usize);
            for a in 0..2 {
                let mut q = 0.0;
                for s in 0..2 {
                    q += b[s] * joint.r(s, a);
                }
                for o in 0..2 {
                    // P(o | b, a) and updated belief.
                    let mut post = [0.0; 2];
                    let mut norm = 0.0;
                    for sp_ in 0..2 {
                        let mut pred = 0.0;
                        for s in 0..2 {
                            pred += b[s] * joint.t(s, a, sp_);
                        }
                        let w = pred * joint.o(a, sp_, o);
                        post[sp_] = w;
                        norm += w;
                    }
                    if norm == 0.0 {
                        continue;
                    }
                    let v: f64 =
                        post.iter().zip(&alpha).map(|(x, al)| x / norm * al).sum();
                    q += 0.8 * norm * v;
                }
                if q > best.0 {
                    best = (q, a);
                }
            }
            assert_eq!(lookahead_policy(&bounds, &sp, &b), best.1);
        }
    }
}
