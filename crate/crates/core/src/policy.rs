//! Policy interface shared by the solver baseline, the heuristic, and
//! learned agents when driving the system simulator.

use crate::belief::Belief;
use crate::model::ComponentAction;

/// A joint policy over the belief-tracking environment.
///
/// Policies are stateful per episode: `begin_episode` resets internal
/// state, `act` picks the joint action from the current beliefs, and
/// `observe` feeds back the drawn observations (only rules that react to
/// inspection outcomes need it).
pub trait SystemPolicy {
    fn begin_episode(&mut self);
    fn act(&mut self, beliefs: &Belief, t: usize) -> Vec<ComponentAction>;
    fn observe(&mut self, _actions: &[ComponentAction], _observations: &[usize]) {}
}

/// Builds per-rollout policy instances so evaluation can run rollouts in
/// parallel while sharing read-only structure (alpha sets, networks).
pub trait PolicyFactory: Sync {
    fn make(&self, rollout_index: u64) -> Box<dyn SystemPolicy + '_>;
}

/// Fixed joint action at every step.
pub struct ConstantPolicy(pub Vec<ComponentAction>);

impl SystemPolicy for ConstantPolicy {
    fn begin_episode(&mut self) {}
    fn act(&mut self, _beliefs: &Belief, _t: usize) -> Vec<ComponentAction> {
        self.0.clone()
    }
}

impl PolicyFactory for ConstantPolicy {
    fn make(&self, _rollout_index: u64) -> Box<dyn SystemPolicy + '_> {
        Box::new(ConstantPolicy(self.0.clone()))
    }
}
