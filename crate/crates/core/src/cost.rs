//! The per-step cost model and return accounting.
//!
//! A step's cost is the sum of per-component intervention costs, a single
//! mobilization charge when any component is touched, and the system risk
//! `c_f * p_f`. The failure probability `p_f` is, by default, the
//! probability that fewer than k components are functional at the next
//! state given (s, a); see [`RiskMode`](crate::model::RiskMode) for the
//! current-state alternative.

use crate::model::{ComponentAction, RiskMode, SystemModel, FAILED};
use crate::reliability::kofn_failure_prob;

/// Number of functional components in a joint state (failure is the only
/// non-operational damage state).
pub fn functional_count(states: &[usize]) -> usize {
    states.iter().filter(|&&s| s != FAILED).count()
}

/// System failure probability used by the risk term at (s, a).
pub fn failure_prob(states: &[usize], actions: &[ComponentAction], model: &SystemModel) -> f64 {
    match model.risk_mode {
        RiskMode::NextStateClosedForm => {
            let q: Vec<f64> = states
                .iter()
                .zip(actions)
                .zip(&model.components)
                .map(|((&s, &a), c)| c.transition(a)[s][FAILED])
                .collect();
            kofn_failure_prob(&q, model.k)
        }
        RiskMode::CurrentStateIndicator => {
            if functional_count(states) < model.k {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Cost of taking joint action `actions` in joint state `states`.
pub fn step_cost(states: &[usize], actions: &[ComponentAction], model: &SystemModel) -> f64 {
    debug_assert_eq!(states.len(), model.n());
    debug_assert_eq!(actions.len(), model.n());
    let mut cost = 0.0;
    let mut any_intervention = false;
    for (m, &a) in actions.iter().enumerate() {
        match a {
            ComponentAction::DoNothing => {}
            ComponentAction::Repair => {
                cost += model.components[m].cost_repair;
                any_intervention = true;
            }
            ComponentAction::Inspect => {
                cost += model.components[m].cost_inspect;
                any_intervention = true;
            }
        }
    }
    if any_intervention {
        cost += model.c_mob;
    }
    cost + model.c_f * failure_prob(states, actions, model)
}

/// Discounted sum `sum_t gamma^t c_t` of a finite cost sequence.
pub fn discounted_return(costs: &[f64], gamma: f64) -> f64 {
    let mut total = 0.0;
    let mut w = 1.0;
    for &c in costs {
        total += w * c;
        w *= gamma;
    }
    total
}
