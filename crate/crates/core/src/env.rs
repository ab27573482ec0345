//! Episode simulator for the k-out-of-n system.
//!
//! The environment hides the true component states, tracks exact
//! per-component beliefs on the agents' behalf, and serves those beliefs as
//! the only observation surface. Episodes are truncated by a time limit —
//! never by an absorbing terminal — so the continuation value at the
//! boundary is generally nonzero.

use rand_chacha::ChaCha8Rng;

use crate::belief::{belief_update, Belief};
use crate::cost::{discounted_return, step_cost};
use crate::error::CoreError;
use crate::model::{ComponentAction, SystemModel};
use crate::policy::SystemPolicy;
use crate::rng::{sample_categorical, substream};

/// Training episodes run 50 steps (discounted tail is negligible).
pub const TRAIN_HORIZON: usize = 50;
/// Evaluation rollouts run 20 steps.
pub const EVAL_HORIZON: usize = 20;

/// Stream labels under an episode seed.
mod stream {
    pub const INIT: u64 = 0;
    pub const TRANSITIONS: u64 = 1;
    pub const OBSERVATIONS: u64 = 2;
}

/// Live episode state: hidden truth plus the tracked beliefs.
#[derive(Debug, Clone)]
pub struct EnvState {
    pub true_states: Vec<usize>,
    pub beliefs: Belief,
    pub t: usize,
    pub truncation_limit: usize,
    transition_rng: ChaCha8Rng,
    observation_rng: ChaCha8Rng,
}

/// Outcome of one environment step.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub cost: f64,
    pub next_beliefs: Belief,
    pub observations: Vec<usize>,
    pub truncated: bool,
}

/// Start an episode: sample hidden states from the initial belief and set
/// the tracked beliefs to it. Streams for state init, transitions, and
/// observations are derived independently from `seed`.
pub fn env_reset(model: &SystemModel, seed: u64, truncation_limit: usize) -> EnvState {
    let mut init_rng = substream(seed, &[stream::INIT]);
    let true_states = (0..model.n())
        .map(|_| sample_categorical(&mut init_rng, &model.b0))
        .collect();
    EnvState {
        true_states,
        beliefs: Belief::uniform_initial(model.b0, model.n()),
        t: 0,
        truncation_limit,
        transition_rng: substream(seed, &[stream::TRANSITIONS]),
        observation_rng: substream(seed, &[stream::OBSERVATIONS]),
    }
}

/// Advance the episode by one joint action.
///
/// Order of events: the cost is charged on the current hidden state and
/// action; each component then transitions (repair restoration composed
/// with deterioration); observations are drawn at the new states; beliefs
/// are filtered with the drawn observations.
pub fn env_step(
    state: &mut EnvState,
    actions: &[ComponentAction],
    model: &SystemModel,
) -> Result<StepResult, CoreError> {
    if state.t >= state.truncation_limit {
        return Err(CoreError::StepAfterTruncation {
            t: state.t,
            limit: state.truncation_limit,
        });
    }
    let cost = step_cost(&state.true_states, actions, model);

    let mut observations = Vec::with_capacity(model.n());
    for m in 0..model.n() {
        let row = &model.components[m].transition(actions[m])[state.true_states[m]];
        state.true_states[m] = sample_categorical(&mut state.transition_rng, row);
        let obs_row = &model.components[m].observation(actions[m])[state.true_states[m]];
        observations.push(sample_categorical(&mut state.observation_rng, obs_row));
    }
    for m in 0..model.n() {
        state.beliefs.per_component[m] = belief_update(
            &state.beliefs.per_component[m],
            actions[m],
            observations[m],
            &model.components[m],
        )?;
    }
    state.t += 1;
    Ok(StepResult {
        cost,
        next_beliefs: state.beliefs.clone(),
        observations,
        truncated: state.t >= state.truncation_limit,
    })
}

/// Run one full episode under `policy`, returning its discounted cost.
pub fn rollout(
    model: &SystemModel,
    policy: &mut dyn SystemPolicy,
    horizon: usize,
    seed: u64,
) -> f64 {
    let mut state = env_reset(model, seed, horizon);
    policy.begin_episode();
    let mut costs = Vec::with_capacity(horizon);
    loop {
        let actions = policy.act(&state.beliefs, state.t);
        let step = env_step(&mut state, &actions, model).expect("within horizon");
        policy.observe(&actions, &step.observations);
        costs.push(step.cost);
        if step.truncated {
            break;
        }
    }
    discounted_return(&costs, model.gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_paper_system, Variant};
    use crate::rng::substream as sub;
    use rand::Rng;

    const DN: ComponentAction = ComponentAction::DoNothing;

    #[test]
    fn reset_is_deterministic_per_seed() {
        let m = build_paper_system(4, 2, Variant::Base).unwrap();
        let a = env_reset(&m, 99, TRAIN_HORIZON);
        let b = env_reset(&m, 99, TRAIN_HORIZON);
        assert_eq!(a.true_states, b.true_states);
        assert_ne!(a.true_states, env_reset(&m, 100, TRAIN_HORIZON).true_states);
        assert_eq!(a.beliefs.per_component[0], [0.6, 0.4, 0.0]);
        assert_eq!(a.t, 0);
    }

    #[test]
    fn initial_state_frequencies_match_b0() {
        let m = build_paper_system(2, 1, Variant::NoMobilization).unwrap();
        let mut fresh = 0usize;
        let mut failed = 0usize;
        let n_resets = 100_000;
        for seed in 0..n_resets {
            let st = env_reset(&m, seed, TRAIN_HORIZON);
            if st.true_states[0] == 0 {
                fresh += 1;
            }
            if st.true_states[0] == 2 {
                failed += 1;
            }
        }
        assert!((fresh as f64 / n_resets as f64 - 0.6).abs() < 0.01);
        assert_eq!(failed, 0);
    }

    #[test]
    fn all_failed_parallel_system_pays_full_risk() {
        let m = build_paper_system(4, 1, Variant::Base).unwrap();
        let mut st = env_reset(&m, 1, TRAIN_HORIZON);
        st.true_states = vec![2, 2, 2, 2];
        let r = env_step(&mut st, &[DN; 4], &m).unwrap();
        assert_eq!(r.cost, 750.0);
    }

    #[test]
    fn belief_trajectory_under_do_nothing_is_seed_independent() {
        let m = build_paper_system(3, 3, Variant::NoMobilization).unwrap();
        let run = |seed| {
            let mut st = env_reset(&m, seed, 10);
            let mut trail = Vec::new();
            for _ in 0..10 {
                let r = env_step(&mut st, &[DN; 3], &m).unwrap();
                trail.push(r.next_beliefs);
            }
            trail
        };
        assert_eq!(run(1), run(12345));
    }

    #[test]
    fn step_after_truncation_is_an_error() {
        let m = build_paper_system(2, 1, Variant::NoMobilization).unwrap();
        let mut st = env_reset(&m, 5, 2);
        env_step(&mut st, &[DN; 2], &m).unwrap();
        let r = env_step(&mut st, &[DN; 2], &m).unwrap();
        assert!(r.truncated);
        assert!(matches!(
            env_step(&mut st, &[DN; 2], &m),
            Err(CoreError::StepAfterTruncation { .. })
        ));
    }

    #[test]
    fn env_beliefs_match_external_filter_on_random_episodes() {
        let m = build_paper_system(4, 2, Variant::Base).unwrap();
        for seed in 0..1000u64 {
            let mut st = env_reset(&m, seed, 12);
            let mut external = Belief::uniform_initial(m.b0, 4);
            let mut action_rng = sub(seed, &[77]);
            for _ in 0..12 {
                let actions: Vec<ComponentAction> = (0..4)
                    .map(|_| ComponentAction::from_index(action_rng.gen_range(0..3)).unwrap())
                    .collect();
                let r = env_step(&mut st, &actions, &m).unwrap();
                for c in 0..4 {
                    external.per_component[c] = belief_update(
                        &external.per_component[c],
                        actions[c],
                        r.observations[c],
                        &m.components[c],
                    )
                    .unwrap();
                }
                assert_eq!(external, r.next_beliefs);
                assert!(r.next_beliefs.on_simplex(1e-9));
            }
        }
    }

    #[test]
    fn repair_transition_frequencies_follow_the_composed_matrix() {
        // Component 1 repaired from the failed state: next-state distribution
        // is (0.95, 0, 0.05) composed with deterioration.
        let m = build_paper_system(4, 4, Variant::Base).unwrap();
        let row = m.components[0].t_repair[2];
        let expect = [0.95 * 0.82, 0.95 * 0.18, 0.05];
        for (a, b) in row.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut rng = sub(3, &[0]);
        let n = 1_000_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[crate::rng::sample_categorical(&mut rng, &row)] += 1;
        }
        for s in 0..3 {
            let freq = counts[s] as f64 / n as f64;
            let sigma = (row[s] * (1.0 - row[s]) / n as f64).sqrt();
            assert!(
                (freq - row[s]).abs() < 4.0 * sigma + 1e-9,
                "state {s}: {freq} vs {}",
                row[s]
            );
        }
    }
}
