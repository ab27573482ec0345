//! End-to-end solver checks on small problems with independent oracles.

use std::time::Duration;

use kofn_core::joint::JointPomdp;
use kofn_core::model::single_component_system;
use kofn_core::{flatten_to_pomdp, ComponentAction};
use kofn_solver::{solve, SolveParams, SolveStatus, SparsePomdp};

fn params(precision: f64, secs: u64) -> SolveParams {
    SolveParams {
        precision,
        timeout: Duration::from_secs(secs),
        max_iterations: None,
    }
}

#[test]
fn zero_reward_pomdp_has_zero_bounds() {
    let p = JointPomdp {
        n_components: 1,
        n_states: 2,
        n_actions: 2,
        n_obs: 2,
        transition: vec![0.5; 2 * 2 * 2],
        observation: vec![0.5; 2 * 2 * 2],
        reward: vec![0.0; 4],
        gamma: 0.8,
        b0_joint: vec![0.5, 0.5],
    };
    let out = solve(&p, &params(1e-6, 5));
    assert_eq!(out.status, SolveStatus::Converged);
    assert!(out.bounds.lower_at(&p.b0_joint).abs() < 1e-9);
    assert!(out.bounds.upper_at(&p.b0_joint).abs() < 1e-9);
}

/// Fully observable two-state machine: analytic optimal value from the MDP.
///
/// States {good, bad}; `wait` earns 1 in good, 0 in bad, good decays to bad
/// w.p. 0.3; `fix` earns -0.5 and restores good. Observations reveal the
/// next state exactly, so the POMDP value at a point-mass belief equals the
/// MDP value, and at b0 it is the one-step Bellman mix.
#[test]
fn fully_observable_toy_matches_analytic_value() {
    let gamma = 0.8;
    // Layouts: transition[(s*A + a)*S + s'], observation[(a*S + s')*O + o].
    let transition = vec![
        0.7, 0.3, /* s0,wait */ 1.0, 0.0, /* s0,fix */
        0.0, 1.0, /* s1,wait */ 1.0, 0.0, /* s1,fix */
    ];
    let observation = vec![
        1.0, 0.0, /* wait, s'=0 */ 0.0, 1.0, /* wait, s'=1 */
        1.0, 0.0, /* fix,  s'=0 */ 0.0, 1.0, /* fix,  s'=1 */
    ];
    let reward = vec![1.0, -0.5, 0.0, -0.5];
    let b0 = vec![0.5, 0.5];
    let p = JointPomdp {
        n_components: 1,
        n_states: 2,
        n_actions: 2,
        n_obs: 2,
        transition,
        observation,
        reward,
        gamma,
        b0_joint: b0.clone(),
    };

    // Exact MDP solution by value iteration to machine precision.
    let mut v = [0.0f64; 2];
    for _ in 0..2000 {
        let q_wait0 = 1.0 + gamma * (0.7 * v[0] + 0.3 * v[1]);
        let q_fix0 = -0.5 + gamma * v[0];
        let q_wait1 = 0.0 + gamma * v[1];
        let q_fix1 = -0.5 + gamma * v[0];
        v = [q_wait0.max(q_fix0), q_wait1.max(q_fix1)];
    }
    // At b0, acting once and observing the revealed state:
    let q_wait = 0.5 * (1.0) + gamma * (0.5 * (0.7 * v[0] + 0.3 * v[1]) + 0.5 * v[1]);
    let q_fix = -0.5 + gamma * v[0];
    let v_b0 = q_wait.max(q_fix);

    let start = std::time::Instant::now();
    let out = solve(&p, &params(1e-4, 10));
    assert!(start.elapsed() < Duration::from_secs(1), "toy solve should be fast");
    assert_eq!(out.status, SolveStatus::Converged);
    assert!(out.bounds.gap_at_b0 <= 1e-4);
    let lower = out.bounds.lower_at(&b0);
    assert!(
        (lower - v_b0).abs() < 1e-3,
        "lower {lower} vs analytic {v_b0}"
    );
    assert!(out.bounds.upper_at(&b0) >= v_b0 - 1e-9);
}

#[test]
fn bounds_are_monotone_and_ordered_on_the_single_component_system() {
    let m = single_component_system(0).unwrap();
    let joint = flatten_to_pomdp(&m).unwrap();
    let out = solve(&joint, &params(5e-4, 60));
    // Trace rows: lower never decreases, upper never increases.
    for w in out.trace.windows(2) {
        assert!(w[1].lower_at_b0 >= w[0].lower_at_b0 - 1e-9);
        assert!(w[1].upper_at_b0 <= w[0].upper_at_b0 + 1e-9);
    }
    let last = out.trace.last().unwrap();
    assert!(last.lower_at_b0 <= last.upper_at_b0 + 1e-6);
    assert_eq!(out.status, SolveStatus::Converged);
}

#[test]
fn lookahead_policy_value_lies_inside_the_bounds() {
    // Monte-Carlo return of the look-ahead policy on the single-component
    // POMDP, against the solved bounds (costs are negated rewards).
    use kofn_core::env::rollout;
    use kofn_solver::{LookaheadCore, LookaheadFactory};
    use kofn_core::policy::PolicyFactory;

    let m = single_component_system(0).unwrap();
    let joint = flatten_to_pomdp(&m).unwrap();
    let out = solve(&joint, &params(1e-3, 60));
    let lower = out.bounds.lower_at(&joint.b0_joint);
    let upper = out.bounds.upper_at(&joint.b0_joint);

    let factory = LookaheadFactory {
        core: LookaheadCore::new(&joint, out.bounds.lower.clone()),
    };
    let n = 40_000u64;
    let horizon = 80; // long horizon: compare against infinite-horizon bounds
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for i in 0..n {
        let mut policy = factory.make(i);
        let cost = rollout(&m, policy.as_mut(), horizon, kofn_core::rng::derive_seed(5, &[i]));
        let r = -cost;
        sum += r;
        sumsq += r * r;
    }
    let mean = sum / n as f64;
    let sd = ((sumsq / n as f64 - mean * mean).max(0.0)).sqrt();
    let se = sd / (n as f64).sqrt();
    let slack = 3.0 * se + 0.8f64.powi(horizon as i32) * 100.0;
    assert!(
        mean >= lower - slack && mean <= upper + slack,
        "MC {mean} not in [{lower}, {upper}] +- {slack}"
    );
}

#[test]
fn pruned_alpha_sets_stay_dominant_at_b0() {
    let m = single_component_system(1).unwrap();
    let joint = flatten_to_pomdp(&m).unwrap();
    let loose = solve(
        &joint,
        &SolveParams {
            precision: 1e-3,
            timeout: Duration::from_secs(30),
            max_iterations: Some(50),
        },
    );
    let tight = solve(&joint, &params(1e-3, 30));
    // More search can only raise the lower bound at b0.
    assert!(tight.bounds.lower_at(&joint.b0_joint) >= loose.bounds.lower_at(&joint.b0_joint) - 1e-9);
    assert!(!tight.bounds.lower.is_empty());
    assert!(tight
        .bounds
        .lower
        .vectors
        .iter()
        .all(|v| v.action < joint.n_actions));
}

#[test]
fn observation_aggregation_preserves_branch_probabilities() {
    // For every action on a 2-component system, class probabilities from a
    // random belief sum to 1 and match the raw joint-table sums.
    let m = kofn_core::build_paper_system(2, 1, kofn_core::Variant::NoMobilization).unwrap();
    let joint = flatten_to_pomdp(&m).unwrap();
    let sp = SparsePomdp::from_joint(&joint);
    let b: Vec<f64> = {
        let raw: Vec<f64> = (0..9).map(|i| (i as f64 * 0.37).sin().abs() + 0.01).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    };
    for a in 0..sp.n_actions {
        let pred = sp.predict(&b, a);
        let mut class_total = 0.0;
        for class in &sp.obs_classes[a] {
            if let Some((_, norm)) = sp.condition(&pred, class) {
                class_total += norm * class.multiplicity;
            }
        }
        let mut raw_total = 0.0;
        for o in 0..joint.n_obs {
            for (sp_i, &pp) in pred.iter().enumerate() {
                raw_total += pp * joint.o(a, sp_i, o);
            }
        }
        assert!((class_total - 1.0).abs() < 1e-10);
        assert!((raw_total - 1.0).abs() < 1e-10);
    }
    let _ = ComponentAction::DoNothing;
}
