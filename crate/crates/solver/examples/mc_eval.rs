//! Solve a catalog system, then Monte-Carlo-evaluate the look-ahead policy.

use std::time::Duration;

use kofn_core::env::{rollout, EVAL_HORIZON};
use kofn_core::policy::PolicyFactory;
use kofn_core::rng::derive_seed;
use kofn_core::{build_paper_system, flatten_to_pomdp, Variant};
use kofn_solver::{solve, LookaheadCore, LookaheadFactory, SolveParams};
use rayon::prelude::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(4);
    let k: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(4);
    let solve_secs: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(300);
    let rollouts: u64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(10_000);
    let variant = if n == 4 { Variant::Base } else { Variant::NoMobilization };
    let m = build_paper_system(n, k, variant).unwrap();
    let joint = flatten_to_pomdp(&m).unwrap();
    let out = solve(
        &joint,
        &SolveParams {
            precision: 1e-2,
            timeout: Duration::from_secs(solve_secs),
            max_iterations: None,
        },
    );
    let b0 = &joint.b0_joint;
    println!(
        "solve: {:?} iters {} |alpha| {} bounds (cost) [{:.2}, {:.2}]",
        out.status,
        out.iterations,
        out.bounds.lower.len(),
        -out.bounds.upper_at(b0),
        -out.bounds.lower_at(b0),
    );
    let factory = LookaheadFactory {
        core: LookaheadCore::new(&joint, out.bounds.lower.clone()),
    };
    let t = std::time::Instant::now();
    let costs: Vec<f64> = (0..rollouts)
        .into_par_iter()
        .map(|i| {
            let mut p = factory.make(i);
            rollout(&m, p.as_mut(), EVAL_HORIZON, derive_seed(77, &[i]))
        })
        .collect();
    let mean = costs.iter().sum::<f64>() / rollouts as f64;
    let var = costs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (rollouts as f64 - 1.0);
    let ci = 1.96 * (var / rollouts as f64).sqrt();
    println!(
        "lookahead MC over {rollouts} rollouts (horizon {EVAL_HORIZON}): {mean:.2} +- {ci:.2}  [{:.1}s]",
        t.elapsed().as_secs_f64()
    );
}
