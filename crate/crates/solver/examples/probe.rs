//! Quick solver timing probe on the study systems.

use std::time::Duration;

use kofn_core::{build_paper_system, flatten_to_pomdp, Variant};
use kofn_solver::{solve, SolveParams};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(2);
    let k: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(2);
    let secs: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(60);
    let precision: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let variant = if n == 4 { Variant::Base } else { Variant::NoMobilization };
    let mut m = build_paper_system(n, k, variant).unwrap();
    if std::env::var("RISK_INDICATOR").is_ok() {
        m.risk_mode = kofn_core::RiskMode::CurrentStateIndicator;
        println!("risk mode: current-state indicator");
    }
    let joint = flatten_to_pomdp(&m).unwrap();
    let out = solve(
        &joint,
        &SolveParams {
            precision,
            timeout: Duration::from_secs(secs),
            max_iterations: None,
        },
    );
    let b0 = &joint.b0_joint;
    println!(
        "n={n} k={k}: status {:?}, iters {}, wall {:.1}s, |alpha| {}, |ub points| {}, bounds (cost) [{:.3}, {:.3}], gap {:.4}",
        out.status,
        out.iterations,
        out.wall_s,
        out.bounds.lower.len(),
        out.bounds.upper.n_points(),
        -out.bounds.upper_at(b0),
        -out.bounds.lower_at(b0),
        out.bounds.gap_at_b0
    );
    let (nodes, backups, td, tb) = out.stats;
    println!(
        "  nodes {nodes} ({:.1}/iter), backups {backups}, descent {td:.1}s, backup {tb:.1}s",
        nodes as f64 / out.iterations.max(1) as f64
    );
}
