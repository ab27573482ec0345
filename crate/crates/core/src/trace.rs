//! Episode trace export.
//!
//! One CSV row per step: timestep, per-agent action, per-component true
//! state, per-component belief triple, and the step cost. This is the raw
//! data behind policy-rollout and belief-occupancy plots.

use std::io::Write;

use crate::env::{env_reset, env_step};
use crate::model::{ComponentAction, SystemModel};
use crate::policy::SystemPolicy;

/// One recorded environment step.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub t: usize,
    pub actions: Vec<ComponentAction>,
    pub true_states: Vec<usize>,
    pub beliefs: Vec<[f64; 3]>,
    pub cost: f64,
}

/// Run one episode and record every step.
pub fn record_episode(
    model: &SystemModel,
    policy: &mut dyn SystemPolicy,
    horizon: usize,
    seed: u64,
) -> Vec<TraceRow> {
    let mut state = env_reset(model, seed, horizon);
    policy.begin_episode();
    let mut rows = Vec::with_capacity(horizon);
    loop {
        let t = state.t;
        let true_states = state.true_states.clone();
        let beliefs = state.beliefs.per_component.clone();
        let actions = policy.act(&state.beliefs, t);
        let step = env_step(&mut state, &actions, model).expect("within horizon");
        policy.observe(&actions, &step.observations);
        rows.push(TraceRow {
            t,
            actions,
            true_states,
            beliefs,
            cost: step.cost,
        });
        if step.truncated {
            break;
        }
    }
    rows
}

/// Write a trace as CSV (UTF-8, dot decimals, no quoting needed: all fields
/// are numeric or plain identifiers).
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], n: usize, mut w: W) -> std::io::Result<()> {
    let mut header = vec!["t".to_string()];
    for m in 0..n {
        header.push(format!("action_{}", m + 1));
    }
    for m in 0..n {
        header.push(format!("state_{}", m + 1));
    }
    for m in 0..n {
        for s in ["b1", "b2", "b3"] {
            header.push(format!("{}_{}", s, m + 1));
        }
    }
    header.push("cost".into());
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let mut fields = vec![row.t.to_string()];
        for a in &row.actions {
            fields.push(a.index().to_string());
        }
        for s in &row.true_states {
            fields.push(s.to_string());
        }
        for b in &row.beliefs {
            for x in b {
                fields.push(x.to_string());
            }
        }
        fields.push(row.cost.to_string());
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}
