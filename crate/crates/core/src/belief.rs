//! Per-component belief tracking.
//!
//! The belief over a component's damage state is a 3-vector on the
//! probability simplex. After taking action `a` and observing `o`, Bayes'
//! rule gives
//!
//! ```text
//! b'(s') = O(o | s', a) * sum_s T(s' | s, a) b(s)   /   Pr(o | b, a)
//! ```
//!
//! Under do-nothing and repair the observation channel is uniform, so the
//! update reduces to the pure prediction step and is observation-independent.

use crate::error::CoreError;
use crate::model::{ComponentAction, ComponentModel, Matrix3, N_STATES};

/// Per-component beliefs of an n-component system.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    pub per_component: Vec<[f64; 3]>,
}

impl Belief {
    pub fn uniform_initial(b0: [f64; 3], n: usize) -> Belief {
        Belief {
            per_component: vec![b0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.per_component.len()
    }

    /// All component beliefs stacked into one flat vector (length 3n).
    pub fn stacked(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.n());
        for b in &self.per_component {
            v.extend_from_slice(b);
        }
        v
    }

    /// Product distribution over joint states, mixed-radix base-3 with
    /// component 0 most significant.
    pub fn joint(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        for b in &self.per_component {
            let mut next = Vec::with_capacity(out.len() * N_STATES);
            for &p in &out {
                for &q in b {
                    next.push(p * q);
                }
            }
            out = next;
        }
        out
    }

    pub fn on_simplex(&self, tol: f64) -> bool {
        self.per_component.iter().all(|b| {
            b.iter().all(|&x| x >= 0.0) && (b.iter().sum::<f64>() - 1.0).abs() <= tol
        })
    }
}

/// One-step belief prediction `b * T(a)` without conditioning on an observation.
pub fn predict(b: &[f64; 3], action: ComponentAction, m: &ComponentModel) -> [f64; 3] {
    let t: &Matrix3 = m.transition(action);
    let mut out = [0.0; 3];
    for sp in 0..N_STATES {
        let mut acc = 0.0;
        for s in 0..N_STATES {
            acc += b[s] * t[s][sp];
        }
        out[sp] = acc;
    }
    out
}

/// Bayes update of a single component belief.
///
/// Uses the nominal transition for do-nothing/inspect and the composed
/// repair transition for repair; the inspection observation matrix applies
/// only when the action is inspect. Fails with
/// [`CoreError::DegenerateObservation`] when the observation has zero
/// probability under (b, a).
pub fn belief_update(
    b: &[f64; 3],
    action: ComponentAction,
    obs: usize,
    m: &ComponentModel,
) -> Result<[f64; 3], CoreError> {
    let predicted = predict(b, action, m);
    let o = m.observation(action);
    let mut out = [0.0; 3];
    let mut norm = 0.0;
    for sp in 0..N_STATES {
        let w = o[sp][obs] * predicted[sp];
        out[sp] = w;
        norm += w;
    }
    if norm <= 0.0 {
        return Err(CoreError::DegenerateObservation {
            action: action.index(),
            observation: obs,
        });
    }
    for x in &mut out {
        *x /= norm;
    }
    Ok(out)
}

/// `Pr(o | b, a)` for each observation symbol.
pub fn obs_likelihood(b: &[f64; 3], action: ComponentAction, m: &ComponentModel) -> [f64; 3] {
    let predicted = predict(b, action, m);
    let o = m.observation(action);
    let mut out = [0.0; 3];
    for (obs_sym, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for sp in 0..N_STATES {
            acc += predicted[sp] * o[sp][obs_sym];
        }
        *slot = acc;
    }
    out
}
