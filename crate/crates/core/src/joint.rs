//! Flattening the factored system into a single flat POMDP.
//!
//! Joint states, actions, and observations are mixed-radix base-3 encodings
//! of the per-component tuples, component 0 most significant. The flat
//! tables are exact products of the per-component factors, and the flat
//! reward is the negated step cost so a maximizing solver minimizes cost.

use std::io::Write;

use crate::cost::step_cost;
use crate::error::CoreError;
use crate::model::{ComponentAction, SystemModel, N_ACTIONS, N_OBS, N_STATES};

/// Largest component count the dense tables accept (3^6 = 729 states).
pub const MAX_FLAT_COMPONENTS: usize = 6;

/// A dense, flat POMDP over joint states/actions/observations.
#[derive(Debug, Clone)]
pub struct JointPomdp {
    pub n_components: usize,
    pub n_states: usize,
    pub n_actions: usize,
    pub n_obs: usize,
    /// `transition[(s * n_actions + a) * n_states + s']`
    pub transition: Vec<f64>,
    /// `observation[(a * n_states + s') * n_obs + o]`
    pub observation: Vec<f64>,
    /// `reward[s * n_actions + a]`, stored as negative cost.
    pub reward: Vec<f64>,
    pub gamma: f64,
    pub b0_joint: Vec<f64>,
}

/// Encode a component-wise tuple as a joint index (component 0 most significant).
pub fn encode(tuple: &[usize], radix: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * radix + x)
}

/// Decode a joint index into a component-wise tuple.
pub fn decode(mut index: usize, n: usize, radix: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % radix;
        index /= radix;
    }
    out
}

/// Decode a joint action index into per-component actions.
pub fn decode_action(index: usize, n: usize) -> Vec<ComponentAction> {
    decode(index, n, N_ACTIONS)
        .into_iter()
        .map(|i| ComponentAction::from_index(i).expect("action index in range"))
        .collect()
}

impl JointPomdp {
    #[inline]
    pub fn t(&self, s: usize, a: usize, sp: usize) -> f64 {
        self.transition[(s * self.n_actions + a) * self.n_states + sp]
    }

    #[inline]
    pub fn o(&self, a: usize, sp: usize, obs: usize) -> f64 {
        self.observation[(a * self.n_states + sp) * self.n_obs + obs]
    }

    #[inline]
    pub fn r(&self, s: usize, a: usize) -> f64 {
        self.reward[s * self.n_actions + a]
    }

    /// Export in the classic plain-text POMDP interchange format
    /// (`discount/values/states/actions/observations` header, then dense
    /// `T`, `O`, `R` tables row-major), readable by external solvers.
    pub fn write_interchange<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "discount: {}", self.gamma)?;
        writeln!(w, "values: reward")?;
        writeln!(w, "states: {}", self.n_states)?;
        writeln!(w, "actions: {}", self.n_actions)?;
        writeln!(w, "observations: {}", self.n_obs)?;
        let b0: Vec<String> = self.b0_joint.iter().map(|x| x.to_string()).collect();
        writeln!(w, "start: {}", b0.join(" "))?;
        for a in 0..self.n_actions {
            writeln!(w, "\nT: {a}")?;
            for s in 0..self.n_states {
                let row: Vec<String> =
                    (0..self.n_states).map(|sp| self.t(s, a, sp).to_string()).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
        }
        for a in 0..self.n_actions {
            writeln!(w, "\nO: {a}")?;
            for sp in 0..self.n_states {
                let row: Vec<String> =
                    (0..self.n_obs).map(|o| self.o(a, sp, o).to_string()).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
        }
        writeln!(w)?;
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                writeln!(w, "R: {a} : {s} : * : * {}", self.r(s, a))?;
            }
        }
        Ok(())
    }
}

/// Build the flat POMDP equivalent of `model`.
pub fn flatten_to_pomdp(model: &SystemModel) -> Result<JointPomdp, CoreError> {
    let n = model.n();
    if n > MAX_FLAT_COMPONENTS {
        return Err(CoreError::TooManyComponents {
            n,
            max: MAX_FLAT_COMPONENTS,
        });
    }
    let n_states = N_STATES.pow(n as u32);
    let n_actions = N_ACTIONS.pow(n as u32);
    let n_obs = N_OBS.pow(n as u32);

    let mut transition = vec![0.0; n_states * n_actions * n_states];
    let mut observation = vec![0.0; n_actions * n_states * n_obs];
    let mut reward = vec![0.0; n_states * n_actions];

    let actions: Vec<Vec<ComponentAction>> =
        (0..n_actions).map(|a| decode_action(a, n)).collect();
    let states: Vec<Vec<usize>> = (0..n_states).map(|s| decode(s, n, N_STATES)).collect();

    for (s, s_tuple) in states.iter().enumerate() {
        for (a, a_tuple) in actions.iter().enumerate() {
            reward[s * n_actions + a] = -step_cost(s_tuple, a_tuple, model);
            for (sp, sp_tuple) in states.iter().enumerate() {
                let mut p = 1.0;
                for m in 0..n {
                    p *= model.components[m].transition(a_tuple[m])[s_tuple[m]][sp_tuple[m]];
                    if p == 0.0 {
                        break;
                    }
                }
                transition[(s * n_actions + a) * n_states + sp] = p;
            }
        }
    }
    for (a, a_tuple) in actions.iter().enumerate() {
        for (sp, sp_tuple) in states.iter().enumerate() {
            for o in 0..n_obs {
                let o_tuple = decode(o, n, N_OBS);
                let mut p = 1.0;
                for m in 0..n {
                    p *= model.components[m].observation(a_tuple[m])[sp_tuple[m]][o_tuple[m]];
                }
                observation[(a * n_states + sp) * n_obs + o] = p;
            }
        }
    }

    let b0_joint = crate::belief::Belief::uniform_initial(model.b0, n).joint();

    Ok(JointPomdp {
        n_components: n,
        n_states,
        n_actions,
        n_obs,
        transition,
        observation,
        reward,
        gamma: model.gamma,
        b0_joint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_paper_system, Variant};

    #[test]
    fn encoding_round_trips() {
        for idx in 0..81 {
            assert_eq!(encode(&decode(idx, 4, 3), 3), idx);
        }
        assert_eq!(encode(&[2, 0], 3), 6);
    }

    #[test]
    fn two_component_products() {
        let m = build_paper_system(2, 1, Variant::NoMobilization).unwrap();
        let p = flatten_to_pomdp(&m).unwrap();
        assert_eq!(p.n_states, 9);
        // P((0,0) -> (0,0)) under (do-nothing, do-nothing).
        let a = encode(&[0, 0], 3);
        assert!((p.t(0, a, 0) - 0.82 * 0.72).abs() < 1e-15);
        assert!((p.t(0, a, 0) - 0.5904).abs() < 1e-15);
        // Uniform null observations multiply to 1/9.
        for sp in 0..9 {
            for o in 0..9 {
                assert!((p.o(a, sp, o) - 1.0 / 9.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tables_are_row_stochastic() {
        let m = build_paper_system(3, 2, Variant::NoMobilization).unwrap();
        let p = flatten_to_pomdp(&m).unwrap();
        for s in 0..p.n_states {
            for a in 0..p.n_actions {
                let ts: f64 = (0..p.n_states).map(|sp| p.t(s, a, sp)).sum();
                assert!((ts - 1.0).abs() < 1e-10);
            }
        }
        for a in 0..p.n_actions {
            for sp in 0..p.n_states {
                let os: f64 = (0..p.n_obs).map(|o| p.o(a, sp, o)).sum();
                assert!((os - 1.0).abs() < 1e-10);
            }
        }
        assert!((p.b0_joint.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reward_is_negated_step_cost_everywhere() {
        let m = build_paper_system(4, 3, Variant::Base).unwrap();
        let p = flatten_to_pomdp(&m).unwrap();
        for s in 0..p.n_states {
            let st = decode(s, 4, 3);
            for a in 0..p.n_actions {
                let at = decode_action(a, 4);
                assert_eq!(p.r(s, a), -step_cost(&st, &at, &m));
            }
        }
        assert!(p.reward.iter().all(|r| r.is_finite()));
    }

    #[test]
    fn interchange_export_has_expected_header() {
        let m = build_paper_system(2, 2, Variant::NoMobilization).unwrap();
        let p = flatten_to_pomdp(&m).unwrap();
        let mut buf = Vec::new();
        p.write_interchange(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("discount: 0.8\nvalues: reward\nstates: 9\nactions: 9\nobservations: 9\n"));
        assert!(text.contains("T: 0"));
        assert!(text.contains("R: 8 : 8"));
    }
}
