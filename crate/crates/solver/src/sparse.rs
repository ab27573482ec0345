//! Sparse working representation of a flat POMDP.
//!
//! Transition rows keep only nonzero entries. Observation symbols with
//! identical likelihood columns under an action are merged into classes:
//! in the factored systems every non-inspecting component contributes a
//! uniform factor, so the 3^n joint observations collapse to one class per
//! combination of inspected-component readings. Class members share the
//! posterior belief, which cuts the backup branching from `|O|` to the
//! number of informative readings.

use std::collections::HashMap;

use kofn_core::joint::JointPomdp;

/// One equivalence class of observation symbols under a fixed action.
#[derive(Debug, Clone)]
pub struct ObsClass {
    /// Likelihood of a single member: `weight[s'] = O(o | s', a)`.
    pub weight: Vec<f64>,
    /// Number of symbols in the class.
    pub multiplicity: f64,
    /// A representative symbol index.
    pub representative: usize,
}

#[derive(Debug, Clone)]
pub struct SparsePomdp {
    pub n_states: usize,
    pub n_actions: usize,
    pub n_obs: usize,
    pub gamma: f64,
    /// `trans[a][s]` = sparse row of (s', probability).
    pub trans: Vec<Vec<Vec<(u32, f64)>>>,
    /// Observation classes per action.
    pub obs_classes: Vec<Vec<ObsClass>>,
    /// Dense reward, `reward[s * n_actions + a]`.
    pub reward: Vec<f64>,
    pub b0: Vec<f64>,
}

impl SparsePomdp {
    pub fn from_joint(p: &JointPomdp) -> SparsePomdp {
        let (s_n, a_n, o_n) = (p.n_states, p.n_actions, p.n_obs);
        let mut trans = vec![vec![Vec::new(); s_n]; a_n];
        for s in 0..s_n {
            for a in 0..a_n {
                let row = &mut trans[a][s];
                for sp in 0..s_n {
                    let v = p.t(s, a, sp);
                    if v != 0.0 {
                        row.push((sp as u32, v));
                    }
                }
            }
        }
        let mut obs_classes = Vec::with_capacity(a_n);
        for a in 0..a_n {
            let mut groups: HashMap<Vec<u64>, ObsClass> = HashMap::new();
            let mut order: Vec<Vec<u64>> = Vec::new();
            for o in 0..o_n {
                let col: Vec<f64> = (0..s_n).map(|sp| p.o(a, sp, o)).collect();
                let key: Vec<u64> = col.iter().map(|x| x.to_bits()).collect();
                match groups.get_mut(&key) {
                    Some(class) => class.multiplicity += 1.0,
                    None => {
                        order.push(key.clone());
                        groups.insert(
                            key,
                            ObsClass {
                                weight: col,
                                multiplicity: 1.0,
                                representative: o,
                            },
                        );
                    }
                }
            }
            obs_classes.push(
                order
                    .into_iter()
                    .map(|k| groups.remove(&k).expect("inserted above"))
                    .collect(),
            );
        }
        SparsePomdp {
            n_states: s_n,
            n_actions: a_n,
            n_obs: o_n,
            gamma: p.gamma,
            trans,
            obs_classes,
            reward: p.reward.clone(),
            b0: p.b0_joint.clone(),
        }
    }

    #[inline]
    pub fn r(&self, s: usize, a: usize) -> f64 {
        self.reward[s * self.n_actions + a]
    }

    /// Expected immediate reward of `a` at belief `b`.
    pub fn expected_reward(&self, b: &[f64], a: usize) -> f64 {
        b.iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(s, &p)| p * self.r(s, a))
            .sum()
    }

    /// One-step belief prediction `b T(a)`.
    pub fn predict(&self, b: &[f64], a: usize) -> Vec<f64> {
        let mut pred = vec![0.0; self.n_states];
        for (s, &p) in b.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &(sp, t) in &self.trans[a][s] {
                pred[sp as usize] += p * t;
            }
        }
        pred
    }

    /// Posterior belief and single-member observation probability for an
    /// observation class, given the predicted belief. Returns `None` when
    /// the class has probability zero.
    pub fn condition(&self, pred: &[f64], class: &ObsClass) -> Option<(Vec<f64>, f64)> {
        self.condition_with_support(pred, class).map(|(b, _, n)| (b, n))
    }

    /// [`SparsePomdp::condition`] that also returns the posterior support.
    pub fn condition_with_support(
        &self,
        pred: &[f64],
        class: &ObsClass,
    ) -> Option<(Vec<f64>, Vec<u32>, f64)> {
        let mut post = vec![0.0; self.n_states];
        let mut support = Vec::new();
        let mut norm = 0.0;
        for (sp, &p) in pred.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let w = p * class.weight[sp];
            if w != 0.0 {
                post[sp] = w;
                support.push(sp as u32);
                norm += w;
            }
        }
        if norm <= 0.0 {
            return None;
        }
        for &s in &support {
            post[s as usize] /= norm;
        }
        Some((post, support, norm))
    }

    /// Largest and smallest one-step reward (used for value scale guards).
    pub fn reward_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &r in &self.reward {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (lo, hi)
    }
}
