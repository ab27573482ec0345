//! Sawtooth upper bound: corner values plus belief/value points.
//!
//! Corner values come from the fast informed bound (per-action vectors
//! iterated with an observation-wise max), which dominates the optimal
//! value function and is tighter than the plain fully-observable-MDP
//! bound. A point (b_i, v_i) tightens the bound at a query belief b
//! through the standard sawtooth interpolation
//!
//! ```text
//! UB_i(b) = v0(b) + (v_i - v0(b_i)) * min_{s in supp(b_i)} b(s) / b_i(s)
//! ```
//!
//! where `v0` is the corner interpolation. Points are deduplicated by
//! belief (keeping the smallest value) and a new point is stored only when
//! it tightens the bound at its own belief by more than an insertion
//! threshold, which keeps the point set compact.

use std::collections::HashMap;

use crate::sparse::SparsePomdp;

#[derive(Debug, Clone)]
pub struct SawtoothUpper {
    pub corner: Vec<f64>,
    /// Minimum improvement a fresh point must offer at its own belief.
    pub insert_threshold: f64,
    n_states: usize,
    // Struct-of-arrays point storage; supports live in one flat span.
    values: Vec<f64>,
    corner_values: Vec<f64>,
    support_off: Vec<u32>,
    support_states: Vec<u32>,
    support_probs: Vec<f64>,
    /// Support bitmask per point; a point can only tighten the bound at
    /// `b` when its support is contained in the support of `b`.
    masks: Vec<u128>,
    index: HashMap<Vec<u64>, usize>,
}

fn belief_key(b: &[f64]) -> Vec<u64> {
    b.iter().map(|x| x.to_bits()).collect()
}

// Only the first 128 states participate in the mask; beyond that the
// prefilter degrades gracefully (the ratio loop still handles zeros).
fn support_mask(b: &[f64]) -> u128 {
    let mut m = 0u128;
    for (s, &p) in b.iter().enumerate().take(128) {
        if p != 0.0 {
            m |= 1u128 << s;
        }
    }
    m
}

impl SawtoothUpper {
    pub fn from_corner(corner: Vec<f64>) -> SawtoothUpper {
        SawtoothUpper {
            n_states: corner.len(),
            corner,
            insert_threshold: 1e-9,
            values: Vec::new(),
            corner_values: Vec::new(),
            support_off: vec![0],
            support_states: Vec::new(),
            support_probs: Vec::new(),
            masks: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Upper-bound initialization from the fully observable MDP value.
    pub fn qmdp(pomdp: &SparsePomdp) -> SawtoothUpper {
        SawtoothUpper::from_corner(mdp_values(pomdp))
    }

    /// Fast informed bound: tighter corners than QMDP, still above V*.
    pub fn fast_informed(pomdp: &SparsePomdp) -> SawtoothUpper {
        let (s_n, a_n) = (pomdp.n_states, pomdp.n_actions);
        let v_mdp = mdp_values(pomdp);
        // Q(s,a) initialized from the MDP bound.
        let mut q: Vec<f64> = (0..s_n * a_n)
            .map(|i| {
                let (s, a) = (i / a_n, i % a_n);
                let mut acc = pomdp.r(s, a);
                for &(sp, t) in &pomdp.trans[a][s] {
                    acc += pomdp.gamma * t * v_mdp[sp as usize];
                }
                acc
            })
            .collect();
        let mut scratch = vec![0.0; a_n];
        loop {
            let mut delta: f64 = 0.0;
            for s in 0..s_n {
                for a in 0..a_n {
                    let mut acc = pomdp.r(s, a);
                    for class in &pomdp.obs_classes[a] {
                        // max_a' sum_s' T(s'|s,a) O(o|s',a) Q(s',a')
                        for x in scratch.iter_mut() {
                            *x = 0.0;
                        }
                        for &(sp, t) in &pomdp.trans[a][s] {
                            let w = t * class.weight[sp as usize];
                            if w == 0.0 {
                                continue;
                            }
                            let row = &q[sp as usize * a_n..(sp as usize + 1) * a_n];
                            for (x, qq) in scratch.iter_mut().zip(row) {
                                *x += w * qq;
                            }
                        }
                        let best = scratch.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        acc += pomdp.gamma * class.multiplicity * best;
                    }
                    let idx = s * a_n + a;
                    delta = delta.max((acc - q[idx]).abs());
                    q[idx] = acc;
                }
            }
            if delta < 1e-10 {
                break;
            }
        }
        let corner: Vec<f64> = (0..s_n)
            .map(|s| {
                (0..a_n)
                    .map(|a| q[s * a_n + a])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        SawtoothUpper::from_corner(corner)
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    fn corner_value(&self, b: &[f64]) -> f64 {
        b.iter()
            .zip(&self.corner)
            .filter(|(&p, _)| p != 0.0)
            .map(|(&p, &c)| p * c)
            .sum()
    }

    /// Sawtooth-interpolated upper bound at `b`.
    pub fn value(&self, b: &[f64]) -> f64 {
        self.corner_value(b) + self.best_drop(b, support_mask(b))
    }

    /// Most negative interpolated drop below the corner bound at `b`.
    fn best_drop(&self, b: &[f64], b_mask: u128) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.values.len() {
            if self.masks[i] & !b_mask != 0 {
                continue; // support not contained: interpolation ratio is 0
            }
            let drop = self.values[i] - self.corner_values[i];
            if drop >= best {
                continue;
            }
            let lo = self.support_off[i] as usize;
            let hi = self.support_off[i + 1] as usize;
            let mut ratio = f64::INFINITY;
            for j in lo..hi {
                let r = b[self.support_states[j] as usize] / self.support_probs[j];
                if r < ratio {
                    ratio = r;
                    if ratio * drop >= best {
                        break; // cannot beat the current best anymore
                    }
                }
            }
            if ratio > 0.0 && ratio.is_finite() {
                let candidate = drop * ratio;
                if candidate < best {
                    best = candidate;
                }
            }
        }
        best
    }

    /// Insert or tighten the point at `b`. Fresh points must improve the
    /// bound at `b` by more than `insert_threshold` unless `exempt`.
    pub fn add(&mut self, b: &[f64], value: f64, exempt: bool) {
        let key = belief_key(b);
        if let Some(&i) = self.index.get(&key) {
            if value < self.values[i] {
                self.values[i] = value;
            }
            return;
        }
        let current = self.value(b);
        if !exempt && value >= current - self.insert_threshold {
            return;
        }
        let corner_value = self.corner_value(b);
        self.index.insert(key, self.values.len());
        self.values.push(value);
        self.corner_values.push(corner_value);
        self.masks.push(support_mask(b));
        for (s, &p) in b.iter().enumerate() {
            if p != 0.0 {
                self.support_states.push(s as u32);
                self.support_probs.push(p);
            }
        }
        self.support_off.push(self.support_states.len() as u32);
    }

    fn point_belief(&self, i: usize) -> Vec<f64> {
        let mut dense = vec![0.0; self.n_states];
        let lo = self.support_off[i] as usize;
        let hi = self.support_off[i + 1] as usize;
        for j in lo..hi {
            dense[self.support_states[j] as usize] = self.support_probs[j];
        }
        dense
    }

    /// Drop points that no longer tighten the bound at their own belief by
    /// more than the insertion threshold. Beliefs in `keep` are exempt, so
    /// the bound at the root never loosens.
    pub fn prune(&mut self, keep: &[&[f64]]) {
        let exempt: Vec<Vec<u64>> = keep.iter().map(|b| belief_key(b)).collect();
        let n = self.values.len();
        let mut retained: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            let dense = self.point_belief(i);
            let key = belief_key(&dense);
            if exempt.contains(&key) {
                retained.push(i);
                continue;
            }
            // Bound at this belief from the corners and all *other* points.
            let v0 = self.corner_values[i];
            let own = self.values[i];
            let b_mask = self.masks[i];
            let mut others = 0.0f64;
            for j in 0..n {
                if j == i || self.masks[j] & !b_mask != 0 {
                    continue;
                }
                let drop = self.values[j] - self.corner_values[j];
                if drop >= others {
                    continue;
                }
                let lo = self.support_off[j] as usize;
                let hi = self.support_off[j + 1] as usize;
                let mut ratio = f64::INFINITY;
                for jj in lo..hi {
                    let r = dense[self.support_states[jj] as usize] / self.support_probs[jj];
                    if r < ratio {
                        ratio = r;
                        if ratio * drop >= others {
                            break;
                        }
                    }
                }
                if ratio > 0.0 && ratio.is_finite() {
                    others = others.min(drop * ratio);
                }
            }
            if v0 + others > own + self.insert_threshold {
                retained.push(i);
            }
        }
        if retained.len() == n {
            return;
        }
        let mut next = SawtoothUpper::from_corner(self.corner.clone());
        next.insert_threshold = self.insert_threshold;
        for &i in &retained {
            let dense = self.point_belief(i);
            next.add(&dense, self.values[i], true);
        }
        *self = next;
    }
}

fn mdp_values(pomdp: &SparsePomdp) -> Vec<f64> {
    let mut v = vec![0.0; pomdp.n_states];
    loop {
        let mut delta: f64 = 0.0;
        let mut next = vec![0.0; pomdp.n_states];
        for s in 0..pomdp.n_states {
            let mut best = f64::NEG_INFINITY;
            for a in 0..pomdp.n_actions {
                let mut acc = pomdp.r(s, a);
                for &(sp, t) in &pomdp.trans[a][s] {
                    acc += pomdp.gamma * t * v[sp as usize];
                }
                best = best.max(acc);
            }
            delta = delta.max((best - v[s]).abs());
            next[s] = best;
        }
        v = next;
        if delta < 1e-12 {
            break;
        }
    }
    v
}
