//! Action-labeled alpha-vectors: the piecewise-linear lower bound.

use std::io::{Read, Write};

use crate::sparse::SparsePomdp;

const MAGIC: &[u8; 8] = b"KOFNALP1";

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector {
    pub values: Vec<f64>,
    /// Joint-action label attached by the backup that produced the vector.
    pub action: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlphaSet {
    pub vectors: Vec<AlphaVector>,
}

impl AlphaSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Lower-bound value `max_alpha alpha . b`.
    pub fn value(&self, b: &[f64]) -> f64 {
        self.best(b).1
    }

    /// Index and value of the maximizing vector; exact ties go to the
    /// lower action label, then to insertion order.
    pub fn best(&self, b: &[f64]) -> (usize, f64) {
        debug_assert!(!self.vectors.is_empty());
        let mut best_idx = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, alpha) in self.vectors.iter().enumerate() {
            let mut v = 0.0;
            for (x, y) in alpha.values.iter().zip(b) {
                v += x * y;
            }
            if v > best_val
                || (v == best_val && alpha.action < self.vectors[best_idx].action)
            {
                best_val = v;
                best_idx = i;
            }
        }
        (best_idx, best_val)
    }

    /// Same as [`AlphaSet::best`] but restricted to the known support of
    /// `b` (all other entries are zero), which is what the solver's inner
    /// loops use.
    pub fn best_on_support(&self, support: &[u32], b: &[f64]) -> (usize, f64) {
        debug_assert!(!self.vectors.is_empty());
        let mut best_idx = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, alpha) in self.vectors.iter().enumerate() {
            let mut v = 0.0;
            for &s in support {
                v += alpha.values[s as usize] * b[s as usize];
            }
            if v > best_val
                || (v == best_val && alpha.action < self.vectors[best_idx].action)
            {
                best_val = v;
                best_idx = i;
            }
        }
        (best_idx, best_val)
    }

    /// Initialize from the best blind policy: for every action, the value
    /// of repeating it forever (the linear fixed point of its backup).
    pub fn blind(pomdp: &SparsePomdp) -> AlphaSet {
        let mut vectors = Vec::with_capacity(pomdp.n_actions);
        for a in 0..pomdp.n_actions {
            let mut alpha = vec![0.0; pomdp.n_states];
            loop {
                let mut next = vec![0.0; pomdp.n_states];
                let mut delta: f64 = 0.0;
                for s in 0..pomdp.n_states {
                    let mut acc = pomdp.r(s, a);
                    for &(sp, t) in &pomdp.trans[a][s] {
                        acc += pomdp.gamma * t * alpha[sp as usize];
                    }
                    delta = delta.max((acc - alpha[s]).abs());
                    next[s] = acc;
                }
                alpha = next;
                if delta < 1e-12 {
                    break;
                }
            }
            vectors.push(AlphaVector { values: alpha, action: a });
        }
        AlphaSet { vectors }
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        let n_states = self.vectors.first().map_or(0, |v| v.values.len());
        w.write_all(&(n_states as u64).to_le_bytes())?;
        w.write_all(&(self.vectors.len() as u64).to_le_bytes())?;
        for v in &self.vectors {
            w.write_all(&(v.action as u64).to_le_bytes())?;
            for x in &v.values {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> std::io::Result<AlphaSet> {
        let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("bad alpha file magic"));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n_states = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let mut vectors = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut b8)?;
            let action = u64::from_le_bytes(b8) as usize;
            let mut values = Vec::with_capacity(n_states);
            for _ in 0..n_states {
                r.read_exact(&mut b8)?;
                values.push(f64::from_le_bytes(b8));
            }
            vectors.push(AlphaVector { values, action });
        }
        Ok(AlphaSet { vectors })
    }

    /// Human-readable companion listing (vector count, action labels, values).
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n_states = self.vectors.first().map_or(0, |v| v.values.len());
        writeln!(w, "alpha-vectors: {}", self.vectors.len())?;
        writeln!(w, "states: {n_states}")?;
        for v in &self.vectors {
            let vals: Vec<String> = v.values.iter().map(|x| x.to_string()).collect();
            writeln!(w, "action {} : {}", v.action, vals.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_breaks_ties_by_action() {
        let set = AlphaSet {
            vectors: vec![
                AlphaVector { values: vec![1.0, 0.0], action: 5 },
                AlphaVector { values: vec![0.0, 1.0], action: 1 },
            ],
        };
        assert_eq!(set.best(&[0.7, 0.3]).0, 0);
        assert_eq!(set.best(&[0.5, 0.5]).0, 1); // tie -> action 1 < 5
        assert_eq!(set.value(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn binary_round_trip() {
        let set = AlphaSet {
            vectors: vec![
                AlphaVector { values: vec![1.5, -2.25, 0.125], action: 7 },
                AlphaVector { values: vec![0.0, 3.5, -1.0], action: 0 },
            ],
        };
        let mut buf = Vec::new();
        set.write_binary(&mut buf).unwrap();
        let back = AlphaSet::read_binary(&buf[..]).unwrap();
        assert_eq!(set, back);
    }
}
