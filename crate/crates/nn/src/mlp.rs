//! Multilayer perceptron with reverse-mode gradients.
//!
//! Parameters live in one flat `Vec<f64>`: for each layer, the weight
//! matrix (`out x in`, row-major) followed by the bias vector. Hidden
//! layers apply a rectified-linear unit; the output layer is linear.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::NnError;

/// Flat parameter gradient, same layout as [`Mlp::params`].
pub type Grad = Vec<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
    /// (weight offset, bias offset) per layer.
    offsets: Vec<(usize, usize)>,
}

/// Activations recorded by a forward pass; `layers[0]` is the input and
/// `layers[l]` the post-activation output of layer `l`.
#[derive(Debug, Clone)]
pub struct Tape {
    layers: Vec<Vec<f64>>,
}

impl Tape {
    pub fn output(&self) -> &[f64] {
        self.layers.last().expect("tape has layers")
    }
}

/// Closed-form parameter count of an architecture: sum of `in*out + out`.
pub fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Mlp {
    /// Zero-initialized network.
    pub fn zeros(sizes: &[usize]) -> Mlp {
        assert!(sizes.len() >= 2, "need at least input and output layers");
        let mut offsets = Vec::new();
        let mut off = 0;
        for w in sizes.windows(2) {
            offsets.push((off, off + w[0] * w[1]));
            off += w[0] * w[1] + w[1];
        }
        Mlp {
            sizes: sizes.to_vec(),
            params: vec![0.0; off],
            offsets,
        }
    }

    /// Fan-in scaled uniform initialization (weights and biases in
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`), seeded per network.
    pub fn init(sizes: &[usize], seed: u64) -> Mlp {
        let mut net = Mlp::zeros(sizes);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (l, w) in sizes.windows(2).enumerate() {
            let bound = 1.0 / (w[0] as f64).sqrt();
            let (w_off, b_off) = net.offsets[l];
            for i in 0..w[0] * w[1] {
                net.params[w_off + i] = rng.gen_range(-bound..bound);
            }
            for i in 0..w[1] {
                net.params[b_off + i] = rng.gen_range(-bound..bound);
            }
        }
        net
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.params.len());
        self.params.copy_from_slice(params);
    }

    fn check_input(&self, input: &[f64]) -> Result<(), NnError> {
        if input.len() != self.sizes[0] {
            return Err(NnError::ShapeMismatch {
                context: "mlp input".into(),
                expected: self.sizes[0],
                got: input.len(),
            });
        }
        Ok(())
    }

    /// Forward pass recording a tape for [`Mlp::backward`].
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, Tape), NnError> {
        self.check_input(input)?;
        let n_layers = self.sizes.len() - 1;
        let mut layers = Vec::with_capacity(n_layers + 1);
        layers.push(input.to_vec());
        for l in 0..n_layers {
            let (in_dim, out_dim) = (self.sizes[l], self.sizes[l + 1]);
            let (w_off, b_off) = self.offsets[l];
            let x = &layers[l];
            let mut y = Vec::with_capacity(out_dim);
            for o in 0..out_dim {
                let row = &self.params[w_off + o * in_dim..w_off + (o + 1) * in_dim];
                let mut acc = self.params[b_off + o];
                for (wi, xi) in row.iter().zip(x.iter()) {
                    acc += wi * xi;
                }
                if l + 1 < n_layers && acc < 0.0 {
                    acc = 0.0; // ReLU on hidden layers
                }
                y.push(acc);
            }
            layers.push(y);
        }
        let out = layers.last().unwrap().clone();
        Ok((out, Tape { layers }))
    }

    /// Forward pass without a tape.
    pub fn infer(&self, input: &[f64]) -> Vec<f64> {
        self.forward(input).expect("shape checked by caller").0
    }

    /// Reverse-mode gradients of `sum(output * output_grad)` with respect
    /// to the parameters, accumulated into `grad`. Returns the gradient
    /// with respect to the input (needed when networks are chained).
    pub fn backward_into(&self, tape: &Tape, output_grad: &[f64], grad: &mut [f64]) -> Vec<f64> {
        assert_eq!(grad.len(), self.params.len());
        let n_layers = self.sizes.len() - 1;
        assert_eq!(output_grad.len(), self.output_dim());
        let mut dy = output_grad.to_vec();
        for l in (0..n_layers).rev() {
            let (in_dim, out_dim) = (self.sizes[l], self.sizes[l + 1]);
            let (w_off, b_off) = self.offsets[l];
            let x = &tape.layers[l];
            // Hidden activations are post-ReLU; zero slots carry no gradient.
            if l + 1 < n_layers {
                let post = &tape.layers[l + 1];
                for (d, &p) in dy.iter_mut().zip(post.iter()) {
                    if p <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            let mut dx = vec![0.0; in_dim];
            for o in 0..out_dim {
                let g = dy[o];
                if g == 0.0 {
                    continue;
                }
                grad[b_off + o] += g;
                let row_off = w_off + o * in_dim;
                for i in 0..in_dim {
                    grad[row_off + i] += g * x[i];
                    dx[i] += self.params[row_off + i] * g;
                }
            }
            dy = dx;
        }
        dy
    }

    /// Convenience wrapper allocating a fresh gradient buffer.
    pub fn backward(&self, tape: &Tape, output_grad: &[f64]) -> Grad {
        let mut grad = vec![0.0; self.params.len()];
        self.backward_into(tape, output_grad, &mut grad);
        grad
    }
}

/// Global L2 norm of a set of gradient buffers.
pub fn global_norm(grads: &[&[f64]]) -> f64 {
    grads
        .iter()
        .flat_map(|g| g.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Scale gradients in place so their global norm is at most `max_norm`.
pub fn clip_global_norm(grads: &mut [&mut [f64]], max_norm: f64) {
    let norm = grads
        .iter()
        .flat_map(|g| g.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        for g in grads.iter_mut() {
            for x in g.iter_mut() {
                *x *= scale;
            }
        }
    }
}
