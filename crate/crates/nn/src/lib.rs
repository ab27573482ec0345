//! Minimal dense-network stack.
//!
//! Every network in this workspace is a small multilayer perceptron
//! (rectified-linear hidden layers, identity output) with at most a few
//! thousand parameters, so the stack is deliberately simple: flat `f64`
//! parameter vectors, tape-based reverse-mode gradients, Adam, and linear
//! schedules. No graphs, no GPU, no generics.

pub mod adam;
pub mod container;
mod error;
pub mod mlp;
pub mod schedule;
pub mod softmax;

pub use adam::{adam_step, AdamState};
pub use container::{Container, Entry};
pub use error::NnError;
pub use mlp::{Grad, Mlp, Tape};
pub use schedule::LinearSchedule;
pub use softmax::{entropy, log_softmax, masked_softmax, sample_index, softmax};
