//! Point-based POMDP solver.
//!
//! The solver maintains two bounds on the optimal value function of a flat
//! POMDP (rewards are maximized; costs enter negated):
//!
//! * a lower bound as a finite set of action-labeled alpha-vectors, grown
//!   by point-based backups at sampled beliefs;
//! * an upper bound as corner values (from the fully observable MDP) plus
//!   belief/value points combined by sawtooth interpolation.
//!
//! Beliefs are sampled by descending from the initial belief, choosing the
//! upper-bound-greedy action and the observation branch with the largest
//! weighted bound gap, until the discounted gap target is met. Backups run
//! bottom-up along the sampled path. The search stops when the gap at the
//! initial belief reaches the requested precision or the timeout elapses —
//! a timeout still returns the best bounds.

pub mod alpha;
pub mod policy;
pub mod sawtooth;
pub mod solve;
pub mod sparse;

pub use alpha::{AlphaSet, AlphaVector};
pub use policy::{greedy_policy, lookahead_policy, GreedyFactory, LookaheadCore, LookaheadFactory};
pub use sawtooth::SawtoothUpper;
pub use solve::{solve, BoundPair, SolveOutcome, SolveParams, SolveStatus, TraceRow};
pub use sparse::SparsePomdp;
