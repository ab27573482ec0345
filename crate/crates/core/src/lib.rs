//! Decision models for inspection-and-maintenance planning of k-out-of-n
//! deteriorating systems.
//!
//! A system is a set of components, each with a three-state damage chain
//! (`no-damage`, `major-damage`, `failure`), per-component repair and
//! inspection actions, and noisy inspection observations. The system carries
//! shared costs: a mobilization charge whenever any intervention happens and
//! a risk term `c_f * p_f` driven by the k-out-of-n failure probability.
//!
//! This crate holds the model layer and the simulators:
//!
//! * [`model`] — component/system parameters and the study's catalog systems
//! * [`belief`] — per-component Bayes filtering over damage states
//! * [`reliability`] — exact heterogeneous k-out-of-n failure probability
//! * [`cost`] — the per-step cost model and discounted-return accounting
//! * [`joint`] — flattening the factored system into one flat POMDP
//! * [`env`] — the episode simulator (belief-tracking Dec-POMDP loop)
//! * [`climb`] — the repeated Climb matrix game
//! * [`heuristic`] — periodic inspect-then-repair rule and its grid search
//! * [`config`] — plain-text (TOML) system serialization

pub mod belief;
pub mod climb;
pub mod config;
pub mod cost;
pub mod env;
mod error;
pub mod heuristic;
pub mod joint;
pub mod model;
pub mod policy;
pub mod reliability;
pub mod rng;
pub mod trace;

pub use belief::{belief_update, obs_likelihood, Belief};
pub use climb::ClimbGame;
pub use cost::{discounted_return, step_cost};
pub use env::{env_reset, env_step, EnvState, StepResult, EVAL_HORIZON, TRAIN_HORIZON};
pub use error::CoreError;
pub use heuristic::{grid_search, heuristic_act, GridSearchOutcome, HeuristicParams};
pub use joint::{flatten_to_pomdp, JointPomdp};
pub use model::{build_paper_system, ComponentAction, ComponentModel, RiskMode, SystemModel, Variant};
pub use policy::{PolicyFactory, SystemPolicy};
pub use reliability::kofn_failure_prob;
