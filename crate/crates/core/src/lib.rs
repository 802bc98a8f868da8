//! Exploration-first reinforcement learning on deceptive-reward control tasks.
//!
//! The crate provides four building blocks and the glue between them:
//!
//! - [`env`]: a generic episodic environment interface and a from-scratch
//!   Continuous Mountain Car with its deceptive energy-penalty reward.
//! - [`net`]: a minimal feed-forward network engine with exact
//!   backpropagation, Adam, and flat parameter vectors.
//! - [`ddpg`]: a deterministic actor-critic learner with replay buffer,
//!   target networks, and three exploration-noise regimes (none,
//!   Ornstein-Uhlenbeck action noise, parameter-space noise).
//! - [`gep`]: a goal exploration process — reward-blind archive-based search
//!   over policy parameters, directed by goals sampled in a behavioral
//!   outcome space.
//!
//! [`pipeline`] runs the two-phase combination (goal exploration fills the
//! replay buffer, then the actor-critic trains from it), alternative buffer
//! fillers, and seeded multi-run experiments. [`analysis`] holds the
//! evaluation methodology: absolute/final performance metrics, a two-sample
//! statistical test battery, and behavioral diversity measures.

pub mod analysis;
pub mod checkpoint;
pub mod ddpg;
pub mod env;
pub mod error;
pub mod gep;
pub mod net;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
