//! Deterministic actor-critic learning with a replay buffer, target
//! networks, and pluggable exploration noise.
//!
//! The training cadence follows the usual off-policy loop: 100 environment
//! steps of exploration per cycle, then 50 gradient updates on random
//! minibatches; every 20 cycles the clean policy is evaluated offline on 10
//! noiseless episodes and checkpointed.

mod agent;
mod buffer;
mod noise;
mod runner;

pub use agent::{soft_update, DdpgAgent, DdpgConfig};
pub use buffer::{ReplayBuffer, TransitionBatch};
pub use noise::{OuNoise, ParamNoise, SigmaSchedule};
pub use runner::{
    evaluate_policy, run_ddpg, summarize_returns, DdpgRunOptions, DdpgRunResult, EvalHook,
    EvalSummary, NoiseRegime,
};
