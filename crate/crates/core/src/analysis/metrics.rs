//! The two performance metrics.
//!
//! The *final metric* averages the last 100 evaluation episodes (10 episodes
//! for each of the last 10 controllers). The *absolute metric* re-evaluates
//! the best checkpoint of the whole run over 100 fresh noiseless episodes;
//! it credits an algorithm for the best policy it ever found rather than the
//! one it happened to end on.

use std::path::Path;

use crate::checkpoint::load_checkpoint;
use crate::ddpg::summarize_returns;
use crate::env::{rollout, Environment};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Which part of a run produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Gep,
    Ddpg,
    Filler,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Gep => "gep",
            Phase::Ddpg => "ddpg",
            Phase::Filler => "filler",
        }
    }

    pub fn parse(s: &str) -> Result<Phase> {
        match s {
            "gep" => Ok(Phase::Gep),
            "ddpg" => Ok(Phase::Ddpg),
            "filler" => Ok(Phase::Filler),
            other => Err(Error::Format(format!("unknown phase '{other}'"))),
        }
    }
}

/// One periodic offline evaluation of a checkpointed policy.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub env_step: usize,
    pub phase: Phase,
    pub mean_return: f64,
    pub std_return: f64,
    pub episodes: usize,
    pub goal_reached: bool,
    /// Checkpoint file name inside the run's checkpoint directory.
    pub checkpoint: Option<String>,
}

/// Index of the record with the highest mean return; ties break toward the
/// earliest record.
pub fn best_eval_index(evals: &[EvalRecord]) -> Result<usize> {
    if evals.is_empty() {
        return Err(Error::invalid_input("empty evaluation history"));
    }
    let mut best = 0;
    for (i, e) in evals.iter().enumerate() {
        if e.mean_return > evals[best].mean_return {
            best = i;
        }
    }
    Ok(best)
}

/// Mean per-episode return over the last 10 records, weighted by their
/// episode counts.
pub fn final_metric(evals: &[EvalRecord]) -> Result<f64> {
    if evals.len() < 10 {
        return Err(Error::invalid_input(format!(
            "final metric needs 10 evaluation records, have {}",
            evals.len()
        )));
    }
    let window = &evals[evals.len() - 10..];
    let episodes: usize = window.iter().map(|e| e.episodes).sum();
    if episodes == 0 {
        return Err(Error::invalid_input("evaluation records carry no episodes"));
    }
    let weighted: f64 = window.iter().map(|e| e.mean_return * e.episodes as f64).sum();
    Ok(weighted / episodes as f64)
}

/// Re-evaluate the best checkpoint over `episodes` noiseless episodes and
/// return `(mean return, index of the chosen record)`.
pub fn absolute_metric<E: Environment + ?Sized>(
    evals: &[EvalRecord],
    checkpoint_dir: &Path,
    env: &E,
    episodes: usize,
    rng: &mut Stream,
) -> Result<(f64, usize)> {
    let best = best_eval_index(evals)?;
    let name = evals[best]
        .checkpoint
        .as_ref()
        .ok_or_else(|| Error::invalid_state("best evaluation record has no checkpoint"))?;
    let policy = load_checkpoint(&checkpoint_dir.join(name))?;
    let mut returns = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let traj = rollout(
            env,
            |obs| policy.act(obs).expect("checkpoint forward failed"),
            env.max_episode_steps(),
            rng,
        )?;
        returns.push(traj.episode_return);
    }
    Ok((returns.iter().sum::<f64>() / episodes as f64, best))
}

/// Mean and std of a stored policy over fresh noiseless episodes.
pub fn evaluate_checkpoint<E: Environment + ?Sized>(
    env: &E,
    path: &Path,
    episodes: usize,
    rng: &mut Stream,
) -> Result<(f64, f64)> {
    let policy = load_checkpoint(path)?;
    let mut returns = Vec::with_capacity(episodes);
    let mut goal = false;
    for _ in 0..episodes {
        let traj = rollout(
            env,
            |obs| policy.act(obs).expect("checkpoint forward failed"),
            env.max_episode_steps(),
            rng,
        )?;
        goal |= traj.goal_reached;
        returns.push(traj.episode_return);
    }
    let summary = summarize_returns(&returns, goal);
    Ok((summary.mean_return, summary.std_return))
}
