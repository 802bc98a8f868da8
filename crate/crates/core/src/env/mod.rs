//! Episodic environments with flat real-valued observations and actions.

pub mod cmc;

use crate::error::{Error, Result};
use crate::rng::Stream;

pub use cmc::{CmcEnv, CmcState};

/// One (state, action, reward, next-state, terminal) sample. The unit
/// exchanged between the exploration phase and the replay buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

impl Transition {
    pub fn is_finite(&self) -> bool {
        self.state.iter().all(|v| v.is_finite())
            && self.action.iter().all(|v| v.is_finite())
            && self.next_state.iter().all(|v| v.is_finite())
            && self.reward.is_finite()
    }
}

/// Result of a single environment step.
#[derive(Debug, Clone)]
pub struct EnvStep {
    pub next_state: Vec<f64>,
    pub reward: f64,
    pub terminal: bool,
    pub goal_reached: bool,
}

/// The ordered transitions of one episode plus its return.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub transitions: Vec<Transition>,
    pub episode_return: f64,
    pub goal_reached: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

/// An episodic environment. Instances are single-owner per run; the step
/// function is pure over (state, action, step index), so many independent
/// runs may share one instance read-only.
pub trait Environment: Sync {
    fn obs_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    /// Episodes are cut after this many steps.
    fn max_episode_steps(&self) -> usize;
    /// Per-dimension observation bounds `(low, high)`, used by policies that
    /// rescale observations.
    fn obs_bounds(&self) -> (Vec<f64>, Vec<f64>);
    /// Draw an initial state.
    fn reset(&self, rng: &mut Stream) -> Vec<f64>;
    /// Advance one step. `step_index` is the 0-based index of this step
    /// within the episode; the terminal flag is set at the goal or when the
    /// episode reaches `max_episode_steps`.
    fn step(&self, state: &[f64], action: &[f64], step_index: usize) -> Result<EnvStep>;
}

/// Run one episode of `policy`, collecting every transition in order.
///
/// The episode ends at the environment's terminal condition or after
/// `max_steps` steps, whichever comes first. A policy emitting a non-finite
/// action aborts the rollout.
pub fn rollout<E, P>(env: &E, mut policy: P, max_steps: usize, rng: &mut Stream) -> Result<Trajectory>
where
    E: Environment + ?Sized,
    P: FnMut(&[f64]) -> Vec<f64>,
{
    if max_steps > env.max_episode_steps() {
        return Err(Error::invalid_input(format!(
            "max_steps {} exceeds the episode cap {}",
            max_steps,
            env.max_episode_steps()
        )));
    }
    let mut state = env.reset(rng);
    let mut transitions = Vec::new();
    let mut episode_return = 0.0;
    let mut goal_reached = false;
    for step_index in 0..max_steps {
        let action = policy(&state);
        if action.iter().any(|a| !a.is_finite()) {
            return Err(Error::numeric(format!(
                "policy produced a non-finite action at step {step_index}"
            )));
        }
        let step = env.step(&state, &action, step_index)?;
        episode_return += step.reward;
        goal_reached |= step.goal_reached;
        let terminal = step.terminal;
        transitions.push(Transition {
            state,
            action,
            reward: step.reward,
            next_state: step.next_state.clone(),
            terminal,
        });
        state = step.next_state;
        if terminal {
            break;
        }
    }
    Ok(Trajectory {
        transitions,
        episode_return,
        goal_reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn rollout_rejects_oversized_cap() {
        let env = CmcEnv::default();
        let mut r = rng::stream(0, &[rng::tag::ENV]);
        let err = rollout(&env, |_| vec![0.0], 1001, &mut r).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn rollout_aborts_on_non_finite_action() {
        let env = CmcEnv::default();
        let mut r = rng::stream(0, &[rng::tag::ENV]);
        let err = rollout(&env, |_| vec![f64::NAN], 10, &mut r).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
    }
}
