//! Continuous Mountain Car.
//!
//! An underpowered car in a valley must reach a flag on the right hill by
//! building momentum. The continuous variant pays a reward of 100 for
//! reaching the goal and an energy penalty of `-0.1 * a^2` on every step, so
//! the reward landscape is deceptive: until the goal has been reached once,
//! doing nothing looks optimal.

use rand::Rng;

use super::{EnvStep, Environment};
use crate::error::{Error, Result};
use crate::rng::Stream;

pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.45;
pub const POWER: f64 = 0.0015;
pub const GRAVITY: f64 = 0.0025;
pub const GOAL_REWARD: f64 = 100.0;
pub const ENERGY_COST: f64 = 0.1;
pub const START_LOW: f64 = -0.6;
pub const START_HIGH: f64 = -0.4;
pub const EPISODE_STEPS: usize = 1000;

/// Car state: horizontal position and velocity, both bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmcState {
    pub position: f64,
    pub velocity: f64,
}

impl CmcState {
    pub fn as_obs(&self) -> Vec<f64> {
        vec![self.position, self.velocity]
    }

    pub fn from_obs(obs: &[f64]) -> Self {
        CmcState {
            position: obs[0],
            velocity: obs[1],
        }
    }
}

/// Result of one dynamics step.
#[derive(Debug, Clone, Copy)]
pub struct StepResult {
    pub next_state: CmcState,
    pub reward: f64,
    pub terminal: bool,
    pub goal_reached: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CmcEnv;

impl CmcEnv {
    /// Draw a start state: position uniform in [-0.6, -0.4], velocity 0.
    pub fn reset_state(&self, rng: &mut Stream) -> CmcState {
        CmcState {
            position: rng.random_range(START_LOW..START_HIGH),
            velocity: 0.0,
        }
    }

    /// One step of the car dynamics.
    ///
    /// The action is clipped to [-1, 1] before both the dynamics and the
    /// energy penalty. The left wall is an inelastic stop. The episode is
    /// terminal at the goal or once `step_index + 1` reaches the episode cap.
    pub fn step_state(&self, state: CmcState, action: f64, step_index: usize) -> Result<StepResult> {
        if !action.is_finite() {
            return Err(Error::invalid_input("non-finite action"));
        }
        let a = action.clamp(-1.0, 1.0);
        let mut velocity = state.velocity + a * POWER - GRAVITY * (3.0 * state.position).cos();
        velocity = velocity.clamp(-MAX_SPEED, MAX_SPEED);
        let position = (state.position + velocity).clamp(MIN_POSITION, MAX_POSITION);
        if position == MIN_POSITION && velocity < 0.0 {
            velocity = 0.0;
        }
        let goal_reached = position >= GOAL_POSITION;
        let terminal = goal_reached || step_index + 1 >= EPISODE_STEPS;
        let reward = if goal_reached { GOAL_REWARD } else { 0.0 } - ENERGY_COST * a * a;
        Ok(StepResult {
            next_state: CmcState { position, velocity },
            reward,
            terminal,
            goal_reached,
        })
    }
}

impl Environment for CmcEnv {
    fn obs_dim(&self) -> usize {
        2
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn max_episode_steps(&self) -> usize {
        EPISODE_STEPS
    }

    fn obs_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![MIN_POSITION, -MAX_SPEED], vec![MAX_POSITION, MAX_SPEED])
    }

    fn reset(&self, rng: &mut Stream) -> Vec<f64> {
        self.reset_state(rng).as_obs()
    }

    fn step(&self, state: &[f64], action: &[f64], step_index: usize) -> Result<EnvStep> {
        if state.len() != 2 || action.len() != 1 {
            return Err(Error::invalid_input("cmc expects 2-dim states and 1-dim actions"));
        }
        let r = self.step_state(CmcState::from_obs(state), action[0], step_index)?;
        Ok(EnvStep {
            next_state: r.next_state.as_obs(),
            reward: r.reward,
            terminal: r.terminal,
            goal_reached: r.goal_reached,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::rollout;
    use crate::rng;

    fn env() -> CmcEnv {
        CmcEnv
    }

    #[test]
    fn reset_distribution() {
        let env = env();
        for seed in 0..64 {
            let mut r = rng::stream(seed, &[rng::tag::ENV]);
            let s = env.reset_state(&mut r);
            assert!(s.position >= START_LOW && s.position < START_HIGH);
            assert_eq!(s.velocity, 0.0);
        }
    }

    #[test]
    fn reset_is_deterministic() {
        let env = env();
        let a = env.reset_state(&mut rng::stream(9, &[rng::tag::ENV]));
        let b = env.reset_state(&mut rng::stream(9, &[rng::tag::ENV]));
        assert_eq!(a, b);
    }

    #[test]
    fn step_matches_hand_applied_dynamics() {
        // From rest at -0.5 with zero action, only gravity acts:
        // v' = -0.0025 * cos(-1.5).
        let env = env();
        let r = env
            .step_state(CmcState { position: -0.5, velocity: 0.0 }, 0.0, 0)
            .unwrap();
        assert!((r.next_state.velocity - (-0.00017684300416925727)).abs() < 1e-18);
        assert!((r.next_state.position - (-0.5001768430041692)).abs() < 1e-15);
        assert_eq!(r.reward, 0.0);
        assert!(!r.goal_reached && !r.terminal);
    }

    #[test]
    fn full_throttle_pays_the_energy_penalty() {
        let env = env();
        let r = env
            .step_state(CmcState { position: -0.5, velocity: 0.0 }, 1.0, 0)
            .unwrap();
        assert_eq!(r.reward, -0.1);
        // Out-of-range actions clip to the same penalty.
        let r2 = env
            .step_state(CmcState { position: -0.5, velocity: 0.0 }, 3.5, 0)
            .unwrap();
        assert_eq!(r2.reward, -0.1);
        assert_eq!(r.next_state, r2.next_state);
    }

    #[test]
    fn crossing_the_goal_line_terminates_with_the_bonus() {
        // 0.449 + clip(0.07 - 0.0025 cos(1.347)) = 0.5184... >= 0.45.
        let env = env();
        let r = env
            .step_state(CmcState { position: 0.449, velocity: 0.07 }, 0.0, 3)
            .unwrap();
        assert!(r.goal_reached && r.terminal);
        assert_eq!(r.reward, 100.0);
        assert!((r.next_state.position - 0.518445167831884).abs() < 1e-15);
    }

    #[test]
    fn non_finite_action_is_rejected() {
        let env = env();
        let err = env
            .step_state(CmcState { position: -0.5, velocity: 0.0 }, f64::INFINITY, 0)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn left_wall_is_an_inelastic_stop() {
        let env = env();
        let mut s = CmcState { position: -1.19, velocity: -0.07 };
        let r = env.step_state(s, -1.0, 0).unwrap();
        assert_eq!(r.next_state.position, MIN_POSITION);
        assert_eq!(r.next_state.velocity, 0.0);
        // And it can leave again.
        s = r.next_state;
        let r2 = env.step_state(s, 1.0, 1).unwrap();
        assert!(r2.next_state.velocity > 0.0);
    }

    #[test]
    fn zero_policy_runs_the_full_episode_with_zero_return() {
        let env = env();
        let mut r = rng::stream(3, &[rng::tag::ENV]);
        let traj = rollout(&env, |_| vec![0.0], EPISODE_STEPS, &mut r).unwrap();
        assert_eq!(traj.len(), EPISODE_STEPS);
        assert_eq!(traj.episode_return, 0.0);
        assert!(!traj.goal_reached);
        // Terminal flag is set exactly once, on the last transition.
        let terminals = traj.transitions.iter().filter(|t| t.terminal).count();
        assert_eq!(terminals, 1);
        assert!(traj.transitions.last().unwrap().terminal);
    }

    #[test]
    fn bang_bang_energy_pumping_reaches_the_goal() {
        let env = env();
        let mut r = rng::stream(11, &[rng::tag::ENV]);
        let traj = rollout(
            &env,
            |obs| vec![if obs[1] >= 0.0 { 1.0 } else { -1.0 }],
            EPISODE_STEPS,
            &mut r,
        )
        .unwrap();
        assert!(traj.goal_reached);
        assert!(traj.len() < EPISODE_STEPS);
        // Reward decomposition: return = 100 - 0.1 * sum(a^2).
        let energy: f64 = traj.transitions.iter().map(|t| 0.1 * t.action[0] * t.action[0]).sum();
        assert!((traj.episode_return - (100.0 - energy)).abs() < 1e-9);
    }

    #[test]
    fn identical_seeds_give_identical_trajectories() {
        let env = env();
        let policy = |obs: &[f64]| vec![(obs[0] * 2.0).sin()];
        let t1 = rollout(&env, policy, EPISODE_STEPS, &mut rng::stream(5, &[1])).unwrap();
        let t2 = rollout(&env, policy, EPISODE_STEPS, &mut rng::stream(5, &[1])).unwrap();
        assert_eq!(t1.transitions, t2.transitions);
        assert_eq!(t1.episode_return, t2.episode_return);
    }

    #[test]
    fn states_stay_within_bounds_under_any_action_sequence() {
        let env = env();
        let mut r = rng::stream(17, &[rng::tag::ENV]);
        let mut extreme = rng::stream(18, &[rng::tag::NOISE]);
        use rand::Rng;
        let traj = rollout(
            &env,
            |_| vec![extreme.random_range(-5.0..5.0)],
            EPISODE_STEPS,
            &mut r,
        )
        .unwrap();
        for t in &traj.transitions {
            assert!(t.next_state[0] >= MIN_POSITION && t.next_state[0] <= MAX_POSITION);
            assert!(t.next_state[1] >= -MAX_SPEED && t.next_state[1] <= MAX_SPEED);
        }
    }

    #[test]
    fn reward_decomposition_holds_on_random_rollouts() {
        let env = env();
        for seed in 0..8 {
            let mut r = rng::stream(seed, &[rng::tag::ENV]);
            let mut act = rng::stream(seed, &[rng::tag::NOISE]);
            use rand::Rng;
            let traj = rollout(
                &env,
                |_| vec![act.random_range(-1.5..1.5)],
                EPISODE_STEPS,
                &mut r,
            )
            .unwrap();
            let energy: f64 = traj
                .transitions
                .iter()
                .map(|t| 0.1 * t.action[0].clamp(-1.0, 1.0).powi(2))
                .sum();
            let bonus = if traj.goal_reached { 100.0 } else { 0.0 };
            assert!((traj.episode_return - (bonus - energy)).abs() < 1e-9);
        }
    }
}
