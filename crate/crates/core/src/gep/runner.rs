//! The goal exploration loop.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::env::{rollout, Environment, Trajectory, Transition};
use crate::error::{Error, Result};
use crate::gep::{cmc_outcome, Archive, ArchiveEntry, GepPolicy, OutcomeSpace};
use crate::rng::Stream;

/// Exploration loop configuration.
#[derive(Debug, Clone)]
pub struct GepConfig {
    pub bootstrap_episodes: usize,
    pub goal_episodes: usize,
    /// Std of the Gaussian parameter perturbation around the retrieved entry.
    pub perturb_sigma: f64,
    /// Neighbors considered during retrieval. With k = 1 the single nearest
    /// entry is perturbed; with k > 1 one of the k nearest is drawn uniformly.
    pub k: usize,
}

impl Default for GepConfig {
    fn default() -> Self {
        GepConfig { bootstrap_episodes: 5, goal_episodes: 45, perturb_sigma: 0.01, k: 1 }
    }
}

impl GepConfig {
    fn validate(&self) -> Result<()> {
        if self.bootstrap_episodes == 0 {
            return Err(Error::invalid_input("bootstrap needs at least one episode"));
        }
        if self.perturb_sigma < 0.0 || !self.perturb_sigma.is_finite() {
            return Err(Error::invalid_input("perturb_sigma must be finite and >= 0"));
        }
        if self.k == 0 {
            return Err(Error::invalid_input("k must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GepRunOptions {
    /// Stop as soon as the goal is first reached (first-goal studies).
    pub stop_at_first_goal: bool,
    /// Keep every transition for replay-buffer hand-off.
    pub harvest_transitions: bool,
    /// Environment-step budget: no new episode starts once this many steps
    /// have been taken. Episodes are atomic, so the total may overshoot by
    /// at most one episode.
    pub max_total_steps: Option<usize>,
}

impl Default for GepRunOptions {
    fn default() -> Self {
        GepRunOptions { stop_at_first_goal: false, harvest_transitions: true, max_total_steps: None }
    }
}

/// Per-episode log row: the best stored return over time.
#[derive(Debug, Clone, Copy)]
pub struct GepEpisodeRow {
    pub episode: usize,
    /// Cumulative env steps at the end of this episode.
    pub env_step: usize,
    pub episode_return: f64,
    pub episode_len: usize,
    pub best_return: f64,
    pub goal_reached: bool,
}

#[derive(Debug)]
pub struct GepRunResult {
    pub archive: Archive,
    pub transitions: Vec<Transition>,
    pub log: Vec<GepEpisodeRow>,
    pub total_steps: usize,
    /// Cumulative env step at which the task goal was first reached.
    pub first_goal_step: Option<usize>,
}

/// `params + N(0, sigma^2)` elementwise, no clipping.
pub fn perturb(params: &[f64], sigma: f64, rng: &mut Stream) -> Vec<f64> {
    if sigma == 0.0 {
        return params.to_vec();
    }
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and >= 0");
    params.iter().map(|&p| p + normal.sample(rng)).collect()
}

/// Run goal exploration: a uniform bootstrap phase, then goal-directed
/// episodes of sample-goal / nearest / perturb / rollout / store.
///
/// `extract` maps a trajectory to its raw outcome features (see
/// [`cmc_outcome`] for the mountain-car features).
pub fn run_gep<E, F>(
    env: &E,
    policy: &GepPolicy,
    config: &GepConfig,
    space: &OutcomeSpace,
    extract: F,
    rng: &mut Stream,
    opts: &GepRunOptions,
) -> Result<GepRunResult>
where
    E: Environment + ?Sized,
    F: Fn(&Trajectory) -> Result<Vec<f64>>,
{
    config.validate()?;
    let mut result = GepRunResult {
        archive: Archive::new(),
        transitions: Vec::new(),
        log: Vec::new(),
        total_steps: 0,
        first_goal_step: None,
    };
    let total_episodes = config.bootstrap_episodes.saturating_add(config.goal_episodes);
    for episode in 0..total_episodes {
        if opts.max_total_steps.is_some_and(|cap| result.total_steps >= cap) {
            break;
        }
        let params = if episode < config.bootstrap_episodes {
            policy.sample_uniform_params(rng)
        } else {
            let goal = space.sample_goal(rng);
            let index = if config.k == 1 {
                result.archive.nearest(&goal)?
            } else {
                let candidates = result.archive.k_nearest(&goal, config.k);
                candidates[rng.random_range(0..candidates.len())]
            };
            perturb(&result.archive.get(index).unwrap().params, config.perturb_sigma, rng)
        };

        let traj = rollout(env, |obs| policy.act(&params, obs).expect("policy forward failed"), env.max_episode_steps(), rng)?;
        result.total_steps += traj.len();
        if traj.goal_reached && result.first_goal_step.is_none() {
            // The goal is hit on the episode's final transition.
            result.first_goal_step = Some(result.total_steps);
        }

        let raw = extract(&traj)?;
        let outcome = space.normalize(&raw)?;
        result.archive.push(ArchiveEntry {
            params,
            outcome,
            raw_outcome: raw,
            episode_return: traj.episode_return,
            episode_len: traj.len(),
        });
        let best = result.archive.get(result.archive.best().unwrap()).unwrap().episode_return;
        result.log.push(GepEpisodeRow {
            episode,
            env_step: result.total_steps,
            episode_return: traj.episode_return,
            episode_len: traj.len(),
            best_return: best,
            goal_reached: traj.goal_reached,
        });
        if opts.harvest_transitions {
            result.transitions.extend(traj.transitions);
        }
        if opts.stop_at_first_goal && result.first_goal_step.is_some() {
            break;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::CmcEnv;
    use crate::gep::GepPolicyKind;
    use crate::rng;

    fn linear_policy() -> GepPolicy {
        GepPolicy::new(GepPolicyKind::Linear, &CmcEnv).unwrap()
    }

    fn run(seed: u64, config: &GepConfig, opts: &GepRunOptions) -> GepRunResult {
        let env = CmcEnv;
        let policy = linear_policy();
        let space = OutcomeSpace::cmc();
        let mut r = rng::stream(seed, &[rng::tag::GEP]);
        run_gep(&env, &policy, config, &space, cmc_outcome, &mut r, opts).unwrap()
    }

    #[test]
    fn archive_grows_by_one_entry_per_episode() {
        let config = GepConfig { bootstrap_episodes: 5, goal_episodes: 7, ..Default::default() };
        let result = run(3, &config, &GepRunOptions::default());
        assert_eq!(result.archive.len(), 12);
        assert_eq!(result.log.len(), 12);
    }

    #[test]
    fn bootstrap_params_lie_in_the_unit_box() {
        let config = GepConfig { bootstrap_episodes: 5, goal_episodes: 0, ..Default::default() };
        let result = run(4, &config, &GepRunOptions::default());
        for e in result.archive.entries() {
            assert!(e.params.iter().all(|p| (-1.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn harvested_transitions_cover_every_episode_step() {
        let config = GepConfig { bootstrap_episodes: 3, goal_episodes: 4, ..Default::default() };
        let result = run(5, &config, &GepRunOptions::default());
        let total: usize = result.log.iter().map(|row| row.episode_len).sum();
        assert_eq!(result.transitions.len(), total);
        assert_eq!(result.total_steps, total);
    }

    #[test]
    fn stored_outcomes_are_normalized() {
        let config = GepConfig::default();
        let result = run(6, &config, &GepRunOptions::default());
        for e in result.archive.entries() {
            assert!(e.outcome.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn best_return_is_non_decreasing_over_episodes() {
        let config = GepConfig::default();
        let result = run(7, &config, &GepRunOptions::default());
        let mut prev = f64::NEG_INFINITY;
        for row in &result.log {
            assert!(row.best_return >= prev);
            prev = row.best_return;
        }
    }

    #[test]
    fn identical_seeds_give_identical_runs() {
        let config = GepConfig::default();
        let a = run(8, &config, &GepRunOptions::default());
        let b = run(8, &config, &GepRunOptions::default());
        assert_eq!(a.total_steps, b.total_steps);
        assert_eq!(a.first_goal_step, b.first_goal_step);
        for (ea, eb) in a.archive.entries().iter().zip(b.archive.entries()) {
            assert_eq!(ea.params, eb.params);
            assert_eq!(ea.episode_return, eb.episode_return);
        }
    }

    #[test]
    fn perturb_with_zero_sigma_is_the_identity() {
        let mut r = rng::stream(9, &[rng::tag::GEP]);
        let p = vec![0.3, -0.8, 0.1];
        assert_eq!(perturb(&p, 0.0, &mut r), p);
    }

    #[test]
    fn perturb_moments_match_the_gaussian() {
        let mut r = rng::stream(10, &[rng::tag::GEP]);
        let n = 100_000;
        let base = vec![0.25; n];
        let sigma = 0.01;
        let out = perturb(&base, sigma, &mut r);
        let deltas: Vec<f64> = out.iter().zip(&base).map(|(o, b)| o - b).collect();
        let mean = deltas.iter().sum::<f64>() / n as f64;
        let std = (deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((std - sigma).abs() / sigma < 0.02, "std {std}");
        assert!(mean.abs() < 3.0 * sigma / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn stop_at_first_goal_cuts_the_run_short() {
        let config = GepConfig { goal_episodes: 200, ..Default::default() };
        let opts = GepRunOptions { stop_at_first_goal: true, harvest_transitions: false };
        let result = run(11, &config, &opts);
        if let Some(fg) = result.first_goal_step {
            assert_eq!(fg, result.total_steps);
            assert!(result.log.last().unwrap().goal_reached);
        }
    }

    #[test]
    fn reward_blindness_by_construction() {
        // The goal-selection path consumes only outcomes: identical outcome
        // geometry with different rewards retrieves the same entries.
        let mut a = Archive::new();
        let mut b = Archive::new();
        for (i, o) in [[0.1, 0.2, 0.3], [0.9, 0.8, 0.7], [0.4, 0.4, 0.4]].iter().enumerate() {
            let mk = |ret: f64| ArchiveEntry {
                params: vec![i as f64],
                outcome: o.to_vec(),
                raw_outcome: o.to_vec(),
                episode_return: ret,
                episode_len: 1,
            };
            a.push(mk(0.0));
            b.push(mk(1000.0 - i as f64 * 500.0));
        }
        for goal in [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.45, 0.45, 0.45]] {
            assert_eq!(a.nearest(&goal).unwrap(), b.nearest(&goal).unwrap());
        }
    }
}
