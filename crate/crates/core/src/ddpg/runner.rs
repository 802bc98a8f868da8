//! The interaction/training loop and offline evaluation.

use crate::ddpg::{DdpgAgent, OuNoise, ParamNoise, ReplayBuffer, SigmaSchedule, TransitionBatch};
use crate::env::{rollout, Environment, Transition};
use crate::error::{Error, Result};
use crate::net::MlpSpec;
use crate::rng::{self, Stream};

/// Exploration regime for the interaction loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseRegime {
    /// Noiseless baseline.
    None,
    /// Ornstein-Uhlenbeck noise added to the clean action.
    Ou { mu: f64, theta: f64, schedule: SigmaSchedule },
    /// Gaussian noise on actor parameters, refreshed every cycle. The
    /// adaptive variant rescales sigma by 1.01 to track `target_distance`
    /// in action space.
    Param { sigma: f64, adaptive: bool, target_distance: f64 },
}

impl NoiseRegime {
    pub fn standard_ou() -> Self {
        NoiseRegime::Ou { mu: 0.0, theta: 0.15, schedule: SigmaSchedule::Static(0.3) }
    }

    pub fn decreasing_ou(total_steps: usize) -> Self {
        NoiseRegime::Ou {
            mu: 0.0,
            theta: 0.15,
            schedule: SigmaSchedule::LinearDecreasing { sigma0: 0.6, total_steps },
        }
    }

    pub fn standard_param() -> Self {
        NoiseRegime::Param { sigma: 0.2, adaptive: false, target_distance: 0.2 }
    }
}

/// Mean and spread of an offline evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalSummary {
    pub mean_return: f64,
    pub std_return: f64,
    pub episodes: usize,
    /// Whether any evaluation episode reached the goal.
    pub goal_reached: bool,
}

/// Called after each evaluation with the cumulative env step, the summary,
/// and the clean actor parameters (for checkpointing).
pub type EvalHook<'a> = dyn FnMut(usize, EvalSummary, &[f64]) -> Result<()> + 'a;

#[derive(Debug, Clone)]
pub struct DdpgRunOptions {
    /// Exploration steps to run; must be a multiple of the eval period
    /// (cycles_per_eval * steps_per_cycle).
    pub total_steps: usize,
    /// Master seed and tag prefix for the run's RNG streams.
    pub master_seed: u64,
    pub stream_prefix: Vec<u64>,
    /// Gradient updates enabled. Frozen buffer-filling runs disable this.
    pub learning: bool,
    /// Stop the loop once the goal is first reached during exploration.
    pub stop_at_first_goal: bool,
    /// Offset added to logged env steps (continuation after a filler phase).
    pub start_step: usize,
}

impl DdpgRunOptions {
    pub fn new(total_steps: usize, master_seed: u64, stream_prefix: Vec<u64>) -> Self {
        DdpgRunOptions {
            total_steps,
            master_seed,
            stream_prefix,
            learning: true,
            stop_at_first_goal: false,
            start_step: 0,
        }
    }

    fn stream(&self, tag: u64) -> Stream {
        let mut tags = self.stream_prefix.clone();
        tags.push(tag);
        rng::stream(self.master_seed, &tags)
    }

    fn eval_stream(&self, eval_index: usize) -> Stream {
        let mut tags = self.stream_prefix.clone();
        tags.push(rng::tag::EVAL);
        tags.push(eval_index as u64);
        rng::stream(self.master_seed, &tags)
    }
}

#[derive(Debug, Clone, Default)]
pub struct DdpgRunResult {
    /// Cumulative env step (including `start_step`) at which the goal was
    /// first reached during exploration, if ever.
    pub first_goal_step: Option<usize>,
    pub steps_done: usize,
    pub train_steps_done: usize,
    pub evals_done: usize,
}

/// Evaluate a policy offline: `episodes` noiseless episodes, nothing pushed
/// anywhere. Returns per-episode returns.
pub fn evaluate_policy<E: Environment + ?Sized>(
    env: &E,
    spec: &MlpSpec,
    params: &[f64],
    episodes: usize,
    rng: &mut Stream,
) -> Result<(Vec<f64>, bool)> {
    let mut returns = Vec::with_capacity(episodes);
    let mut goal = false;
    for _ in 0..episodes {
        let traj = rollout(
            env,
            |obs| spec.forward(params, obs).expect("actor forward failed in eval"),
            env.max_episode_steps(),
            rng,
        )?;
        goal |= traj.goal_reached;
        returns.push(traj.episode_return);
    }
    Ok((returns, goal))
}

pub fn summarize_returns(returns: &[f64], goal_reached: bool) -> EvalSummary {
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    EvalSummary { mean_return: mean, std_return: var.sqrt(), episodes: returns.len(), goal_reached }
}

/// Run the interaction/training loop.
///
/// Every cycle: `steps_per_cycle` exploration steps pushing transitions into
/// `buffer`, then (if learning and the buffer holds at least one batch)
/// `train_steps_per_cycle` updates. Every `cycles_per_eval` cycles the clean
/// actor is evaluated offline and handed to `eval_hook` for checkpointing.
pub fn run_ddpg<E: Environment + ?Sized>(
    env: &E,
    agent: &mut DdpgAgent,
    noise: NoiseRegime,
    buffer: &mut ReplayBuffer,
    opts: &DdpgRunOptions,
    eval_hook: &mut EvalHook,
) -> Result<DdpgRunResult> {
    let cfg = agent.cfg.clone();
    let eval_period = cfg.cycles_per_eval * cfg.steps_per_cycle;
    if opts.total_steps % eval_period != 0 {
        return Err(Error::invalid_input(format!(
            "total_steps {} must be a multiple of the eval period {}",
            opts.total_steps, eval_period
        )));
    }

    let mut env_rng = opts.stream(rng::tag::ENV);
    let mut noise_rng = opts.stream(rng::tag::NOISE);
    let mut buffer_rng = opts.stream(rng::tag::BUFFER);

    let mut ou = match noise {
        NoiseRegime::Ou { mu, theta, schedule } => Some(OuNoise::new(env.action_dim(), mu, theta, schedule)),
        _ => None,
    };
    let mut pnoise = match noise {
        NoiseRegime::Param { sigma, .. } => Some(ParamNoise::new(sigma)),
        _ => None,
    };

    let mut result = DdpgRunResult::default();
    let mut state = env.reset(&mut env_rng);
    let mut episode_step = 0usize;
    let mut batch = TransitionBatch::default();
    let mut cycle_states: Vec<f64> = Vec::new();
    let mut eval_index = 0usize;

    for step in 0..opts.total_steps {
        // Cycle boundary: refresh the perturbed actor.
        if step % cfg.steps_per_cycle == 0 {
            if let Some(pn) = pnoise.as_mut() {
                if let NoiseRegime::Param { adaptive: true, target_distance, .. } = noise {
                    if !cycle_states.is_empty() {
                        let d = action_distance(agent, pn.perturbed(), &cycle_states)?;
                        pn.adapt(d, target_distance, 1.01);
                    }
                }
                pn.refresh(&agent.actor, &mut noise_rng);
                cycle_states.clear();
            }
        }

        let mut action = match (&mut ou, &pnoise) {
            (Some(ou), _) => {
                let mut a = agent.act(&state)?;
                for (ai, ni) in a.iter_mut().zip(ou.sample(step, &mut noise_rng)) {
                    *ai += ni;
                }
                a
            }
            (_, Some(pn)) => {
                cycle_states.extend_from_slice(&state);
                agent.act_with(pn.perturbed(), &state)?
            }
            _ => agent.act(&state)?,
        };
        for a in action.iter_mut() {
            *a = a.clamp(-1.0, 1.0);
        }

        let step_result = env.step(&state, &action, episode_step)?;
        buffer.push(&Transition {
            state: std::mem::take(&mut state),
            action,
            reward: step_result.reward,
            next_state: step_result.next_state.clone(),
            terminal: step_result.terminal,
        })?;
        result.steps_done = step + 1;
        if step_result.goal_reached && result.first_goal_step.is_none() {
            result.first_goal_step = Some(opts.start_step + step + 1);
            if opts.stop_at_first_goal {
                return Ok(result);
            }
        }
        if step_result.terminal {
            state = env.reset(&mut env_rng);
            episode_step = 0;
            if let Some(ou) = ou.as_mut() {
                ou.reset();
            }
        } else {
            state = step_result.next_state;
            episode_step += 1;
        }

        // Training burst at each cycle end.
        if (step + 1) % cfg.steps_per_cycle == 0 && opts.learning && buffer.len() >= cfg.batch_size {
            for _ in 0..cfg.train_steps_per_cycle {
                buffer.sample_into(cfg.batch_size, &mut buffer_rng, &mut batch)?;
                agent.train_step(&batch)?;
                result.train_steps_done += 1;
            }
        }

        // Offline evaluation and checkpoint.
        if (step + 1) % eval_period == 0 {
            let mut eval_rng = opts.eval_stream(eval_index);
            let (returns, goal) =
                evaluate_policy(env, &agent.actor_spec, &agent.actor, cfg.eval_episodes, &mut eval_rng)?;
            eval_hook(opts.start_step + step + 1, summarize_returns(&returns, goal), &agent.actor)?;
            eval_index += 1;
            result.evals_done += 1;
        }
    }
    Ok(result)
}

/// Root-mean-square action gap between the perturbed and clean actor over
/// the given states.
fn action_distance(agent: &DdpgAgent, perturbed: &[f64], states: &[f64]) -> Result<f64> {
    let obs_dim = agent.obs_dim();
    let n = states.len() / obs_dim;
    let mut sq = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        let obs = &states[i * obs_dim..(i + 1) * obs_dim];
        let clean = agent.act(obs)?;
        let noisy = agent.act_with(perturbed, obs)?;
        for (c, p) in clean.iter().zip(&noisy) {
            sq += (c - p) * (c - p);
            count += 1;
        }
    }
    Ok((sq / count.max(1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddpg::DdpgConfig;
    use crate::env::CmcEnv;

    fn small_agent(seed: u64) -> DdpgAgent {
        let cfg = DdpgConfig {
            hidden: (8, 8),
            steps_per_cycle: 20,
            train_steps_per_cycle: 5,
            cycles_per_eval: 5,
            eval_episodes: 2,
            batch_size: 16,
            buffer_capacity: 10_000,
            ..Default::default()
        };
        let mut r = rng::stream(seed, &[rng::tag::NET_INIT]);
        DdpgAgent::new(2, 1, cfg, &mut r).unwrap()
    }

    #[test]
    fn cycle_arithmetic_produces_the_expected_counts() {
        // 200 steps with 20-step cycles, evals every 5 cycles: 2 evals,
        // 10 cycles x 5 train steps = 50 updates.
        let env = CmcEnv;
        let mut agent = small_agent(1);
        let mut buffer = ReplayBuffer::new(10_000, 2, 1);
        let opts = DdpgRunOptions::new(200, 11, vec![0]);
        let mut evals = Vec::new();
        let result = run_ddpg(
            &env,
            &mut agent,
            NoiseRegime::standard_ou(),
            &mut buffer,
            &opts,
            &mut |step, summary, _params| {
                evals.push((step, summary.episodes));
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(result.steps_done, 200);
        assert_eq!(result.evals_done, 2);
        assert_eq!(result.train_steps_done, 50);
        assert_eq!(evals, vec![(100, 2), (200, 2)]);
        assert_eq!(buffer.len(), 200);
    }

    #[test]
    fn rejects_step_counts_off_the_eval_grid() {
        let env = CmcEnv;
        let mut agent = small_agent(2);
        let mut buffer = ReplayBuffer::new(100, 2, 1);
        let opts = DdpgRunOptions::new(150, 1, vec![0]);
        let err = run_ddpg(
            &env,
            &mut agent,
            NoiseRegime::None,
            &mut buffer,
            &opts,
            &mut |_, _, _| Ok(()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn evaluation_is_pure() {
        // Eval episodes use the clean actor and push nothing to the buffer.
        let env = CmcEnv;
        let agent = small_agent(3);
        let buffer = ReplayBuffer::new(100, 2, 1);
        let before = buffer.len();
        let mut r = rng::stream(4, &[rng::tag::EVAL]);
        let (returns, _) = evaluate_policy(&env, &agent.actor_spec, &agent.actor, 3, &mut r).unwrap();
        assert_eq!(returns.len(), 3);
        assert_eq!(buffer.len(), before);
    }

    #[test]
    fn identical_seeds_produce_identical_runs() {
        let env = CmcEnv;
        let run = || {
            let mut agent = small_agent(5);
            let mut buffer = ReplayBuffer::new(10_000, 2, 1);
            let opts = DdpgRunOptions::new(200, 21, vec![3]);
            let mut log = Vec::new();
            run_ddpg(
                &env,
                &mut agent,
                NoiseRegime::standard_param(),
                &mut buffer,
                &opts,
                &mut |step, summary, _| {
                    log.push((step, summary.mean_return));
                    Ok(())
                },
            )
            .unwrap();
            (log, agent.actor)
        };
        let (la, pa) = run();
        let (lb, pb) = run();
        assert_eq!(la, lb);
        assert_eq!(pa, pb);
    }

    #[test]
    fn frozen_runs_leave_the_agent_untouched() {
        let env = CmcEnv;
        let mut agent = small_agent(6);
        let before = agent.actor.clone();
        let mut buffer = ReplayBuffer::new(10_000, 2, 1);
        let mut opts = DdpgRunOptions::new(100, 31, vec![0]);
        opts.learning = false;
        run_ddpg(
            &env,
            &mut agent,
            NoiseRegime::standard_ou(),
            &mut buffer,
            &opts,
            &mut |_, _, _| Ok(()),
        )
        .unwrap();
        assert_eq!(agent.actor, before);
        assert_eq!(buffer.len(), 100);
    }

    #[test]
    fn emitted_actions_are_clipped() {
        let env = CmcEnv;
        let mut agent = small_agent(7);
        let mut buffer = ReplayBuffer::new(1_000, 2, 1);
        let opts = DdpgRunOptions::new(100, 41, vec![0]);
        run_ddpg(
            &env,
            &mut agent,
            // Huge static noise guarantees out-of-range raw actions.
            NoiseRegime::Ou { mu: 0.0, theta: 0.15, schedule: SigmaSchedule::Static(3.0) },
            &mut buffer,
            &opts,
            &mut |_, _, _| Ok(()),
        )
        .unwrap();
        for i in 0..buffer.len() {
            let a = buffer.get(i).unwrap().action[0];
            assert!((-1.0..=1.0).contains(&a));
        }
    }
}
