//! Replay-buffer fillers: ways of generating transitions with learning
//! disabled, used as phase 1 of the two-phase algorithms and for the
//! buffer-content studies.

use rand::Rng;

use crate::analysis::{EvalRecord, Phase};
use crate::checkpoint::CheckpointPolicy;
use crate::ddpg::{DdpgAgent, DdpgConfig, OuNoise, ParamNoise, ReplayBuffer};
use crate::env::{Environment, Transition};
use crate::error::Result;
use crate::gep::{
    cmc_outcome, run_gep, Archive, GepConfig, GepPolicy, GepPolicyKind, GepRunOptions, OutcomeSpace,
};
use crate::pipeline::run::RunLogRow;
use crate::rng::{self, Stream};

/// How the buffer gets filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillerKind {
    /// Goal exploration with the configured policy family.
    Gep,
    /// Pure random policy search: fresh uniform parameters every episode.
    RandomPolicySearch,
    /// The learner's own exploration loop with OU action noise and learning
    /// disabled.
    DdpgActionNoiseFrozen,
    /// Same with parameter-space noise.
    DdpgParamNoiseFrozen,
}

/// Everything a filler phase produces.
#[derive(Debug)]
pub struct FillerOutput {
    pub transitions: Vec<Transition>,
    pub log: Vec<RunLogRow>,
    /// Per-episode policy records for phases that track per-episode policies.
    pub evals: Vec<EvalRecord>,
    /// Checkpoints matching `evals` entries that name one.
    pub checkpoints: Vec<(String, CheckpointPolicy)>,
    pub archive: Option<Archive>,
    pub steps: usize,
    pub first_goal_step: Option<usize>,
}

/// Filler parameters shared by the GEP-like kinds.
#[derive(Debug, Clone)]
pub struct FillerSettings {
    pub gep_policy: GepPolicyKind,
    pub bootstrap_episodes: usize,
    pub perturb_sigma: f64,
    pub k: usize,
    pub ou_sigma: f64,
    pub param_sigma: f64,
    pub ddpg: DdpgConfig,
}

/// Run a filler for `episodes` episodes. No gradient update happens in any
/// variant; every transition generated is returned in order.
pub fn run_filler<E: Environment + ?Sized>(
    kind: FillerKind,
    episodes: usize,
    env: &E,
    settings: &FillerSettings,
    master_seed: u64,
    stream_prefix: &[u64],
) -> Result<FillerOutput> {
    match kind {
        FillerKind::Gep | FillerKind::RandomPolicySearch => {
            let (bootstrap, goals, phase) = if kind == FillerKind::Gep {
                let b = settings.bootstrap_episodes.min(episodes);
                (b, episodes - b, Phase::Gep)
            } else {
                (episodes, 0, Phase::Filler)
            };
            let policy = GepPolicy::new(settings.gep_policy.clone(), env)?;
            let config = GepConfig {
                bootstrap_episodes: bootstrap,
                goal_episodes: goals,
                perturb_sigma: settings.perturb_sigma,
                k: settings.k,
            };
            let space = OutcomeSpace::cmc();
            let mut tags = stream_prefix.to_vec();
            tags.push(rng::tag::GEP);
            let mut gep_rng = rng::stream(master_seed, &tags);
            let result = run_gep(
                env,
                &policy,
                &config,
                &space,
                cmc_outcome,
                &mut gep_rng,
                &GepRunOptions::default(),
            )?;

            let mut log = Vec::new();
            let mut evals = Vec::new();
            let mut checkpoints = Vec::new();
            for (row, entry) in result.log.iter().zip(result.archive.entries()) {
                log.push(RunLogRow {
                    env_step: row.env_step,
                    phase,
                    eval_mean_return: row.best_return,
                    eval_std_return: 0.0,
                    goal_reach_flag: row.goal_reached,
                });
                let name = format!("{}_step_{:09}.bin", phase.as_str(), row.env_step);
                evals.push(EvalRecord {
                    env_step: row.env_step,
                    phase,
                    mean_return: row.episode_return,
                    std_return: 0.0,
                    episodes: 1,
                    goal_reached: row.goal_reached,
                    checkpoint: Some(name.clone()),
                });
                checkpoints.push((name, CheckpointPolicy::scaled(&policy, entry.params.clone())));
            }
            Ok(FillerOutput {
                transitions: result.transitions,
                log,
                evals,
                checkpoints,
                archive: Some(result.archive),
                steps: result.total_steps,
                first_goal_step: result.first_goal_step,
            })
        }
        FillerKind::DdpgActionNoiseFrozen | FillerKind::DdpgParamNoiseFrozen => {
            frozen_ddpg_filler(kind, episodes, env, settings, master_seed, stream_prefix)
        }
    }
}

/// The learner's exploration loop with the learning rate effectively zero:
/// the actor never changes; only its noise wanders.
fn frozen_ddpg_filler<E: Environment + ?Sized>(
    kind: FillerKind,
    episodes: usize,
    env: &E,
    settings: &FillerSettings,
    master_seed: u64,
    stream_prefix: &[u64],
) -> Result<FillerOutput> {
    let mk_stream = |tag: u64| {
        let mut tags = stream_prefix.to_vec();
        tags.push(tag);
        rng::stream(master_seed, &tags)
    };
    let mut init_rng = mk_stream(rng::tag::NET_INIT);
    let agent = DdpgAgent::new(env.obs_dim(), env.action_dim(), settings.ddpg.clone(), &mut init_rng)?;
    let actor_before = agent.actor.clone();

    let mut env_rng = mk_stream(rng::tag::ENV);
    let mut noise_rng = mk_stream(rng::tag::NOISE);
    let mut ou = OuNoise::new(env.action_dim(), 0.0, 0.15, crate::ddpg::SigmaSchedule::Static(settings.ou_sigma));
    let mut pnoise = ParamNoise::new(settings.param_sigma);
    pnoise.refresh(&agent.actor, &mut noise_rng);

    let mut out = FillerOutput {
        transitions: Vec::new(),
        log: Vec::new(),
        evals: Vec::new(),
        checkpoints: Vec::new(),
        archive: None,
        steps: 0,
        first_goal_step: None,
    };
    let mut best_return = f64::NEG_INFINITY;
    for _ in 0..episodes {
        let mut state = env.reset(&mut env_rng);
        ou.reset();
        let mut episode_return = 0.0;
        let mut goal = false;
        for step_index in 0..env.max_episode_steps() {
            if kind == FillerKind::DdpgParamNoiseFrozen && out.steps % settings.ddpg.steps_per_cycle == 0
            {
                pnoise.refresh(&agent.actor, &mut noise_rng);
            }
            let mut action = if kind == FillerKind::DdpgActionNoiseFrozen {
                let mut a = agent.act(&state)?;
                for (ai, ni) in a.iter_mut().zip(ou.sample(out.steps, &mut noise_rng)) {
                    *ai += ni;
                }
                a
            } else {
                agent.act_with(pnoise.perturbed(), &state)?
            };
            for a in action.iter_mut() {
                *a = a.clamp(-1.0, 1.0);
            }
            let sr = env.step(&state, &action, step_index)?;
            episode_return += sr.reward;
            out.steps += 1;
            if sr.goal_reached {
                goal = true;
                if out.first_goal_step.is_none() {
                    out.first_goal_step = Some(out.steps);
                }
            }
            out.transitions.push(Transition {
                state,
                action,
                reward: sr.reward,
                next_state: sr.next_state.clone(),
                terminal: sr.terminal,
            });
            state = sr.next_state;
            if sr.terminal {
                break;
            }
        }
        best_return = best_return.max(episode_return);
        out.log.push(RunLogRow {
            env_step: out.steps,
            phase: Phase::Filler,
            eval_mean_return: best_return,
            eval_std_return: 0.0,
            goal_reach_flag: goal,
        });
    }
    debug_assert_eq!(agent.actor, actor_before);
    Ok(out)
}

/// Spec-level convenience: fill a fresh replay buffer with a filler's
/// transitions.
pub fn fill_buffer<E: Environment + ?Sized>(
    kind: FillerKind,
    episodes: usize,
    env: &E,
    settings: &FillerSettings,
    master_seed: u64,
    stream_prefix: &[u64],
) -> Result<(ReplayBuffer, FillerOutput)> {
    let output = run_filler(kind, episodes, env, settings, master_seed, stream_prefix)?;
    let mut buffer = ReplayBuffer::new(settings.ddpg.buffer_capacity, env.obs_dim(), env.action_dim());
    for t in &output.transitions {
        buffer.push(t)?;
    }
    Ok((buffer, output))
}
