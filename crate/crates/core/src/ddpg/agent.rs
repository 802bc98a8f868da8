//! The actor-critic pair, its target copies, and the batched update rule.

use crate::ddpg::buffer::TransitionBatch;
use crate::error::{Error, Result};
use crate::net::{AdamState, ForwardTrace, GradScratch, HiddenActivation, MlpSpec, OutputActivation};
use crate::rng::Stream;
use serde::{Deserialize, Serialize};

/// Learner hyperparameters. Defaults follow the baseline configuration for
/// low-dimensional control: (64, 64) relu networks, tanh/linear heads,
/// Adam at 1e-4 / 1e-3, batch 64, gamma 0.99, tau 0.001.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DdpgConfig {
    pub gamma: f64,
    pub tau: f64,
    pub batch_size: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub hidden: (usize, usize),
    pub buffer_capacity: usize,
    /// Exploration steps per cycle before a training burst.
    pub steps_per_cycle: usize,
    /// Gradient updates per cycle.
    pub train_steps_per_cycle: usize,
    /// Cycles between offline evaluations.
    pub cycles_per_eval: usize,
    pub eval_episodes: usize,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        DdpgConfig {
            gamma: 0.99,
            tau: 0.001,
            batch_size: 64,
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            hidden: (64, 64),
            buffer_capacity: 1_000_000,
            steps_per_cycle: 100,
            train_steps_per_cycle: 50,
            cycles_per_eval: 20,
            eval_episodes: 10,
        }
    }
}

/// `target <- (1 - tau) * target + tau * online`, elementwise.
pub fn soft_update(target: &mut [f64], online: &[f64], tau: f64) -> Result<()> {
    if target.len() != online.len() {
        return Err(Error::invalid_input("soft_update length mismatch"));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::invalid_input(format!("tau {tau} outside [0, 1]")));
    }
    for (t, &o) in target.iter_mut().zip(online) {
        *t = (1.0 - tau) * *t + tau * o;
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
struct TrainScratch {
    target_actor_trace: ForwardTrace,
    target_critic_trace: ForwardTrace,
    critic_trace: ForwardTrace,
    actor_trace: ForwardTrace,
    policy_critic_trace: ForwardTrace,
    grad: GradScratch,
    next_sa: Vec<f64>,
    sa: Vec<f64>,
    policy_sa: Vec<f64>,
    targets: Vec<f64>,
    upstream: Vec<f64>,
    critic_grad: Vec<f64>,
    critic_input_grad: Vec<f64>,
    actor_upstream: Vec<f64>,
    actor_grad: Vec<f64>,
    unused_input_grad: Vec<f64>,
}

/// Deterministic actor-critic learner. The critic receives `(state, action)`
/// concatenated at its input layer.
#[derive(Debug, Clone)]
pub struct DdpgAgent {
    pub cfg: DdpgConfig,
    pub actor_spec: MlpSpec,
    pub critic_spec: MlpSpec,
    pub actor: Vec<f64>,
    pub critic: Vec<f64>,
    pub target_actor: Vec<f64>,
    pub target_critic: Vec<f64>,
    actor_adam: AdamState,
    critic_adam: AdamState,
    obs_dim: usize,
    act_dim: usize,
    scratch: TrainScratch,
}

impl DdpgAgent {
    /// A freshly initialized agent; targets start as copies of the online
    /// networks. The actor draws its initial parameters before the critic.
    pub fn new(obs_dim: usize, act_dim: usize, cfg: DdpgConfig, rng: &mut Stream) -> Result<Self> {
        let (h1, h2) = cfg.hidden;
        let actor_spec = MlpSpec::new(
            vec![obs_dim, h1, h2, act_dim],
            HiddenActivation::Relu,
            OutputActivation::Tanh,
            true,
        )?;
        let critic_spec = MlpSpec::new(
            vec![obs_dim + act_dim, h1, h2, 1],
            HiddenActivation::Relu,
            OutputActivation::Linear,
            true,
        )?;
        let actor = actor_spec.init_params(rng);
        let critic = critic_spec.init_params(rng);
        let actor_adam = AdamState::new(actor.len(), cfg.actor_lr);
        let critic_adam = AdamState::new(critic.len(), cfg.critic_lr);
        Ok(DdpgAgent {
            cfg,
            target_actor: actor.clone(),
            target_critic: critic.clone(),
            actor_spec,
            critic_spec,
            actor,
            critic,
            actor_adam,
            critic_adam,
            obs_dim,
            act_dim,
            scratch: TrainScratch::default(),
        })
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn act_dim(&self) -> usize {
        self.act_dim
    }

    /// Clean (noiseless) policy action.
    pub fn act(&self, obs: &[f64]) -> Result<Vec<f64>> {
        self.actor_spec.forward(&self.actor, obs)
    }

    /// Action of the actor network under the given parameter vector.
    pub fn act_with(&self, params: &[f64], obs: &[f64]) -> Result<Vec<f64>> {
        self.actor_spec.forward(params, obs)
    }

    /// One batched update of critic and actor plus a soft target update.
    ///
    /// The critic regresses on `y = r + gamma * (1 - terminal) * Q'(s',
    /// mu'(s'))`; the actor ascends `Q(s, mu(s))` through the critic's action
    /// input. Both gradients are taken at the current parameters, then both
    /// Adam steps are applied.
    ///
    /// Returns `(critic_loss, actor_objective)`.
    pub fn train_step(&mut self, batch: &TransitionBatch) -> Result<(f64, f64)> {
        let n = batch.len;
        if n == 0 {
            return Err(Error::invalid_input("empty batch"));
        }
        if batch.states.len() != n * self.obs_dim || batch.actions.len() != n * self.act_dim {
            return Err(Error::invalid_input("batch dimensions do not match the agent"));
        }
        let s = &mut self.scratch;

        // Bootstrapped targets from the target networks.
        self.actor_spec
            .forward_batch_into(&self.target_actor, &batch.next_states, n, &mut s.target_actor_trace)?;
        concat_rows(
            &batch.next_states,
            s.target_actor_trace.output(),
            self.obs_dim,
            self.act_dim,
            n,
            &mut s.next_sa,
        );
        self.critic_spec
            .forward_batch_into(&self.target_critic, &s.next_sa, n, &mut s.target_critic_trace)?;
        let q_next = s.target_critic_trace.output();
        s.targets.clear();
        for i in 0..n {
            let cont = if batch.terminals[i] { 0.0 } else { self.cfg.gamma };
            s.targets.push(batch.rewards[i] + cont * q_next[i]);
        }

        // Critic loss and gradient on the sampled (s, a) pairs.
        concat_rows(&batch.states, &batch.actions, self.obs_dim, self.act_dim, n, &mut s.sa);
        self.critic_spec
            .forward_batch_into(&self.critic, &s.sa, n, &mut s.critic_trace)?;
        let q = s.critic_trace.output();
        let mut critic_loss = 0.0;
        s.upstream.clear();
        for i in 0..n {
            let err = q[i] - s.targets[i];
            critic_loss += err * err;
            s.upstream.push(2.0 * err / n as f64);
        }
        critic_loss /= n as f64;
        if !critic_loss.is_finite() {
            return Err(Error::numeric(format!(
                "critic loss diverged (loss {critic_loss}, step {})",
                self.critic_adam.step_count()
            )));
        }
        self.critic_spec.backward_batch_into(
            &self.critic,
            &s.critic_trace,
            &s.upstream,
            &mut s.critic_grad,
            &mut s.unused_input_grad,
            &mut s.grad,
        )?;

        // Actor objective: mean Q(s, mu(s)) through the critic's action input.
        self.actor_spec.forward_batch_into(&self.actor, &batch.states, n, &mut s.actor_trace)?;
        concat_rows(
            &batch.states,
            s.actor_trace.output(),
            self.obs_dim,
            self.act_dim,
            n,
            &mut s.policy_sa,
        );
        self.critic_spec
            .forward_batch_into(&self.critic, &s.policy_sa, n, &mut s.policy_critic_trace)?;
        let actor_objective =
            s.policy_critic_trace.output().iter().sum::<f64>() / n as f64;
        if !actor_objective.is_finite() {
            return Err(Error::numeric("actor objective diverged"));
        }
        s.upstream.clear();
        s.upstream.resize(n, 1.0 / n as f64);
        self.critic_spec.backward_batch_into(
            &self.critic,
            &s.policy_critic_trace,
            &s.upstream,
            &mut s.unused_input_grad,
            &mut s.critic_input_grad,
            &mut s.grad,
        )?;
        // d(mean Q)/d(action) is the action slice of the critic's input gradient.
        s.actor_upstream.clear();
        for i in 0..n {
            let row = &s.critic_input_grad
                [i * (self.obs_dim + self.act_dim)..(i + 1) * (self.obs_dim + self.act_dim)];
            s.actor_upstream.extend_from_slice(&row[self.obs_dim..]);
        }
        self.actor_spec.backward_batch_into(
            &self.actor,
            &s.actor_trace,
            &s.actor_upstream,
            &mut s.actor_grad,
            &mut s.unused_input_grad,
            &mut s.grad,
        )?;
        // Ascend the objective.
        for g in s.actor_grad.iter_mut() {
            *g = -*g;
        }

        self.critic_adam.step(&mut self.critic, &s.critic_grad)?;
        self.actor_adam.step(&mut self.actor, &s.actor_grad)?;
        soft_update(&mut self.target_actor, &self.actor, self.cfg.tau)?;
        soft_update(&mut self.target_critic, &self.critic, self.cfg.tau)?;
        Ok((critic_loss, actor_objective))
    }
}

/// Row-wise concatenation of `(n, a_dim)` and `(n, b_dim)` matrices.
fn concat_rows(a: &[f64], b: &[f64], a_dim: usize, b_dim: usize, n: usize, out: &mut Vec<f64>) {
    out.clear();
    for i in 0..n {
        out.extend_from_slice(&a[i * a_dim..(i + 1) * a_dim]);
        out.extend_from_slice(&b[i * b_dim..(i + 1) * b_dim]);
    }
}
