//! The experiment plan: everything a multi-seed run needs, with a canonical
//! encoding that defines the configuration hash.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ddpg::DdpgConfig;
use crate::env::{cmc, CmcEnv, Environment};
use crate::error::{Error, Result};
use crate::gep::GepPolicyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Gep,
    Ddpg,
    GepPg,
    RpPg,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Gep => "gep",
            Algorithm::Ddpg => "ddpg",
            Algorithm::GepPg => "gep_pg",
            Algorithm::RpPg => "rp_pg",
        }
    }

    /// Whether the run has a buffer-filling phase before learning.
    pub fn two_phase(&self) -> bool {
        matches!(self, Algorithm::GepPg | Algorithm::RpPg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    Ou,
    OuDecreasing,
    ParamPert,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::Ou => "ou",
            NoiseKind::OuDecreasing => "ou_decreasing",
            NoiseKind::ParamPert => "param_pert",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Cmc,
}

impl EnvKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnvKind::Cmc => "cmc",
        }
    }

    pub fn build(&self) -> Box<dyn Environment + Send + Sync> {
        match self {
            EnvKind::Cmc => Box::new(CmcEnv),
        }
    }
}

/// One experiment: an algorithm, its configuration, and the seeds to run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub algorithm: Algorithm,
    pub env: EnvKind,
    pub noise: NoiseKind,
    pub master_seed: u64,
    /// Distinct per-run seed indices.
    pub seeds: Vec<u64>,
    /// Environment-step budget per run; multiple of the evaluation period.
    pub total_steps: usize,
    /// Episodes of the filler phase for two-phase algorithms.
    pub filler_episodes: usize,
    pub gep_policy: GepPolicyKind,
    pub bootstrap_episodes: usize,
    pub perturb_sigma: f64,
    pub k: usize,
    pub ou_sigma: f64,
    pub param_sigma: f64,
    pub adaptive_param_noise: bool,
    pub ddpg: DdpgConfig,
    /// Stop runs at the first goal (first-goal-speed studies).
    pub first_goal_stop: bool,
    /// Episodes for the absolute-metric re-evaluation.
    pub absolute_eval_episodes: usize,
}

impl ExperimentPlan {
    pub fn new(algorithm: Algorithm, noise: NoiseKind) -> Self {
        ExperimentPlan {
            algorithm,
            env: EnvKind::Cmc,
            noise,
            master_seed: 0,
            seeds: (0..20).collect(),
            total_steps: 500_000,
            filler_episodes: 50,
            gep_policy: GepPolicyKind::Linear,
            bootstrap_episodes: 5,
            perturb_sigma: 0.01,
            k: 1,
            ou_sigma: 0.3,
            param_sigma: 0.2,
            adaptive_param_noise: false,
            ddpg: DdpgConfig::default(),
            first_goal_stop: false,
            absolute_eval_episodes: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::invalid_input("a plan needs at least one seed"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::invalid_input("seeds must be pairwise distinct"));
        }
        let eval_period = self.ddpg.cycles_per_eval * self.ddpg.steps_per_cycle;
        if self.total_steps == 0 || self.total_steps % eval_period != 0 {
            return Err(Error::invalid_input(format!(
                "total_steps must be a positive multiple of the eval period {eval_period}"
            )));
        }
        if self.algorithm.two_phase() && self.filler_episodes == 0 {
            return Err(Error::invalid_input("two-phase algorithms need filler_episodes >= 1"));
        }
        if self.bootstrap_episodes == 0 {
            return Err(Error::invalid_input("bootstrap_episodes must be >= 1"));
        }
        if self.perturb_sigma < 0.0 {
            return Err(Error::invalid_input("perturb_sigma must be >= 0"));
        }
        Ok(())
    }

    /// Canonical flat key=value encoding; the basis of the config hash, so
    /// it covers every semantically meaningful field in a fixed order.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        kv("algorithm", self.algorithm.as_str().into());
        kv("env", self.env.as_str().into());
        kv("noise", self.noise.as_str().into());
        kv("master_seed", self.master_seed.to_string());
        kv("seeds", format!("{:?}", self.seeds));
        kv("total_steps", self.total_steps.to_string());
        kv("filler_episodes", self.filler_episodes.to_string());
        kv(
            "gep_policy",
            match &self.gep_policy {
                GepPolicyKind::Linear => "linear".to_string(),
                GepPolicyKind::Mlp { hidden } => format!("mlp{hidden:?}"),
            },
        );
        kv("bootstrap_episodes", self.bootstrap_episodes.to_string());
        kv("perturb_sigma", format!("{:?}", self.perturb_sigma));
        kv("k", self.k.to_string());
        kv("ou_sigma", format!("{:?}", self.ou_sigma));
        kv("param_sigma", format!("{:?}", self.param_sigma));
        kv("adaptive_param_noise", self.adaptive_param_noise.to_string());
        kv("gamma", format!("{:?}", self.ddpg.gamma));
        kv("tau", format!("{:?}", self.ddpg.tau));
        kv("batch_size", self.ddpg.batch_size.to_string());
        kv("actor_lr", format!("{:?}", self.ddpg.actor_lr));
        kv("critic_lr", format!("{:?}", self.ddpg.critic_lr));
        kv("hidden", format!("{:?}", self.ddpg.hidden));
        kv("buffer_capacity", self.ddpg.buffer_capacity.to_string());
        kv("steps_per_cycle", self.ddpg.steps_per_cycle.to_string());
        kv("train_steps_per_cycle", self.ddpg.train_steps_per_cycle.to_string());
        kv("cycles_per_eval", self.ddpg.cycles_per_eval.to_string());
        kv("eval_episodes", self.ddpg.eval_episodes.to_string());
        kv("first_goal_stop", self.first_goal_stop.to_string());
        kv("absolute_eval_episodes", self.absolute_eval_episodes.to_string());
        s
    }

    pub fn config_hash(&self) -> String {
        hex_digest(self.canonical_string().as_bytes())
    }

    /// Hash of the environment-and-protocol identity; analysis refuses to
    /// pool runs whose environment hashes differ.
    pub fn env_hash(&self) -> String {
        let s = format!(
            "env={}\nconstants={:?}\nepisode_steps={}\ntotal_steps={}\neval_period={}\neval_episodes={}\n",
            self.env.as_str(),
            (
                cmc::POWER,
                cmc::GRAVITY,
                cmc::MIN_POSITION,
                cmc::MAX_POSITION,
                cmc::MAX_SPEED,
                cmc::GOAL_POSITION,
                cmc::GOAL_REWARD,
                cmc::ENERGY_COST,
            ),
            cmc::EPISODE_STEPS,
            self.total_steps,
            self.ddpg.cycles_per_eval * self.ddpg.steps_per_cycle,
            self.ddpg.eval_episodes,
        );
        hex_digest(s.as_bytes())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
