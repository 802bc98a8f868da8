//! Policy families searched by goal exploration.
//!
//! Both families are bias-free tanh policies over observations rescaled to
//! roughly [-1, 1] by the environment's state bounds. The rescaling matters:
//! mountain-car velocities live in [-0.07, 0.07], so without it the velocity
//! input is invisible at the parameter scale the bootstrap samples from, and
//! random search stops finding energy-pumping policies.

use crate::env::Environment;
use crate::error::Result;
use crate::net::{HiddenActivation, MlpSpec, OutputActivation};
use crate::rng::Stream;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// The searched policy family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GepPolicyKind {
    /// Single linear map with tanh squashing and no bias: one weight per
    /// observation dimension and action dimension.
    Linear,
    /// Bias-free MLP with relu hidden layers and tanh output.
    Mlp { hidden: Vec<usize> },
}

/// A policy family bound to an environment's observation scaling.
#[derive(Debug, Clone)]
pub struct GepPolicy {
    pub kind: GepPolicyKind,
    spec: MlpSpec,
    /// Per-dimension scale: observation / scale feeds the network.
    obs_scale: Vec<f64>,
}

impl GepPolicy {
    pub fn new<E: Environment + ?Sized>(kind: GepPolicyKind, env: &E) -> Result<Self> {
        let (lo, hi) = env.obs_bounds();
        let obs_scale = lo.iter().zip(&hi).map(|(l, h)| l.abs().max(h.abs())).collect();
        let mut sizes = vec![env.obs_dim()];
        if let GepPolicyKind::Mlp { hidden } = &kind {
            sizes.extend_from_slice(hidden);
        }
        sizes.push(env.action_dim());
        let spec = MlpSpec::new(sizes, HiddenActivation::Relu, OutputActivation::Tanh, false)?;
        Ok(GepPolicy { kind, spec, obs_scale })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn obs_scale(&self) -> &[f64] {
        &self.obs_scale
    }

    pub fn param_count(&self) -> usize {
        self.spec.param_count()
    }

    /// Parameters drawn uniformly in `[-1, 1]^P` for the bootstrap phase.
    pub fn sample_uniform_params(&self, rng: &mut Stream) -> Vec<f64> {
        (0..self.param_count()).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    pub fn act(&self, params: &[f64], obs: &[f64]) -> Result<Vec<f64>> {
        let scaled: Vec<f64> = obs.iter().zip(&self.obs_scale).map(|(o, s)| o / s).collect();
        self.spec.forward(params, &scaled)
    }
}
