//! Exploration noise: Ornstein-Uhlenbeck action noise and Gaussian
//! parameter-space noise.

use rand_distr::{Distribution, Normal, StandardNormal};

use crate::rng::Stream;

/// Noise magnitude over the course of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSchedule {
    Static(f64),
    /// Linearly decreasing from `sigma0` at step 0 to 0 at `total_steps`.
    LinearDecreasing { sigma0: f64, total_steps: usize },
}

impl SigmaSchedule {
    pub fn at(&self, step: usize) -> f64 {
        match *self {
            SigmaSchedule::Static(s) => s,
            SigmaSchedule::LinearDecreasing { sigma0, total_steps } => {
                if total_steps == 0 {
                    return 0.0;
                }
                let frac = (step as f64 / total_steps as f64).min(1.0);
                sigma0 * (1.0 - frac)
            }
        }
    }
}

/// Discrete Ornstein-Uhlenbeck process, one component per action dimension:
/// `x <- x + theta * (mu - x) + sigma_t * N(0, 1)`.
#[derive(Debug, Clone)]
pub struct OuNoise {
    x: Vec<f64>,
    pub mu: f64,
    pub theta: f64,
    pub schedule: SigmaSchedule,
}

impl OuNoise {
    pub fn new(dim: usize, mu: f64, theta: f64, schedule: SigmaSchedule) -> Self {
        OuNoise { x: vec![mu; dim], mu, theta, schedule }
    }

    /// Reset the state to the mean (called at episode boundaries).
    pub fn reset(&mut self) {
        self.x.fill(self.mu);
    }

    /// Advance the process one step and return the new state. `global_step`
    /// indexes into the sigma schedule.
    pub fn sample(&mut self, global_step: usize, rng: &mut Stream) -> &[f64] {
        let sigma = self.schedule.at(global_step);
        for v in self.x.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            *v += self.theta * (self.mu - *v) + sigma * n;
        }
        &self.x
    }
}

/// Gaussian noise on the actor parameters, refreshed once per exploration
/// cycle. Exploration actions come from the perturbed copy; evaluation always
/// uses the clean actor.
#[derive(Debug, Clone)]
pub struct ParamNoise {
    pub sigma: f64,
    perturbed: Vec<f64>,
}

impl ParamNoise {
    pub fn new(sigma: f64) -> Self {
        ParamNoise { sigma, perturbed: Vec::new() }
    }

    /// Resample: `perturbed = actor + N(0, sigma^2)` elementwise.
    pub fn refresh(&mut self, actor_params: &[f64], rng: &mut Stream) -> &[f64] {
        self.perturbed.clear();
        if self.sigma == 0.0 {
            self.perturbed.extend_from_slice(actor_params);
        } else {
            let normal = Normal::new(0.0, self.sigma).expect("sigma must be finite and >= 0");
            self.perturbed
                .extend(actor_params.iter().map(|&p| p + normal.sample(rng)));
        }
        &self.perturbed
    }

    pub fn perturbed(&self) -> &[f64] {
        &self.perturbed
    }

    /// Distance-matched sigma adaptation: grow sigma while the perturbed
    /// policy stays within `target` action distance of the clean one, shrink
    /// it otherwise.
    pub fn adapt(&mut self, action_distance: f64, target: f64, factor: f64) {
        if action_distance > target {
            self.sigma /= factor;
        } else {
            self.sigma *= factor;
        }
    }
}
