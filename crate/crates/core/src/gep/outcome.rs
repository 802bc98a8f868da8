//! Behavioral outcome features and their normalized space.

use rand::Rng;

use crate::env::Trajectory;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// One outcome feature with fixed bounds used for normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDim {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
}

/// A fixed-bounds outcome space. Normalized outcomes live in `[0, 1]^d`
/// (clipped), which keeps goal sampling stationary and the diversity
/// measures well-defined.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpace {
    pub dims: Vec<OutcomeDim>,
}

impl OutcomeSpace {
    pub fn new(dims: Vec<OutcomeDim>) -> Result<Self> {
        if dims.iter().any(|d| d.lower >= d.upper) {
            return Err(Error::invalid_input("outcome bounds need lower < upper"));
        }
        Ok(OutcomeSpace { dims })
    }

    /// The three-feature space used for the mountain car: range of position,
    /// maximum position, and energy spent (in reward-penalty units, bounded
    /// by 0.1 * 1 * 1000).
    pub fn cmc() -> Self {
        OutcomeSpace {
            dims: vec![
                OutcomeDim { name: "range_of_position", lower: 0.0, upper: 1.8 },
                OutcomeDim { name: "max_position", lower: -1.2, upper: 0.6 },
                OutcomeDim { name: "energy_spent", lower: 0.0, upper: 100.0 },
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Map raw feature values into `[0, 1]^d` by the per-dimension bounds.
    pub fn normalize(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.dims.len() {
            return Err(Error::invalid_input("raw outcome has the wrong dimension"));
        }
        Ok(raw
            .iter()
            .zip(&self.dims)
            .map(|(&v, d)| ((v - d.lower) / (d.upper - d.lower)).clamp(0.0, 1.0))
            .collect())
    }

    /// Uniform goal in the normalized space.
    pub fn sample_goal(&self, rng: &mut Stream) -> Vec<f64> {
        (0..self.dims.len()).map(|_| rng.random_range(0.0..1.0)).collect()
    }
}

/// Raw mountain-car outcome features of one episode: positions visited
/// include the start state and every successor state.
pub fn cmc_outcome(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.is_empty() {
        return Err(Error::invalid_input("cannot extract an outcome from an empty trajectory"));
    }
    let mut min_pos = traj.transitions[0].state[0];
    let mut max_pos = min_pos;
    let mut energy = 0.0;
    for t in &traj.transitions {
        let p = t.next_state[0];
        min_pos = min_pos.min(p);
        max_pos = max_pos.max(p);
        energy += 0.1 * t.action[0] * t.action[0];
    }
    Ok(vec![max_pos - min_pos, max_pos, energy])
}
