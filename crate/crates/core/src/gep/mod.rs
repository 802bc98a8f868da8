//! Goal Exploration Process: reward-blind policy search directed by goals
//! drawn in a hand-designed behavioral outcome space.
//!
//! The loop keeps an append-only archive of (policy parameters, outcome)
//! pairs. A bootstrap phase tries uniformly random parameter vectors; after
//! that, each episode samples a goal in the normalized outcome space,
//! retrieves the archive entry whose outcome is nearest, perturbs its
//! parameters with a small Gaussian, and rolls the perturbed policy out.
//! Goal selection never sees a reward; returns are stored only for later
//! analysis and replay-buffer harvesting.

mod archive;
mod outcome;
mod policy;
mod runner;

pub use archive::{Archive, ArchiveEntry};
pub use outcome::{cmc_outcome, OutcomeDim, OutcomeSpace};
pub use policy::{GepPolicy, GepPolicyKind};
pub use runner::{perturb, run_gep, GepConfig, GepEpisodeRow, GepRunOptions, GepRunResult};
