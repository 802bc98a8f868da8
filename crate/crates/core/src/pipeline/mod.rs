//! Experiment orchestration: the two-phase exploration/exploitation
//! algorithm, alternative buffer fillers, and seeded multi-run sweeps with
//! an on-disk layout of
//! `out_dir/seed_<k>/{runlog.csv, evals.csv, archive.csv, checkpoints/}`
//! plus a `manifest.json` echoing the configuration and per-seed status.

mod experiment;
mod filler;
pub mod io;
mod plan;
mod run;

pub use experiment::{run_experiment, Manifest, SeedStatus};
pub use filler::{fill_buffer, run_filler, FillerKind, FillerOutput};
pub use plan::{Algorithm, EnvKind, ExperimentPlan, NoiseKind};
pub use run::{run_single, RunLogRow, SeedRunOutput};
