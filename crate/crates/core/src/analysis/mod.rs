//! Evaluation methodology: performance metrics, the two-sample statistical
//! test battery, metric correlation, and behavioral diversity measures.

mod diversity;
mod metrics;
mod special;
mod splits;
mod stats;

pub use diversity::{cell_metrics, knn_diversity, observation_diversity, CellGrid, CellMetrics};
pub use metrics::{
    absolute_metric, best_eval_index, evaluate_checkpoint, final_metric, EvalRecord, Phase,
};
pub use special::{ln_gamma, regularized_incomplete_beta, student_t_two_sided_p};
pub use splits::{split_variability, SplitVariability};
pub use stats::{bootstrap_ci, compare, mean, pearson, t_test, BootstrapCi, ComparisonReport};
