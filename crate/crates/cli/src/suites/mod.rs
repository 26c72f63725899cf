pub mod billiard_circle;
pub mod billiard_stadium;
pub mod egorov;
pub mod entropy;
pub mod ergodic;
pub mod qe_catmap;
pub mod scar;

use crate::config::ExperimentConfig;

/// Configured N list, or the suite's own default.
pub(crate) fn n_list(config: &ExperimentConfig, default: &[usize]) -> Vec<usize> {
    config.n_list.clone().unwrap_or_else(|| default.to_vec())
}

pub(crate) fn label(k: f64) -> String {
    format!("{k}")
}
