//! Episode sampling, the three evaluation settings, and aggregation.

mod config;
mod episode;
mod evaluate;
mod runner;
mod summary;

pub use config::{Budget, EpisodeConfig, Setting};
pub use episode::{episode_rng, sample_episode, Episode, EpisodeShape};
pub use evaluate::{evaluate, run_episodes, run_episodes_with, RunPlan};
pub use runner::{
    fit_round, fused_features, run_episode, run_inductive, run_semi, run_transductive,
    transformed_heads, EpisodeOutcome, PseudoLabel,
};
pub use summary::{aggregate, RunSummary, Z_95};
