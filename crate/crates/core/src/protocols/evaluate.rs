use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{aggregate, episode_rng, run_episode, sample_episode, EpisodeConfig, EpisodeOutcome};
use super::{Episode, EpisodeShape, RunSummary, Setting};
use crate::dataio::FeatureDataset;
use crate::error::{Error, Result};

/// A complete evaluation request: which episodes to draw and how to solve
/// them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPlan {
    pub shape: EpisodeShape,
    pub episodes: usize,
    pub seed: u64,
    pub episode: EpisodeConfig,
}

impl RunPlan {
    pub fn validate(&self, dataset: &FeatureDataset) -> Result<()> {
        self.shape.validate()?;
        self.episode.validate()?;
        if self.episodes == 0 {
            return Err(Error::InvalidConfig(
                "episode count must be at least 1".into(),
            ));
        }
        self.shape.check_dataset(dataset)?;
        if let Some(w) = &self.episode.fixed_weights {
            if w.len() != dataset.n_heads() {
                return Err(Error::InvalidConfig(format!(
                    "{} fixed weights for {} heads",
                    w.len(),
                    dataset.n_heads()
                )));
            }
        }
        if self.episode.setting == Setting::Semi && self.shape.unlabeled > 0 {
            let pool = self.shape.way * self.shape.unlabeled;
            if let super::Budget::Count(n) = self.episode.pseudo_label_budget {
                if n > pool {
                    return Err(Error::BudgetExceedsPool { budget: n, pool });
                }
            }
        }
        Ok(())
    }
}

/// Draws and solves every episode of `plan` on a pool of `jobs` workers.
/// Episode `i` always uses the stream derived from `(seed, i)`, so the
/// outcome list is identical for any worker count.
pub fn run_episodes(
    dataset: &FeatureDataset,
    plan: &RunPlan,
    jobs: usize,
) -> Result<Vec<EpisodeOutcome>> {
    run_episodes_with(dataset, plan, jobs, Ok)
}

/// [`run_episodes`] with every sampled episode passed through `adapt`
/// before it is solved.
pub fn run_episodes_with<F>(
    dataset: &FeatureDataset,
    plan: &RunPlan,
    jobs: usize,
    adapt: F,
) -> Result<Vec<EpisodeOutcome>>
where
    F: Fn(Episode) -> Result<Episode> + Sync,
{
    plan.validate(dataset)?;
    let solve = |i: usize| {
        let ep = sample_episode(dataset, &plan.shape, &mut episode_rng(plan.seed, i))?;
        run_episode(dataset, &adapt(ep)?, &plan.episode)
    };
    if jobs <= 1 {
        return (0..plan.episodes).map(solve).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(|| (0..plan.episodes).into_par_iter().map(solve).collect())
}

/// [`run_episodes`] followed by aggregation; the summary echoes `plan`.
pub fn evaluate(dataset: &FeatureDataset, plan: &RunPlan, jobs: usize) -> Result<RunSummary> {
    let start = Instant::now();
    let outcomes = run_episodes(dataset, plan, jobs)?;
    let accuracies: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
    let mut summary = aggregate(&accuracies)?;
    summary.config = serde_json::to_value(plan)?;
    summary.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}
