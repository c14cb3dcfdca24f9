use std::fs;
use std::io::Write;

use clap::ValueEnum;
use mhfc::dataio::FeatureDataset;
use mhfc::numerics::SimplexVector;
use mhfc::protocols::{
    aggregate, run_episodes_with, Episode, EpisodeConfig, RunPlan, RunSummary, Setting,
};
use mhfc::subspace::SubspaceMethod;
use mhfc::{Error, Result};

use crate::AblateCmd;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    /// Each head alone against the fused heads.
    Heads,
    /// No transform, PCA, LLE and LE.
    Subspace,
    /// Fixed two-head weight grid against learned weights.
    Weights,
    /// Size of the unlabeled pool in the semi-supervised setting.
    Unlabeled,
    /// Strength of the weight regularizer.
    Eta,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Heads => "heads",
            Mode::Subspace => "subspace",
            Mode::Weights => "weights",
            Mode::Unlabeled => "unlabeled",
            Mode::Eta => "eta",
        }
    }
}

pub const WEIGHT_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const UNLABELED_GRID: [usize; 5] = [0, 10, 20, 40, 80];
pub const ETA_GRID: [f64; 8] = [0.01, 0.1, 0.5, 1.0, 1.4, 2.0, 5.0, 10.0];

struct Variant {
    label: String,
    dataset: Option<FeatureDataset>,
    config: EpisodeConfig,
    unlabeled: Option<usize>,
}

impl Variant {
    fn new(label: impl Into<String>, config: EpisodeConfig) -> Self {
        Self {
            label: label.into(),
            dataset: None,
            config,
            unlabeled: None,
        }
    }
}

fn variants(
    mode: Mode,
    dataset: &FeatureDataset,
    base: &EpisodeConfig,
    max_unlabeled: usize,
) -> Result<Vec<Variant>> {
    let mut out = Vec::new();
    match mode {
        Mode::Heads => {
            for (h, name) in dataset.head_names().iter().enumerate() {
                let mut v = Variant::new(
                    format!("head:{name}"),
                    EpisodeConfig {
                        fixed_weights: None,
                        ..base.clone()
                    },
                );
                v.dataset = Some(dataset.select_heads(&[h])?);
                out.push(v);
            }
            out.push(Variant::new("fused", base.clone()));
        }
        Mode::Subspace => {
            for method in SubspaceMethod::ALL {
                let mut cfg = base.clone();
                cfg.subspace.method = method;
                out.push(Variant::new(method.to_string(), cfg));
            }
        }
        Mode::Weights => {
            if dataset.n_heads() != 2 {
                return Err(Error::InvalidConfig(format!(
                    "the weight grid needs exactly 2 heads, the dataset has {}",
                    dataset.n_heads()
                )));
            }
            for w in WEIGHT_GRID {
                let pair = SimplexVector::new(vec![w, 1.0 - w])?;
                let label = format!("{w:.1}/{:.1}", 1.0 - w);
                out.push(Variant::new(
                    label,
                    EpisodeConfig {
                        fixed_weights: Some(pair),
                        ..base.clone()
                    },
                ));
            }
            out.push(Variant::new(
                "learned",
                EpisodeConfig {
                    fixed_weights: None,
                    ..base.clone()
                },
            ));
        }
        Mode::Unlabeled => {
            let cfg = EpisodeConfig {
                setting: Setting::Semi,
                ..base.clone()
            };
            for u in UNLABELED_GRID.into_iter().filter(|&u| u <= max_unlabeled) {
                let mut v = Variant::new(u.to_string(), cfg.clone());
                v.unlabeled = Some(u);
                out.push(v);
            }
        }
        Mode::Eta => {
            for eta in ETA_GRID {
                out.push(Variant::new(
                    eta.to_string(),
                    EpisodeConfig {
                        eta,
                        ..base.clone()
                    },
                ));
            }
        }
    }
    Ok(out)
}

fn evaluate_variant(
    dataset: &FeatureDataset,
    plan: &RunPlan,
    v: &Variant,
    jobs: usize,
) -> Result<RunSummary> {
    let data = v.dataset.as_ref().unwrap_or(dataset);
    let plan = RunPlan {
        episode: v.config.clone(),
        ..plan.clone()
    };
    let outcomes = match v.unlabeled {
        Some(u) => run_episodes_with(data, &plan, jobs, |ep: Episode| ep.keep_unlabeled(u))?,
        None => run_episodes_with(data, &plan, jobs, Ok)?,
    };
    let accuracies: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
    aggregate(&accuracies)
}

pub fn run(cmd: AblateCmd) -> Result<()> {
    let base = cmd.episode.config()?;
    let (dataset, _) = cmd.data.load()?;
    let mut shape = cmd.episode.shape();

    // the pool sweep draws every episode once at the largest pool and trims it
    let smallest = dataset
        .classes()
        .map(|c| dataset.class_samples(c).len())
        .min()
        .unwrap_or(0);
    let max_unlabeled = smallest.saturating_sub(shape.shot + shape.query);
    if let Mode::Unlabeled = cmd.mode {
        shape.unlabeled = UNLABELED_GRID
            .into_iter()
            .filter(|&u| u <= max_unlabeled)
            .max()
            .unwrap_or(0);
        if shape.unlabeled < UNLABELED_GRID[UNLABELED_GRID.len() - 1] {
            eprintln!("warning: classes hold at most {max_unlabeled} unlabeled samples; larger pools skipped");
        }
    }
    let plan = RunPlan {
        shape,
        episodes: cmd.sweep.episodes,
        seed: cmd.sweep.seed,
        episode: base.clone(),
    };
    plan.validate(&dataset)?;

    let mut table = String::from("mode,variant,mean_accuracy,ci95,n_episodes\n");
    for v in variants(cmd.mode, &dataset, &base, max_unlabeled)? {
        let s = evaluate_variant(&dataset, &plan, &v, cmd.sweep.jobs)?;
        eprintln!(
            "{:>10}: {:.2}% +/- {:.2}%",
            v.label,
            100.0 * s.mean_accuracy,
            100.0 * s.ci95
        );
        table.push_str(&format!(
            "{},{},{},{},{}\n",
            cmd.mode.name(),
            v.label,
            s.mean_accuracy,
            s.ci95,
            s.n_episodes
        ));
    }
    match &cmd.output {
        Some(path) => fs::write(path, table)?,
        None => std::io::stdout().write_all(table.as_bytes())?,
    }
    Ok(())
}
