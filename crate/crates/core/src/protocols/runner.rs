//! Per-episode solvers for the inductive, semi-supervised and transductive
//! settings.
//!
//! All three share one skeleton. The subspace transform is fit once on every
//! feature the setting may see. Then, in a loop, per-head losses give the
//! head weights, the weighted concatenation trains the collaborative
//! classifier, and (when a pseudo-label pool exists) the single most
//! confident pool sample joins the support set. The classifier from the last
//! round labels the queries.

use serde::{Deserialize, Serialize};

use super::config::{Budget, EpisodeConfig, Setting};
use super::episode::Episode;
use crate::attention::{head_loss, solve_weights, HeadLossVector};
use crate::dataio::FeatureDataset;
use crate::error::{Error, Result};
use crate::fusion::{classify, collaborate, fit_collaborative, CollaborativeFeatures};
use crate::numerics::{Matrix, SimplexVector};
use crate::ridge::{predict_labels, predict_scores, OneHotLabels, RidgeClassifier};
use crate::subspace::{expand_heads, fit_transform, split_heads, SubspaceMethod};

/// One absorbed pseudo-label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoLabel {
    /// Dataset sample index.
    pub index: usize,
    pub class: usize,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub accuracy: f64,
    /// Predicted episode label for every query, in `Episode::query_idx` order.
    pub predictions: Vec<usize>,
    /// Head weights of the final classifier.
    pub weights: SimplexVector,
    pub pseudo_labels: Vec<PseudoLabel>,
}

/// Column layout of the features an episode run works on: `samples` lists
/// dataset indices, the other vectors are positions into it.
struct Workspace {
    samples: Vec<usize>,
    support: Vec<usize>,
    pool: Vec<usize>,
    query: Vec<usize>,
}

impl Workspace {
    fn new(ep: &Episode, use_unlabeled: bool, pool_is_query: bool) -> Self {
        let mut samples = ep.support_idx.clone();
        let support: Vec<usize> = (0..samples.len()).collect();
        let mut pool = Vec::new();
        if use_unlabeled {
            pool.extend(samples.len()..samples.len() + ep.unlabeled_idx.len());
            samples.extend_from_slice(&ep.unlabeled_idx);
        }
        let query: Vec<usize> = (samples.len()..samples.len() + ep.query_idx.len()).collect();
        samples.extend_from_slice(&ep.query_idx);
        if pool_is_query {
            pool = query.clone();
        }
        Self {
            samples,
            support,
            pool,
            query,
        }
    }
}

/// Per-head transformed features `Pʰ`, `dim2 × samples`, fit jointly over
/// all heads.
pub fn transformed_heads(
    dataset: &FeatureDataset,
    samples: &[usize],
    cfg: &EpisodeConfig,
) -> Result<Vec<Matrix>> {
    let raw: Vec<Matrix> = (0..dataset.n_heads())
        .map(|h| {
            let x = dataset.head_columns(h, samples);
            if cfg.unit_norm {
                unit_columns(&x)
            } else {
                x
            }
        })
        .collect();
    if cfg.subspace.method == SubspaceMethod::None {
        return Ok(raw);
    }
    let expanded = expand_heads(&raw)?;
    let (_, embedding) = fit_transform(&expanded, &cfg.subspace)?;
    split_heads(&embedding, raw.len(), samples.len())
}

fn unit_columns(x: &Matrix) -> Matrix {
    let norms: Vec<f64> = (0..x.cols())
        .map(|j| {
            (0..x.rows())
                .map(|i| x[(i, j)] * x[(i, j)])
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Matrix::from_fn(x.rows(), x.cols(), |i, j| {
        if norms[j] > 0.0 {
            x[(i, j)] / norms[j]
        } else {
            0.0
        }
    })
}

fn select(heads: &[Matrix], cols: &[usize]) -> Vec<Matrix> {
    heads.iter().map(|p| p.select_columns(cols)).collect()
}

/// Head weights from the support losses (or the configured fixed weights),
/// then the collaborative classifier on the weighted support features.
pub fn fit_round(
    heads_support: &[Matrix],
    labels: &OneHotLabels,
    cfg: &EpisodeConfig,
) -> Result<(SimplexVector, RidgeClassifier)> {
    let omega = match &cfg.fixed_weights {
        Some(w) if w.len() != heads_support.len() => {
            return Err(Error::HeadCountMismatch {
                expected: heads_support.len(),
                got: w.len(),
            })
        }
        Some(w) => w.clone(),
        None => {
            let losses = heads_support
                .iter()
                .map(|p| head_loss(p, labels, cfg.mu))
                .collect::<Result<Vec<_>>>()?;
            solve_weights(&HeadLossVector::new(losses, cfg.eta)?)?
        }
    };
    let z = collaborate(heads_support, &omega)?;
    let clf = fit_collaborative(&z, labels, cfg.mu)?;
    Ok((omega, clf))
}

struct Trained {
    omega: SimplexVector,
    clf: RidgeClassifier,
    trace: Vec<PseudoLabel>,
}

/// Alternates fitting and absorbing the most confident pool sample until
/// `limit` labels are absorbed, the pool runs dry, or the best score falls
/// under the confidence floor.
fn self_train(
    heads: &[Matrix],
    ws: &Workspace,
    mut labels: OneHotLabels,
    limit: usize,
    cfg: &EpisodeConfig,
) -> Result<Trained> {
    let mut support = ws.support.clone();
    let mut pool = ws.pool.clone();
    let mut trace = Vec::with_capacity(limit);
    loop {
        let (omega, clf) = fit_round(&select(heads, &support), &labels, cfg)?;
        if trace.len() >= limit || pool.is_empty() {
            return Ok(Trained { omega, clf, trace });
        }
        let z_pool = collaborate(&select(heads, &pool), &omega)?;
        let scores = predict_scores(&clf, &z_pool.matrix)?;
        let (best, confidence) = most_confident(&scores);
        if cfg.confidence_floor.is_some_and(|floor| confidence < floor) {
            return Ok(Trained { omega, clf, trace });
        }
        let class = predict_labels(&scores.select_columns(&[best]))[0];
        let position = pool.remove(best);
        support.push(position);
        labels.push(class)?;
        trace.push(PseudoLabel {
            index: ws.samples[position],
            class,
            confidence,
        });
    }
}

/// Pool column with the highest maximum class score; ties keep the lowest
/// column.
fn most_confident(scores: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for n in 0..scores.cols() {
        let top = (0..scores.rows())
            .map(|c| scores[(c, n)])
            .fold(f64::NEG_INFINITY, f64::max);
        if top > best.1 {
            best = (n, top);
        }
    }
    best
}

fn finish(
    heads: &[Matrix],
    ws: &Workspace,
    ep: &Episode,
    trained: Trained,
) -> Result<EpisodeOutcome> {
    let z_query: CollaborativeFeatures = collaborate(&select(heads, &ws.query), &trained.omega)?;
    let (_, predictions) = classify(&trained.clf, &z_query)?;
    let correct = predictions
        .iter()
        .zip(&ep.query_labels)
        .filter(|(p, t)| p == t)
        .count();
    Ok(EpisodeOutcome {
        accuracy: correct as f64 / ep.query_labels.len() as f64,
        predictions,
        weights: trained.omega,
        pseudo_labels: trained.trace,
    })
}

fn run(
    dataset: &FeatureDataset,
    ep: &Episode,
    cfg: &EpisodeConfig,
    ws: Workspace,
    limit: usize,
) -> Result<EpisodeOutcome> {
    cfg.validate()?;
    let heads = transformed_heads(dataset, &ws.samples, cfg)?;
    let labels = OneHotLabels::new(ep.support_labels.clone(), ep.shape.way)?;
    let trained = self_train(&heads, &ws, labels, limit, cfg)?;
    finish(&heads, &ws, ep, trained)
}

/// Support-only classifier; the transform still sees support and query
/// features together.
pub fn run_inductive(
    dataset: &FeatureDataset,
    ep: &Episode,
    cfg: &EpisodeConfig,
) -> Result<EpisodeOutcome> {
    run(dataset, ep, cfg, Workspace::new(ep, false, false), 0)
}

/// Self-training over the episode's unlabeled pool. An empty pool reduces to
/// [`run_inductive`].
pub fn run_semi(
    dataset: &FeatureDataset,
    ep: &Episode,
    cfg: &EpisodeConfig,
) -> Result<EpisodeOutcome> {
    let pool = ep.unlabeled_idx.len();
    if pool == 0 {
        return run_inductive(dataset, ep, cfg);
    }
    if let Budget::Count(n) = cfg.pseudo_label_budget {
        if n > pool {
            return Err(Error::BudgetExceedsPool { budget: n, pool });
        }
    }
    let limit = cfg.pseudo_label_budget.limit(pool);
    run(dataset, ep, cfg, Workspace::new(ep, true, false), limit)
}

/// Self-training with the query set itself as the pseudo-label pool. Every
/// query is still labelled by the final classifier.
pub fn run_transductive(
    dataset: &FeatureDataset,
    ep: &Episode,
    cfg: &EpisodeConfig,
) -> Result<EpisodeOutcome> {
    let limit = cfg.pseudo_label_budget.limit(ep.query_idx.len());
    run(dataset, ep, cfg, Workspace::new(ep, false, true), limit)
}

pub fn run_episode(
    dataset: &FeatureDataset,
    ep: &Episode,
    cfg: &EpisodeConfig,
) -> Result<EpisodeOutcome> {
    match cfg.setting {
        Setting::Inductive => run_inductive(dataset, ep, cfg),
        Setting::Semi => run_semi(dataset, ep, cfg),
        Setting::Transductive => run_transductive(dataset, ep, cfg),
    }
}

/// Collaborative features of the support and query samples as seen by the
/// final classifier, support first.
pub fn fused_features(
    dataset: &FeatureDataset,
    ep: &Episode,
    cfg: &EpisodeConfig,
) -> Result<(CollaborativeFeatures, Vec<usize>)> {
    let ws = Workspace::new(ep, false, false);
    let heads = transformed_heads(dataset, &ws.samples, cfg)?;
    let labels = OneHotLabels::new(ep.support_labels.clone(), ep.shape.way)?;
    let (omega, _) = fit_round(&select(&heads, &ws.support), &labels, cfg)?;
    let mut cols = ws.support.clone();
    cols.extend_from_slice(&ws.query);
    let z = collaborate(&select(&heads, &cols), &omega)?;
    let samples = cols.iter().map(|&c| ws.samples[c]).collect();
    Ok((z, samples))
}
