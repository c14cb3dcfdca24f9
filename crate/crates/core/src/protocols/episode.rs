use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataio::FeatureDataset;
use crate::error::{Error, Result};

/// C-way T-shot episode geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeShape {
    pub way: usize,
    pub shot: usize,
    pub query: usize,
    pub unlabeled: usize,
}

impl Default for EpisodeShape {
    fn default() -> Self {
        Self {
            way: 5,
            shot: 1,
            query: 15,
            unlabeled: 0,
        }
    }
}

impl EpisodeShape {
    pub fn per_class(&self) -> usize {
        self.shot + self.unlabeled + self.query
    }

    pub fn validate(&self) -> Result<()> {
        if self.way < 2 || self.shot == 0 || self.query == 0 {
            return Err(Error::InvalidConfig(format!(
                "episodes need way >= 2, shot >= 1 and query >= 1 (got {}-way {}-shot, {} query)",
                self.way, self.shot, self.query
            )));
        }
        Ok(())
    }

    /// Checks that every class of `dataset` can fill an episode of this shape.
    pub fn check_dataset(&self, dataset: &FeatureDataset) -> Result<()> {
        if dataset.n_classes() < self.way {
            return Err(Error::InsufficientClasses {
                available: dataset.n_classes(),
                needed: self.way,
            });
        }
        for class in dataset.classes() {
            let available = dataset.class_samples(class).len();
            if available < self.per_class() {
                return Err(Error::InsufficientSamples {
                    class,
                    available,
                    needed: self.per_class(),
                });
            }
        }
        Ok(())
    }
}

/// Disjoint support / unlabeled / query draws into a dataset. Labels of the
/// unlabeled draws are deliberately not recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Episode {
    pub shape: EpisodeShape,
    /// Dataset class id behind each episode label `0..way`.
    pub classes: Vec<i64>,
    pub support_idx: Vec<usize>,
    pub support_labels: Vec<usize>,
    pub unlabeled_idx: Vec<usize>,
    pub query_idx: Vec<usize>,
    pub query_labels: Vec<usize>,
}

impl Episode {
    /// The same episode with only the first `per_class` unlabeled draws of
    /// each class kept. Support and query are untouched, which keeps sweeps
    /// over the pool size paired.
    pub fn keep_unlabeled(&self, per_class: usize) -> Result<Episode> {
        let have = self.shape.unlabeled;
        if per_class > have {
            return Err(Error::InvalidConfig(format!(
                "cannot keep {per_class} unlabeled samples per class out of {have}"
            )));
        }
        let unlabeled_idx = self
            .unlabeled_idx
            .chunks(have.max(1))
            .flat_map(|c| c[..per_class.min(c.len())].iter().copied())
            .collect();
        Ok(Episode {
            shape: EpisodeShape {
                unlabeled: per_class,
                ..self.shape
            },
            unlabeled_idx,
            ..self.clone()
        })
    }
}

/// Random stream for episode `index` of a run seeded with `seed`.
pub fn episode_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draws `way` classes without replacement, then `shot + unlabeled + query`
/// samples per class without replacement, split in draw order.
pub fn sample_episode(
    dataset: &FeatureDataset,
    shape: &EpisodeShape,
    rng: &mut ChaCha8Rng,
) -> Result<Episode> {
    shape.validate()?;
    let all: Vec<i64> = dataset.classes().collect();
    if all.len() < shape.way {
        return Err(Error::InsufficientClasses {
            available: all.len(),
            needed: shape.way,
        });
    }
    let chosen: Vec<i64> = index::sample(rng, all.len(), shape.way)
        .iter()
        .map(|i| all[i])
        .collect();

    let mut ep = Episode {
        shape: *shape,
        classes: chosen.clone(),
        support_idx: Vec::with_capacity(shape.way * shape.shot),
        support_labels: Vec::with_capacity(shape.way * shape.shot),
        unlabeled_idx: Vec::with_capacity(shape.way * shape.unlabeled),
        query_idx: Vec::with_capacity(shape.way * shape.query),
        query_labels: Vec::with_capacity(shape.way * shape.query),
    };
    for (label, &class) in chosen.iter().enumerate() {
        let members = dataset.class_samples(class);
        if members.len() < shape.per_class() {
            return Err(Error::InsufficientSamples {
                class,
                available: members.len(),
                needed: shape.per_class(),
            });
        }
        let draw: Vec<usize> = index::sample(rng, members.len(), shape.per_class())
            .iter()
            .map(|i| members[i])
            .collect();
        let (support, rest) = draw.split_at(shape.shot);
        let (unlabeled, query) = rest.split_at(shape.unlabeled);
        ep.support_idx.extend_from_slice(support);
        ep.support_labels
            .extend(std::iter::repeat_n(label, shape.shot));
        ep.unlabeled_idx.extend_from_slice(unlabeled);
        ep.query_idx.extend_from_slice(query);
        ep.query_labels
            .extend(std::iter::repeat_n(label, shape.query));
    }
    Ok(ep)
}
