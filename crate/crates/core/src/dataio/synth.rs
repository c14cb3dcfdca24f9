//! Seeded multi-head feature generator.
//!
//! Every sample has one latent point `z = μ_c + ε` (class mean plus shared
//! noise). Head `h` observes it through its own random rotation `Q_h`, after
//! adding a head-private deviation, and offsets the result:
//!
//! ```text
//! x_h = Q_h (z + head_shift · ξ_h) + b_h,   b_h = head_shift · g_h
//! ```
//!
//! with `ε ~ N(0, noise_sigma² I)`, `ξ_h, g_h ~ N(0, I)` and
//! `μ_c ~ N(0, class_separation² I)`. `head_shift` therefore controls how far
//! each head drifts from the latent truth, and at `head_shift = 0` all heads
//! are exact isometric copies of each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::FeatureDataset;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_classes: usize,
    pub samples_per_class: usize,
    pub raw_dim: usize,
    pub n_heads: usize,
    pub class_separation: f64,
    pub head_shift: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_classes: 20,
            samples_per_class: 100,
            raw_dim: 64,
            n_heads: 2,
            class_separation: 1.0,
            head_shift: 0.8,
            noise_sigma: 0.6,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_classes", self.n_classes),
            ("samples_per_class", self.samples_per_class),
            ("raw_dim", self.raw_dim),
            ("n_heads", self.n_heads),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
        }
        let scales = [
            ("class_separation", self.class_separation),
            ("head_shift", self.head_shift),
            ("noise_sigma", self.noise_sigma),
        ];
        if let Some((name, v)) = scales.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "{name} must be finite and >= 0, got {v}"
            )));
        }
        Ok(())
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Haar-random orthogonal matrix: Gram-Schmidt on a Gaussian matrix.
fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let mut q = Matrix::from_vec_unchecked(d, d, gaussian(rng, d * d, 1.0));
    // orthonormalize rows
    for i in 0..d {
        for j in 0..i {
            let dot: f64 = q.row(i).iter().zip(q.row(j)).map(|(a, b)| a * b).sum();
            let prev = q.row(j).to_vec();
            for (a, b) in q.row_mut(i).iter_mut().zip(&prev) {
                *a -= dot * b;
            }
        }
        let norm = q.row(i).iter().map(|a| a * a).sum::<f64>().sqrt();
        q.row_mut(i).iter_mut().for_each(|a| *a /= norm);
    }
    q
}

pub fn generate_synthetic(cfg: &SynthConfig) -> Result<FeatureDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.raw_dim;
    let n = cfg.n_classes * cfg.samples_per_class;

    let means: Vec<Vec<f64>> = (0..cfg.n_classes)
        .map(|_| gaussian(&mut rng, d, cfg.class_separation))
        .collect();
    let views: Vec<(Matrix, Vec<f64>)> = (0..cfg.n_heads)
        .map(|_| {
            let q = random_orthogonal(&mut rng, d);
            let b = gaussian(&mut rng, d, cfg.head_shift);
            (q, b)
        })
        .collect();

    let mut labels = Vec::with_capacity(n);
    let mut latent = Vec::with_capacity(n);
    for (c, mean) in means.iter().enumerate() {
        for _ in 0..cfg.samples_per_class {
            let noise = gaussian(&mut rng, d, cfg.noise_sigma);
            latent.push(
                mean.iter()
                    .zip(noise)
                    .map(|(m, e)| m + e)
                    .collect::<Vec<f64>>(),
            );
            labels.push(c as i64);
        }
    }

    let mut heads = Vec::with_capacity(cfg.n_heads);
    for (q, b) in &views {
        let mut x = Matrix::zeros(n, d);
        for (i, z) in latent.iter().enumerate() {
            let deviation = gaussian(&mut rng, d, cfg.head_shift);
            let seen: Vec<f64> = z.iter().zip(&deviation).map(|(a, e)| a + e).collect();
            for (r, out) in x.row_mut(i).iter_mut().enumerate() {
                *out = q.row(r).iter().zip(&seen).map(|(a, s)| a * s).sum::<f64>() + b[r];
            }
        }
        heads.push(x);
    }
    let names = (0..cfg.n_heads).map(|h| format!("synthetic-{h}")).collect();
    FeatureDataset::new(heads, labels, names)
}
