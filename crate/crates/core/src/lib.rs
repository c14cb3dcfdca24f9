//! Multi-head feature collaboration for few-shot classification.
//!
//! Given several independently extracted embeddings ("heads") of the same
//! samples, an episode is solved by
//!
//! 1. jointly reducing all heads into one low-dimensional space
//!    ([`subspace`]),
//! 2. weighting each head by how well a ridge classifier fits its support
//!    features ([`attention`]),
//! 3. concatenating the weighted heads and fitting one ridge classifier on the
//!    result ([`fusion`], [`ridge`]).
//!
//! [`protocols`] wraps this into inductive, semi-supervised (self-training)
//! and transductive evaluation over sampled episodes, and [`dataio`] handles
//! feature files and a seeded synthetic generator.

pub mod attention;
pub mod dataio;
mod error;
pub mod fusion;
pub mod numerics;
pub mod protocols;
pub mod ridge;
pub mod subspace;

pub use error::{Error, Result};
