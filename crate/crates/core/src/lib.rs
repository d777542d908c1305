//! User embedding from URL-domain co-occurrence networks.
//!
//! The pipeline: parse retweets, build a co-occurrence network over the
//! domains each user shares, embed the network with node2vec, assemble
//! per-user vectors and train a two-layer classifier against reference labels
//! obtained by Louvain clustering of the retweet network.

pub mod community;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
mod linalg;
pub mod model;
pub mod node2vec;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
