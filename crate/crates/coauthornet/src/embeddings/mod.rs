//! Unsupervised node representation learners for the citation graph.
//!
//! Three families share the walk machinery in [`walks`]:
//!
//! * [`train_skipgram`] — free embedding table trained on walk co-occurrence
//!   with negative sampling (the classic biased-walk setup).
//! * [`train_attri2vec`] — maps node attributes through a dense sigmoid layer
//!   into the embedding space and trains the map on the same objective.
//! * [`sage`] — neighborhood-aggregating convolution (mean or max-pool),
//!   trained unsupervised on walk co-occurrence.
//!
//! All trainers are bit-reproducible for a fixed (graph, config, seed).

pub mod alias;
pub mod attri2vec;
pub mod sage;
pub mod skipgram;
pub mod walks;

pub use attri2vec::{train_attri2vec, Attri2VecParams};
pub use sage::{
    sage_forward, train_sage_unsupervised, Aggregator, NeighborhoodPlan, SageConfig, SageParams,
};
pub use skipgram::{train_skipgram, train_skipgram_pairs, SkipGramParams};
pub use walks::{build_cooccurrence, generate_walks, WalkConfig, WalkCorpus};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Map from node id to a dense real vector of fixed dimension. Rows may be
/// missing: a pretrained or filtered table need not cover every node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(dim: usize) -> Self {
        EmbeddingMatrix {
            dim,
            ids: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        }
    }

    /// Dense storage covering ids `0..rows` in order.
    pub fn from_dense(dim: usize, rows: Vec<f64>) -> Result<Self> {
        if dim == 0 || rows.len() % dim != 0 {
            return Err(Error::Dimension(format!(
                "dense embedding storage of length {} is not a multiple of dim {dim}",
                rows.len()
            )));
        }
        let n = rows.len() / dim;
        let ids: Vec<NodeId> = (0..n as NodeId).collect();
        let index = ids.iter().map(|&id| (id, id as usize)).collect();
        Ok(EmbeddingMatrix {
            dim,
            ids,
            index,
            data: rows,
        })
    }

    pub fn insert(&mut self, id: NodeId, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Dimension(format!(
                "embedding for node {id} has dimension {}, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if let Some(&slot) = self.index.get(&id) {
            self.data[slot * self.dim..(slot + 1) * self.dim].copy_from_slice(vector);
        } else {
            self.index.insert(id, self.ids.len());
            self.ids.push(id);
            self.data.extend_from_slice(vector);
        }
        Ok(())
    }

    pub fn get(&self, id: NodeId) -> Option<&[f64]> {
        self.index
            .get(&id)
            .map(|&slot| &self.data[slot * self.dim..(slot + 1) * self.dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Ids in insertion order.
    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &[f64])> {
        self.ids
            .iter()
            .enumerate()
            .map(move |(slot, &id)| (id, &self.data[slot * self.dim..(slot + 1) * self.dim]))
    }
}

/// Loss of one scored pair under the negative-sampling surrogate:
/// `-log σ(s)` for an observed pair, `-log σ(-s)` for a sampled negative.
pub(crate) fn surrogate_loss(score: f64, positive: bool) -> f64 {
    if positive {
        -crate::nn::log_sigmoid(score)
    } else {
        -crate::nn::log_sigmoid(-score)
    }
}

/// Derivative of [`surrogate_loss`] with respect to the score.
pub(crate) fn surrogate_dscore(score: f64, positive: bool) -> f64 {
    if positive {
        crate::nn::sigmoid(score) - 1.0
    } else {
        crate::nn::sigmoid(score)
    }
}

/// Cosine similarity; zero vectors compare as 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}
