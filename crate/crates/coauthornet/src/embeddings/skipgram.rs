//! Skip-gram training on walk co-occurrence with negative sampling.
//!
//! The exact objective sums a per-node partition function over the whole
//! vocabulary, which is intractable to optimize directly; training instead
//! ascends the standard negative-sampling surrogate. For each observed
//! `(center, context)` pair the surrogate is
//!
//! ```text
//! log σ(w_in[u]·w_out[c]) + Σ_{j=1..m} log σ(−w_in[u]·w_out[n_j])
//! ```
//!
//! with negatives drawn from the corpus unigram distribution raised to the
//! power 0.75. Gradients are hand-derived and verified against central
//! differences in the `verify` module.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::nn::Tensor2D;
use crate::seed;

use super::alias::AliasTable;
use super::walks::WalkCorpus;
use super::{surrogate_dscore, surrogate_loss, EmbeddingMatrix};

#[derive(Debug, Clone, Copy)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate; decays linearly to 1e-4 of itself over all
    /// pair visits.
    pub lr: f64,
    /// Context window applied when the trainer builds its own pairs.
    pub window: usize,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 128,
            negatives: 5,
            epochs: 5,
            lr: 0.025,
            window: 10,
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config("negative sample count must be positive".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Input (embedding) and output (context) tables, both `|V| × d`.
#[derive(Debug, Clone)]
pub struct SkipGramParams {
    pub w_in: Tensor2D,
    pub w_out: Tensor2D,
}

impl SkipGramParams {
    pub fn init(n: usize, dim: usize, master_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "skipgram/init"));
        SkipGramParams {
            w_in: Tensor2D::xavier_uniform(n, dim, &mut rng),
            w_out: Tensor2D::xavier_uniform(n, dim, &mut rng),
        }
    }

    pub fn embeddings(&self) -> EmbeddingMatrix {
        EmbeddingMatrix::from_dense(self.w_in.cols(), self.w_in.as_slice().to_vec())
            .expect("well-formed parameter table")
    }
}

/// Alias table over corpus token counts raised to the power 0.75. Nodes that
/// never occur in the corpus get weight zero and are never drawn.
pub fn negative_table(corpus: &WalkCorpus, n: usize) -> AliasTable {
    let mut counts = vec![0.0f64; n];
    for walk in corpus.walks() {
        for &tok in walk {
            counts[tok as usize] += 1.0;
        }
    }
    let weights: Vec<f64> = counts.iter().map(|c| c.powf(0.75)).collect();
    AliasTable::new(&weights)
}

/// One SGD step on a single `(center, context)` pair with the given
/// negatives. Returns the surrogate loss before the update.
///
/// The center gradient is accumulated against the pre-update context rows
/// and applied once at the end, word2vec style.
pub(crate) fn sgd_pair(
    params: &mut SkipGramParams,
    center: NodeId,
    context: NodeId,
    negatives: &[NodeId],
    lr: f64,
) -> f64 {
    let dim = params.w_in.cols();
    let mut center_grad = vec![0.0; dim];
    let u = params.w_in.row(center as usize).to_vec();
    let mut loss = 0.0;
    for (idx, &target) in std::iter::once(&context).chain(negatives).enumerate() {
        let positive = idx == 0;
        let row = params.w_out.row_mut(target as usize);
        let score: f64 = u.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
        loss += surrogate_loss(score, positive);
        let g = surrogate_dscore(score, positive);
        for (cg, r) in center_grad.iter_mut().zip(row.iter()) {
            *cg += g * r;
        }
        for (r, ui) in row.iter_mut().zip(&u) {
            *r -= lr * g * ui;
        }
    }
    let u_row = params.w_in.row_mut(center as usize);
    for (ui, cg) in u_row.iter_mut().zip(&center_grad) {
        *ui -= lr * cg;
    }
    loss
}

/// Train skip-gram embeddings over a walk corpus on a graph with `n` nodes.
/// Returns the input-table rows as node embeddings along with both tables.
pub fn train_skipgram(
    corpus: &WalkCorpus,
    n: usize,
    cfg: &SkipGramConfig,
    master_seed: u64,
) -> Result<(EmbeddingMatrix, SkipGramParams)> {
    let pairs = super::build_cooccurrence(corpus, cfg.window.max(1));
    train_skipgram_pairs(&pairs, corpus, n, cfg, master_seed)
}

/// Train on explicit `(center, context)` pairs (callers usually produce them
/// with [`super::build_cooccurrence`] under their configured window).
pub fn train_skipgram_pairs(
    pairs: &[(NodeId, NodeId)],
    corpus: &WalkCorpus,
    n: usize,
    cfg: &SkipGramConfig,
    master_seed: u64,
) -> Result<(EmbeddingMatrix, SkipGramParams)> {
    cfg.validate()?;
    if corpus.is_empty() || n == 0 {
        return Err(Error::Config("skip-gram needs a non-empty walk corpus".into()));
    }
    let mut params = SkipGramParams::init(n, cfg.dim, master_seed);
    if pairs.is_empty() {
        return Ok((params.embeddings(), params));
    }
    let table = negative_table(corpus, n);
    let mut neg_rng =
        ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "skipgram/negatives"));
    let total = (cfg.epochs * pairs.len()) as f64;
    let mut visited = 0.0f64;
    let mut negs = vec![0 as NodeId; cfg.negatives];
    for _epoch in 0..cfg.epochs {
        for &(center, context) in pairs {
            let lr = cfg.lr * (1.0 - visited / total).max(1e-4);
            for slot in negs.iter_mut() {
                *slot = table.sample(&mut neg_rng) as NodeId;
            }
            sgd_pair(&mut params, center, context, &negs, lr);
            visited += 1.0;
        }
    }
    Ok((params.embeddings(), params))
}
