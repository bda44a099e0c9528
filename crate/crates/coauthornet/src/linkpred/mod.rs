//! Supervised collaboration prediction on the co-authorship graph.
//!
//! Author features are the one-hot interest vectors extended with the sum of
//! the author's article embeddings. A two-layer neighborhood-aggregation
//! encoder (see [`crate::embeddings::sage`]) produces author embeddings; a
//! binary operator turns an author pair into a link embedding; a dense
//! classifier maps it to a link probability, trained with binary
//! cross-entropy and Adam.
//!
//! Message passing only ever sees train-partition edges. Validation and test
//! edges are prediction targets, never graph structure, so evaluation cannot
//! leak through the adjacency.

pub mod checkpoint;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embeddings::sage::{
    sage_backward_plan, sage_forward_plan, NeighborhoodPlan, SageConfig, SageParams,
};
use crate::embeddings::{Aggregator, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::eval::{compute_metrics, EdgeSplit, Metrics};
use crate::graph::{build_graph, FeatureMatrix, Graph, NodeId};
use crate::ingest::{AuthorTable, Quartile};
use crate::nn::{sigmoid, Activation, AdamConfig, AdamState, Tensor2D, BCE_EPS};
use crate::seed;

/// Binary operator turning two node embeddings into one link embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkOperator {
    L1,
    L2,
    Hadamard,
    Average,
    InnerProduct,
}

impl LinkOperator {
    pub const ALL: [LinkOperator; 5] = [
        LinkOperator::L1,
        LinkOperator::L2,
        LinkOperator::Hadamard,
        LinkOperator::Average,
        LinkOperator::InnerProduct,
    ];

    /// Output dimension for an input embedding dimension `d`.
    pub fn output_dim(&self, d: usize) -> usize {
        match self {
            LinkOperator::InnerProduct => 1,
            _ => d,
        }
    }

    pub fn tag(&self) -> u32 {
        match self {
            LinkOperator::L1 => 0,
            LinkOperator::L2 => 1,
            LinkOperator::Hadamard => 2,
            LinkOperator::Average => 3,
            LinkOperator::InnerProduct => 4,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.tag() == tag)
    }
}

impl std::fmt::Display for LinkOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LinkOperator::L1 => "L1",
            LinkOperator::L2 => "L2",
            LinkOperator::Hadamard => "Had",
            LinkOperator::Average => "Avg",
            LinkOperator::InnerProduct => "Inner",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for LinkOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(LinkOperator::L1),
            "l2" => Ok(LinkOperator::L2),
            "hadamard" | "had" => Ok(LinkOperator::Hadamard),
            "average" | "avg" => Ok(LinkOperator::Average),
            "innerproduct" | "inner" | "ip" | "dot" => Ok(LinkOperator::InnerProduct),
            other => Err(Error::Config(format!("unknown link operator '{other}'"))),
        }
    }
}

/// Apply a link operator to a pair of equal-length embeddings.
pub fn link_embed(h_u: &[f64], h_v: &[f64], op: LinkOperator) -> Result<Vec<f64>> {
    if h_u.len() != h_v.len() {
        return Err(Error::Dimension(format!(
            "link operator inputs differ: {} vs {}",
            h_u.len(),
            h_v.len()
        )));
    }
    let zip = h_u.iter().zip(h_v);
    Ok(match op {
        LinkOperator::L1 => zip.map(|(a, b)| (a - b).abs()).collect(),
        LinkOperator::L2 => zip.map(|(a, b)| (a - b) * (a - b)).collect(),
        LinkOperator::Hadamard => zip.map(|(a, b)| a * b).collect(),
        LinkOperator::Average => zip.map(|(a, b)| (a + b) / 2.0).collect(),
        LinkOperator::InnerProduct => vec![zip.map(|(a, b)| a * b).sum()],
    })
}

/// Accumulate `∂L/∂h_u` and `∂L/∂h_v` given `∂L/∂e` for `e = op(h_u, h_v)`.
/// The L1 kink uses the `signum` subgradient (0 at exact ties).
pub(crate) fn link_embed_backward(
    h_u: &[f64],
    h_v: &[f64],
    op: LinkOperator,
    d_e: &[f64],
    d_hu: &mut [f64],
    d_hv: &mut [f64],
) {
    match op {
        LinkOperator::L1 => {
            for i in 0..h_u.len() {
                let s = (h_u[i] - h_v[i]).signum() * d_e[i];
                d_hu[i] += s;
                d_hv[i] -= s;
            }
        }
        LinkOperator::L2 => {
            for i in 0..h_u.len() {
                let s = 2.0 * (h_u[i] - h_v[i]) * d_e[i];
                d_hu[i] += s;
                d_hv[i] -= s;
            }
        }
        LinkOperator::Hadamard => {
            for i in 0..h_u.len() {
                d_hu[i] += h_v[i] * d_e[i];
                d_hv[i] += h_u[i] * d_e[i];
            }
        }
        LinkOperator::Average => {
            for i in 0..h_u.len() {
                d_hu[i] += d_e[i] / 2.0;
                d_hv[i] += d_e[i] / 2.0;
            }
        }
        LinkOperator::InnerProduct => {
            for i in 0..h_u.len() {
                d_hu[i] += h_v[i] * d_e[0];
                d_hv[i] += h_u[i] * d_e[0];
            }
        }
    }
}

/// Extend each interest row with the sum of the author's article embeddings.
///
/// Papers absent from the embedding matrix contribute nothing (their count
/// is returned and logged); authors with no embedded papers carry an exact
/// zero block. With `mean_pool` the sum is divided by the number of embedded
/// papers, a scale-robust variant for prolific authors.
pub fn augment_author_features(
    interests: &FeatureMatrix,
    authors: &AuthorTable,
    paper_embeddings: &EmbeddingMatrix,
    mean_pool: bool,
) -> Result<(FeatureMatrix, usize)> {
    if interests.rows() != authors.len() {
        return Err(Error::Consistency(format!(
            "interest matrix covers {} authors, table has {}",
            interests.rows(),
            authors.len()
        )));
    }
    let k = interests.dim();
    let d = paper_embeddings.dim();
    let mut out = FeatureMatrix::zeros(authors.len(), k + d);
    let mut missing = 0usize;
    for author in 0..authors.len() {
        let row = out.row_mut(author);
        row[..k].copy_from_slice(interests.row(author));
        let mut found = 0usize;
        for &paper in authors.papers_of(author as NodeId) {
            match paper_embeddings.get(paper) {
                Some(e) => {
                    found += 1;
                    for (slot, v) in row[k..].iter_mut().zip(e) {
                        *slot += v;
                    }
                }
                None => missing += 1,
            }
        }
        if mean_pool && found > 0 {
            for slot in row[k..].iter_mut() {
                *slot /= found as f64;
            }
        }
    }
    if missing > 0 {
        log::warn!("{missing} paper references had no embedding and were skipped");
    }
    Ok((out, missing))
}

/// Dense classification head: affine map to one logit, optionally through a
/// sigmoid hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub hidden: Option<(Tensor2D, Vec<f64>)>,
    pub w: Vec<f64>,
    pub b: f64,
}

impl Classifier {
    pub fn init(input_dim: usize, hidden_dim: Option<usize>, rng: &mut impl rand::Rng) -> Self {
        match hidden_dim {
            Some(h) => Classifier {
                hidden: Some((Tensor2D::xavier_uniform(h, input_dim, rng), vec![0.0; h])),
                w: Tensor2D::xavier_uniform(1, h, rng).as_slice().to_vec(),
                b: 0.0,
            },
            None => Classifier {
                hidden: None,
                w: Tensor2D::xavier_uniform(1, input_dim, rng).as_slice().to_vec(),
                b: 0.0,
            },
        }
    }

    pub fn input_dim(&self) -> usize {
        match &self.hidden {
            Some((w1, _)) => w1.cols(),
            None => self.w.len(),
        }
    }

    /// Logit plus the hidden activation needed for the backward pass.
    pub(crate) fn forward(&self, e: &[f64]) -> (f64, Option<Vec<f64>>) {
        match &self.hidden {
            Some((w1, b1)) => {
                let mut a = w1.matvec(e);
                for (x, bi) in a.iter_mut().zip(b1) {
                    *x = sigmoid(*x + bi);
                }
                let logit = self.w.iter().zip(&a).map(|(w, x)| w * x).sum::<f64>() + self.b;
                (logit, Some(a))
            }
            None => {
                let logit = self.w.iter().zip(e).map(|(w, x)| w * x).sum::<f64>() + self.b;
                (logit, None)
            }
        }
    }

    pub fn probability(&self, e: &[f64]) -> f64 {
        sigmoid(self.forward(e).0)
    }
}

/// Gradients matching [`Classifier`].
#[derive(Debug, Clone)]
pub(crate) struct ClassifierGrads {
    pub(crate) hidden: Option<(Tensor2D, Vec<f64>)>,
    pub(crate) w: Vec<f64>,
    pub(crate) b: f64,
}

impl ClassifierGrads {
    pub(crate) fn zeros_like(c: &Classifier) -> Self {
        ClassifierGrads {
            hidden: c
                .hidden
                .as_ref()
                .map(|(w1, b1)| (Tensor2D::zeros(w1.rows(), w1.cols()), vec![0.0; b1.len()])),
            w: vec![0.0; c.w.len()],
            b: 0.0,
        }
    }

    /// Accumulate from one sample; returns `∂L/∂e`.
    pub(crate) fn accumulate(
        &mut self,
        c: &Classifier,
        e: &[f64],
        hidden_act: Option<&[f64]>,
        d_logit: f64,
    ) -> Vec<f64> {
        match (&c.hidden, &mut self.hidden, hidden_act) {
            (Some((w1, _)), Some((gw1, gb1)), Some(a)) => {
                let mut d_a = vec![0.0; a.len()];
                for i in 0..a.len() {
                    self.w[i] += d_logit * a[i];
                    d_a[i] = d_logit * c.w[i] * a[i] * (1.0 - a[i]);
                }
                self.b += d_logit;
                gw1.add_outer(&d_a, e, 1.0);
                for (g, da) in gb1.iter_mut().zip(&d_a) {
                    *g += da;
                }
                w1.matvec_t(&d_a)
            }
            _ => {
                for (g, x) in self.w.iter_mut().zip(e) {
                    *g += d_logit * x;
                }
                self.b += d_logit;
                c.w.iter().map(|w| w * d_logit).collect()
            }
        }
    }
}

/// Full link-model parameters: encoder, operator, classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModelParams {
    pub sage: SageParams,
    pub operator: LinkOperator,
    pub classifier: Classifier,
}

impl LinkModelParams {
    pub fn init(
        sage_cfg: SageConfig,
        operator: LinkOperator,
        classifier_hidden: Option<usize>,
        master_seed: u64,
    ) -> Result<Self> {
        let sage = SageParams::init(sage_cfg, master_seed)?;
        let out_dim = *sage.cfg.dims.last().expect("validated dims");
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "linkmodel/classifier"));
        let classifier = Classifier::init(operator.output_dim(out_dim), classifier_hidden, &mut rng);
        Ok(LinkModelParams {
            sage,
            operator,
            classifier,
        })
    }

    /// Named parameter blocks in flat layout order: encoder blocks first,
    /// then classifier blocks.
    pub fn blocks(&self) -> Vec<(String, std::ops::Range<usize>)> {
        let mut blocks = self.sage.blocks();
        let mut at = blocks.last().map_or(0, |(_, r)| r.end);
        if let Some((w1, b1)) = &self.classifier.hidden {
            let len = w1.rows() * w1.cols();
            blocks.push(("classifier.hidden_w".into(), at..at + len));
            at += len;
            blocks.push(("classifier.hidden_b".into(), at..at + b1.len()));
            at += b1.len();
        }
        blocks.push(("classifier.w".into(), at..at + self.w_len()));
        at += self.w_len();
        blocks.push(("classifier.b".into(), at..at + 1));
        blocks
    }

    fn w_len(&self) -> usize {
        self.classifier.w.len()
    }

    pub fn flat_len(&self) -> usize {
        self.blocks().last().map(|(_, r)| r.end).unwrap_or(0)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.sage.to_flat();
        if let Some((w1, b1)) = &self.classifier.hidden {
            flat.extend_from_slice(w1.as_slice());
            flat.extend_from_slice(b1);
        }
        flat.extend_from_slice(&self.classifier.w);
        flat.push(self.classifier.b);
        flat
    }

    pub fn from_flat(
        sage_cfg: SageConfig,
        operator: LinkOperator,
        classifier_hidden: Option<usize>,
        flat: &[f64],
    ) -> Result<Self> {
        let template = LinkModelParams::init(sage_cfg.clone(), operator, classifier_hidden, 0)?;
        if flat.len() != template.flat_len() {
            return Err(Error::Dimension(format!(
                "flat vector has {} values, model needs {}",
                flat.len(),
                template.flat_len()
            )));
        }
        let sage_len = template.sage.flat_len();
        let sage = SageParams::from_flat(sage_cfg, &flat[..sage_len])?;
        let mut at = sage_len;
        let hidden = match &template.classifier.hidden {
            Some((w1, b1)) => {
                let w_len = w1.rows() * w1.cols();
                let w = Tensor2D::from_flat(w1.rows(), w1.cols(), flat[at..at + w_len].to_vec())?;
                at += w_len;
                let b = flat[at..at + b1.len()].to_vec();
                at += b1.len();
                Some((w, b))
            }
            None => None,
        };
        let w = flat[at..at + template.w_len()].to_vec();
        at += template.w_len();
        let b = flat[at];
        Ok(LinkModelParams {
            sage,
            operator,
            classifier: Classifier { hidden, w, b },
        })
    }
}

fn check_pairs_in_bounds(pairs: &[(NodeId, NodeId)], n: usize) -> Result<()> {
    for &(u, v) in pairs {
        if u as usize >= n {
            return Err(Error::NodeBounds { id: u, n });
        }
        if v as usize >= n {
            return Err(Error::NodeBounds { id: v, n });
        }
    }
    Ok(())
}

/// Link probabilities for the given pairs, using full neighborhoods of `g`
/// for message passing.
pub fn predict_links(
    params: &LinkModelParams,
    g: &Graph,
    features: &FeatureMatrix,
    pairs: &[(NodeId, NodeId)],
) -> Result<Vec<f64>> {
    check_pairs_in_bounds(pairs, g.node_count())?;
    let plan = NeighborhoodPlan::full(g, params.sage.cfg.layer_count());
    let (h, _) = sage_forward_plan(features, &params.sage, &plan)?;
    pairs
        .iter()
        .map(|&(u, v)| {
            let e = link_embed(h.row(u as usize), h.row(v as usize), params.operator)?;
            Ok(params.classifier.probability(&e))
        })
        .collect()
}

/// Training configuration for the supervised link model.
#[derive(Debug, Clone)]
pub struct LinkTrainConfig {
    /// Encoder hidden dimensions (two entries = the standard two layers).
    pub hidden: Vec<usize>,
    pub aggregator: Aggregator,
    pub normalize: bool,
    pub activation: Activation,
    pub operator: LinkOperator,
    pub classifier_hidden: Option<usize>,
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    /// Neighbors sampled per layer per batch; `None` = full neighborhoods.
    pub sample_sizes: Option<Vec<usize>>,
}

impl Default for LinkTrainConfig {
    fn default() -> Self {
        LinkTrainConfig {
            hidden: vec![128, 128],
            aggregator: Aggregator::Mean,
            normalize: true,
            activation: Activation::Relu,
            operator: LinkOperator::L2,
            classifier_hidden: None,
            epochs: 20,
            batch: 512,
            lr: 1e-3,
            sample_sizes: None,
        }
    }
}

/// Per-epoch training record.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val: Metrics,
}

/// Train the link model on the split's train partition with minibatch Adam.
///
/// Message passing uses a graph rebuilt from train-positive edges only.
/// After each epoch the model is scored on the validation partition; the
/// returned parameters are those of the best validation-AUC epoch.
pub fn train_link_model(
    g: &Graph,
    features: &FeatureMatrix,
    split: &EdgeSplit,
    cfg: &LinkTrainConfig,
    master_seed: u64,
) -> Result<(LinkModelParams, Vec<EpochStats>)> {
    if features.rows() != g.node_count() {
        return Err(Error::Dimension(format!(
            "feature matrix has {} rows for a graph with {} nodes",
            features.rows(),
            g.node_count()
        )));
    }
    let train_samples = &split.train;
    if train_samples.is_empty() {
        return Err(Error::Config("train partition is empty".into()));
    }
    // Leakage guard: adjacency from train positives only.
    let message_graph = build_graph(&split.train_edges(), g.node_count(), false)?;

    let mut dims = vec![features.dim()];
    dims.extend_from_slice(&cfg.hidden);
    let sage_cfg = SageConfig {
        dims,
        aggregator: cfg.aggregator,
        normalize: cfg.normalize,
        activation: cfg.activation,
    };
    let params = LinkModelParams::init(
        sage_cfg.clone(),
        cfg.operator,
        cfg.classifier_hidden,
        master_seed,
    )?;
    let mut history = Vec::new();
    if cfg.epochs == 0 {
        return Ok((params, history));
    }

    let blocks = params.blocks();
    let mut flat = params.to_flat();
    let mut adam: Vec<AdamState> = blocks
        .iter()
        .map(|(_, r)| {
            AdamState::new(
                r.len(),
                AdamConfig {
                    alpha: cfg.lr,
                    ..AdamConfig::default()
                },
            )
        })
        .collect();

    let mut shuffle_rng =
        ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "linkmodel/shuffle"));
    let mut plan_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "linkmodel/plans"));
    let full_plan = NeighborhoodPlan::full(&message_graph, sage_cfg.layer_count());
    let mut order: Vec<usize> = (0..train_samples.len()).collect();
    let batch = cfg.batch.max(1);
    let mut best: Option<(f64, Vec<f64>)> = None;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(batch) {
            let cur = LinkModelParams::from_flat(
                sage_cfg.clone(),
                cfg.operator,
                cfg.classifier_hidden,
                &flat,
            )?;
            let plan = match &cfg.sample_sizes {
                Some(sizes) => NeighborhoodPlan::sampled(&message_graph, sizes, &mut plan_rng),
                None => full_plan.clone(),
            };
            let (h, cache) = sage_forward_plan(features, &cur.sage, &plan)?;
            let mut d_h = Tensor2D::zeros(h.rows(), h.cols());
            let mut cls_grads = ClassifierGrads::zeros_like(&cur.classifier);
            let mut loss = 0.0;
            let inv = 1.0 / chunk.len() as f64;
            for &idx in chunk {
                let (u, v, y) = train_samples[idx];
                let e = link_embed(h.row(u as usize), h.row(v as usize), cur.operator)?;
                let (logit, hidden_act) = cur.classifier.forward(&e);
                let p = sigmoid(logit);
                let y = y as f64;
                let clamped = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
                loss -= (y * clamped.ln() + (1.0 - y) * (1.0 - clamped).ln()) * inv;
                let d_logit = (p - y) * inv;
                let d_e =
                    cls_grads.accumulate(&cur.classifier, &e, hidden_act.as_deref(), d_logit);
                let (row_u, row_v) = (h.row(u as usize).to_vec(), h.row(v as usize).to_vec());
                let mut d_u = vec![0.0; row_u.len()];
                let mut d_v = vec![0.0; row_v.len()];
                link_embed_backward(&row_u, &row_v, cur.operator, &d_e, &mut d_u, &mut d_v);
                for (slot, val) in d_h.row_mut(u as usize).iter_mut().zip(&d_u) {
                    *slot += val;
                }
                for (slot, val) in d_h.row_mut(v as usize).iter_mut().zip(&d_v) {
                    *slot += val;
                }
            }
            if !loss.is_finite() {
                return Err(Error::Divergence {
                    block: "loss".into(),
                    epoch,
                });
            }
            epoch_loss += loss;
            batches += 1;
            let sage_grads = sage_backward_plan(&cur.sage, &plan, &cache, &d_h);
            let mut grads_flat = sage_grads.to_flat(&sage_cfg);
            if let Some((gw1, gb1)) = &cls_grads.hidden {
                grads_flat.extend_from_slice(gw1.as_slice());
                grads_flat.extend_from_slice(gb1);
            }
            grads_flat.extend_from_slice(&cls_grads.w);
            grads_flat.push(cls_grads.b);
            for ((name, range), state) in blocks.iter().zip(adam.iter_mut()) {
                state.step(
                    &mut flat[range.clone()],
                    &grads_flat[range.clone()],
                    name,
                    epoch,
                )?;
            }
        }
        // Validation with the current parameters on the train adjacency.
        let cur = LinkModelParams::from_flat(
            sage_cfg.clone(),
            cfg.operator,
            cfg.classifier_hidden,
            &flat,
        )?;
        let val_pairs: Vec<(NodeId, NodeId)> =
            split.val.iter().map(|&(u, v, _)| (u, v)).collect();
        let val_labels: Vec<u8> = split.val.iter().map(|&(_, _, y)| y).collect();
        let scores = predict_links(&cur, &message_graph, features, &val_pairs)?;
        let val = compute_metrics(&val_labels, &scores, 0.5)?;
        history.push(EpochStats {
            epoch,
            train_loss: epoch_loss / batches.max(1) as f64,
            val: val.clone(),
        });
        if best.as_ref().map_or(true, |(auc, _)| val.auc_roc > *auc) {
            best = Some((val.auc_roc, flat.clone()));
        }
    }
    let (_, best_flat) = best.expect("at least one epoch ran");
    let final_params =
        LinkModelParams::from_flat(sage_cfg, cfg.operator, cfg.classifier_hidden, &best_flat)?;
    Ok((final_params, history))
}

/// Journal-derived context attached to a recommended candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateInfo {
    pub best_quartile: Option<Quartile>,
    pub best_impact_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub author: NodeId,
    pub probability: f64,
    pub info: Option<CandidateInfo>,
}

/// Rank non-collaborators of `author` by predicted link probability.
///
/// Existing co-authors (and the author itself) are excluded. Ties break
/// toward the lower author id. `info`, when supplied, annotates each
/// candidate with journal metrics.
pub fn recommend(
    params: &LinkModelParams,
    g: &Graph,
    features: &FeatureMatrix,
    author: NodeId,
    k: usize,
    info: Option<&HashMap<NodeId, CandidateInfo>>,
) -> Result<Vec<Recommendation>> {
    if author as usize >= g.node_count() {
        return Err(Error::NodeBounds {
            id: author,
            n: g.node_count(),
        });
    }
    if k == 0 {
        return Err(Error::Config("recommendation count must be at least 1".into()));
    }
    let candidates: Vec<NodeId> = (0..g.node_count() as NodeId)
        .filter(|&v| v != author && !g.has_edge(author, v))
        .collect();
    let pairs: Vec<(NodeId, NodeId)> = candidates.iter().map(|&v| (author, v)).collect();
    let probs = predict_links(params, g, features, &pairs)?;
    let mut ranked: Vec<(NodeId, f64)> = candidates.into_iter().zip(probs).collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("probabilities are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(author, probability)| Recommendation {
            author,
            probability,
            info: info.and_then(|m| m.get(&author).cloned()),
        })
        .collect())
}

#[cfg(test)]
mod tests;
