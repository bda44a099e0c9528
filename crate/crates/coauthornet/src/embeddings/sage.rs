//! Neighborhood-aggregating graph convolution (GraphSAGE style).
//!
//! Layer `l` maps node states `h^l` to
//!
//! ```text
//! h^{l+1}_v = σ(W^l · concat(h^l_v, a^{l+1}_v))
//! ```
//!
//! where `a^{l+1}_v` aggregates the states of a fixed neighbor multiset of
//! `v`: their mean, or for the max-pool variant the elementwise maximum of
//! `σ(W_pool·h^l_u + b_pool)` over sampled neighbors `u`. Layer outputs are
//! L2-normalized per node by default (disable via [`SageConfig::normalize`]).
//! Nodes without neighbors aggregate over themselves so every node has a
//! defined update.
//!
//! The forward pass runs against an explicit [`NeighborhoodPlan`] — the
//! realized neighbor lists per layer — which makes sampled neighborhoods
//! reproducible and lets the backward pass and the finite-difference checks
//! see exactly the same computation graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph, NodeId};
use crate::nn::{AdamConfig, AdamState, Activation, Tensor2D};
use crate::seed;

use super::skipgram::negative_table;
use super::walks::{generate_walks, WalkConfig};
use super::{surrogate_dscore, surrogate_loss, EmbeddingMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregator {
    Mean,
    MaxPool,
}

impl Aggregator {
    pub fn tag(&self) -> u32 {
        match self {
            Aggregator::Mean => 0,
            Aggregator::MaxPool => 1,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Aggregator::Mean),
            1 => Some(Aggregator::MaxPool),
            _ => None,
        }
    }
}

impl std::fmt::Display for Aggregator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Aggregator::Mean => write!(f, "Mean"),
            Aggregator::MaxPool => write!(f, "MaxPool"),
        }
    }
}

impl std::str::FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregator::Mean),
            "maxpool" | "max-pool" | "max_pool" => Ok(Aggregator::MaxPool),
            other => Err(Error::Config(format!("unknown aggregator '{other}'"))),
        }
    }
}

/// Layer dimensions `[d_0, …, d_L]`, aggregator choice, nonlinearity, and
/// the per-layer normalization flag.
///
/// The default nonlinearity is ReLU, the reference choice for this layer
/// family; a sigmoid variant is available for ablation but collapses
/// representations toward the constant 0.5 vector on weakly scaled inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SageConfig {
    pub dims: Vec<usize>,
    pub aggregator: Aggregator,
    pub normalize: bool,
    pub activation: Activation,
}

impl SageConfig {
    pub fn new(dims: Vec<usize>, aggregator: Aggregator) -> Self {
        SageConfig {
            dims,
            aggregator,
            normalize: true,
            activation: Activation::Relu,
        }
    }

    pub fn layer_count(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 {
            return Err(Error::Config(
                "sage config needs at least one layer (two dimension entries)".into(),
            ));
        }
        if self.dims.iter().any(|&d| d == 0) {
            return Err(Error::Config("sage layer dimensions must be positive".into()));
        }
        Ok(())
    }
}

/// Learnable parameters: per layer a `d_{l+1} × 2·d_l` weight matrix, plus a
/// `d_l × d_l` pool matrix and `d_l` bias for the max-pool aggregator.
#[derive(Debug, Clone, PartialEq)]
pub struct SageParams {
    pub cfg: SageConfig,
    pub weights: Vec<Tensor2D>,
    pub pool_w: Vec<Tensor2D>,
    pub pool_b: Vec<Vec<f64>>,
}

impl SageParams {
    pub fn init(cfg: SageConfig, master_seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "sage/init"));
        let layers = cfg.layer_count();
        let mut weights = Vec::with_capacity(layers);
        let mut pool_w = Vec::new();
        let mut pool_b = Vec::new();
        for l in 0..layers {
            let (d_in, d_out) = (cfg.dims[l], cfg.dims[l + 1]);
            if cfg.aggregator == Aggregator::MaxPool {
                pool_w.push(Tensor2D::xavier_uniform(d_in, d_in, &mut rng));
                pool_b.push(vec![0.0; d_in]);
            }
            weights.push(Tensor2D::xavier_uniform(d_out, 2 * d_in, &mut rng));
        }
        Ok(SageParams {
            cfg,
            weights,
            pool_w,
            pool_b,
        })
    }

    /// Zero-valued gradients (or parameters) with this shape.
    pub fn zeros_like(&self) -> SageParams {
        SageParams {
            cfg: self.cfg.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| Tensor2D::zeros(w.rows(), w.cols()))
                .collect(),
            pool_w: self
                .pool_w
                .iter()
                .map(|w| Tensor2D::zeros(w.rows(), w.cols()))
                .collect(),
            pool_b: self.pool_b.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Named parameter blocks in flat layout order.
    pub fn blocks(&self) -> Vec<(String, std::ops::Range<usize>)> {
        let mut out = Vec::new();
        let mut at = 0;
        for l in 0..self.cfg.layer_count() {
            if self.cfg.aggregator == Aggregator::MaxPool {
                let len = self.pool_w[l].rows() * self.pool_w[l].cols();
                out.push((format!("sage.layer{l}.pool_w"), at..at + len));
                at += len;
                let len = self.pool_b[l].len();
                out.push((format!("sage.layer{l}.pool_b"), at..at + len));
                at += len;
            }
            let len = self.weights[l].rows() * self.weights[l].cols();
            out.push((format!("sage.layer{l}.w"), at..at + len));
            at += len;
        }
        out
    }

    pub fn flat_len(&self) -> usize {
        self.blocks().last().map_or(0, |(_, r)| r.end)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.flat_len());
        for l in 0..self.cfg.layer_count() {
            if self.cfg.aggregator == Aggregator::MaxPool {
                out.extend_from_slice(self.pool_w[l].as_slice());
                out.extend_from_slice(&self.pool_b[l]);
            }
            out.extend_from_slice(self.weights[l].as_slice());
        }
        out
    }

    pub fn from_flat(cfg: SageConfig, flat: &[f64]) -> Result<Self> {
        cfg.validate()?;
        let mut weights = Vec::new();
        let mut pool_w = Vec::new();
        let mut pool_b = Vec::new();
        let mut at = 0;
        let take = |flat: &[f64], at: &mut usize, len: usize| -> Result<Vec<f64>> {
            if *at + len > flat.len() {
                return Err(Error::Dimension(format!(
                    "flat parameter vector too short: need {} more values at offset {at}",
                    len
                )));
            }
            let v = flat[*at..*at + len].to_vec();
            *at += len;
            Ok(v)
        };
        for l in 0..cfg.layer_count() {
            let (d_in, d_out) = (cfg.dims[l], cfg.dims[l + 1]);
            if cfg.aggregator == Aggregator::MaxPool {
                pool_w.push(Tensor2D::from_flat(d_in, d_in, take(flat, &mut at, d_in * d_in)?)?);
                pool_b.push(take(flat, &mut at, d_in)?);
            }
            weights.push(Tensor2D::from_flat(
                d_out,
                2 * d_in,
                take(flat, &mut at, d_out * 2 * d_in)?,
            )?);
        }
        if at != flat.len() {
            return Err(Error::Dimension(format!(
                "flat parameter vector has {} extra values",
                flat.len() - at
            )));
        }
        Ok(SageParams {
            cfg,
            weights,
            pool_w,
            pool_b,
        })
    }
}

/// Realized neighbor lists per layer and node. Lists are never empty: a node
/// without neighbors aggregates over itself.
#[derive(Debug, Clone)]
pub struct NeighborhoodPlan {
    pub layers: Vec<Vec<Vec<NodeId>>>,
}

impl NeighborhoodPlan {
    /// Full neighborhoods at every layer.
    pub fn full(g: &Graph, layers: usize) -> Self {
        let one: Vec<Vec<NodeId>> = (0..g.node_count() as NodeId)
            .map(|v| {
                let nbrs = g.adj(v);
                if nbrs.is_empty() {
                    vec![v]
                } else {
                    nbrs.to_vec()
                }
            })
            .collect();
        NeighborhoodPlan {
            layers: vec![one; layers],
        }
    }

    /// `sizes[l]` neighbors sampled uniformly with replacement per node.
    pub fn sampled(g: &Graph, sizes: &[usize], rng: &mut impl Rng) -> Self {
        let layers = sizes
            .iter()
            .map(|&k| {
                (0..g.node_count() as NodeId)
                    .map(|v| g.sample_neighbors(v, k.max(1), rng))
                    .collect()
            })
            .collect();
        NeighborhoodPlan { layers }
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }
}

/// Intermediate state of one forward pass, consumed by the backward pass.
pub struct SageCache {
    /// Node states per level: `h[0] = X`, `h[L]` = final embeddings.
    pub h: Vec<Tensor2D>,
    /// Aggregated neighbor vectors per layer (`n × d_l`).
    agg: Vec<Tensor2D>,
    /// Sigmoid outputs before normalization per layer (`n × d_{l+1}`).
    act: Vec<Tensor2D>,
    /// L2 norms of `act` rows (all 1.0 when normalization is off).
    norms: Vec<Vec<f64>>,
    /// Max-pool: pooled features `σ(W_pool·h + b)` per layer (`n × d_l`).
    pooled: Vec<Tensor2D>,
    /// Max-pool: winning source node per `(v, coordinate)`, flattened.
    argmax: Vec<Vec<NodeId>>,
}

fn conformance(x: &FeatureMatrix, params: &SageParams, plan: &NeighborhoodPlan) -> Result<()> {
    params.cfg.validate()?;
    if x.dim() != params.cfg.dims[0] {
        return Err(Error::Dimension(format!(
            "input features have dimension {}, sage expects {}",
            x.dim(),
            params.cfg.dims[0]
        )));
    }
    if plan.layer_count() != params.cfg.layer_count() {
        return Err(Error::Dimension(format!(
            "neighborhood plan has {} layers, sage has {}",
            plan.layer_count(),
            params.cfg.layer_count()
        )));
    }
    for layer in &plan.layers {
        if layer.len() != x.rows() {
            return Err(Error::Dimension(format!(
                "neighborhood plan covers {} nodes, features cover {}",
                layer.len(),
                x.rows()
            )));
        }
    }
    Ok(())
}

/// Forward pass over all nodes against a fixed plan.
pub fn sage_forward_plan(
    x: &FeatureMatrix,
    params: &SageParams,
    plan: &NeighborhoodPlan,
) -> Result<(Tensor2D, SageCache)> {
    conformance(x, params, plan)?;
    let n = x.rows();
    let layers = params.cfg.layer_count();
    let mut cache = SageCache {
        h: vec![Tensor2D::from_flat(n, x.dim(), x.as_slice().to_vec())?],
        agg: Vec::with_capacity(layers),
        act: Vec::with_capacity(layers),
        norms: Vec::with_capacity(layers),
        pooled: Vec::with_capacity(layers),
        argmax: Vec::with_capacity(layers),
    };
    for l in 0..layers {
        let (d_in, d_out) = (params.cfg.dims[l], params.cfg.dims[l + 1]);
        let h_in = &cache.h[l];
        // Max-pool transforms every node once; plans may reference any node.
        let act_fn = params.cfg.activation;
        let (pooled, mut argmax) = match params.cfg.aggregator {
            Aggregator::MaxPool => {
                let mut p = Tensor2D::zeros(n, d_in);
                for v in 0..n {
                    let z = params.pool_w[l].matvec(h_in.row(v));
                    for (j, zv) in z.into_iter().enumerate() {
                        p.set(v, j, act_fn.apply(zv + params.pool_b[l][j]));
                    }
                }
                (p, vec![0 as NodeId; n * d_in])
            }
            Aggregator::Mean => (Tensor2D::zeros(0, 0), Vec::new()),
        };
        let mut agg = Tensor2D::zeros(n, d_in);
        for v in 0..n {
            let members = &plan.layers[l][v];
            match params.cfg.aggregator {
                Aggregator::Mean => {
                    let inv = 1.0 / members.len() as f64;
                    let row = agg.row_mut(v);
                    for &u in members {
                        for (a, b) in row.iter_mut().zip(h_in.row(u as usize)) {
                            *a += b * inv;
                        }
                    }
                }
                Aggregator::MaxPool => {
                    let row = agg.row_mut(v);
                    let arg = &mut argmax[v * d_in..(v + 1) * d_in];
                    for (j, (slot, winner)) in row.iter_mut().zip(arg.iter_mut()).enumerate() {
                        let mut best = f64::NEG_INFINITY;
                        let mut best_u = members[0];
                        for &u in members {
                            let val = pooled.get(u as usize, j);
                            if val > best {
                                best = val;
                                best_u = u;
                            }
                        }
                        *slot = best;
                        *winner = best_u;
                    }
                }
            }
        }
        let mut act = Tensor2D::zeros(n, d_out);
        let mut out = Tensor2D::zeros(n, d_out);
        let mut norms = vec![1.0; n];
        let mut concat = vec![0.0; 2 * d_in];
        for v in 0..n {
            concat[..d_in].copy_from_slice(h_in.row(v));
            concat[d_in..].copy_from_slice(agg.row(v));
            let z = params.weights[l].matvec(&concat);
            for (j, zv) in z.into_iter().enumerate() {
                act.set(v, j, act_fn.apply(zv));
            }
            let row = act.row(v).to_vec();
            if params.cfg.normalize {
                let norm = row.iter().map(|a| a * a).sum::<f64>().sqrt();
                norms[v] = norm;
                let out_row = out.row_mut(v);
                if norm > 0.0 {
                    for (o, a) in out_row.iter_mut().zip(&row) {
                        *o = a / norm;
                    }
                } else {
                    out_row.copy_from_slice(&row);
                    norms[v] = 1.0;
                }
            } else {
                out.row_mut(v).copy_from_slice(&row);
            }
        }
        cache.agg.push(agg);
        cache.act.push(act);
        cache.norms.push(norms);
        cache.pooled.push(pooled);
        cache.argmax.push(argmax);
        cache.h.push(out);
    }
    let final_h = cache.h[layers].clone();
    Ok((final_h, cache))
}

/// Gradients with the same shape as [`SageParams`].
pub struct SageGrads {
    pub weights: Vec<Tensor2D>,
    pub pool_w: Vec<Tensor2D>,
    pub pool_b: Vec<Vec<f64>>,
}

impl SageGrads {
    pub fn to_flat(&self, cfg: &SageConfig) -> Vec<f64> {
        let mut out = Vec::new();
        for l in 0..cfg.layer_count() {
            if cfg.aggregator == Aggregator::MaxPool {
                out.extend_from_slice(self.pool_w[l].as_slice());
                out.extend_from_slice(&self.pool_b[l]);
            }
            out.extend_from_slice(self.weights[l].as_slice());
        }
        out
    }
}

/// Backward pass: given `d_loss/d_h_L`, accumulate gradients for every
/// parameter block of the forward pass recorded in `cache`.
pub fn sage_backward_plan(
    params: &SageParams,
    plan: &NeighborhoodPlan,
    cache: &SageCache,
    d_out_last: &Tensor2D,
) -> SageGrads {
    let n = cache.h[0].rows();
    let layers = params.cfg.layer_count();
    let mut grads = {
        let z = params.zeros_like();
        SageGrads {
            weights: z.weights,
            pool_w: z.pool_w,
            pool_b: z.pool_b,
        }
    };
    let mut d_h = d_out_last.clone();
    for l in (0..layers).rev() {
        let (d_in, _d_out) = (params.cfg.dims[l], params.cfg.dims[l + 1]);
        let h_in = &cache.h[l];
        let h_out = &cache.h[l + 1];
        let act = &cache.act[l];
        let mut d_h_prev = Tensor2D::zeros(n, d_in);
        let mut d_pooled = if params.cfg.aggregator == Aggregator::MaxPool {
            Tensor2D::zeros(n, d_in)
        } else {
            Tensor2D::zeros(0, 0)
        };
        let mut concat = vec![0.0; 2 * d_in];
        for v in 0..n {
            // Through normalization: d_act = (d_y − y(y·d_y)) / r.
            let d_y = d_h.row(v);
            let mut d_act: Vec<f64> = if params.cfg.normalize {
                let y = h_out.row(v);
                let r = cache.norms[l][v];
                let y_dot: f64 = y.iter().zip(d_y).map(|(a, b)| a * b).sum();
                y.iter()
                    .zip(d_y)
                    .map(|(yi, dyi)| (dyi - yi * y_dot) / r)
                    .collect()
            } else {
                d_y.to_vec()
            };
            // Through the layer nonlinearity.
            for (g, a) in d_act.iter_mut().zip(act.row(v)) {
                *g *= params.cfg.activation.derivative_from_output(*a);
            }
            // Weight gradient and input gradient.
            concat[..d_in].copy_from_slice(h_in.row(v));
            concat[d_in..].copy_from_slice(cache.agg[l].row(v));
            grads.weights[l].add_outer(&d_act, &concat, 1.0);
            let d_concat = params.weights[l].matvec_t(&d_act);
            for (slot, g) in d_h_prev.row_mut(v).iter_mut().zip(&d_concat[..d_in]) {
                *slot += g;
            }
            let d_agg = &d_concat[d_in..];
            let members = &plan.layers[l][v];
            match params.cfg.aggregator {
                Aggregator::Mean => {
                    let inv = 1.0 / members.len() as f64;
                    for &u in members {
                        for (slot, g) in d_h_prev.row_mut(u as usize).iter_mut().zip(d_agg) {
                            *slot += g * inv;
                        }
                    }
                }
                Aggregator::MaxPool => {
                    let arg = &cache.argmax[l][v * d_in..(v + 1) * d_in];
                    for (j, (&winner, g)) in arg.iter().zip(d_agg).enumerate() {
                        let cur = d_pooled.get(winner as usize, j);
                        d_pooled.set(winner as usize, j, cur + g);
                    }
                }
            }
        }
        if params.cfg.aggregator == Aggregator::MaxPool {
            // Through the pool nonlinearity for every node that won a slot.
            let pooled = &cache.pooled[l];
            for u in 0..n {
                let d_z: Vec<f64> = d_pooled
                    .row(u)
                    .iter()
                    .zip(pooled.row(u))
                    .map(|(g, p)| g * params.cfg.activation.derivative_from_output(*p))
                    .collect();
                if d_z.iter().all(|&g| g == 0.0) {
                    continue;
                }
                grads.pool_w[l].add_outer(&d_z, h_in.row(u), 1.0);
                for (slot, g) in grads.pool_b[l].iter_mut().zip(&d_z) {
                    *slot += *g;
                }
                let back = params.pool_w[l].matvec_t(&d_z);
                for (slot, g) in d_h_prev.row_mut(u).iter_mut().zip(&back) {
                    *slot += g;
                }
            }
        }
        d_h = d_h_prev;
    }
    grads
}

/// Embed every node of `g`. `sample_sizes` picks fixed-size neighborhoods per
/// layer (seeded); `None` uses full neighborhoods.
pub fn sage_forward(
    g: &Graph,
    x: &FeatureMatrix,
    params: &SageParams,
    sample_sizes: Option<&[usize]>,
    master_seed: u64,
) -> Result<EmbeddingMatrix> {
    if x.rows() != g.node_count() {
        return Err(Error::Dimension(format!(
            "feature matrix has {} rows for a graph with {} nodes",
            x.rows(),
            g.node_count()
        )));
    }
    let plan = match sample_sizes {
        Some(sizes) => {
            if sizes.len() != params.cfg.layer_count() {
                return Err(Error::Dimension(format!(
                    "{} sample sizes for {} layers",
                    sizes.len(),
                    params.cfg.layer_count()
                )));
            }
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "sage/forward-plan"));
            NeighborhoodPlan::sampled(g, sizes, &mut rng)
        }
        None => NeighborhoodPlan::full(g, params.cfg.layer_count()),
    };
    let (h, _) = sage_forward_plan(x, params, &plan)?;
    EmbeddingMatrix::from_dense(h.cols(), h.as_slice().to_vec())
}

/// Configuration for unsupervised training on walk co-occurrence.
#[derive(Debug, Clone)]
pub struct SageUnsupConfig {
    /// Hidden dimensions per layer (input dimension comes from the features).
    pub hidden: Vec<usize>,
    pub aggregator: Aggregator,
    pub normalize: bool,
    pub activation: Activation,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub batch_pairs: usize,
    /// Neighbors sampled per layer each batch; `None` = full neighborhoods.
    pub sample_sizes: Option<Vec<usize>>,
}

impl Default for SageUnsupConfig {
    fn default() -> Self {
        SageUnsupConfig {
            hidden: vec![128, 128],
            aggregator: Aggregator::Mean,
            normalize: true,
            activation: Activation::Relu,
            negatives: 5,
            epochs: 5,
            lr: 1e-3,
            batch_pairs: 256,
            sample_sizes: Some(vec![10, 5]),
        }
    }
}

/// Train sage parameters so that walk co-occurring nodes score high under the
/// dot product of their embeddings, against sampled negatives. Gradients flow
/// through the full aggregation stack; the optimizer is Adam.
pub fn train_sage_unsupervised(
    g: &Graph,
    x: &FeatureMatrix,
    walk_cfg: &WalkConfig,
    cfg: &SageUnsupConfig,
    master_seed: u64,
) -> Result<SageParams> {
    if x.rows() != g.node_count() {
        return Err(Error::Dimension(format!(
            "feature matrix has {} rows for a graph with {} nodes",
            x.rows(),
            g.node_count()
        )));
    }
    let mut dims = vec![x.dim()];
    dims.extend_from_slice(&cfg.hidden);
    let sage_cfg = SageConfig {
        dims,
        aggregator: cfg.aggregator,
        normalize: cfg.normalize,
        activation: cfg.activation,
    };
    let params = SageParams::init(sage_cfg.clone(), master_seed)?;
    if cfg.epochs == 0 {
        return Ok(params);
    }
    let corpus = generate_walks(g, walk_cfg, seed::derive(master_seed, "sage/walks"))?;
    let mut pairs = super::build_cooccurrence(&corpus, walk_cfg.window);
    if pairs.is_empty() {
        return Ok(params);
    }
    let table = negative_table(&corpus, g.node_count());
    let mut flat = params.to_flat();
    let mut adam = AdamState::new(
        flat.len(),
        AdamConfig {
            alpha: cfg.lr,
            ..AdamConfig::default()
        },
    );
    let mut shuffle_rng =
        ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "sage/shuffle"));
    let mut neg_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "sage/negatives"));
    let mut plan_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "sage/plans"));
    let full_plan = match cfg.sample_sizes {
        None => Some(NeighborhoodPlan::full(g, sage_cfg.layer_count())),
        Some(_) => None,
    };
    let batch = cfg.batch_pairs.max(1);
    for epoch in 0..cfg.epochs {
        use rand::seq::SliceRandom;
        pairs.shuffle(&mut shuffle_rng);
        for chunk in pairs.chunks(batch) {
            let cur = SageParams::from_flat(sage_cfg.clone(), &flat)?;
            let plan = match (&cfg.sample_sizes, &full_plan) {
                (Some(sizes), _) => NeighborhoodPlan::sampled(g, sizes, &mut plan_rng),
                (None, Some(p)) => p.clone(),
                (None, None) => unreachable!(),
            };
            let (h, cache) = sage_forward_plan(x, &cur, &plan)?;
            let mut d_h = Tensor2D::zeros(h.rows(), h.cols());
            let scale = 1.0 / chunk.len() as f64;
            for &(u, c) in chunk {
                accumulate_pair(&h, &mut d_h, u, c, true, scale);
                for _ in 0..cfg.negatives {
                    let negative = table.sample(&mut neg_rng) as NodeId;
                    accumulate_pair(&h, &mut d_h, u, negative, false, scale);
                }
            }
            let grads = sage_backward_plan(&cur, &plan, &cache, &d_h);
            adam.step(&mut flat, &grads.to_flat(&sage_cfg), "sage", epoch)?;
        }
    }
    SageParams::from_flat(sage_cfg, &flat)
}

/// Add the gradient of one surrogate term to both endpoint rows of `d_h`.
fn accumulate_pair(
    h: &Tensor2D,
    d_h: &mut Tensor2D,
    u: NodeId,
    target: NodeId,
    positive: bool,
    scale: f64,
) -> f64 {
    let score: f64 = h
        .row(u as usize)
        .iter()
        .zip(h.row(target as usize))
        .map(|(a, b)| a * b)
        .sum();
    let g = surrogate_dscore(score, positive) * scale;
    let target_row = h.row(target as usize).to_vec();
    let u_row = h.row(u as usize).to_vec();
    for (slot, t) in d_h.row_mut(u as usize).iter_mut().zip(&target_row) {
        *slot += g * t;
    }
    for (slot, s) in d_h.row_mut(target as usize).iter_mut().zip(&u_row) {
        *slot += g * s;
    }
    surrogate_loss(score, positive) * scale
}
