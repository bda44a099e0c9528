//! Attribute-to-vector training: nodes are represented by the image of their
//! feature vector under a learned dense sigmoid map, `f(x) = σ(W_map·x)`,
//! and the map is trained to predict walk contexts with the same
//! negative-sampling surrogate as the skip-gram trainer. Context nodes keep a
//! free output table.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph, NodeId};
use crate::nn::{sigmoid, Tensor2D};
use crate::seed;

use super::skipgram::{negative_table, SkipGramConfig};
use super::walks::{generate_walks, WalkConfig};
use super::{surrogate_dscore, surrogate_loss, EmbeddingMatrix};

/// Feature-to-embedding map and context table.
#[derive(Debug, Clone)]
pub struct Attri2VecParams {
    /// `d × d_x` dense map from node attributes to the embedding space.
    pub w_map: Tensor2D,
    /// `|V| × d` free context table.
    pub w_out: Tensor2D,
}

impl Attri2VecParams {
    pub fn init(n: usize, feature_dim: usize, dim: usize, master_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "attri2vec/init"));
        Attri2VecParams {
            w_map: Tensor2D::xavier_uniform(dim, feature_dim, &mut rng),
            w_out: Tensor2D::xavier_uniform(n, dim, &mut rng),
        }
    }

    /// Image `σ(W_map·x)` of one feature row.
    pub fn map(&self, x: &[f64]) -> Vec<f64> {
        self.w_map.matvec(x).into_iter().map(sigmoid).collect()
    }

    /// Images of every row of `features`.
    pub fn images(&self, features: &FeatureMatrix) -> EmbeddingMatrix {
        let dim = self.w_map.rows();
        let mut data = Vec::with_capacity(features.rows() * dim);
        for i in 0..features.rows() {
            data.extend(self.map(features.row(i)));
        }
        EmbeddingMatrix::from_dense(dim, data).expect("images are finite")
    }
}

/// One SGD step on `(center, context, negatives)`. Returns the loss before
/// the update.
pub(crate) fn sgd_instance(
    params: &mut Attri2VecParams,
    features: &FeatureMatrix,
    center: NodeId,
    context: NodeId,
    negatives: &[NodeId],
    lr: f64,
) -> f64 {
    let x = features.row(center as usize);
    let h = params.map(x);
    let mut grad_h = vec![0.0; h.len()];
    let mut loss = 0.0;
    for (idx, &target) in std::iter::once(&context).chain(negatives).enumerate() {
        let positive = idx == 0;
        let row = params.w_out.row_mut(target as usize);
        let score: f64 = h.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
        loss += surrogate_loss(score, positive);
        let g = surrogate_dscore(score, positive);
        for (gh, r) in grad_h.iter_mut().zip(row.iter()) {
            *gh += g * r;
        }
        for (r, hi) in row.iter_mut().zip(&h) {
            *r -= lr * g * hi;
        }
    }
    // Through the sigmoid: dL/dz = dL/dh ⊙ h ⊙ (1−h), then W_map -= lr·dz xᵀ.
    let grad_z: Vec<f64> = grad_h
        .iter()
        .zip(&h)
        .map(|(gh, hi)| gh * hi * (1.0 - hi))
        .collect();
    params.w_map.add_outer(&grad_z, x, -lr);
    loss
}

/// Train the attribute map on walk contexts of `g`. Returns the node images
/// `f(x_i)` for all nodes along with the learned parameters.
pub fn train_attri2vec(
    g: &Graph,
    features: &FeatureMatrix,
    walk_cfg: &WalkConfig,
    cfg: &SkipGramConfig,
    master_seed: u64,
) -> Result<(EmbeddingMatrix, Attri2VecParams)> {
    cfg.validate()?;
    if features.rows() != g.node_count() {
        return Err(Error::Dimension(format!(
            "feature matrix has {} rows for a graph with {} nodes",
            features.rows(),
            g.node_count()
        )));
    }
    let corpus = generate_walks(g, walk_cfg, seed::derive(master_seed, "attri2vec/walks"))?;
    let pairs = super::build_cooccurrence(&corpus, walk_cfg.window);
    let mut params =
        Attri2VecParams::init(g.node_count(), features.dim(), cfg.dim, master_seed);
    if pairs.is_empty() {
        return Ok((params.images(features), params));
    }
    let table = negative_table(&corpus, g.node_count());
    let mut neg_rng =
        ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "attri2vec/negatives"));
    let total = (cfg.epochs * pairs.len()) as f64;
    let mut visited = 0.0f64;
    let mut negs = vec![0 as NodeId; cfg.negatives];
    for _epoch in 0..cfg.epochs {
        for &(center, context) in &pairs {
            let lr = cfg.lr * (1.0 - visited / total).max(1e-4);
            for slot in negs.iter_mut() {
                *slot = table.sample(&mut neg_rng) as NodeId;
            }
            sgd_instance(&mut params, features, center, context, &negs, lr);
            visited += 1.0;
        }
    }
    Ok((params.images(features), params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn identical_feature_rows_share_an_image_throughout_training() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 3), (3, 0)], 4, false).unwrap();
        // Nodes 0 and 2 carry the same attributes.
        let features = FeatureMatrix::from_rows(&[
            vec![1.0, -0.5, 0.25],
            vec![0.0, 1.0, 0.0],
            vec![1.0, -0.5, 0.25],
            vec![0.5, 0.5, 0.5],
        ])
        .unwrap();
        let walk_cfg = WalkConfig {
            walk_length: 8,
            walks_per_node: 2,
            window: 2,
            ..WalkConfig::default()
        };
        let cfg = SkipGramConfig {
            dim: 6,
            epochs: 2,
            ..SkipGramConfig::default()
        };
        let (emb, params) = train_attri2vec(&g, &features, &walk_cfg, &cfg, 17).unwrap();
        assert_eq!(emb.get(0).unwrap(), emb.get(2).unwrap());
        // Holds at any step since images depend only on the shared map.
        assert_eq!(params.map(features.row(0)), params.map(features.row(2)));
    }

    #[test]
    fn zero_features_collapse_to_the_half_vector_and_freeze_the_map() {
        let g = build_graph(&[(0, 1), (1, 2)], 3, false).unwrap();
        let features = FeatureMatrix::zeros(3, 4);
        let walk_cfg = WalkConfig {
            walk_length: 6,
            walks_per_node: 2,
            window: 2,
            ..WalkConfig::default()
        };
        let cfg = SkipGramConfig {
            dim: 5,
            epochs: 2,
            ..SkipGramConfig::default()
        };
        let init = Attri2VecParams::init(3, 4, 5, 21);
        let (emb, params) = train_attri2vec(&g, &features, &walk_cfg, &cfg, 21).unwrap();
        for v in 0..3u32 {
            assert!(emb.get(v).unwrap().iter().all(|&x| x == 0.5));
        }
        // x = 0 kills the map gradient, so W_map never moves.
        assert_eq!(init.w_map, params.w_map);
    }

    #[test]
    fn feature_dimension_mismatch_is_a_config_error() {
        let g = build_graph(&[(0, 1)], 2, false).unwrap();
        let features = FeatureMatrix::zeros(3, 4); // wrong row count
        let walk_cfg = WalkConfig::default();
        let cfg = SkipGramConfig::default();
        assert!(train_attri2vec(&g, &features, &walk_cfg, &cfg, 1).is_err());
    }
}
