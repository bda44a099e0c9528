//! Second-order random walks and window co-occurrence extraction.
//!
//! A walk standing at `cur` having arrived from `prev` steps to a neighbor
//! `x` of `cur` with unnormalized weight `1/p` if `x == prev`, `1` if `x` is
//! adjacent to `prev`, and `1/q` otherwise. The first step out of a start
//! node is uniform. With `p = q = 1` the law collapses to a first-order
//! uniform walk.
//!
//! Walk generation is parallel across start nodes; each (start node, walk)
//! pair derives its own generator from the master seed, so the output is
//! independent of scheduling.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::seed;

use super::alias::AliasTable;

#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    /// Return parameter: weight `1/p` for stepping back to the previous node.
    pub p: f64,
    /// In-out parameter: weight `1/q` for leaving the previous neighborhood.
    pub q: f64,
    pub walk_length: usize,
    pub walks_per_node: usize,
    /// Context window for co-occurrence pairs.
    pub window: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            p: 1.0,
            q: 1.0,
            walk_length: 80,
            walks_per_node: 10,
            window: 10,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) || !(self.q > 0.0) {
            return Err(Error::Config(format!(
                "walk parameters must be positive: p={}, q={}",
                self.p, self.q
            )));
        }
        if self.walk_length < 2 {
            return Err(Error::Config(format!(
                "walk length must be at least 2, got {}",
                self.walk_length
            )));
        }
        if self.window < 1 {
            return Err(Error::Config("context window must be at least 1".into()));
        }
        if self.walks_per_node < 1 {
            return Err(Error::Config("walks per node must be at least 1".into()));
        }
        Ok(())
    }
}

/// Node sequences produced by the walker. Consecutive entries of every walk
/// are guaranteed to be graph edges.
#[derive(Debug, Clone, Default)]
pub struct WalkCorpus {
    walks: Vec<Vec<NodeId>>,
}

impl WalkCorpus {
    pub fn from_walks(walks: Vec<Vec<NodeId>>) -> Self {
        WalkCorpus { walks }
    }

    pub fn walks(&self) -> &[Vec<NodeId>] {
        &self.walks
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.walks.iter().map(|w| w.len()).sum()
    }
}

/// Unnormalized second-order transition weights from state `(prev, cur)` to
/// each entry of `neighbors(cur)`, in neighbor-list order.
pub fn second_order_weights(g: &Graph, prev: NodeId, cur: NodeId, p: f64, q: f64) -> Vec<f64> {
    let prev_adj = g.adj(prev);
    g.adj(cur)
        .iter()
        .map(|&x| {
            if x == prev {
                1.0 / p
            } else if prev_adj.binary_search(&x).is_ok() {
                1.0
            } else {
                1.0 / q
            }
        })
        .collect()
}

/// Lazily built alias tables keyed by `(prev, cur)` edge state.
pub struct TransitionCache<'g> {
    g: &'g Graph,
    p: f64,
    q: f64,
    tables: HashMap<(NodeId, NodeId), AliasTable>,
}

impl<'g> TransitionCache<'g> {
    pub fn new(g: &'g Graph, p: f64, q: f64) -> Self {
        TransitionCache {
            g,
            p,
            q,
            tables: HashMap::new(),
        }
    }

    /// One biased step; `None` when `cur` has no out-neighbors.
    pub fn step(&mut self, prev: NodeId, cur: NodeId, rng: &mut impl Rng) -> Option<NodeId> {
        let nbrs = self.g.adj(cur);
        if nbrs.is_empty() {
            return None;
        }
        if nbrs.len() == 1 {
            return Some(nbrs[0]);
        }
        let (g, p, q) = (self.g, self.p, self.q);
        let table = self
            .tables
            .entry((prev, cur))
            .or_insert_with(|| AliasTable::new(&second_order_weights(g, prev, cur, p, q)));
        Some(nbrs[table.sample(rng)])
    }
}

/// Generate `walks_per_node` biased walks from every node, start nodes in
/// ascending id order. Walks truncate early at nodes with no out-neighbors.
pub fn generate_walks(g: &Graph, cfg: &WalkConfig, master_seed: u64) -> Result<WalkCorpus> {
    cfg.validate()?;
    if g.node_count() == 0 {
        return Err(Error::Config("cannot walk an empty graph".into()));
    }
    let n = g.node_count() as NodeId;
    let per_node: Vec<Vec<Vec<NodeId>>> = (0..n)
        .into_par_iter()
        .map(|start| {
            let mut cache = TransitionCache::new(g, cfg.p, cfg.q);
            (0..cfg.walks_per_node)
                .map(|r| {
                    let walk_seed =
                        seed::derive_indexed2(master_seed, "walks", start as u64, r as u64);
                    let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
                    single_walk(g, start, cfg.walk_length, &mut cache, &mut rng)
                })
                .collect()
        })
        .collect();
    Ok(WalkCorpus::from_walks(per_node.into_iter().flatten().collect()))
}

fn single_walk(
    g: &Graph,
    start: NodeId,
    length: usize,
    cache: &mut TransitionCache,
    rng: &mut impl Rng,
) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(length);
    walk.push(start);
    let first = g.adj(start);
    if first.is_empty() {
        return walk;
    }
    walk.push(first[rng.gen_range(0..first.len())]);
    while walk.len() < length {
        let cur = walk[walk.len() - 1];
        let prev = walk[walk.len() - 2];
        match cache.step(prev, cur, rng) {
            Some(next) => walk.push(next),
            None => break,
        }
    }
    walk
}

/// All `(center, context)` pairs with positions at distance `<= window`
/// inside a walk, both directions.
pub fn build_cooccurrence(corpus: &WalkCorpus, window: usize) -> Vec<(NodeId, NodeId)> {
    assert!(window >= 1, "window must be at least 1");
    let mut pairs = Vec::new();
    for walk in corpus.walks() {
        for i in 0..walk.len() {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(walk.len() - 1);
            for j in lo..=hi {
                if j != i {
                    pairs.push((walk[i], walk[j]));
                }
            }
        }
    }
    pairs
}
