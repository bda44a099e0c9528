//! Seeded synthetic benchmarks: a stochastic block model graph and a small
//! synthetic citation corpus in the raw metadata format.
//!
//! These ship with the crate so the end-to-end pipeline, the examples, and
//! the acceptance tests never depend on an external corpus download.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{build_graph, Graph, NodeId};
use crate::ingest::BLOCK_SEPARATOR;
use crate::seed;

/// Stochastic block model: nodes in blocks of the given sizes, an undirected
/// edge with probability `p_in` inside a block and `p_out` across blocks.
pub fn sbm_graph(block_sizes: &[usize], p_in: f64, p_out: f64, master_seed: u64) -> Result<Graph> {
    let n: usize = block_sizes.iter().sum();
    let block_of = |v: usize| -> usize {
        let mut acc = 0;
        for (b, &size) in block_sizes.iter().enumerate() {
            acc += size;
            if v < acc {
                return b;
            }
        }
        unreachable!("node within total size")
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "sbm"));
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block_of(u) == block_of(v) { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u as NodeId, v as NodeId));
            }
        }
    }
    build_graph(&edges, n, false)
}

/// Configuration of the synthetic citation corpus.
///
/// Collaboration is block-structured (authors mostly co-write within their
/// block), citations are strongly within-block, abstracts mix a per-block
/// vocabulary with shared filler, and journal references are only weakly
/// block-aligned. Citation structure therefore carries more signal than
/// interests alone, which is the regime the pipeline is built for.
#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub blocks: usize,
    pub authors_per_block: usize,
    pub papers: usize,
    pub max_authors_per_paper: usize,
    /// Probability that one co-author slot is drawn from a foreign block.
    pub cross_author_prob: f64,
    pub max_citations_per_paper: usize,
    /// Probability that one citation targets a foreign-block paper.
    pub cross_cite_prob: f64,
    /// Distinct journals; all blocks share them (weak interest signal).
    pub journals: usize,
    pub abstract_tokens: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            blocks: 2,
            authors_per_block: 35,
            papers: 220,
            max_authors_per_paper: 3,
            cross_author_prob: 0.04,
            max_citations_per_paper: 4,
            cross_cite_prob: 0.08,
            journals: 3,
            abstract_tokens: 30,
        }
    }
}

/// A generated corpus: metadata in the block format plus a citation edge
/// list over external paper ids, ready for the regular ingest path.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub metadata: String,
    pub citation_edges: String,
    pub author_count: usize,
}

pub fn generate_corpus(cfg: &CorpusConfig, master_seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "corpus"));
    let author_name = |block: usize, idx: usize| format!("Author B{block:02} N{idx:03}");
    let paper_ext_id = |idx: usize| 100_000 + idx as u64;

    let mut metadata = String::new();
    let mut edges = String::from("# synthetic citation edges\n");
    let mut block_of_paper: Vec<usize> = Vec::with_capacity(cfg.papers);

    for p in 0..cfg.papers {
        let block = rng.gen_range(0..cfg.blocks);
        block_of_paper.push(block);

        let n_authors = rng.gen_range(1..=cfg.max_authors_per_paper.max(1));
        let mut authors: Vec<String> = Vec::with_capacity(n_authors);
        while authors.len() < n_authors {
            let b = if rng.gen::<f64>() < cfg.cross_author_prob {
                rng.gen_range(0..cfg.blocks)
            } else {
                block
            };
            let name = author_name(b, rng.gen_range(0..cfg.authors_per_block));
            if !authors.contains(&name) {
                authors.push(name);
            }
        }

        // Weak block alignment: half the time the journal is block-matched.
        let journal = if rng.gen::<f64>() < 0.5 {
            block % cfg.journals
        } else {
            rng.gen_range(0..cfg.journals)
        };
        let volume = rng.gen_range(10..99);

        let mut abstract_words = Vec::with_capacity(cfg.abstract_tokens);
        for _ in 0..cfg.abstract_tokens {
            if rng.gen::<f64>() < 0.55 {
                abstract_words.push(format!("field{}word{}", block, rng.gen_range(0..25)));
            } else {
                abstract_words.push(format!("common{}", rng.gen_range(0..40)));
            }
        }

        metadata.push_str(BLOCK_SEPARATOR);
        metadata.push('\n');
        metadata.push_str(&format!("Paper: synth/{}\n", paper_ext_id(p)));
        metadata.push_str(&format!("Title: Synthetic study {p}\n"));
        metadata.push_str(&format!("Authors: {}\n", authors.join(", ")));
        metadata.push_str(&format!(
            "Journal-ref: Synth.J.{} {volume} (2002) {}\n",
            (b'A' + journal as u8) as char,
            rng.gen_range(100..999)
        ));
        metadata.push('\n');
        metadata.push_str(&abstract_words.join(" "));
        metadata.push('\n');

        // Citations point backwards in publication order.
        if p > 0 {
            let n_cites = rng.gen_range(0..=cfg.max_citations_per_paper);
            for _ in 0..n_cites {
                let target = if rng.gen::<f64>() < cfg.cross_cite_prob {
                    rng.gen_range(0..p)
                } else {
                    // Rejection-sample a within-block target; fall back to
                    // anything after a few tries on sparse prefixes.
                    let mut pick = rng.gen_range(0..p);
                    for _ in 0..8 {
                        if block_of_paper[pick] == block {
                            break;
                        }
                        pick = rng.gen_range(0..p);
                    }
                    pick
                };
                edges.push_str(&format!("{} {}\n", paper_ext_id(p), paper_ext_id(target)));
            }
        }
    }
    metadata.push_str(BLOCK_SEPARATOR);
    metadata.push('\n');

    SyntheticCorpus {
        metadata,
        citation_edges: edges,
        author_count: cfg.blocks * cfg.authors_per_block,
    }
}
