//! Collaboration recommendation from citation corpora.
//!
//! This crate rebuilds a co-authorship network from raw citation-corpus
//! metadata, learns node embeddings on the citation graph (second-order
//! random walks with a skip-gram objective, attribute-to-vector mapping, or
//! GraphSAGE), folds the article embeddings into author features, and trains
//! a supervised GraphSAGE link predictor that scores unseen collaborations.
//!
//! The primary interface is the `examples/` directory — one runnable example
//! per capability:
//!
//! ```bash
//! cargo run --release --example synthetic_corpus     # generate benchmark data
//! cargo run --release --example ingest_corpus        # metadata -> graphs
//! cargo run --release --example vectorize_abstracts  # hashed n-gram features
//! cargo run --release --example random_walks         # biased walk statistics
//! cargo run --release --example embed_articles       # unsupervised embeddings
//! cargo run --release --example link_prediction      # end-to-end benchmark
//! cargo run --release --example recommend_coauthors  # ranked suggestions
//! cargo run --release --example gradient_check       # verify hand gradients
//! cargo run --release --example ablation_grid        # configuration sweep
//! ```
//!
//! A thin `coauthornet` binary exposes the same pipeline as subcommands
//! (`ingest`, `embed`, `train`, `evaluate`, `recommend`, `gradcheck`,
//! `gen-synthetic`) for scripted runs; see the crate README.

pub mod embeddings;
pub mod embtext;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod linkpred;
pub mod nn;
pub mod pipeline;
pub mod seed;
pub mod synthetic;
pub mod text;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{build_graph, FeatureMatrix, Graph, NodeId};
