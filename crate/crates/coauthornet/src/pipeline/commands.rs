//! Pipeline commands. Each corresponds to one CLI subcommand; they
//! communicate exclusively through the artifact files under the run's
//! output directory, so every stage can be rerun or inspected in isolation.

use std::collections::HashMap;
use std::path::PathBuf;

use crate::embeddings::sage::SageUnsupConfig;
use crate::embeddings::skipgram::SkipGramConfig;
use crate::embeddings::{
    build_cooccurrence, generate_walks, sage_forward, train_attri2vec, train_sage_unsupervised,
    train_skipgram_pairs, EmbeddingMatrix,
};
use crate::error::{Error, Result};
use crate::eval::{
    compute_metrics, split_edges, report_csv_row, MetricsReport, REPORT_CSV_HEADER,
};
use crate::graph::{build_graph, read_edge_list, write_edge_list, FeatureMatrix, Graph, NodeId};
use crate::ingest::{
    self, derive_interest_features, reconstruct_coauthorship, AuthorTable, IssnLookup,
    JournalMetrics, Issn, Quartile,
};
use crate::linkpred::checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
use crate::linkpred::{
    augment_author_features, predict_links, recommend, train_link_model, CandidateInfo,
    LinkTrainConfig, Recommendation,
};
use crate::seed;
use crate::synthetic::{generate_corpus, sbm_graph, CorpusConfig};
use crate::text::Vectorizer;
use crate::verify::{self, BlockReport};

use super::artifacts::{self, Layout, OutputLock};
use super::config::{ArticleMethod, RunConfig};

/// Corpus statistics printed (and persisted) by `ingest`.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestStats {
    pub parsed: usize,
    pub skipped_malformed: usize,
    pub dropped_anonymous: usize,
    pub papers: usize,
    pub authors: usize,
    pub collaboration_edges: usize,
    pub citation_edges: usize,
    pub dropped_citation_edges: usize,
}

impl IngestStats {
    pub fn render(&self) -> String {
        format!(
            "papers parsed: {} (malformed skipped: {})\n\
             anonymous papers dropped: {}\n\
             papers kept: {}\n\
             authors: {}\n\
             collaboration edges: {}\n\
             citation edges kept: {} (dropped with unknown endpoints: {})\n",
            self.parsed,
            self.skipped_malformed,
            self.dropped_anonymous,
            self.papers,
            self.authors,
            self.collaboration_edges,
            self.citation_edges,
            self.dropped_citation_edges
        )
    }
}

/// Parse the raw corpus, rebuild both graphs, attach journal data, vectorize
/// abstracts, and persist every ingest artifact.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<IngestStats> {
    let layout = Layout::new(&cfg.out);
    let _lock = OutputLock::acquire(&layout)?;

    let metadata_path = cfg
        .metadata_path
        .as_ref()
        .ok_or_else(|| Error::Config("ingest needs paths.metadata".into()))?;
    let parsed = ingest::parse_paper_metadata(metadata_path)?;
    let total_parsed = parsed.papers.len();

    // Anonymous papers leave the corpus entirely: they carry no authorship
    // signal and would pollute the citation graph with feature-only nodes.
    let papers: Vec<_> = parsed
        .papers
        .into_iter()
        .filter(|p| !p.authors.is_empty())
        .collect();
    let dropped_anonymous = total_parsed - papers.len();
    if papers.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let external_ids: Vec<u64> = papers.iter().map(|p| p.paper_id).collect();
    let id_of: HashMap<u64, NodeId> = external_ids
        .iter()
        .enumerate()
        .map(|(i, &ext)| (ext, i as NodeId))
        .collect();

    // Citation edges, keeping only pairs with surviving metadata.
    let (citation, dropped_citation_edges) = match cfg.edges_path.as_ref() {
        Some(path) => {
            let raw = read_edge_list(path)?;
            let mut edges = Vec::with_capacity(raw.len());
            let mut dropped = 0usize;
            for (src, dst) in raw {
                match (id_of.get(&src), id_of.get(&dst)) {
                    (Some(&a), Some(&b)) => edges.push((a, b)),
                    _ => dropped += 1,
                }
            }
            (build_graph(&edges, papers.len(), true)?, dropped)
        }
        None => (build_graph(&[], papers.len(), true)?, 0),
    };

    let (coauthor, authors) = reconstruct_coauthorship(&papers)?;
    let interests = derive_interest_features(&papers, &authors, cfg.interest_dim);

    let vectorizer = Vectorizer::new(cfg.vectorizer_config())?;
    let mut abstract_rows = Vec::with_capacity(papers.len() * vectorizer.dim());
    for paper in &papers {
        abstract_rows.extend(vectorizer.vectorize(&paper.abstract_text));
    }
    let abstract_features =
        FeatureMatrix::from_flat(papers.len(), vectorizer.dim(), abstract_rows)?;

    std::fs::create_dir_all(layout.ingest_dir())
        .map_err(|e| Error::io(layout.ingest_dir(), e))?;
    write_edge_list(&citation, &layout.citation_edges())?;
    write_edge_list(&coauthor, &layout.coauthor_edges())?;
    artifacts::write_paper_ids(&layout.papers_tsv(), &external_ids)?;
    artifacts::write_author_table(&layout.authors_tsv(), &authors)?;
    artifacts::write_features(&layout.abstract_features(), &abstract_features)?;
    artifacts::write_features(&layout.interest_features(), &interests)?;

    // Journal data is informational; its absence never blocks the pipeline.
    if let Some(lookup_path) = cfg.lookup_path.as_ref() {
        let lookup = IssnLookup::load(lookup_path)?;
        let mut rows: Vec<(NodeId, String)> = Vec::new();
        for (i, paper) in papers.iter().enumerate() {
            if let Some(issn) = lookup.extract_issn(paper.journal_ref.as_deref()) {
                rows.push((i as NodeId, issn.to_string()));
            }
        }
        artifacts::write_paper_issn(&layout.paper_issn(), &rows)?;
    }
    if let Some(metrics) = load_metrics(cfg)? {
        let mut sorted: Vec<&JournalMetrics> = metrics.values().collect();
        sorted.sort_by_key(|m| m.issn);
        let mut text = String::from("issn,quartile,h_index,impact_factor\n");
        for m in sorted {
            text.push_str(&format!(
                "{},{},{},{}\n",
                m.issn, m.quartile, m.h_index, m.impact_factor
            ));
        }
        std::fs::write(layout.metrics_csv(), text)
            .map_err(|e| Error::io(layout.metrics_csv(), e))?;
    }

    let stats = IngestStats {
        parsed: total_parsed,
        skipped_malformed: parsed.skipped,
        dropped_anonymous,
        papers: papers.len(),
        authors: authors.len(),
        collaboration_edges: coauthor.edge_count(),
        citation_edges: citation.edge_count(),
        dropped_citation_edges,
    };
    std::fs::write(layout.stats_txt(), stats.render())
        .map_err(|e| Error::io(layout.stats_txt(), e))?;
    Ok(stats)
}

fn load_metrics(cfg: &RunConfig) -> Result<Option<HashMap<Issn, JournalMetrics>>> {
    if let Some(path) = cfg.metrics_path.as_ref() {
        return ingest::load_journal_metrics(path).map(Some);
    }
    if let Some(url) = cfg.metrics_url.as_ref() {
        return match ingest::fetch_journal_metrics(url, &cfg.metrics_cache(), cfg.offline) {
            Ok(map) => Ok(Some(map)),
            Err(Error::MetricsUnavailable(reason)) => {
                log::warn!("continuing without journal metrics: {reason}");
                Ok(None)
            }
            Err(e) => Err(e),
        };
    }
    Ok(None)
}

/// Outcome of `embed`.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbedOutcome {
    /// The no-citation-data baseline: nothing to train, nothing written.
    Skipped,
    Written { path: PathBuf, dim: usize },
}

/// Train (or pass through) article embeddings for the citation graph.
pub fn cmd_embed(cfg: &RunConfig) -> Result<EmbedOutcome> {
    let layout = Layout::new(&cfg.out);
    let _lock = OutputLock::acquire(&layout)?;

    if cfg.article_method == ArticleMethod::None {
        return Ok(EmbedOutcome::Skipped);
    }
    let citation = read_citation_graph(&layout)?;
    let features = artifacts::read_features(&layout.abstract_features())?;
    // Direction is configurable; the default treats citations as context on
    // both sides.
    let graph = if cfg.respect_direction {
        citation
    } else {
        citation.symmetrized()
    };
    let master = seed::derive(cfg.seed, "embed");

    let embeddings: EmbeddingMatrix = match cfg.article_method {
        ArticleMethod::None => unreachable!("handled above"),
        ArticleMethod::AbstractsOnly => {
            EmbeddingMatrix::from_dense(features.dim(), features.as_slice().to_vec())?
        }
        ArticleMethod::Node2Vec => {
            let corpus = generate_walks(&graph, &cfg.walk, seed::derive(master, "walks"))?;
            let pairs = build_cooccurrence(&corpus, cfg.walk.window);
            let sg = SkipGramConfig {
                dim: cfg.article_dim,
                negatives: cfg.negatives,
                epochs: cfg.article_epochs,
                lr: cfg.effective_article_lr(),
                window: cfg.walk.window,
            };
            let (emb, _) = train_skipgram_pairs(&pairs, &corpus, graph.node_count(), &sg, master)?;
            emb
        }
        ArticleMethod::Attri2Vec => {
            let sg = SkipGramConfig {
                dim: cfg.article_dim,
                negatives: cfg.negatives,
                epochs: cfg.article_epochs,
                lr: cfg.effective_article_lr(),
                window: cfg.walk.window,
            };
            let (emb, _) = train_attri2vec(&graph, &features, &cfg.walk, &sg, master)?;
            emb
        }
        ArticleMethod::SageMean | ArticleMethod::SageMaxPool => {
            let aggregator = if cfg.article_method == ArticleMethod::SageMean {
                crate::embeddings::Aggregator::Mean
            } else {
                crate::embeddings::Aggregator::MaxPool
            };
            let unsup = SageUnsupConfig {
                hidden: vec![cfg.article_dim, cfg.article_dim],
                aggregator,
                normalize: cfg.normalize,
                negatives: cfg.negatives,
                epochs: cfg.article_epochs,
                lr: cfg.effective_article_lr(),
                batch_pairs: cfg.batch.max(1),
                sample_sizes: Some(vec![10, 5]),
            };
            let params = train_sage_unsupervised(&graph, &features, &cfg.walk, &unsup, master)?;
            sage_forward(&graph, &features, &params, None, master)?
        }
    };

    let path = layout.paper_embeddings();
    artifacts::write_node_embeddings(&path, &embeddings)?;
    let manifest = format!(
        "method = {}\ndim = {}\nepochs = {}\nlr = {}\nseed = {}\nrespect_direction = {}\n",
        cfg.article_method.key(),
        embeddings.dim(),
        cfg.article_epochs,
        cfg.effective_article_lr(),
        cfg.seed,
        cfg.respect_direction,
    );
    std::fs::write(layout.embed_manifest(), manifest)
        .map_err(|e| Error::io(layout.embed_manifest(), e))?;
    Ok(EmbedOutcome::Written {
        path,
        dim: embeddings.dim(),
    })
}

fn read_citation_graph(layout: &Layout) -> Result<Graph> {
    let paper_ids = artifacts::read_paper_ids(&layout.papers_tsv())?;
    let raw = read_edge_list(&layout.citation_edges())?;
    let edges: Vec<(NodeId, NodeId)> = raw
        .into_iter()
        .map(|(a, b)| (a as NodeId, b as NodeId))
        .collect();
    build_graph(&edges, paper_ids.len(), true)
}

fn read_coauthor_graph(layout: &Layout, authors: &AuthorTable) -> Result<Graph> {
    let raw = read_edge_list(&layout.coauthor_edges())?;
    let edges: Vec<(NodeId, NodeId)> = raw
        .into_iter()
        .map(|(a, b)| (a as NodeId, b as NodeId))
        .collect();
    build_graph(&edges, authors.len(), false)
}

/// Author features for the link model: interests alone for the
/// no-citation-data baseline, otherwise interests extended with the summed
/// (or mean-pooled) article embeddings.
fn assemble_author_features(
    cfg: &RunConfig,
    layout: &Layout,
    authors: &AuthorTable,
) -> Result<FeatureMatrix> {
    let interests = artifacts::read_features(&layout.interest_features())?;
    if !cfg.article_method.produces_embeddings() {
        return Ok(interests);
    }
    let embeddings = artifacts::read_node_embeddings(&layout.paper_embeddings())?;
    let (augmented, _missing) =
        augment_author_features(&interests, authors, &embeddings, cfg.mean_pool)?;
    Ok(augmented)
}

/// Outcome of `train`.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub checkpoint: PathBuf,
    pub epochs_run: usize,
    pub best_val_auc: f64,
    pub final_train_loss: f64,
}

/// Split the co-authorship edges, train the link model, persist the split,
/// checkpoint, and per-epoch history.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainOutcome> {
    let layout = Layout::new(&cfg.out);
    let _lock = OutputLock::acquire(&layout)?;

    let authors = artifacts::read_author_table(&layout.authors_tsv())?;
    let coauthor = read_coauthor_graph(&layout, &authors)?;
    let features = assemble_author_features(cfg, &layout, &authors)?;

    let split = split_edges(&coauthor, cfg.split_ratio, cfg.seed)?;
    std::fs::create_dir_all(layout.train_dir()).map_err(|e| Error::io(layout.train_dir(), e))?;
    artifacts::write_split(&layout.split_tsv(), &split)?;

    let train_cfg = LinkTrainConfig {
        hidden: vec![cfg.model_dim, cfg.model_dim],
        aggregator: cfg.author_aggregator,
        normalize: cfg.normalize,
        operator: cfg.operator,
        classifier_hidden: cfg.classifier_hidden,
        epochs: cfg.epochs,
        batch: cfg.batch,
        lr: cfg.lr,
        sample_sizes: cfg.sample_sizes.clone(),
    };
    let (params, history) = train_link_model(&coauthor, &features, &split, &train_cfg, cfg.seed)?;

    let checkpoint = layout.checkpoint();
    save_checkpoint(&checkpoint, &params, &CheckpointMeta { split_seed: split.seed })?;
    let mut csv = String::from("epoch,train_loss,val_accuracy,val_auc_roc,val_f1\n");
    for h in &history {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            h.epoch, h.train_loss, h.val.accuracy, h.val.auc_roc, h.val.f1
        ));
    }
    std::fs::write(layout.history_csv(), csv).map_err(|e| Error::io(layout.history_csv(), e))?;

    let best_val_auc = history.iter().map(|h| h.val.auc_roc).fold(0.0, f64::max);
    Ok(TrainOutcome {
        checkpoint,
        epochs_run: history.len(),
        best_val_auc,
        final_train_loss: history.last().map_or(f64::NAN, |h| h.train_loss),
    })
}

fn descriptors(cfg: &RunConfig) -> (String, String, String) {
    let mut article = cfg.article_method.descriptor().to_string();
    if cfg.mean_pool && cfg.article_method.produces_embeddings() {
        article.push_str(" (mean-pool)");
    }
    (
        article,
        format!("GraphSAGE ({})", cfg.author_aggregator),
        cfg.operator.to_string(),
    )
}

/// Evaluate the trained checkpoint on the held-out test partition and append
/// a row to the run's results CSV.
pub fn cmd_evaluate(cfg: &RunConfig) -> Result<MetricsReport> {
    let layout = Layout::new(&cfg.out);
    let _lock = OutputLock::acquire(&layout)?;

    let authors = artifacts::read_author_table(&layout.authors_tsv())?;
    let features = assemble_author_features(cfg, &layout, &authors)?;
    let split = artifacts::read_split(&layout.split_tsv())?;
    let (params, meta) = load_checkpoint(&layout.checkpoint())?;
    if meta.split_seed != split.seed {
        return Err(Error::Consistency(format!(
            "checkpoint was trained on split seed {}, the persisted split has seed {}",
            meta.split_seed, split.seed
        )));
    }

    // Test edges are scored against the train-only adjacency, exactly as in
    // training: they must never appear in message passing.
    let message_graph = build_graph(&split.train_edges(), authors.len(), false)?;
    let pairs: Vec<(NodeId, NodeId)> = split.test.iter().map(|&(u, v, _)| (u, v)).collect();
    let labels: Vec<u8> = split.test.iter().map(|&(_, _, y)| y).collect();
    let scores = predict_links(&params, &message_graph, &features, &pairs)?;
    let metrics = compute_metrics(&labels, &scores, 0.5)?;

    let (article, author, operator) = descriptors(cfg);
    let report = MetricsReport {
        article_embedding: article,
        author_embedding: author,
        operator,
        metrics,
    };
    append_result_row(&layout, &report)?;
    Ok(report)
}

fn append_result_row(layout: &Layout, report: &MetricsReport) -> Result<()> {
    use std::io::Write;
    let path = layout.results_csv();
    let fresh = !path.exists();
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::io(&path, e))?;
    if fresh {
        writeln!(file, "{REPORT_CSV_HEADER}").map_err(|e| Error::io(&path, e))?;
    }
    writeln!(file, "{}", report_csv_row(report)).map_err(|e| Error::io(&path, e))
}

/// Sweep article method × Eq.-4 pooling × author aggregator × link operator,
/// training and evaluating each configuration, and return every report in
/// sweep order. Embeddings are retrained once per article method.
pub fn cmd_grid(cfg: &RunConfig) -> Result<Vec<MetricsReport>> {
    let mut reports = Vec::new();
    for method in ArticleMethod::ALL {
        let mut embed_cfg = cfg.clone();
        embed_cfg.article_method = method;
        cmd_embed(&embed_cfg)?;
        for mean_pool in [false, true] {
            if mean_pool && !method.produces_embeddings() {
                continue;
            }
            for aggregator in [
                crate::embeddings::Aggregator::Mean,
                crate::embeddings::Aggregator::MaxPool,
            ] {
                for operator in crate::linkpred::LinkOperator::ALL {
                    let mut run = cfg.clone();
                    run.article_method = method;
                    run.mean_pool = mean_pool;
                    run.author_aggregator = aggregator;
                    run.operator = operator;
                    cmd_train(&run)?;
                    reports.push(cmd_evaluate(&run)?);
                }
            }
        }
    }
    Ok(reports)
}

/// One ranked suggestion with its resolved author name.
#[derive(Debug, Clone)]
pub struct RecommendationRow {
    pub name: String,
    pub rec: Recommendation,
}

/// Rank collaboration candidates for an author given by id or by name.
pub fn cmd_recommend(cfg: &RunConfig, author_query: &str, k: usize) -> Result<Vec<RecommendationRow>> {
    if k == 0 {
        return Err(Error::Config("recommendation count must be at least 1".into()));
    }
    let layout = Layout::new(&cfg.out);
    let _lock = OutputLock::acquire(&layout)?;

    let authors = artifacts::read_author_table(&layout.authors_tsv())?;
    let coauthor = read_coauthor_graph(&layout, &authors)?;
    let features = assemble_author_features(cfg, &layout, &authors)?;
    let (params, _) = load_checkpoint(&layout.checkpoint())?;

    let author = resolve_author(&authors, author_query)?;
    let info = candidate_info(cfg, &layout, &authors)?;
    let recs = recommend(&params, &coauthor, &features, author, k, info.as_ref())?;
    Ok(recs
        .into_iter()
        .map(|rec| RecommendationRow {
            name: authors.name_of(rec.author).to_string(),
            rec,
        })
        .collect())
}

fn resolve_author(authors: &AuthorTable, query: &str) -> Result<NodeId> {
    if let Ok(id) = query.parse::<NodeId>() {
        if (id as usize) < authors.len() {
            return Ok(id);
        }
    }
    let normalized = ingest::normalize_author_name(query);
    if let Some(id) = authors.id_of(&normalized) {
        return Ok(id);
    }
    let mut scored: Vec<(usize, &String)> = authors
        .names()
        .iter()
        .map(|name| (levenshtein(&normalized, name), name))
        .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    Err(Error::UnknownAuthor {
        query: query.to_string(),
        closest: scored.into_iter().take(3).map(|(_, n)| n.clone()).collect(),
    })
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Journal-derived info per author: the best quartile and highest impact
/// factor over the author's papers, when ingest produced the journal data.
fn candidate_info(
    cfg: &RunConfig,
    layout: &Layout,
    authors: &AuthorTable,
) -> Result<Option<HashMap<NodeId, CandidateInfo>>> {
    let issn_path = layout.paper_issn();
    let metrics_path = layout.metrics_csv();
    if !issn_path.exists() || !metrics_path.exists() {
        return Ok(None);
    }
    let _ = cfg;
    let paper_issn = artifacts::read_paper_issn(&issn_path)?;
    let metrics = ingest::load_journal_metrics(&metrics_path)?;
    let mut out = HashMap::new();
    for id in 0..authors.len() as NodeId {
        let mut best_quartile: Option<Quartile> = None;
        let mut best_if: Option<f64> = None;
        for paper in authors.papers_of(id) {
            let Some(issn_str) = paper_issn.get(paper) else {
                continue;
            };
            let Ok(issn) = Issn::parse(issn_str) else {
                continue;
            };
            let Some(m) = metrics.get(&issn) else {
                continue;
            };
            best_quartile = Some(match best_quartile {
                Some(q) if q <= m.quartile => q,
                _ => m.quartile,
            });
            best_if = Some(match best_if {
                Some(f) if f >= m.impact_factor => f,
                _ => m.impact_factor,
            });
        }
        if best_quartile.is_some() || best_if.is_some() {
            out.insert(
                id,
                CandidateInfo {
                    best_quartile,
                    best_impact_factor: best_if,
                },
            );
        }
    }
    Ok(Some(out))
}

/// Run the gradient verification harness; returns the per-block report, or
/// the verification-failure error when any block exceeds tolerance.
pub fn cmd_gradcheck(cfg: &RunConfig, inject: Option<&str>) -> Result<Vec<BlockReport>> {
    let reports = verify::run_all(cfg.seed, inject)?;
    let failures = verify::failures(&reports);
    if failures > 0 {
        // The caller still wants the table; print it here before failing.
        for r in &reports {
            log::error!(
                "gradcheck {} / {}: max rel err {:.3e}{}",
                r.family,
                r.block,
                r.max_rel_error,
                if r.passed() { "" } else { "  <-- FAIL" }
            );
        }
        return Err(Error::VerificationFailed(failures));
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Full synthetic citation corpus (metadata + citation edge list) to be
    /// run through `ingest`.
    Corpus,
    /// A stochastic-block-model co-authorship benchmark written directly as
    /// ingest artifacts (no citation stage).
    Graph,
}

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub blocks: usize,
    pub block_size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub papers: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            kind: SyntheticKind::Graph,
            blocks: 2,
            block_size: 50,
            p_in: 0.1,
            p_out: 0.01,
            papers: 220,
        }
    }
}

/// Files produced by `gen-synthetic`.
#[derive(Debug, Clone)]
pub struct SyntheticOutcome {
    pub files: Vec<PathBuf>,
}

pub fn cmd_gen_synthetic(cfg: &RunConfig, spec: &SyntheticSpec) -> Result<SyntheticOutcome> {
    let layout = Layout::new(&cfg.out);
    let _lock = OutputLock::acquire(&layout)?;
    match spec.kind {
        SyntheticKind::Corpus => {
            let corpus_cfg = CorpusConfig {
                blocks: spec.blocks,
                authors_per_block: spec.block_size,
                papers: spec.papers,
                ..CorpusConfig::default()
            };
            let corpus = generate_corpus(&corpus_cfg, cfg.seed);
            let dir = cfg.out.join("synthetic");
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let metadata = dir.join("metadata.txt");
            let edges = dir.join("citation.edges");
            std::fs::write(&metadata, corpus.metadata).map_err(|e| Error::io(&metadata, e))?;
            std::fs::write(&edges, corpus.citation_edges).map_err(|e| Error::io(&edges, e))?;
            Ok(SyntheticOutcome {
                files: vec![metadata, edges],
            })
        }
        SyntheticKind::Graph => {
            let block_sizes = vec![spec.block_size; spec.blocks];
            let graph = sbm_graph(&block_sizes, spec.p_in, spec.p_out, cfg.seed)?;
            let n = graph.node_count();
            let names: Vec<String> = (0..n).map(|i| format!("author {i:04}")).collect();
            let table = AuthorTable::from_parts(names, vec![Vec::new(); n])?;
            // One-hot identity interests: each benchmark author is its own
            // interest, the encoder must learn purely from structure.
            let mut interests = FeatureMatrix::zeros(n, n);
            for i in 0..n {
                interests.set(i, i, 1.0);
            }
            std::fs::create_dir_all(layout.ingest_dir())
                .map_err(|e| Error::io(layout.ingest_dir(), e))?;
            write_edge_list(&graph, &layout.coauthor_edges())?;
            artifacts::write_author_table(&layout.authors_tsv(), &table)?;
            artifacts::write_features(&layout.interest_features(), &interests)?;
            Ok(SyntheticOutcome {
                files: vec![
                    layout.coauthor_edges(),
                    layout.authors_tsv(),
                    layout.interest_features(),
                ],
            })
        }
    }
}

/// Degree-product baseline for a split: score a pair by the product of
/// train-graph degrees. The standard structural null model the learned
/// predictor has to beat.
pub fn degree_product_auc(split: &crate::eval::EdgeSplit, n: usize) -> Result<f64> {
    let message_graph = build_graph(&split.train_edges(), n, false)?;
    let labels: Vec<u8> = split.test.iter().map(|&(_, _, y)| y).collect();
    let scores: Vec<f64> = split
        .test
        .iter()
        .map(|&(u, v, _)| (message_graph.degree(u) * message_graph.degree(v)) as f64)
        .collect();
    Ok(crate::eval::auc_rank(&labels, &scores))
}
