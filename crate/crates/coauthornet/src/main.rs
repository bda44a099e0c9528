//! Thin command-line front end over the pipeline commands.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coauthornet::eval::{results_table, TableFormat};
use coauthornet::pipeline::{
    cmd_embed, cmd_evaluate, cmd_gen_synthetic, cmd_gradcheck, cmd_grid, cmd_ingest,
    cmd_recommend, cmd_train, EmbedOutcome, RunConfig, SyntheticKind, SyntheticSpec,
};
use coauthornet::verify;
use coauthornet::Error;

#[derive(Parser)]
#[command(
    name = "coauthornet",
    about = "Co-authorship link prediction from citation corpora",
    version
)]
struct Cli {
    /// Configuration file (flat `key = value` lines); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed controlling all randomness in the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for run artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel walk generation.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Never touch the network (journal metrics use the cache or are skipped).
    #[arg(long, global = true)]
    offline: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a raw citation corpus and build both graphs plus features.
    Ingest(IngestArgs),
    /// Train (or pass through) article embeddings on the citation graph.
    Embed(EmbedArgs),
    /// Split co-authorship edges and train the link model.
    Train(ModelArgs),
    /// Evaluate the checkpoint on the test partition (or sweep a full grid).
    Evaluate(EvaluateArgs),
    /// Rank collaboration suggestions for one author.
    Recommend(RecommendArgs),
    /// Verify analytic gradients against finite differences.
    Gradcheck(GradcheckArgs),
    /// Generate seeded synthetic benchmark data.
    GenSynthetic(GenSyntheticArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Metadata file in the block record format.
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Citation edge list (`src dst` per line, `#` comments).
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Journal-prefix -> ISSN lookup table (TSV).
    #[arg(long)]
    lookup: Option<PathBuf>,
    /// Journal metrics CSV (issn,quartile,h_index,impact_factor).
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// URL of a metrics CSV to download and cache.
    #[arg(long)]
    metrics_url: Option<String>,
    /// Interest vocabulary size.
    #[arg(long)]
    interest_dim: Option<usize>,
    /// Abstract vector dimension.
    #[arg(long)]
    vector_dim: Option<usize>,
}

#[derive(Args)]
struct EmbedArgs {
    /// none | abstracts-only | node2vec | attri2vec | graphsage-mean | graphsage-maxpool
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Respect citation direction during walks and aggregation.
    #[arg(long)]
    respect_direction: bool,
    /// Walk return parameter p.
    #[arg(long)]
    p: Option<f64>,
    /// Walk in-out parameter q.
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Args)]
struct ModelArgs {
    /// Article-embedding method whose output feeds the author features
    /// (must match the `embed` run); `none` = interests only.
    #[arg(long)]
    article_method: Option<String>,
    /// l1 | l2 | hadamard | average | inner
    #[arg(long)]
    operator: Option<String>,
    /// mean | maxpool
    #[arg(long)]
    aggregator: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    /// Mean-pool (instead of sum) the per-author article embeddings.
    #[arg(long)]
    mean_pool: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Sweep every article method, pooling, aggregator, and operator.
    #[arg(long)]
    grid: bool,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct RecommendArgs {
    /// Author name or numeric author id.
    #[arg(long)]
    author: String,
    /// Number of suggestions.
    #[arg(short, long, default_value_t = 10)]
    k: usize,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Test hook: pretend this block's analytic gradient is wrong.
    #[arg(long, hide = true)]
    inject_error: Option<String>,
}

#[derive(Args)]
struct GenSyntheticArgs {
    /// corpus | graph
    #[arg(long, default_value = "graph")]
    kind: String,
    #[arg(long, default_value_t = 2)]
    blocks: usize,
    #[arg(long, default_value_t = 50)]
    block_size: usize,
    #[arg(long, default_value_t = 0.1)]
    p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    p_out: f64,
    /// Papers in corpus mode.
    #[arg(long, default_value_t = 220)]
    papers: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn base_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads.max(1);
    }
    if cli.offline {
        cfg.offline = true;
    }
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global();
    Ok(cfg)
}

fn apply_model_args(cfg: &mut RunConfig, args: &ModelArgs) -> Result<(), Error> {
    if let Some(m) = &args.article_method {
        cfg.apply("article.method", m)?;
    }
    if let Some(op) = &args.operator {
        cfg.apply("model.operator", op)?;
    }
    if let Some(agg) = &args.aggregator {
        cfg.apply("model.aggregator", agg)?;
    }
    if let Some(dim) = args.dim {
        cfg.model_dim = dim;
    }
    if let Some(epochs) = args.epochs {
        cfg.epochs = epochs;
    }
    if let Some(lr) = args.lr {
        cfg.lr = lr;
    }
    if let Some(batch) = args.batch {
        cfg.batch = batch;
    }
    if args.mean_pool {
        cfg.mean_pool = true;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut cfg = base_config(&cli)?;
    match &cli.command {
        Command::Ingest(args) => {
            if let Some(p) = &args.metadata {
                cfg.metadata_path = Some(p.clone());
            }
            if let Some(p) = &args.edges {
                cfg.edges_path = Some(p.clone());
            }
            if let Some(p) = &args.lookup {
                cfg.lookup_path = Some(p.clone());
            }
            if let Some(p) = &args.metrics {
                cfg.metrics_path = Some(p.clone());
            }
            if let Some(u) = &args.metrics_url {
                cfg.metrics_url = Some(u.clone());
            }
            if let Some(k) = args.interest_dim {
                cfg.interest_dim = k;
            }
            if let Some(d) = args.vector_dim {
                cfg.vectorizer_dim = d;
            }
            let stats = cmd_ingest(&cfg)?;
            print!("{}", stats.render());
            Ok(())
        }
        Command::Embed(args) => {
            if let Some(m) = &args.method {
                cfg.apply("article.method", m)?;
            }
            if let Some(d) = args.dim {
                cfg.article_dim = d;
            }
            if let Some(e) = args.epochs {
                cfg.article_epochs = e;
            }
            if let Some(lr) = args.lr {
                cfg.article_lr = Some(lr);
            }
            if args.respect_direction {
                cfg.respect_direction = true;
            }
            if let Some(p) = args.p {
                cfg.walk.p = p;
            }
            if let Some(q) = args.q {
                cfg.walk.q = q;
            }
            match cmd_embed(&cfg)? {
                EmbedOutcome::Skipped => {
                    println!(
                        "article method 'none': no embeddings to train (no-citation-data baseline)"
                    );
                }
                EmbedOutcome::Written { path, dim } => {
                    println!("wrote {} (dimension {dim})", path.display());
                }
            }
            Ok(())
        }
        Command::Train(args) => {
            apply_model_args(&mut cfg, args)?;
            let outcome = cmd_train(&cfg)?;
            println!(
                "trained {} epoch(s); best validation AUC-ROC {:.4}; final train loss {:.6}",
                outcome.epochs_run, outcome.best_val_auc, outcome.final_train_loss
            );
            println!("checkpoint: {}", outcome.checkpoint.display());
            Ok(())
        }
        Command::Evaluate(args) => {
            apply_model_args(&mut cfg, &args.model)?;
            if args.grid {
                let reports = cmd_grid(&cfg)?;
                print!("{}", results_table(&reports, TableFormat::Text));
                println!("configurations evaluated: {}", reports.len());
            } else {
                let report = cmd_evaluate(&cfg)?;
                print!(
                    "{}",
                    results_table(std::slice::from_ref(&report), TableFormat::Text)
                );
            }
            Ok(())
        }
        Command::Recommend(args) => {
            if args.k == 0 {
                return Err(Error::Config("-k must be at least 1".into()));
            }
            apply_model_args(&mut cfg, &args.model)?;
            let rows = cmd_recommend(&cfg, &args.author, args.k)?;
            if rows.is_empty() {
                println!(
                    "no candidates: '{}' already collaborates with every reachable author",
                    args.author
                );
            }
            for (rank, row) in rows.iter().enumerate() {
                let info = match &row.rec.info {
                    Some(info) => {
                        let quartile = info
                            .best_quartile
                            .map(|q| q.to_string())
                            .unwrap_or_else(|| "-".into());
                        let impact = info
                            .best_impact_factor
                            .map(|f| format!("{f:.2}"))
                            .unwrap_or_else(|| "-".into());
                        format!("  [best quartile {quartile}, impact factor {impact}]")
                    }
                    None => String::new(),
                };
                println!(
                    "{:>3}. {}  p={:.4}{}",
                    rank + 1,
                    row.name,
                    row.rec.probability,
                    info
                );
            }
            Ok(())
        }
        Command::Gradcheck(args) => {
            let reports = cmd_gradcheck(&cfg, args.inject_error.as_deref())?;
            println!(
                "{:<28} {:<24} {:>12}  status",
                "family", "block", "max rel err"
            );
            for r in &reports {
                println!(
                    "{:<28} {:<24} {:>12.3e}  {}",
                    r.family,
                    r.block,
                    r.max_rel_error,
                    if r.passed() { "ok" } else { "FAIL" }
                );
            }
            println!(
                "all {} blocks within tolerance {:.0e}",
                reports.len(),
                verify::TOLERANCE
            );
            Ok(())
        }
        Command::GenSynthetic(args) => {
            let kind = match args.kind.to_ascii_lowercase().as_str() {
                "corpus" => SyntheticKind::Corpus,
                "graph" => SyntheticKind::Graph,
                other => {
                    return Err(Error::Config(format!(
                        "unknown synthetic kind '{other}' (corpus or graph)"
                    )))
                }
            };
            let spec = SyntheticSpec {
                kind,
                blocks: args.blocks,
                block_size: args.block_size,
                p_in: args.p_in,
                p_out: args.p_out,
                papers: args.papers,
            };
            let outcome = cmd_gen_synthetic(&cfg, &spec)?;
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}
