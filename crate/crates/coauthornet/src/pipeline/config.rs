//! Run configuration: a flat `key = value` file, overridable per-key from
//! the command line. Unknown keys are rejected so typos fail loudly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::embeddings::walks::WalkConfig;
use crate::embeddings::Aggregator;
use crate::error::{Error, Result};
use crate::linkpred::LinkOperator;
use crate::text::{VectorizerConfig, VectorizerMode};

/// How article (paper) embeddings are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArticleMethod {
    /// No citation data at all: the author model sees interests only.
    None,
    /// Abstract vectors passed through untrained.
    AbstractsOnly,
    Node2Vec,
    Attri2Vec,
    SageMean,
    SageMaxPool,
}

impl ArticleMethod {
    pub const ALL: [ArticleMethod; 6] = [
        ArticleMethod::None,
        ArticleMethod::AbstractsOnly,
        ArticleMethod::Node2Vec,
        ArticleMethod::Attri2Vec,
        ArticleMethod::SageMean,
        ArticleMethod::SageMaxPool,
    ];

    /// Does this method produce article embeddings at all?
    pub fn produces_embeddings(&self) -> bool {
        !matches!(self, ArticleMethod::None)
    }

    /// Table descriptor, matching the evaluation table conventions.
    pub fn descriptor(&self) -> &'static str {
        match self {
            ArticleMethod::None => "--",
            ArticleMethod::AbstractsOnly => "Abstracts",
            ArticleMethod::Node2Vec => "Node2Vec",
            ArticleMethod::Attri2Vec => "Attri2Vec",
            ArticleMethod::SageMean => "GraphSAGE (Mean)",
            ArticleMethod::SageMaxPool => "GraphSAGE (MaxPool)",
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            ArticleMethod::None => "none",
            ArticleMethod::AbstractsOnly => "abstracts-only",
            ArticleMethod::Node2Vec => "node2vec",
            ArticleMethod::Attri2Vec => "attri2vec",
            ArticleMethod::SageMean => "graphsage-mean",
            ArticleMethod::SageMaxPool => "graphsage-maxpool",
        }
    }
}

impl std::str::FromStr for ArticleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ArticleMethod::ALL
            .into_iter()
            .find(|m| m.key() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown article method '{s}' (expected one of: {})",
                    ArticleMethod::ALL.map(|m| m.key()).join(", ")
                ))
            })
    }
}

/// Everything a run needs. Field defaults are the documented defaults of the
/// whole pipeline.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub offline: bool,
    pub threads: usize,

    pub metadata_path: Option<PathBuf>,
    pub edges_path: Option<PathBuf>,
    pub lookup_path: Option<PathBuf>,
    pub metrics_path: Option<PathBuf>,
    pub metrics_url: Option<String>,
    /// Metrics cache; the `COAUTHORNET_CACHE` env var overrides it.
    pub cache_path: Option<PathBuf>,

    pub vectorizer_mode: VectorizerMode,
    pub vectorizer_dim: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub vectorizer_table: Option<PathBuf>,

    pub walk: WalkConfig,

    pub article_method: ArticleMethod,
    pub article_dim: usize,
    pub article_epochs: usize,
    /// Per-method default when absent: 0.025 for the SGD trainers, 1e-3 for
    /// the Adam-trained encoder.
    pub article_lr: Option<f64>,
    pub negatives: usize,
    pub respect_direction: bool,

    pub interest_dim: usize,

    pub author_aggregator: Aggregator,
    pub operator: LinkOperator,
    pub model_dim: usize,
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub normalize: bool,
    pub classifier_hidden: Option<usize>,
    /// Mean- instead of sum-pool the per-author article embeddings.
    pub mean_pool: bool,
    pub sample_sizes: Option<Vec<usize>>,

    pub split_ratio: (u32, u32, u32),
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            out: PathBuf::from("runs/default"),
            offline: false,
            threads: 1,
            metadata_path: None,
            edges_path: None,
            lookup_path: None,
            metrics_path: None,
            metrics_url: None,
            cache_path: None,
            vectorizer_mode: VectorizerMode::HashedNgrams,
            vectorizer_dim: 100,
            ngram_min: 3,
            ngram_max: 5,
            vectorizer_table: None,
            walk: WalkConfig::default(),
            article_method: ArticleMethod::SageMean,
            article_dim: 128,
            article_epochs: 5,
            article_lr: None,
            negatives: 5,
            respect_direction: false,
            interest_dim: 64,
            author_aggregator: Aggregator::Mean,
            operator: LinkOperator::L2,
            model_dim: 128,
            epochs: 20,
            lr: 1e-3,
            batch: 512,
            normalize: true,
            classifier_hidden: None,
            mean_pool: false,
            sample_sizes: None,
            split_ratio: (3, 1, 2),
        }
    }
}

impl RunConfig {
    pub fn vectorizer_config(&self) -> VectorizerConfig {
        VectorizerConfig {
            mode: self.vectorizer_mode,
            dim: self.vectorizer_dim,
            ngram_range: (self.ngram_min, self.ngram_max),
            table_path: self.vectorizer_table.clone(),
        }
    }

    /// Metrics cache path: env override, configured path, or the default
    /// location under the output directory.
    pub fn metrics_cache(&self) -> PathBuf {
        if let Ok(env) = std::env::var("COAUTHORNET_CACHE") {
            if !env.is_empty() {
                return PathBuf::from(env);
            }
        }
        self.cache_path
            .clone()
            .unwrap_or_else(|| self.out.join("ingest").join("metrics_cache.csv"))
    }

    /// Parse a config file and fold it into the defaults.
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            pairs.insert(key.trim().to_string(), (value.trim().to_string(), lineno + 1));
        }
        for (key, (value, lineno)) in pairs {
            cfg.apply(&key, &value).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    /// Apply one `key = value` setting (file and CLI overrides both land
    /// here).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Config(format!("'{v}' is not a count")))
        };
        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Config(format!("'{v}' is not a number")))
        };
        let parse_bool = |v: &str| -> Result<bool> {
            match v.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                other => Err(Error::Config(format!("'{other}' is not a boolean"))),
            }
        };
        match key {
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("'{value}' is not a seed")))?
            }
            "out" => self.out = PathBuf::from(value),
            "offline" => self.offline = parse_bool(value)?,
            "threads" => self.threads = parse_usize(value)?.max(1),
            "paths.metadata" => self.metadata_path = Some(PathBuf::from(value)),
            "paths.edges" => self.edges_path = Some(PathBuf::from(value)),
            "paths.lookup" => self.lookup_path = Some(PathBuf::from(value)),
            "paths.metrics" => self.metrics_path = Some(PathBuf::from(value)),
            "paths.metrics_url" => self.metrics_url = Some(value.to_string()),
            "paths.cache" => self.cache_path = Some(PathBuf::from(value)),
            "vectorizer.mode" => self.vectorizer_mode = value.parse()?,
            "vectorizer.dim" => self.vectorizer_dim = parse_usize(value)?,
            "vectorizer.ngram_min" => self.ngram_min = parse_usize(value)?,
            "vectorizer.ngram_max" => self.ngram_max = parse_usize(value)?,
            "vectorizer.table" => self.vectorizer_table = Some(PathBuf::from(value)),
            "walk.p" => self.walk.p = parse_f64(value)?,
            "walk.q" => self.walk.q = parse_f64(value)?,
            "walk.length" => self.walk.walk_length = parse_usize(value)?,
            "walk.walks_per_node" => self.walk.walks_per_node = parse_usize(value)?,
            "walk.window" => self.walk.window = parse_usize(value)?,
            "article.method" => self.article_method = value.parse()?,
            "article.dim" => self.article_dim = parse_usize(value)?,
            "article.epochs" => self.article_epochs = parse_usize(value)?,
            "article.lr" => self.article_lr = Some(parse_f64(value)?),
            "article.negatives" => self.negatives = parse_usize(value)?,
            "article.respect_direction" => self.respect_direction = parse_bool(value)?,
            "interests.dim" => self.interest_dim = parse_usize(value)?,
            "model.aggregator" => self.author_aggregator = value.parse()?,
            "model.operator" => self.operator = value.parse()?,
            "model.dim" => self.model_dim = parse_usize(value)?,
            "model.epochs" => self.epochs = parse_usize(value)?,
            "model.lr" => self.lr = parse_f64(value)?,
            "model.batch" => self.batch = parse_usize(value)?,
            "model.normalize" => self.normalize = parse_bool(value)?,
            "model.classifier_hidden" => {
                let h = parse_usize(value)?;
                self.classifier_hidden = if h == 0 { None } else { Some(h) };
            }
            "model.mean_pool" => self.mean_pool = parse_bool(value)?,
            "model.sample_sizes" => {
                if value.eq_ignore_ascii_case("full") || value.is_empty() {
                    self.sample_sizes = None;
                } else {
                    let sizes: Result<Vec<usize>> =
                        value.split(',').map(|t| parse_usize(t.trim())).collect();
                    self.sample_sizes = Some(sizes?);
                }
            }
            "split.ratio" => {
                let parts: Vec<&str> = value.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::Config(format!(
                        "split ratio '{value}' must look like 3:1:2"
                    )));
                }
                let p = |s: &str| -> Result<u32> {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad ratio part '{s}'")))
                };
                self.split_ratio = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
            }
            other => return Err(Error::Config(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Learning rate for the chosen article method.
    pub fn effective_article_lr(&self) -> f64 {
        self.article_lr.unwrap_or(match self.article_method {
            ArticleMethod::SageMean | ArticleMethod::SageMaxPool => 1e-3,
            _ => 0.025,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_comments_parse() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# experiment\nseed = 42\nmodel.operator = hadamard  # inline comment\n\
             walk.p = 0.5\nsplit.ratio = 4:1:1\narticle.method = node2vec\n",
        )
        .unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.operator, LinkOperator::Hadamard);
        assert_eq!(cfg.walk.p, 0.5);
        assert_eq!(cfg.split_ratio, (4, 1, 1));
        assert_eq!(cfg.article_method, ArticleMethod::Node2Vec);
        // Untouched keys keep defaults.
        assert_eq!(cfg.model_dim, 128);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply("model.oprator", "l2").is_err());
        assert!(cfg.apply("model.operator", "l2").is_ok());
    }

    #[test]
    fn env_var_overrides_cache_path() {
        let cfg = RunConfig::default();
        std::env::remove_var("COAUTHORNET_CACHE");
        let default = cfg.metrics_cache();
        assert!(default.starts_with(&cfg.out));
        std::env::set_var("COAUTHORNET_CACHE", "/tmp/somewhere.csv");
        assert_eq!(cfg.metrics_cache(), PathBuf::from("/tmp/somewhere.csv"));
        std::env::remove_var("COAUTHORNET_CACHE");
    }

    #[test]
    fn sample_sizes_parse_and_clear() {
        let mut cfg = RunConfig::default();
        cfg.apply("model.sample_sizes", "10, 5").unwrap();
        assert_eq!(cfg.sample_sizes, Some(vec![10, 5]));
        cfg.apply("model.sample_sizes", "full").unwrap();
        assert_eq!(cfg.sample_sizes, None);
    }
}
