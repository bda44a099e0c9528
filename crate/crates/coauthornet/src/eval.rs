//! Edge splitting, negative sampling, metric computation, and result tables.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::seed;

/// A labeled link sample: endpoints and a 0/1 label.
pub type LinkSample = (NodeId, NodeId, u8);

/// Train/validation/test partitions of positive edges plus uniformly sampled
/// non-edge negatives, balanced 1:1 within each partition.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train: Vec<LinkSample>,
    pub val: Vec<LinkSample>,
    pub test: Vec<LinkSample>,
    pub seed: u64,
    pub ratio: (u32, u32, u32),
}

impl EdgeSplit {
    pub fn partitions(&self) -> [(&'static str, &[LinkSample]); 3] {
        [
            ("train", &self.train),
            ("val", &self.val),
            ("test", &self.test),
        ]
    }

    /// Positive train edges; the only edges allowed into message passing.
    pub fn train_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.train
            .iter()
            .filter(|(_, _, y)| *y == 1)
            .map(|&(u, v, _)| (u, v))
            .collect()
    }
}

/// Partition sizes for `total` items under ratio `(a, b, c)`:
/// floor-proportional for the second and third block, remainder to the first.
fn partition_sizes(total: usize, ratio: (u32, u32, u32)) -> (usize, usize, usize) {
    let denom = (ratio.0 + ratio.1 + ratio.2) as usize;
    assert!(denom > 0, "split ratio must be positive");
    let val = total * ratio.1 as usize / denom;
    let test = total * ratio.2 as usize / denom;
    (total - val - test, val, test)
}

/// Split the edges of `g` into train/val/test link samples.
///
/// Positive edges are shuffled by a seeded generator and cut floor-
/// proportionally with the remainder assigned to train. An equal number of
/// distinct negatives is rejection-sampled from the non-edges of the full
/// graph; sampling gives up (and errors) after `100 × needed` attempts on
/// graphs too dense to provide enough distinct non-edges.
pub fn split_edges(g: &Graph, ratio: (u32, u32, u32), master_seed: u64) -> Result<EdgeSplit> {
    let mut positives = g.edges();
    if positives.len() < 6 {
        return Err(Error::Config(format!(
            "need at least 6 edges to split, graph has {}",
            positives.len()
        )));
    }
    let mut shuffle_rng =
        ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "split/shuffle"));
    positives.shuffle(&mut shuffle_rng);
    let (n_train, n_val, n_test) = partition_sizes(positives.len(), ratio);

    let negatives = sample_negatives(g, positives.len(), master_seed)?;

    let make = |pos: &[(NodeId, NodeId)], neg: &[(NodeId, NodeId)]| -> Vec<LinkSample> {
        pos.iter()
            .map(|&(u, v)| (u, v, 1u8))
            .chain(neg.iter().map(|&(u, v)| (u, v, 0u8)))
            .collect()
    };
    Ok(EdgeSplit {
        train: make(&positives[..n_train], &negatives[..n_train]),
        val: make(
            &positives[n_train..n_train + n_val],
            &negatives[n_train..n_train + n_val],
        ),
        test: make(
            &positives[n_train + n_val..],
            &negatives[n_train + n_val..n_train + n_val + n_test],
        ),
        seed: master_seed,
        ratio,
    })
}

fn sample_negatives(g: &Graph, needed: usize, master_seed: u64) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.node_count() as NodeId;
    if n < 2 {
        return Err(Error::Config("negative sampling needs at least 2 nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, "split/negatives"));
    let mut seen = std::collections::HashSet::with_capacity(needed);
    let mut out = Vec::with_capacity(needed);
    let budget = needed.saturating_mul(100);
    let mut attempts = 0;
    while out.len() < needed {
        if attempts >= budget {
            return Err(Error::SamplingExhausted { attempts, needed });
        }
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if g.has_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    Ok(out)
}

/// Scalar quality measures of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub auc_roc: f64,
    pub f1: f64,
    pub threshold: f64,
    pub count: usize,
}

/// Metrics plus the configuration axes they were measured under.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub article_embedding: String,
    pub author_embedding: String,
    pub operator: String,
    pub metrics: Metrics,
}

/// Accuracy, AUC-ROC, and F1 at the given threshold.
///
/// AUC follows the pairwise definition — the fraction of positive/negative
/// pairs ranked correctly, ties counted half — computed via the equivalent
/// rank-statistic form. Single-class inputs make AUC undefined: the error
/// carries accuracy and F1 so callers can still report them.
pub fn compute_metrics(labels: &[u8], scores: &[f64], threshold: f64) -> Result<Metrics> {
    if labels.len() != scores.len() {
        return Err(Error::Dimension(format!(
            "{} labels vs {} scores",
            labels.len(),
            scores.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Dimension("metrics need at least one sample".into()));
    }
    let (mut tp, mut fp, mut tn, mut fnn) = (0usize, 0usize, 0usize, 0usize);
    for (&y, &s) in labels.iter().zip(scores) {
        let predicted = s >= threshold;
        match (y == 1, predicted) {
            (true, true) => tp += 1,
            (true, false) => fnn += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let accuracy = (tp + tn) as f64 / labels.len() as f64;
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fnn == 0 {
        0.0
    } else {
        tp as f64 / (tp + fnn) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::AucUndefined { accuracy, f1 });
    }
    let auc_roc = auc_rank(labels, scores);
    Ok(Metrics {
        accuracy,
        auc_roc,
        f1,
        threshold,
        count: labels.len(),
    })
}

/// Mann–Whitney form of AUC: average-rank statistic over tied groups. Equals
/// the brute-force pairwise count (ties at half weight) exactly.
pub fn auc_rank(labels: &[u8], scores: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1 share the average rank.
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    let pos = labels.iter().filter(|&&y| y == 1).count() as f64;
    let neg = labels.len() as f64 - pos;
    (rank_sum_pos - pos * (pos + 1.0) / 2.0) / (pos * neg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

pub const REPORT_CSV_HEADER: &str = "article_embedding,author_embedding,operator,accuracy,auc_roc,f1";

/// Render reports in input order, four decimals, mirroring the evaluation
/// table layout: article embedding, author embedding, operator, then the
/// three metrics.
pub fn results_table(reports: &[MetricsReport], format: TableFormat) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Text => {
            out.push_str(
                "Article embedding | Author embedding | LP op. | Accuracy | AUC-ROC | F1-score\n",
            );
            for r in reports {
                out.push_str(&format!(
                    "{} | {} | {} | {:.4} | {:.4} | {:.4}\n",
                    r.article_embedding,
                    r.author_embedding,
                    r.operator,
                    r.metrics.accuracy,
                    r.metrics.auc_roc,
                    r.metrics.f1
                ));
            }
        }
        TableFormat::Csv => {
            out.push_str(REPORT_CSV_HEADER);
            out.push('\n');
            for r in reports {
                out.push_str(&report_csv_row(r));
                out.push('\n');
            }
        }
    }
    out
}

pub fn report_csv_row(r: &MetricsReport) -> String {
    format!(
        "{},{},{},{:.4},{:.4},{:.4}",
        r.article_embedding,
        r.author_embedding,
        r.operator,
        r.metrics.accuracy,
        r.metrics.auc_roc,
        r.metrics.f1
    )
}
