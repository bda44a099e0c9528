//! On-disk layout of a run directory and the readers/writers for every
//! artifact. All formats are plain text (edge lists, TSV, the embedding text
//! format) except the binary model checkpoint.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::embeddings::EmbeddingMatrix;
use crate::embtext;
use crate::error::{Error, Result};
use crate::eval::{EdgeSplit, LinkSample};
use crate::graph::{FeatureMatrix, NodeId};
use crate::ingest::AuthorTable;

/// Resolved paths under one output directory.
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: &Path) -> Self {
        Layout {
            root: root.to_path_buf(),
        }
    }

    pub fn ingest_dir(&self) -> PathBuf {
        self.root.join("ingest")
    }
    pub fn citation_edges(&self) -> PathBuf {
        self.ingest_dir().join("citation.edges")
    }
    pub fn papers_tsv(&self) -> PathBuf {
        self.ingest_dir().join("papers.tsv")
    }
    pub fn coauthor_edges(&self) -> PathBuf {
        self.ingest_dir().join("coauthor.edges")
    }
    pub fn authors_tsv(&self) -> PathBuf {
        self.ingest_dir().join("authors.tsv")
    }
    pub fn abstract_features(&self) -> PathBuf {
        self.ingest_dir().join("abstract_features.emb")
    }
    pub fn interest_features(&self) -> PathBuf {
        self.ingest_dir().join("interest_features.emb")
    }
    pub fn paper_issn(&self) -> PathBuf {
        self.ingest_dir().join("paper_issn.tsv")
    }
    pub fn metrics_csv(&self) -> PathBuf {
        self.ingest_dir().join("metrics.csv")
    }
    pub fn stats_txt(&self) -> PathBuf {
        self.ingest_dir().join("stats.txt")
    }

    pub fn embed_dir(&self) -> PathBuf {
        self.root.join("embed")
    }
    pub fn paper_embeddings(&self) -> PathBuf {
        self.embed_dir().join("papers.emb")
    }
    pub fn embed_manifest(&self) -> PathBuf {
        self.embed_dir().join("manifest.txt")
    }

    pub fn train_dir(&self) -> PathBuf {
        self.root.join("train")
    }
    pub fn split_tsv(&self) -> PathBuf {
        self.train_dir().join("split.tsv")
    }
    pub fn checkpoint(&self) -> PathBuf {
        self.train_dir().join("checkpoint.bin")
    }
    pub fn history_csv(&self) -> PathBuf {
        self.train_dir().join("history.csv")
    }

    pub fn results_csv(&self) -> PathBuf {
        self.root.join("results.csv")
    }

    pub fn lock_path(&self) -> PathBuf {
        self.root.join(".lock")
    }
}

/// Exclusive lock on an output directory, released on drop. Concurrent
/// commands writing the same run directory are refused.
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(layout: &Layout) -> Result<OutputLock> {
        std::fs::create_dir_all(&layout.root).map_err(|e| Error::io(&layout.root, e))?;
        let path = layout.lock_path();
        match std::fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(OutputLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::Locked { lock: path })
            }
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `node_id<TAB>external_id` map for papers.
pub fn write_paper_ids(path: &Path, external_ids: &[u64]) -> Result<()> {
    let mut text = String::new();
    for (node, ext) in external_ids.iter().enumerate() {
        text.push_str(&format!("{node}\t{ext}\n"));
    }
    write_text(path, &text)
}

pub fn read_paper_ids(path: &Path) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut it = line.split('\t');
        let err = || Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: "expected 'node_id<TAB>external_id'".into(),
        };
        let node: usize = it.next().ok_or_else(err)?.parse().map_err(|_| err())?;
        let ext: u64 = it.next().ok_or_else(err)?.parse().map_err(|_| err())?;
        if node != out.len() {
            return Err(err());
        }
        out.push(ext);
    }
    Ok(out)
}

/// `author_id<TAB>name<TAB>space-separated paper ids` (paper list may be
/// empty).
pub fn write_author_table(path: &Path, table: &AuthorTable) -> Result<()> {
    let mut text = String::new();
    for id in 0..table.len() as NodeId {
        let papers: Vec<String> = table
            .papers_of(id)
            .iter()
            .map(|p| p.to_string())
            .collect();
        text.push_str(&format!("{id}\t{}\t{}\n", table.name_of(id), papers.join(" ")));
    }
    write_text(path, &text)
}

pub fn read_author_table(path: &Path) -> Result<AuthorTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut names = Vec::new();
    let mut papers = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let parts: Vec<&str> = line.splitn(3, '\t').collect();
        let err = |msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: msg.into(),
        };
        if parts.len() < 2 {
            return Err(err("expected 'id<TAB>name<TAB>papers'"));
        }
        let id: usize = parts[0].parse().map_err(|_| err("bad author id"))?;
        if id != names.len() {
            return Err(err("author ids must be dense and ascending"));
        }
        names.push(parts[1].to_string());
        let list = if parts.len() == 3 && !parts[2].is_empty() {
            parts[2]
                .split_whitespace()
                .map(|t| t.parse::<NodeId>().map_err(|_| err("bad paper id")))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        papers.push(list);
    }
    AuthorTable::from_parts(names, papers)
}

/// Feature matrices persist in the embedding text format with the row index
/// as the token.
pub fn write_features(path: &Path, features: &FeatureMatrix) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tokens: Vec<String> = (0..features.rows()).map(|i| i.to_string()).collect();
    embtext::write_embeddings(
        path,
        features.dim(),
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), features.row(i)))
            .collect::<Vec<_>>()
            .into_iter(),
    )
}

pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    let table = embtext::read_embeddings(path)?;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::with_capacity(table.len());
    for (token, v) in table.iter() {
        let idx: usize = token.parse().map_err(|_| {
            Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: format!("feature token '{token}' is not a row index"),
            }
        })?;
        rows.push((idx, v.to_vec()));
    }
    rows.sort_by_key(|(i, _)| *i);
    let data: Vec<f64> = rows.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    FeatureMatrix::from_flat(rows.len(), table.dim(), data)
}

/// Node embeddings persist with their node id as the token.
pub fn write_node_embeddings(path: &Path, emb: &EmbeddingMatrix) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tokens: Vec<String> = emb.ids().iter().map(|id| id.to_string()).collect();
    let rows: Vec<(&str, &[f64])> = emb
        .iter()
        .zip(&tokens)
        .map(|((_, v), t)| (t.as_str(), v))
        .collect();
    embtext::write_embeddings(path, emb.dim(), rows.into_iter())
}

pub fn read_node_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let table = embtext::read_embeddings(path)?;
    let mut emb = EmbeddingMatrix::new(table.dim());
    for (token, v) in table.iter() {
        let id: NodeId = token.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: format!("embedding token '{token}' is not a node id"),
        })?;
        emb.insert(id, v)?;
    }
    Ok(emb)
}

/// Split persistence: a seed/ratio header then one
/// `partition<TAB>u<TAB>v<TAB>label` line per sample.
pub fn write_split(path: &Path, split: &EdgeSplit) -> Result<()> {
    let mut text = format!(
        "# seed {} ratio {}:{}:{}\n",
        split.seed, split.ratio.0, split.ratio.1, split.ratio.2
    );
    for (name, samples) in split.partitions() {
        for (u, v, y) in samples {
            text.push_str(&format!("{name}\t{u}\t{v}\t{y}\n"));
        }
    }
    write_text(path, &text)
}

pub fn read_split(path: &Path) -> Result<EdgeSplit> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let err = |lineno: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line: lineno + 1,
        msg,
    };
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(0, "empty split file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 5 || tokens[0] != "#" || tokens[1] != "seed" || tokens[3] != "ratio" {
        return Err(err(0, format!("bad split header '{header}'")));
    }
    let seed: u64 = tokens[2]
        .parse()
        .map_err(|_| err(0, "bad seed in split header".into()))?;
    let ratio_parts: Vec<&str> = tokens[4].split(':').collect();
    if ratio_parts.len() != 3 {
        return Err(err(0, "bad ratio in split header".into()));
    }
    let r = |s: &str| -> Result<u32> {
        s.parse().map_err(|_| err(0, "bad ratio in split header".into()))
    };
    let ratio = (r(ratio_parts[0])?, r(ratio_parts[1])?, r(ratio_parts[2])?);
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 4 {
            return Err(err(lineno, "expected 'partition<TAB>u<TAB>v<TAB>label'".into()));
        }
        let sample: LinkSample = (
            parts[1].parse().map_err(|_| err(lineno, "bad u".into()))?,
            parts[2].parse().map_err(|_| err(lineno, "bad v".into()))?,
            parts[3].parse().map_err(|_| err(lineno, "bad label".into()))?,
        );
        match parts[0] {
            "train" => train.push(sample),
            "val" => val.push(sample),
            "test" => test.push(sample),
            other => return Err(err(lineno, format!("unknown partition '{other}'"))),
        }
    }
    Ok(EdgeSplit {
        train,
        val,
        test,
        seed,
        ratio,
    })
}

/// `node_id<TAB>issn` rows for papers with a resolvable journal.
pub fn write_paper_issn(path: &Path, rows: &[(NodeId, String)]) -> Result<()> {
    let mut text = String::new();
    for (node, issn) in rows {
        text.push_str(&format!("{node}\t{issn}\n"));
    }
    write_text(path, &text)
}

pub fn read_paper_issn(path: &Path) -> Result<HashMap<NodeId, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let (node, issn) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: "expected 'node_id<TAB>issn'".into(),
        })?;
        let node: NodeId = node.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: "bad node id".into(),
        })?;
        out.insert(node, issn.to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::ingest::PaperRecord;

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let layout = Layout::new(dir.path());
        let lock = OutputLock::acquire(&layout).unwrap();
        assert!(matches!(
            OutputLock::acquire(&layout),
            Err(Error::Locked { .. })
        ));
        drop(lock);
        let _second = OutputLock::acquire(&layout).unwrap();
    }

    #[test]
    fn split_roundtrips() {
        let g = build_graph(
            &(0..30u32).map(|i| (i, (i + 1) % 30)).collect::<Vec<_>>(),
            30,
            false,
        )
        .unwrap();
        let split = crate::eval::split_edges(&g, (3, 1, 2), 17).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("split.tsv");
        write_split(&path, &split).unwrap();
        let back = read_split(&path).unwrap();
        assert_eq!(split, back);
    }

    #[test]
    fn author_table_roundtrips() {
        let papers = vec![
            PaperRecord {
                paper_id: 1,
                title: String::new(),
                abstract_text: "t".into(),
                authors: vec!["ann x".into(), "bo y".into()],
                journal_ref: None,
                date: None,
            },
            PaperRecord {
                paper_id: 2,
                title: String::new(),
                abstract_text: "t".into(),
                authors: vec!["ann x".into()],
                journal_ref: None,
                date: None,
            },
        ];
        let (_, table) = crate::ingest::reconstruct_coauthorship(&papers).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("authors.tsv");
        write_author_table(&path, &table).unwrap();
        let back = read_author_table(&path).unwrap();
        assert_eq!(table, back);
    }

    #[test]
    fn features_and_embeddings_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let features =
            FeatureMatrix::from_rows(&[vec![1.0, 0.25], vec![-1.5, 2.0], vec![0.0, 0.125]])
                .unwrap();
        let fpath = dir.path().join("x.emb");
        write_features(&fpath, &features).unwrap();
        assert_eq!(read_features(&fpath).unwrap(), features);

        let mut emb = EmbeddingMatrix::new(2);
        emb.insert(4, &[0.5, -0.5]).unwrap();
        emb.insert(1, &[1.0, 2.0]).unwrap();
        let epath = dir.path().join("nodes.emb");
        write_node_embeddings(&epath, &emb).unwrap();
        assert_eq!(read_node_embeddings(&epath).unwrap(), emb);
    }
}
