//! Embedding text format: first line `N D`, then `N` lines of
//! `token v_1 … v_D`, space-separated decimal floats. Shared by the abstract
//! vectorizer (pretrained tables) and the embedding trainers (persisted node
//! vectors).

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Token-keyed embedding table with one fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TextEmbeddings {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl TextEmbeddings {
    pub fn new(dim: usize) -> Self {
        TextEmbeddings {
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Insert a row. Duplicate tokens keep the first occurrence (warned).
    pub fn push(&mut self, token: &str, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vector for '{token}' has dimension {}, table has {}",
                vector.len(),
                self.dim
            )));
        }
        if self.index.contains_key(token) {
            log::warn!("duplicate token '{token}', keeping the first occurrence");
            return Ok(());
        }
        self.index.insert(token.to_string(), self.tokens.len());
        self.tokens.push(token.to_string());
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.tokens
            .iter()
            .enumerate()
            .map(move |(i, t)| (t.as_str(), &self.data[i * self.dim..(i + 1) * self.dim]))
    }
}

/// Read a table; a row with the wrong value count is a format error naming
/// the line.
pub fn read_embeddings(path: &Path) -> Result<TextEmbeddings> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_embeddings_from(std::io::BufReader::new(file), path)
}

pub fn read_embeddings_from(reader: impl BufRead, path: &Path) -> Result<TextEmbeddings> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| Error::io(path, e))?,
        None => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: "empty file, expected 'N D' header".into(),
            })
        }
    };
    let parse_header = || -> Option<(usize, usize)> {
        let mut it = header.split_whitespace();
        let n = it.next()?.parse().ok()?;
        let d = it.next()?.parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        Some((n, d))
    };
    let (n, dim) = parse_header().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg: format!("bad header '{header}', expected 'N D'"),
    })?;
    let mut table = TextEmbeddings::new(dim);
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let token = it.next().expect("non-empty line has a first token");
        let values: std::result::Result<Vec<f64>, _> = it.map(str::parse::<f64>).collect();
        let values = values.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg: format!("bad float: {e}"),
        })?;
        if values.len() != dim {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("row has {} values, header promised {dim}", values.len()),
            });
        }
        table.push(token, &values)?;
        rows += 1;
    }
    if rows != n {
        log::warn!(
            "{}: header promised {n} rows, found {rows}",
            path.display()
        );
    }
    Ok(table)
}

/// Write rows in the text format. Float formatting uses Rust's shortest
/// round-trip representation, so save/load is value-exact.
pub fn write_embeddings<'a>(
    path: &Path,
    dim: usize,
    rows: impl ExactSizeIterator<Item = (&'a str, &'a [f64])>,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);
    writeln!(w, "{} {}", rows.len(), dim).map_err(io_err)?;
    for (token, vector) in rows {
        debug_assert_eq!(vector.len(), dim);
        write!(w, "{token}").map_err(io_err)?;
        for v in vector {
            write!(w, " {v}").map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    Ok(())
}

pub fn write_table(path: &Path, table: &TextEmbeddings) -> Result<()> {
    write_embeddings(path, table.dim(), ExactIter(table.iter(), table.len()))
}

struct ExactIter<I>(I, usize);

impl<'a, I: Iterator<Item = (&'a str, &'a [f64])>> Iterator for ExactIter<I> {
    type Item = (&'a str, &'a [f64]);
    fn next(&mut self) -> Option<Self::Item> {
        self.0.next()
    }
    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.1, Some(self.1))
    }
}

impl<'a, I: Iterator<Item = (&'a str, &'a [f64])>> ExactSizeIterator for ExactIter<I> {}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn read_str(text: &str) -> Result<TextEmbeddings> {
        read_embeddings_from(Cursor::new(text.as_bytes()), Path::new("<memory>"))
    }

    #[test]
    fn header_and_rows_parse() {
        let table = read_str("2 3\nalpha 1 2 3\nbeta 0.5 -1.5 2.25\n").unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.dim(), 3);
        assert_eq!(table.get("alpha"), Some(&[1.0, 2.0, 3.0][..]));
        assert_eq!(table.get("beta"), Some(&[0.5, -1.5, 2.25][..]));
        assert_eq!(table.get("missing"), None);
    }

    #[test]
    fn short_row_errors_with_line_number() {
        let err = read_str("2 3\nalpha 1 2 3\nbeta 1 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":3"), "{msg}");
        assert!(msg.contains("2 values"), "{msg}");
    }

    #[test]
    fn duplicate_token_keeps_first() {
        let table = read_str("2 2\ntok 1 2\ntok 9 9\n").unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.get("tok"), Some(&[1.0, 2.0][..]));
    }

    #[test]
    fn roundtrip_is_value_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        let mut table = TextEmbeddings::new(3);
        table.push("a", &[0.1, -2.5e-7, 3.0]).unwrap();
        table.push("b", &[1.0 / 3.0, f64::MIN_POSITIVE, 1e300]).unwrap();
        write_table(&path, &table).unwrap();
        let back = read_embeddings(&path).unwrap();
        assert_eq!(table, back);
    }

    #[test]
    fn bad_header_is_a_parse_error() {
        assert!(read_str("").is_err());
        assert!(read_str("3\n").is_err());
        assert!(read_str("a b\n").is_err());
    }
}
