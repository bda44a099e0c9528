//! Abstract vectorization: fixed-dimension real vectors for paper abstracts.
//!
//! The default mode hashes character n-grams — fully deterministic, no
//! training, no external files. Each n-gram of the lowercased text is hashed
//! with 64-bit FNV-1a; the hash's low bit picks a sign in {−1, +1} and the
//! remaining bits pick a slot in `[0, dim)`; contributions accumulate and
//! the result is L2-normalized (the zero vector stays zero).
//!
//! The pretrained mode averages per-token vectors loaded from an embedding
//! text file, for runs that want externally trained (e.g. subword) vectors
//! behind the same interface.

use std::path::PathBuf;

use crate::embtext::{read_embeddings, TextEmbeddings};
use crate::error::{Error, Result};
use crate::nn::l2_normalize;
use crate::seed::fnv1a64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorizerMode {
    HashedNgrams,
    PretrainedTable,
}

impl std::str::FromStr for VectorizerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hashed-ngrams" | "hashed" => Ok(VectorizerMode::HashedNgrams),
            "pretrained-table" | "pretrained" => Ok(VectorizerMode::PretrainedTable),
            other => Err(Error::Config(format!("unknown vectorizer mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VectorizerConfig {
    pub mode: VectorizerMode,
    pub dim: usize,
    /// Inclusive character n-gram length range for the hashed mode.
    pub ngram_range: (usize, usize),
    pub table_path: Option<PathBuf>,
}

impl Default for VectorizerConfig {
    fn default() -> Self {
        VectorizerConfig {
            mode: VectorizerMode::HashedNgrams,
            dim: 100,
            ngram_range: (3, 5),
            table_path: None,
        }
    }
}

/// Ready-to-use vectorizer; construction validates the config and loads the
/// pretrained table when one is configured.
pub struct Vectorizer {
    config: VectorizerConfig,
    table: Option<TextEmbeddings>,
}

impl Vectorizer {
    pub fn new(config: VectorizerConfig) -> Result<Self> {
        if config.dim == 0 {
            return Err(Error::Config("vectorizer dimension must be positive".into()));
        }
        if config.ngram_range.0 < 1 || config.ngram_range.0 > config.ngram_range.1 {
            return Err(Error::Config(format!(
                "bad n-gram range {:?}",
                config.ngram_range
            )));
        }
        let table = match config.mode {
            VectorizerMode::HashedNgrams => None,
            VectorizerMode::PretrainedTable => {
                let path = config.table_path.as_ref().ok_or_else(|| {
                    Error::Config("pretrained mode needs a table path".into())
                })?;
                let table = read_embeddings(path)?;
                if table.dim() != config.dim {
                    return Err(Error::Config(format!(
                        "pretrained table has dimension {}, config says {}",
                        table.dim(),
                        config.dim
                    )));
                }
                Some(table)
            }
        };
        Ok(Vectorizer { config, table })
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    /// Vectorize one text. Pure: output depends only on (text, config).
    pub fn vectorize(&self, text: &str) -> Vec<f64> {
        let mut out = vec![0.0; self.config.dim];
        match self.config.mode {
            VectorizerMode::HashedNgrams => {
                let lower = text.to_lowercase();
                let chars: Vec<char> = lower.chars().collect();
                let (lo, hi) = self.config.ngram_range;
                let mut buf = String::new();
                for n in lo..=hi {
                    if chars.len() < n {
                        break;
                    }
                    for window in chars.windows(n) {
                        buf.clear();
                        buf.extend(window.iter());
                        let (slot, sign) = hash_slot(&buf, self.config.dim);
                        out[slot] += sign;
                    }
                }
            }
            VectorizerMode::PretrainedTable => {
                let table = self.table.as_ref().expect("validated at construction");
                // Sum in canonical table order so permuting the text's
                // tokens gives a bit-identical average.
                let lower = text.to_lowercase();
                let mut matched: Vec<&str> =
                    lower.split_whitespace().filter(|t| table.get(t).is_some()).collect();
                matched.sort_unstable();
                let found = matched.len();
                for token in matched {
                    let v = table.get(token).expect("filtered above");
                    for (slot, x) in out.iter_mut().zip(v) {
                        *slot += x;
                    }
                }
                if found > 0 {
                    let inv = 1.0 / found as f64;
                    for slot in out.iter_mut() {
                        *slot *= inv;
                    }
                }
            }
        }
        l2_normalize(&mut out);
        out
    }
}

/// Slot and sign of one n-gram: FNV-1a over the UTF-8 bytes; low bit 0 maps
/// to +1, low bit 1 to −1; the remaining 63 bits select the slot.
pub fn hash_slot(ngram: &str, dim: usize) -> (usize, f64) {
    let h = fnv1a64(ngram.as_bytes());
    let sign = if h & 1 == 0 { 1.0 } else { -1.0 };
    (((h >> 1) % dim as u64) as usize, sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hashed(dim: usize, range: (usize, usize)) -> Vectorizer {
        Vectorizer::new(VectorizerConfig {
            mode: VectorizerMode::HashedNgrams,
            dim,
            ngram_range: range,
            table_path: None,
        })
        .unwrap()
    }

    #[test]
    fn empty_text_is_the_zero_vector() {
        let v = hashed(8, (3, 5)).vectorize("");
        assert_eq!(v, vec![0.0; 8]);
    }

    #[test]
    fn vectorization_is_deterministic() {
        let vz = hashed(16, (3, 5));
        assert_eq!(vz.vectorize("some abstract text"), vz.vectorize("some abstract text"));
    }

    #[test]
    fn single_ngram_lands_in_the_documented_slot() {
        // Independent recomputation of FNV-1a("abc") in the test itself.
        let mut h: u64 = 0xcbf29ce484222325;
        for &b in b"abc" {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        let expected_slot = ((h >> 1) % 4) as usize;
        let expected_sign = if h & 1 == 0 { 1.0 } else { -1.0 };
        let v = hashed(4, (3, 3)).vectorize("abc");
        assert_eq!(v[expected_slot], expected_sign * 1.0);
        for (i, &x) in v.iter().enumerate() {
            if i != expected_slot {
                assert_eq!(x, 0.0);
            }
        }
    }

    #[test]
    fn pretrained_mode_averages_known_tokens() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.emb");
        std::fs::write(&path, "2 2\nalpha 1 0\nbeta 0 1\n").unwrap();
        let vz = Vectorizer::new(VectorizerConfig {
            mode: VectorizerMode::PretrainedTable,
            dim: 2,
            ngram_range: (3, 5),
            table_path: Some(path),
        })
        .unwrap();
        // Mean of [1,0] and [0,1] is [0.5,0.5]; normalized to 1/sqrt(2).
        let v = vz.vectorize("alpha beta unknown");
        let s = 0.5f64.sqrt();
        assert!((v[0] - s).abs() < 1e-12);
        assert!((v[1] - s).abs() < 1e-12);
        // All-unknown text maps to the zero vector.
        assert_eq!(vz.vectorize("nothing known"), vec![0.0, 0.0]);
    }

    #[test]
    fn pretrained_mode_requires_a_readable_table() {
        let cfg = VectorizerConfig {
            mode: VectorizerMode::PretrainedTable,
            dim: 2,
            ngram_range: (3, 5),
            table_path: Some(PathBuf::from("/nonexistent/table.emb")),
        };
        assert!(Vectorizer::new(cfg).is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.emb");
        std::fs::write(&path, "1 3\ntok 1 2 3\n").unwrap();
        let mismatched = VectorizerConfig {
            mode: VectorizerMode::PretrainedTable,
            dim: 2,
            ngram_range: (3, 5),
            table_path: Some(path),
        };
        assert!(Vectorizer::new(mismatched).is_err());
    }

    proptest! {
        #[test]
        fn nonzero_outputs_are_unit_norm(text in ".{0,60}") {
            let v = hashed(12, (2, 4)).vectorize(&text);
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-9, "norm {norm}");
        }

        #[test]
        fn token_order_does_not_matter_in_pretrained_mode(swap in any::<bool>()) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("table.emb");
            std::fs::write(&path, "3 2\na 1 2\nb -1 0.5\nc 0.25 4\n").unwrap();
            let vz = Vectorizer::new(VectorizerConfig {
                mode: VectorizerMode::PretrainedTable,
                dim: 2,
                ngram_range: (3, 5),
                table_path: Some(path),
            }).unwrap();
            let text = if swap { "c b a" } else { "a b c" };
            let base = vz.vectorize("a b c");
            prop_assert_eq!(vz.vectorize(text), base);
        }
    }
}
