//! ISSN handling and journal-level bibliometric indicators.
//!
//! Metrics come from an offline CSV snapshot (`issn,quartile,h_index,
//! impact_factor`); an optional fetch downloads such a snapshot once and
//! caches it, so the learning pipeline never depends on the network.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Validated serial number: 7 digits plus a mod-11 check digit (`X` = 10).
/// Stored without the hyphen; displays as `NNNN-NNNC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Issn([u8; 8]);

impl Issn {
    /// Parse `0378-5955` or `03785955`, enforcing the check digit.
    pub fn parse(raw: &str) -> Result<Issn> {
        let compact: String = raw.chars().filter(|c| *c != '-').collect();
        let bytes = compact.as_bytes();
        if bytes.len() != 8 {
            return Err(Error::Config(format!(
                "ISSN '{raw}' must have 8 characters, found {}",
                bytes.len()
            )));
        }
        let mut digits = [0u8; 8];
        for (i, &b) in bytes.iter().enumerate() {
            digits[i] = match b {
                b'0'..=b'9' => b - b'0',
                b'X' | b'x' if i == 7 => 10,
                _ => {
                    return Err(Error::Config(format!(
                        "ISSN '{raw}' has an invalid character at position {i}"
                    )))
                }
            };
        }
        let expected = check_digit(&digits[..7]);
        if digits[7] != expected {
            return Err(Error::Config(format!(
                "ISSN '{raw}' fails the check-digit test (expected {})",
                digit_char(expected)
            )));
        }
        Ok(Issn(digits))
    }

    /// Build a valid ISSN from its first 7 digits by computing the check
    /// digit (fixture and generator helper).
    pub fn from_base7(base: [u8; 7]) -> Issn {
        let mut digits = [0u8; 8];
        digits[..7].copy_from_slice(&base);
        digits[7] = check_digit(&base);
        Issn(digits)
    }
}

/// Weighted mod-11 checksum: weights 8..2 over the first seven digits,
/// check = (11 − sum mod 11) mod 11, with 10 rendered as `X`.
fn check_digit(first7: &[u8]) -> u8 {
    let sum: u32 = first7
        .iter()
        .enumerate()
        .map(|(i, &d)| (8 - i as u32) * d as u32)
        .sum();
    ((11 - (sum % 11)) % 11) as u8
}

fn digit_char(d: u8) -> char {
    if d == 10 {
        'X'
    } else {
        (b'0' + d) as char
    }
}

impl fmt::Display for Issn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &d) in self.0.iter().enumerate() {
            if i == 4 {
                f.write_str("-")?;
            }
            f.write_fmt(format_args!("{}", digit_char(d)))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quartile {
    Q1,
    Q2,
    Q3,
    Q4,
    Unknown,
}

impl std::str::FromStr for Quartile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Q1" => Ok(Quartile::Q1),
            "Q2" => Ok(Quartile::Q2),
            "Q3" => Ok(Quartile::Q3),
            "Q4" => Ok(Quartile::Q4),
            "" | "UNKNOWN" | "-" => Ok(Quartile::Unknown),
            other => Err(Error::Config(format!("unknown quartile '{other}'"))),
        }
    }
}

impl fmt::Display for Quartile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Quartile::Q1 => "Q1",
            Quartile::Q2 => "Q2",
            Quartile::Q3 => "Q3",
            Quartile::Q4 => "Q4",
            Quartile::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Journal-level indicators keyed by ISSN.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalMetrics {
    pub issn: Issn,
    pub quartile: Quartile,
    pub h_index: u32,
    pub impact_factor: f64,
}

/// Longest-prefix lookup from normalized journal-name prefixes to ISSNs.
/// The table format is one `prefix<TAB>ISSN` per line.
#[derive(Debug, Clone, Default)]
pub struct IssnLookup {
    entries: Vec<(String, Issn)>,
}

impl IssnLookup {
    pub fn from_entries(entries: Vec<(String, Issn)>) -> Self {
        let mut entries = entries;
        // Longest keys first so the first prefix hit is the longest match.
        entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        IssnLookup { entries }
    }

    /// Load a lookup table; an invalid ISSN anywhere is a configuration
    /// error (the table ships with the deployment, bad rows are bugs).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prefix, issn) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: "expected 'prefix<TAB>ISSN'".into(),
            })?;
            let issn = Issn::parse(issn.trim()).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: e.to_string(),
            })?;
            entries.push((prefix.trim().to_lowercase(), issn));
        }
        Ok(IssnLookup::from_entries(entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// ISSN of the longest table key that prefixes the normalized journal
    /// reference; `None` when nothing matches or the input is empty.
    pub fn extract_issn(&self, journal_ref: Option<&str>) -> Option<Issn> {
        let raw = journal_ref?;
        let normalized = raw
            .to_lowercase()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        if normalized.is_empty() {
            return None;
        }
        self.entries
            .iter()
            .find(|(prefix, _)| normalized.starts_with(prefix.as_str()))
            .map(|(_, issn)| *issn)
    }
}

/// Load a metrics CSV with required columns `issn,quartile,h_index,
/// impact_factor`. Rows with an invalid ISSN are skipped with a warning;
/// duplicate ISSNs keep the last row (warned).
pub fn load_journal_metrics(path: &Path) -> Result<HashMap<Issn, JournalMetrics>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_journal_metrics_reader(file, path)
}

pub fn load_journal_metrics_reader(
    reader: impl Read,
    path: &Path,
) -> Result<HashMap<Issn, JournalMetrics>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                Error::Schema(format!(
                    "{}: missing required column '{name}' (found: {})",
                    path.display(),
                    headers.iter().collect::<Vec<_>>().join(", ")
                ))
            })
    };
    let (c_issn, c_quart, c_h, c_if) = (
        col("issn")?,
        col("quartile")?,
        col("h_index")?,
        col("impact_factor")?,
    );
    let mut out = HashMap::new();
    for (row_idx, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        let lineno = row_idx + 2; // header is line 1
        let issn = match Issn::parse(&record[c_issn]) {
            Ok(issn) => issn,
            Err(e) => {
                log::warn!("{}:{lineno}: skipping row: {e}", path.display());
                continue;
            }
        };
        let quartile: Quartile = record[c_quart].parse().unwrap_or(Quartile::Unknown);
        let h_index: u32 = record[c_h].parse().unwrap_or(0);
        let impact_factor: f64 = record[c_if].parse().unwrap_or(0.0);
        let metrics = JournalMetrics {
            issn,
            quartile,
            h_index,
            impact_factor: impact_factor.max(0.0),
        };
        if out.insert(issn, metrics).is_some() {
            log::warn!(
                "{}:{lineno}: duplicate ISSN {issn}, keeping the later row",
                path.display()
            );
        }
    }
    Ok(out)
}

/// Download a metrics table to `cache_path` and load it. With `offline` set
/// (or on any network failure) the cache is used instead; no network and no
/// cache is an unavailable-metrics error — callers are expected to continue
/// with unknown metrics.
pub fn fetch_journal_metrics(
    endpoint: &str,
    cache_path: &Path,
    offline: bool,
) -> Result<HashMap<Issn, JournalMetrics>> {
    if !offline {
        match download(endpoint) {
            Ok(body) => {
                if let Some(parent) = cache_path.parent() {
                    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                }
                std::fs::write(cache_path, &body).map_err(|e| Error::io(cache_path, e))?;
                return load_journal_metrics(cache_path);
            }
            Err(e) => {
                log::warn!("metrics download from {endpoint} failed: {e}");
            }
        }
    }
    if cache_path.exists() {
        return load_journal_metrics(cache_path);
    }
    Err(Error::MetricsUnavailable(format!(
        "no cached table at {} and network {}",
        cache_path.display(),
        if offline { "disabled" } else { "unreachable" }
    )))
}

fn download(endpoint: &str) -> std::result::Result<String, String> {
    let response = ureq::get(endpoint)
        .timeout(std::time::Duration::from_secs(30))
        .call()
        .map_err(|e| e.to_string())?;
    response.into_string().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn known_issn_validates_and_displays_hyphenated() {
        // Weighted sum 160, 160 mod 11 = 6, check digit 11 − 6 = 5.
        let issn = Issn::parse("0378-5955").unwrap();
        assert_eq!(issn.to_string(), "0378-5955");
        assert_eq!(Issn::parse("03785955").unwrap(), issn);
    }

    #[test]
    fn bad_check_digit_rejected() {
        assert!(Issn::parse("0378-5954").is_err());
        assert!(Issn::parse("0378-595").is_err());
        assert!(Issn::parse("0378-59A5").is_err());
    }

    #[test]
    fn x_check_digit_roundtrips() {
        // Find a base whose check digit is 10.
        let mut base = [0u8; 7];
        'outer: for d in 0..10u8 {
            base = [0, 0, 0, 0, 0, 0, d];
            if super::check_digit(&base) == 10 {
                break 'outer;
            }
        }
        let issn = Issn::from_base7(base);
        assert!(issn.to_string().ends_with('X'));
        assert_eq!(Issn::parse(&issn.to_string()).unwrap(), issn);
    }

    #[test]
    fn longest_prefix_wins() {
        let a = Issn::from_base7([0, 3, 7, 8, 5, 9, 5]);
        let b = Issn::from_base7([1, 2, 3, 4, 5, 6, 7]);
        let lookup = IssnLookup::from_entries(vec![
            ("phys.rev.".into(), a),
            ("phys.rev. d".into(), b),
        ]);
        assert_eq!(
            lookup.extract_issn(Some("Phys.Rev. D55 (1997) 5112")),
            Some(b)
        );
        assert_eq!(lookup.extract_issn(Some("Phys.Rev.Lett. 12")), Some(a));
        assert_eq!(lookup.extract_issn(Some("Unrelated J. 1")), None);
        assert_eq!(lookup.extract_issn(None), None);
    }

    #[test]
    fn lookup_table_with_invalid_issn_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lookup.tsv");
        std::fs::write(&path, "phys.rev. d\t0378-5954\n").unwrap();
        assert!(IssnLookup::load(&path).is_err());
    }

    fn metrics_csv(body: &str) -> HashMap<Issn, JournalMetrics> {
        load_journal_metrics_reader(Cursor::new(body.as_bytes()), Path::new("<memory>")).unwrap()
    }

    #[test]
    fn empty_table_is_an_empty_map() {
        let map = metrics_csv("issn,quartile,h_index,impact_factor\n");
        assert!(map.is_empty());
    }

    #[test]
    fn row_maps_fields_directly() {
        let map = metrics_csv("issn,quartile,h_index,impact_factor\n0378-5955,Q1,120,3.4\n");
        let issn = Issn::parse("0378-5955").unwrap();
        let m = &map[&issn];
        assert_eq!(m.quartile, Quartile::Q1);
        assert_eq!(m.h_index, 120);
        assert!((m.impact_factor - 3.4).abs() < 1e-12);
    }

    #[test]
    fn duplicate_issn_last_row_wins() {
        let map = metrics_csv(
            "issn,quartile,h_index,impact_factor\n0378-5955,Q1,120,3.4\n0378-5955,Q2,10,0.5\n",
        );
        let issn = Issn::parse("0378-5955").unwrap();
        assert_eq!(map[&issn].quartile, Quartile::Q2);
        assert_eq!(map.len(), 1);
    }

    #[test]
    fn invalid_issn_rows_are_skipped() {
        let map = metrics_csv(
            "issn,quartile,h_index,impact_factor\nnot-an-issn,Q1,1,1.0\n0378-5955,Q3,5,0.2\n",
        );
        assert_eq!(map.len(), 1);
    }

    #[test]
    fn missing_column_is_a_schema_error() {
        let res = load_journal_metrics_reader(
            Cursor::new(b"issn,quartile,h_index\n".as_slice()),
            Path::new("<memory>"),
        );
        match res {
            Err(Error::Schema(msg)) => assert!(msg.contains("impact_factor"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn offline_fetch_uses_cache_and_errors_without_one() {
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("metrics.csv");
        match fetch_journal_metrics("http://127.0.0.1:1/none", &cache, true) {
            Err(Error::MetricsUnavailable(_)) => {}
            other => panic!("expected unavailable-metrics, got {other:?}"),
        }
        std::fs::write(
            &cache,
            "issn,quartile,h_index,impact_factor\n0378-5955,Q1,120,3.4\n",
        )
        .unwrap();
        let map = fetch_journal_metrics("http://127.0.0.1:1/none", &cache, true).unwrap();
        assert_eq!(map.len(), 1);
        // The offline result equals a direct load of the cache.
        assert_eq!(map, load_journal_metrics(&cache).unwrap());
    }

    #[test]
    fn fetch_downloads_writes_cache_then_loads() {
        use std::io::{Read, Write};
        use std::net::TcpListener;
        let body = "issn,quartile,h_index,impact_factor\n0378-5955,Q1,120,3.4\n1234-5679,Q2,7,0.9\n";
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let served = body.to_string();
        let handle = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 1024];
            let _ = stream.read(&mut buf);
            let response = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: text/csv\r\ncontent-length: {}\r\n\r\n{}",
                served.len(),
                served
            );
            stream.write_all(response.as_bytes()).unwrap();
        });
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("nested").join("metrics.csv");
        let url = format!("http://{addr}/rankings.csv");
        let map = fetch_journal_metrics(&url, &cache, false).unwrap();
        handle.join().unwrap();
        assert_eq!(map.len(), 2);
        assert!(cache.exists());
        // Network gone, cache remains: same result.
        let offline = fetch_journal_metrics(&url, &cache, true).unwrap();
        assert_eq!(map, offline);
    }

    #[test]
    fn network_failure_without_cache_is_unavailable() {
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("none.csv");
        // Nothing listens on this port.
        let res = fetch_journal_metrics("http://127.0.0.1:9/none", &cache, false);
        assert!(matches!(res, Err(Error::MetricsUnavailable(_))));
    }
}
