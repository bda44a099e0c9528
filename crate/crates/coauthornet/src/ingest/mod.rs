//! Raw citation-corpus parsing and co-authorship reconstruction.
//!
//! The metadata format is the block layout of the raw arXiv abstract files:
//! records separated by a line of 60 dashes, header lines (`Paper:`,
//! `Title:`, `Authors:`, optional `Journal-ref:`, `Date:`), then a blank
//! line and the abstract. Header lines may wrap; continuation lines start
//! with whitespace.
//!
//! Author identity is the lowercased, whitespace-collapsed, diacritics-
//! stripped full name. No initials-merging disambiguation is attempted —
//! deterministic normalization is auditable, fancier matching is not.

mod coauthor;
mod journals;

pub use coauthor::{derive_interest_features, reconstruct_coauthorship, AuthorTable};
pub use journals::{
    fetch_journal_metrics, load_journal_metrics, IssnLookup, JournalMetrics, Issn, Quartile,
};

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Record separator of the metadata block format.
pub const BLOCK_SEPARATOR: &str =
    "------------------------------------------------------------";

/// One parsed corpus record.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperRecord {
    /// External integer id (the trailing integer of the `Paper:` header).
    pub paper_id: u64,
    pub title: String,
    pub abstract_text: String,
    /// Normalized author names; empty for anonymous papers (which are
    /// filtered before any graph is built).
    pub authors: Vec<String>,
    pub journal_ref: Option<String>,
    /// ISO `YYYY-MM-DD` when the raw date was parseable.
    pub date: Option<String>,
}

/// Parse result: well-formed records plus the count of malformed blocks that
/// were skipped (also logged as warnings).
#[derive(Debug, Clone)]
pub struct ParsedCorpus {
    pub papers: Vec<PaperRecord>,
    pub skipped: usize,
}

/// Parse a metadata file. Malformed blocks (no parseable paper id, or an
/// empty abstract) are skipped with a warning, never silently; zero
/// well-formed records is an error.
pub fn parse_paper_metadata(path: &Path) -> Result<ParsedCorpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_paper_metadata_reader(std::io::BufReader::new(file), path)
}

pub fn parse_paper_metadata_reader(reader: impl BufRead, path: &Path) -> Result<ParsedCorpus> {
    let mut papers = Vec::new();
    let mut skipped = 0usize;
    let mut block: Vec<String> = Vec::new();
    let mut block_start = 1usize;
    let flush = |block: &mut Vec<String>, start: usize, papers: &mut Vec<PaperRecord>, skipped: &mut usize| {
        if block.iter().all(|l| l.trim().is_empty()) {
            block.clear();
            return;
        }
        match parse_block(block) {
            Ok(record) => papers.push(record),
            Err(reason) => {
                log::warn!("{}:{start}: skipping malformed record: {reason}", path.display());
                *skipped += 1;
            }
        }
        block.clear();
    };
    let mut lineno = 0usize;
    for line in reader.lines() {
        lineno += 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim_end() == BLOCK_SEPARATOR {
            flush(&mut block, block_start, &mut papers, &mut skipped);
            block_start = lineno + 1;
        } else {
            block.push(line);
        }
    }
    flush(&mut block, block_start, &mut papers, &mut skipped);
    if papers.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(ParsedCorpus { papers, skipped })
}

/// Parse one record block; `Err` carries the reason a block is malformed.
fn parse_block(lines: &[String]) -> std::result::Result<PaperRecord, String> {
    let mut headers: Vec<(String, String)> = Vec::new();
    let mut abstract_lines: Vec<&str> = Vec::new();
    let mut in_abstract = false;
    for line in lines {
        if in_abstract {
            abstract_lines.push(line);
            continue;
        }
        if line.trim().is_empty() {
            in_abstract = true;
            continue;
        }
        if line.starts_with(char::is_whitespace) {
            // Continuation of the previous header.
            if let Some((_, value)) = headers.last_mut() {
                value.push(' ');
                value.push_str(line.trim());
                continue;
            }
        }
        match line.split_once(':') {
            Some((key, value)) => headers.push((key.trim().to_string(), value.trim().to_string())),
            None => return Err(format!("header line without a colon: '{line}'")),
        }
    }
    let header = |name: &str| {
        headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    };
    let paper_field = header("Paper").ok_or("missing Paper header")?;
    let paper_id = parse_paper_id(paper_field)
        .ok_or_else(|| format!("unparseable paper id '{paper_field}'"))?;
    let abstract_text = normalize_whitespace(&abstract_lines.join(" "));
    if abstract_text.is_empty() {
        return Err("empty abstract".into());
    }
    let authors = header("Authors").map(split_authors).unwrap_or_default();
    Ok(PaperRecord {
        paper_id,
        title: header("Title").map(normalize_whitespace).unwrap_or_default(),
        abstract_text,
        authors,
        journal_ref: header("Journal-ref").map(str::to_string).filter(|s| !s.is_empty()),
        date: header("Date").and_then(parse_date),
    })
}

/// Trailing integer of a paper field: `hep-th/9203201` and `9203201` both
/// parse to 9203201.
fn parse_paper_id(field: &str) -> Option<u64> {
    let tail = field.rsplit('/').next()?.trim();
    tail.parse::<u64>().ok()
}

fn parse_date(raw: &str) -> Option<String> {
    let cleaned = normalize_whitespace(raw);
    // Raw headers look like "Mon, 2 Mar 1992 18:25:10 GMT" or "2 Mar 1992".
    let no_weekday = cleaned.split_once(", ").map(|(_, r)| r).unwrap_or(&cleaned);
    let date_part = no_weekday
        .split_whitespace()
        .take(3)
        .collect::<Vec<_>>()
        .join(" ");
    for fmt in ["%d %b %Y", "%d %B %Y", "%Y-%m-%d"] {
        if let Ok(d) = chrono::NaiveDate::parse_from_str(&date_part, fmt) {
            return Some(d.format("%Y-%m-%d").to_string());
        }
    }
    None
}

fn normalize_whitespace(s: impl AsRef<str>) -> String {
    s.as_ref().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Split an `Authors:` header into normalized names. Parenthesized segments
/// (affiliations) are removed, then the value splits on commas and the word
/// "and".
pub fn split_authors(value: &str) -> Vec<String> {
    let without_parens = strip_parenthesized(value);
    without_parens
        .replace(" and ", ",")
        .replace(" AND ", ",")
        .split(',')
        .map(normalize_author_name)
        .filter(|name| !name.is_empty())
        .collect()
}

fn strip_parenthesized(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

/// Author identity normalization: diacritics folded to ASCII, lowercased,
/// whitespace collapsed.
pub fn normalize_author_name(name: &str) -> String {
    let mut folded = String::with_capacity(name.len());
    for c in name.chars() {
        fold_char_into(c, &mut folded);
    }
    folded
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Fold one character to its ASCII base form. Covers Latin-1 Supplement and
/// the Latin Extended-A letters seen in author names; combining marks are
/// dropped (handles decomposed input).
fn fold_char_into(c: char, out: &mut String) {
    if ('\u{0300}'..='\u{036f}').contains(&c) {
        return;
    }
    match c.to_lowercase().next().unwrap_or(c) {
        'à'..='å' | 'ā' | 'ă' | 'ą' => out.push('a'),
        'ç' | 'ć' | 'ĉ' | 'ċ' | 'č' => out.push('c'),
        'ď' | 'đ' | 'ð' => out.push('d'),
        'è'..='ë' | 'ē' | 'ĕ' | 'ė' | 'ę' | 'ě' => out.push('e'),
        'ĝ' | 'ğ' | 'ġ' | 'ģ' => out.push('g'),
        'ĥ' | 'ħ' => out.push('h'),
        'ì'..='ï' | 'ĩ' | 'ī' | 'ĭ' | 'į' | 'ı' => out.push('i'),
        'ĵ' => out.push('j'),
        'ķ' => out.push('k'),
        'ĺ' | 'ļ' | 'ľ' | 'ł' => out.push('l'),
        'ñ' | 'ń' | 'ņ' | 'ň' => out.push('n'),
        'ò'..='ö' | 'ø' | 'ō' | 'ŏ' | 'ő' => out.push('o'),
        'ŕ' | 'ŗ' | 'ř' => out.push('r'),
        'ś' | 'ŝ' | 'ş' | 'š' => out.push('s'),
        'ţ' | 'ť' | 'ŧ' => out.push('t'),
        'ù'..='ü' | 'ũ' | 'ū' | 'ŭ' | 'ů' | 'ű' | 'ų' => out.push('u'),
        'ŵ' => out.push('w'),
        'ý' | 'ÿ' | 'ŷ' => out.push('y'),
        'ź' | 'ż' | 'ž' => out.push('z'),
        'ß' => out.push_str("ss"),
        'æ' => out.push_str("ae"),
        'œ' => out.push_str("oe"),
        'þ' => out.push_str("th"),
        other => out.push(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse_str(text: &str) -> Result<ParsedCorpus> {
        parse_paper_metadata_reader(Cursor::new(text.as_bytes()), Path::new("<memory>"))
    }

    const THREE_RECORDS: &str = "\
------------------------------------------------------------
Paper: hep-th/9203201
Title: A first title
  that wraps onto a second line
Authors: A. Author, B. Author and C. Author
Journal-ref: Phys.Rev. D55 (1997) 5112
Date: Mon, 2 Mar 1992 18:25:10 GMT

This is the first abstract.
It spans two lines.
------------------------------------------------------------
Paper: hep-th/9203202
Authors: Günther Møller

Second abstract.
------------------------------------------------------------
Paper: not-an-id
Authors: D. Author

Malformed: the paper id is not an integer.
------------------------------------------------------------
";

    #[test]
    fn three_record_fixture_parses_two_and_skips_one() {
        let parsed = parse_str(THREE_RECORDS).unwrap();
        assert_eq!(parsed.papers.len(), 2);
        assert_eq!(parsed.skipped, 1);

        let first = &parsed.papers[0];
        assert_eq!(first.paper_id, 9203201);
        assert_eq!(first.title, "A first title that wraps onto a second line");
        assert_eq!(
            first.authors,
            vec!["a. author", "b. author", "c. author"]
        );
        assert_eq!(first.journal_ref.as_deref(), Some("Phys.Rev. D55 (1997) 5112"));
        assert_eq!(first.date.as_deref(), Some("1992-03-02"));
        assert_eq!(
            first.abstract_text,
            "This is the first abstract. It spans two lines."
        );

        let second = &parsed.papers[1];
        assert_eq!(second.journal_ref, None);
        assert_eq!(second.authors, vec!["gunther moller"]);
    }

    #[test]
    fn comma_separated_authors_lowercase() {
        assert_eq!(
            split_authors("A. Author, B. Author"),
            vec!["a. author", "b. author"]
        );
    }

    #[test]
    fn affiliations_in_parens_are_stripped() {
        assert_eq!(
            split_authors("Jane Doe (MIT), John Smith (Oxford (UK)) and Ann Lee"),
            vec!["jane doe", "john smith", "ann lee"]
        );
    }

    #[test]
    fn diacritics_fold_and_whitespace_collapses() {
        assert_eq!(normalize_author_name("  Émile   Żółć "), "emile zolc");
        assert_eq!(normalize_author_name("Straße"), "strasse");
        // Decomposed form: 'e' + combining acute.
        assert_eq!(normalize_author_name("e\u{0301}mile"), "emile");
    }

    #[test]
    fn empty_corpus_is_an_error() {
        match parse_str("------------------------------------------------------------\n") {
            Err(Error::EmptyCorpus) => {}
            other => panic!("expected empty-corpus error, got {other:?}"),
        }
    }

    #[test]
    fn anonymous_record_is_kept_with_no_authors() {
        let text = "\
------------------------------------------------------------
Paper: 1234

Anonymous abstract.
------------------------------------------------------------
";
        let parsed = parse_str(text).unwrap();
        assert_eq!(parsed.papers.len(), 1);
        assert!(parsed.papers[0].authors.is_empty());
        assert_eq!(parsed.skipped, 0);
    }

    #[test]
    fn record_without_abstract_is_malformed() {
        let text = "\
------------------------------------------------------------
Paper: 77
Authors: Solo Author
------------------------------------------------------------
Paper: 78
Authors: Other Author

Real abstract.
------------------------------------------------------------
";
        let parsed = parse_str(text).unwrap();
        assert_eq!(parsed.papers.len(), 1);
        assert_eq!(parsed.papers[0].paper_id, 78);
        assert_eq!(parsed.skipped, 1);
    }
}
