//! Co-authorship graph reconstruction and author interest features.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{build_graph, FeatureMatrix, Graph, NodeId};

use super::PaperRecord;

/// Bijection between normalized author names and author node ids, plus each
/// author's paper list. Paper ids are positions in the record slice the table
/// was built from, so they line up with citation-graph node ids when both are
/// built from the same filtered list.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorTable {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    papers: Vec<Vec<NodeId>>,
}

impl AuthorTable {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id_of(&self, normalized_name: &str) -> Option<NodeId> {
        self.index.get(normalized_name).copied()
    }

    pub fn name_of(&self, id: NodeId) -> &str {
        &self.names[id as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn papers_of(&self, id: NodeId) -> &[NodeId] {
        &self.papers[id as usize]
    }

    /// Rebuild from persisted parts; names must be unique.
    pub fn from_parts(names: Vec<String>, papers: Vec<Vec<NodeId>>) -> Result<Self> {
        if names.len() != papers.len() {
            return Err(Error::Consistency(format!(
                "{} names but {} paper lists",
                names.len(),
                papers.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i as NodeId).is_some() {
                return Err(Error::Consistency(format!("duplicate author name '{name}'")));
            }
        }
        Ok(AuthorTable {
            names,
            index,
            papers,
        })
    }
}

/// Rebuild the co-authorship network from parsed records.
///
/// Papers with an empty author list are dropped (anonymous papers carry no
/// collaboration signal). Author ids are assigned in order of first
/// appearance; an undirected edge joins two authors iff they co-occur on at
/// least one surviving paper. Errors if every paper is anonymous.
pub fn reconstruct_coauthorship(papers: &[PaperRecord]) -> Result<(Graph, AuthorTable)> {
    if papers.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut paper_lists: Vec<Vec<NodeId>> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut surviving = 0usize;
    for (paper_idx, paper) in papers.iter().enumerate() {
        if paper.authors.is_empty() {
            continue;
        }
        surviving += 1;
        let mut ids: Vec<NodeId> = Vec::with_capacity(paper.authors.len());
        for name in &paper.authors {
            let id = *index.entry(name.clone()).or_insert_with(|| {
                names.push(name.clone());
                paper_lists.push(Vec::new());
                (names.len() - 1) as NodeId
            });
            if !ids.contains(&id) {
                ids.push(id);
                paper_lists[id as usize].push(paper_idx as NodeId);
            }
        }
        // Every author pair on one paper collaborates: a clique per paper.
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                edges.push((ids[i], ids[j]));
            }
        }
    }
    if surviving == 0 {
        return Err(Error::EmptyCorpus);
    }
    let graph = build_graph(&edges, names.len(), false)?;
    Ok((graph, AuthorTable::from_parts(names, paper_lists)?))
}

/// Normalized journal-name prefix: the lowercased, whitespace-collapsed part
/// of a journal reference before its first digit. `"Phys.Rev. D55 (1997)"`
/// yields `"phys.rev. d"`.
pub fn journal_prefix(journal_ref: &str) -> Option<String> {
    let normalized = journal_ref
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    let cut = normalized
        .char_indices()
        .find(|(_, c)| c.is_ascii_digit())
        .map(|(i, _)| i)
        .unwrap_or(normalized.len());
    let prefix = normalized[..cut].trim_end().to_string();
    if prefix.is_empty() {
        None
    } else {
        Some(prefix)
    }
}

const STOP_WORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "in", "is", "it", "of",
    "on", "or", "that", "the", "this", "to", "we", "which", "with",
];

/// One-hot author interest features.
///
/// The interest vocabulary is the `vocab_size` most frequent normalized
/// journal-name prefixes across the corpus (ties broken lexicographically);
/// when no record carries a journal reference the vocabulary falls back to
/// the most frequent abstract tokens after stop-word removal. Author row `i`
/// has 1.0 at slot `j` iff any paper of author `i` exhibits interest `j`.
/// The matrix always has `vocab_size` columns; slots beyond the number of
/// distinct interests stay zero so feature dimensions are config-stable.
pub fn derive_interest_features(
    papers: &[PaperRecord],
    authors: &AuthorTable,
    vocab_size: usize,
) -> FeatureMatrix {
    assert!(vocab_size >= 1, "interest vocabulary must be non-empty");
    let prefixes: Vec<Option<String>> = papers
        .iter()
        .map(|p| p.journal_ref.as_deref().and_then(journal_prefix))
        .collect();
    let use_prefixes = prefixes.iter().any(Option::is_some);

    // interests[paper] = distinct interest keys that paper exhibits
    let interests: Vec<Vec<String>> = if use_prefixes {
        prefixes
            .into_iter()
            .map(|p| p.into_iter().collect())
            .collect()
    } else {
        papers
            .iter()
            .map(|p| {
                let mut toks: Vec<String> = p
                    .abstract_text
                    .to_lowercase()
                    .split(|c: char| !c.is_alphanumeric())
                    .filter(|t| t.len() > 1 && !STOP_WORDS.contains(t))
                    .map(str::to_string)
                    .collect();
                toks.sort_unstable();
                toks.dedup();
                toks
            })
            .collect()
    };

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for paper_interests in &interests {
        for key in paper_interests {
            *counts.entry(key).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let vocab: HashMap<&str, usize> = ranked
        .iter()
        .take(vocab_size)
        .enumerate()
        .map(|(slot, (key, _))| (*key, slot))
        .collect();

    let mut features = FeatureMatrix::zeros(authors.len(), vocab_size);
    for author in 0..authors.len() as NodeId {
        for &paper in authors.papers_of(author) {
            for key in &interests[paper as usize] {
                if let Some(&slot) = vocab.get(key.as_str()) {
                    features.set(author as usize, slot, 1.0);
                }
            }
        }
    }
    features
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(id: u64, authors: &[&str], journal: Option<&str>) -> PaperRecord {
        PaperRecord {
            paper_id: id,
            title: format!("paper {id}"),
            abstract_text: format!("abstract text of paper {id}"),
            authors: authors.iter().map(|s| s.to_string()).collect(),
            journal_ref: journal.map(str::to_string),
            date: None,
        }
    }

    #[test]
    fn basic_reconstruction_drops_anonymous_and_links_coauthors() {
        let papers = vec![
            paper(1, &["a"], None),
            paper(2, &["a", "b"], None),
            paper(3, &[], None),
        ];
        let (g, table) = reconstruct_coauthorship(&papers).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(table.id_of("a").unwrap(), table.id_of("b").unwrap()));
        let a = table.id_of("a").unwrap();
        assert_eq!(table.papers_of(a), &[0, 1]);
    }

    #[test]
    fn single_paper_builds_a_clique() {
        let papers = vec![paper(1, &["w", "x", "y", "z"], None)];
        let (g, table) = reconstruct_coauthorship(&papers).unwrap();
        assert_eq!(table.len(), 4);
        assert_eq!(g.edge_count(), 6); // K4
        for u in 0..4u32 {
            for v in (u + 1)..4 {
                assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn repeated_author_on_one_paper_counts_once() {
        let papers = vec![paper(1, &["dup", "dup", "other"], None)];
        let (g, table) = reconstruct_coauthorship(&papers).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(table.papers_of(table.id_of("dup").unwrap()), &[0]);
    }

    #[test]
    fn all_anonymous_is_an_empty_corpus() {
        let papers = vec![paper(1, &[], None), paper(2, &[], None)];
        assert!(reconstruct_coauthorship(&papers).is_err());
    }

    /// Independent quadratic oracle: for every pair of authors, scan all
    /// papers for co-occurrence.
    fn oracle_edges(papers: &[PaperRecord]) -> std::collections::HashSet<(String, String)> {
        let mut set = std::collections::HashSet::new();
        for p in papers {
            for a in &p.authors {
                for b in &p.authors {
                    if a < b {
                        set.insert((a.clone(), b.clone()));
                    }
                }
            }
        }
        set
    }

    #[test]
    fn twenty_paper_fixture_matches_pairwise_oracle() {
        // Deterministic synthetic fixture mixing solo papers, repeat
        // collaborations, and an anonymous record.
        let roster = ["ada", "bob", "cho", "dee", "eve", "fay", "gus", "hal"];
        let mut papers = Vec::new();
        for i in 0..20u64 {
            let k = (i % 4) as usize; // 0..3 authors
            let authors: Vec<&str> = (0..k)
                .map(|j| roster[((i as usize) * 3 + j * 5) % roster.len()])
                .collect();
            papers.push(paper(i, &authors, None));
        }
        let usable: Vec<&PaperRecord> = papers.iter().filter(|p| !p.authors.is_empty()).collect();
        assert!(!usable.is_empty());
        let (g, table) = reconstruct_coauthorship(&papers).unwrap();
        let oracle = oracle_edges(&papers);
        // Every oracle pair is an edge and vice versa.
        let mut edge_names = std::collections::HashSet::new();
        for (u, v) in g.edges() {
            let (a, b) = (table.name_of(u).to_string(), table.name_of(v).to_string());
            let key = if a < b { (a, b) } else { (b, a) };
            edge_names.insert(key);
        }
        assert_eq!(edge_names, oracle);
    }

    #[test]
    fn journal_prefix_cuts_at_first_digit() {
        assert_eq!(
            journal_prefix("Phys.Rev. D55 (1997) 5112"),
            Some("phys.rev. d".to_string())
        );
        assert_eq!(journal_prefix("2 early digits"), None);
        assert_eq!(journal_prefix("   "), None);
        assert_eq!(
            journal_prefix("Nucl.Phys. B"),
            Some("nucl.phys. b".to_string())
        );
    }

    #[test]
    fn interest_matrix_is_binary_and_matches_membership_oracle() {
        // 10 authors across journals; oracle recomputes membership directly.
        let mut papers = Vec::new();
        let journals = ["Alpha J. 1", "Beta Rev. 2", "Gamma Lett. 3"];
        for i in 0..15u64 {
            let who = format!("author{}", i % 10);
            let j = journals[(i % 3) as usize];
            papers.push(paper(i, &[&who], Some(j)));
        }
        let (_, table) = reconstruct_coauthorship(&papers).unwrap();
        let features = derive_interest_features(&papers, &table, 3);
        assert_eq!(features.rows(), 10);
        assert_eq!(features.dim(), 3);
        // Rebuild vocabulary the same way the oracle sees it: prefix strings.
        let vocab: Vec<String> = {
            let mut keys: Vec<String> = journals
                .iter()
                .map(|j| journal_prefix(j).unwrap())
                .collect();
            keys.sort(); // equal counts -> lexicographic order
            keys
        };
        for a in 0..10u32 {
            for (slot, key) in vocab.iter().enumerate() {
                let expected = table.papers_of(a).iter().any(|&p| {
                    papers[p as usize]
                        .journal_ref
                        .as_deref()
                        .and_then(journal_prefix)
                        .as_deref()
                        == Some(key)
                });
                let got = features.get(a as usize, slot);
                assert!(got == 0.0 || got == 1.0);
                assert_eq!(got == 1.0, expected, "author {a}, slot {slot}");
            }
        }
    }

    #[test]
    fn no_journal_match_yields_zero_row_and_k1_shared_journal_all_ones() {
        let papers = vec![
            paper(1, &["solo"], Some("Same J. 1")),
            paper(2, &["duo"], Some("Same J. 2")),
            paper(3, &["outsider"], Some("Rare Other J. 9")),
        ];
        let (_, table) = reconstruct_coauthorship(&papers).unwrap();
        // k = 1 keeps only the most frequent prefix ("same j."): the two
        // matching authors get an all-ones column, the outsider a zero row.
        let features = derive_interest_features(&papers, &table, 1);
        assert_eq!(features.row(table.id_of("solo").unwrap() as usize), &[1.0]);
        assert_eq!(features.row(table.id_of("duo").unwrap() as usize), &[1.0]);
        assert_eq!(
            features.row(table.id_of("outsider").unwrap() as usize),
            &[0.0]
        );
    }

    #[test]
    fn token_fallback_when_no_journal_refs() {
        let mut p1 = paper(1, &["a"], None);
        p1.abstract_text = "quantum gravity loops".into();
        let mut p2 = paper(2, &["b"], None);
        p2.abstract_text = "quantum fields".into();
        let papers = vec![p1, p2];
        let (_, table) = reconstruct_coauthorship(&papers).unwrap();
        let features = derive_interest_features(&papers, &table, 1);
        // "quantum" is the most frequent token; both authors exhibit it.
        assert_eq!(features.row(table.id_of("a").unwrap() as usize), &[1.0]);
        assert_eq!(features.row(table.id_of("b").unwrap() as usize), &[1.0]);
    }
}
