//! Immutable graph storage and traversal primitives.
//!
//! Graphs are stored in compressed sparse row form over dense integer node
//! ids. Construction drops self-loops and duplicate edges; undirected graphs
//! store both directions. After construction a graph never mutates, so all
//! read paths are safe for unrestricted concurrent use. Sampling takes a
//! caller-owned generator.

use std::io::BufRead;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// Dense node index, contiguous in `[0, n)`. External identifiers (paper ids,
/// author names) map bijectively onto these via the ingest tables.
pub type NodeId = u32;

/// Row-major dense feature matrix: row `i` holds the features of node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        FeatureMatrix {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let d = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Dimension(format!(
                    "feature row {i} has dimension {}, expected {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        FeatureMatrix::from_flat(r, d, data)
    }

    pub fn from_flat(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::Dimension(format!(
                "feature storage of length {} cannot hold {rows} rows of dimension {dim}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Dimension(format!(
                "feature entries must be finite, found {bad}"
            )));
        }
        Ok(FeatureMatrix { rows, dim, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.dim);
        self.data[i * self.dim + j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.dim);
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Immutable graph in CSR form. Neighbor lists are sorted ascending and free
/// of self-loops and duplicates; for undirected graphs they are symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    edge_count: usize,
    features: Option<FeatureMatrix>,
}

/// Build a graph from an edge list.
///
/// Self-loops are dropped, duplicates deduplicated, and for undirected graphs
/// both directions are stored. Endpoints at or beyond `n` are a construction
/// error naming the offending edge.
pub fn build_graph(edges: &[(NodeId, NodeId)], n: usize, directed: bool) -> Result<Graph> {
    for &(u, v) in edges {
        if (u as usize) >= n || (v as usize) >= n {
            return Err(Error::Graph(format!(
                "edge ({u}, {v}) has an endpoint outside [0, {n})"
            )));
        }
    }
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u == v {
            continue; // citation and collaboration graphs are loop-free
        }
        adj[u as usize].push(v);
        if !directed {
            adj[v as usize].push(u);
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    offsets.push(0);
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
        targets.extend_from_slice(list);
        offsets.push(targets.len());
    }
    let edge_count = if directed {
        targets.len()
    } else {
        targets.len() / 2
    };
    Ok(Graph {
        n,
        directed,
        offsets,
        targets,
        edge_count,
        features: None,
    })
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Sorted neighbor list of `v` (out-neighbors on directed graphs).
    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        if (v as usize) >= self.n {
            return Err(Error::NodeBounds { id: v, n: self.n });
        }
        Ok(self.adj(v))
    }

    /// Neighbor slice without the bounds check; callers must hold `v < n`.
    #[inline]
    pub(crate) fn adj(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj(v).len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        if (u as usize) >= self.n || (v as usize) >= self.n {
            return false;
        }
        self.adj(u).binary_search(&v).is_ok()
    }

    /// Exactly `k` neighbors of `v`, drawn uniformly with replacement. An
    /// isolated node falls back to `k` copies of itself so downstream
    /// aggregation is defined for every node.
    pub fn sample_neighbors(&self, v: NodeId, k: usize, rng: &mut impl Rng) -> Vec<NodeId> {
        assert!(k >= 1, "sample_neighbors requires k >= 1");
        let nbrs = self.adj(v);
        if nbrs.is_empty() {
            return vec![v; k];
        }
        (0..k).map(|_| nbrs[rng.gen_range(0..nbrs.len())]).collect()
    }

    /// Canonical edge list: all arcs for directed graphs, each undirected
    /// edge once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(if self.directed {
            self.edge_count
        } else {
            self.edge_count
        });
        for u in 0..self.n as NodeId {
            for &v in self.adj(u) {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn features(&self) -> Option<&FeatureMatrix> {
        self.features.as_ref()
    }

    pub fn with_features(mut self, features: FeatureMatrix) -> Result<Self> {
        if features.rows() != self.n {
            return Err(Error::Dimension(format!(
                "feature matrix has {} rows for a graph with {} nodes",
                features.rows(),
                self.n
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    /// Undirected view of this graph (identity for undirected inputs).
    pub fn symmetrized(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let edges = self.edges();
        build_graph(&edges, self.n, false).expect("edges of a valid graph stay in bounds")
    }
}

/// Read a whitespace-separated `src dst` edge list. Lines starting with `#`
/// are comments. Returns raw external ids; mapping to dense `NodeId`s is the
/// caller's concern.
pub fn read_edge_list(path: &Path) -> Result<Vec<(u64, u64)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let (src, dst) = match (it.next(), it.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    msg: format!("expected two integer tokens, got '{trimmed}'"),
                })
            }
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("'{tok}' is not a non-negative integer"),
            })
        };
        edges.push((parse(src)?, parse(dst)?));
    }
    Ok(edges)
}

/// Write a graph in the edge-list format accepted by [`read_edge_list`].
pub fn write_edge_list(graph: &Graph, path: &Path) -> Result<()> {
    use std::io::Write;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let kind = if graph.is_directed() {
        "directed"
    } else {
        "undirected"
    };
    writeln!(w, "# {} nodes, {} edges, {kind}", graph.node_count(), graph.edge_count())
        .map_err(|e| Error::io(path, e))?;
    for (u, v) in graph.edges() {
        writeln!(w, "{u} {v}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symmetric_pair_dedups_to_one_undirected_edge() {
        let g = build_graph(&[(0, 1), (1, 0)], 2, false).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(0).unwrap(), &[1]);
        assert_eq!(g.neighbors(1).unwrap(), &[0]);
    }

    #[test]
    fn self_loop_is_dropped() {
        let g = build_graph(&[(0, 0)], 1, false).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(g.neighbors(0).unwrap().is_empty());
    }

    #[test]
    fn directed_path_keeps_out_neighbors_only() {
        let g = build_graph(&[(0, 1), (1, 2)], 3, true).unwrap();
        assert_eq!(g.neighbors(0).unwrap(), &[1]);
        assert_eq!(g.neighbors(1).unwrap(), &[2]);
        assert!(g.neighbors(2).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_endpoint_names_the_edge() {
        let err = build_graph(&[(0, 5)], 3, false).unwrap_err();
        assert!(err.to_string().contains("(0, 5)"), "{err}");
    }

    #[test]
    fn star_neighbors_are_sorted() {
        let g = build_graph(&[(0, 3), (0, 1), (0, 2)], 4, false).unwrap();
        assert_eq!(g.neighbors(0).unwrap(), &[1, 2, 3]);
        assert_eq!(g.neighbors(2).unwrap(), &[0]);
    }

    #[test]
    fn neighbors_out_of_bounds_errors() {
        let g = build_graph(&[], 2, false).unwrap();
        assert!(g.neighbors(2).is_err());
        assert!(g.neighbors(1).unwrap().is_empty());
    }

    #[test]
    fn sampling_single_neighbor_repeats_it() {
        let g = build_graph(&[(0, 1)], 2, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(g.sample_neighbors(0, 3, &mut rng), vec![1, 1, 1]);
    }

    #[test]
    fn sampling_isolated_node_returns_itself() {
        let g = build_graph(&[], 2, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(g.sample_neighbors(1, 2, &mut rng), vec![1, 1]);
    }

    #[test]
    fn sampling_is_close_to_uniform() {
        // deg(v) = 4, k = 10000: each frequency within 2% absolute of 0.25.
        let g = build_graph(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let samples = g.sample_neighbors(0, 10_000, &mut rng);
        let mut counts = [0usize; 5];
        for s in samples {
            counts[s as usize] += 1;
        }
        for nbr in 1..5 {
            let freq = counts[nbr] as f64 / 10_000.0;
            assert!((freq - 0.25).abs() < 0.02, "neighbor {nbr}: {freq}");
        }
    }

    #[test]
    fn symmetrized_directed_graph_has_both_directions() {
        let g = build_graph(&[(0, 1), (1, 2)], 3, true).unwrap();
        let u = g.symmetrized();
        assert!(!u.is_directed());
        assert!(u.has_edge(1, 0));
        assert!(u.has_edge(2, 1));
        assert_eq!(u.edge_count(), 2);
    }

    #[test]
    fn edge_list_roundtrip_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        let g = build_graph(&[(0, 1), (2, 1), (0, 3)], 4, false).unwrap();
        write_edge_list(&g, &path).unwrap();
        let raw = read_edge_list(&path).unwrap();
        let edges: Vec<(NodeId, NodeId)> =
            raw.iter().map(|&(a, b)| (a as NodeId, b as NodeId)).collect();
        let g2 = build_graph(&edges, 4, false).unwrap();
        assert_eq!(g.edges(), g2.edges());
    }

    #[test]
    fn edge_list_bad_token_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.edges");
        std::fs::write(&path, "# header\n0 1\n2 x\n").unwrap();
        let err = read_edge_list(&path).unwrap_err();
        assert!(err.to_string().contains(":3"), "{err}");
    }

    fn arbitrary_edges() -> impl Strategy<Value = (usize, Vec<(NodeId, NodeId)>)> {
        (2usize..12).prop_flat_map(|n| {
            let edge = (0..n as NodeId, 0..n as NodeId);
            proptest::collection::vec(edge, 0..40).prop_map(move |es| (n, es))
        })
    }

    proptest! {
        #[test]
        fn undirected_graphs_are_symmetric((n, edges) in arbitrary_edges()) {
            let g = build_graph(&edges, n, false).unwrap();
            for u in 0..n as NodeId {
                for v in 0..n as NodeId {
                    prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
                }
            }
        }

        #[test]
        fn handshake_holds((n, edges) in arbitrary_edges()) {
            let undirected = build_graph(&edges, n, false).unwrap();
            let total: usize = (0..n as NodeId).map(|v| undirected.degree(v)).sum();
            prop_assert_eq!(total, 2 * undirected.edge_count());

            let directed = build_graph(&edges, n, true).unwrap();
            let total: usize = (0..n as NodeId).map(|v| directed.degree(v)).sum();
            prop_assert_eq!(total, directed.edge_count());
        }

        #[test]
        fn construction_is_deterministic((n, edges) in arbitrary_edges()) {
            let a = build_graph(&edges, n, false).unwrap();
            let b = build_graph(&edges, n, false).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
