//! Undirected weighted graphs and their variation operators.
//!
//! A [`Graph`] is a validated edge list: no self-loops, nonnegative finite
//! weights, at most one edge per unordered vertex pair. The two variation
//! operators built from it are the combinatorial Laplacian `L = D - A` and
//! the symmetric normalized Laplacian `D^{-1/2} L D^{-1/2}`.

use std::collections::HashSet;
use std::collections::VecDeque;
use std::io::{BufRead, Write};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One weighted undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected weighted graph without self-loops.
///
/// Immutable after construction; safe for concurrent read-only sharing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

fn check_edge(
    n: usize,
    seen: &mut HashSet<(usize, usize)>,
    u: usize,
    v: usize,
    weight: f64,
) -> Result<()> {
    if u >= n {
        return Err(Error::IndexOutOfRange { index: u, n });
    }
    if v >= n {
        return Err(Error::IndexOutOfRange { index: v, n });
    }
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    if !weight.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "edge ({u}, {v}) has non-finite weight {weight}"
        )));
    }
    if weight < 0.0 {
        return Err(Error::NegativeWeight { u, v, weight });
    }
    let key = (u.min(v), u.max(v));
    if !seen.insert(key) {
        return Err(Error::DuplicateEdge(key.0, key.1));
    }
    Ok(())
}

impl Graph {
    /// Validates and builds a graph from an edge list.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut out = Vec::new();
        for (u, v, weight) in edges {
            check_edge(n, &mut seen, u, v, weight)?;
            out.push(Edge { u, v, weight });
        }
        Ok(Graph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Dense symmetric adjacency matrix.
    pub fn adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            a[[e.u, e.v]] = e.weight;
            a[[e.v, e.u]] = e.weight;
        }
        a
    }

    /// Vertex degrees (weighted).
    pub fn degrees(&self) -> Array1<f64> {
        let mut d = Array1::zeros(self.n);
        for e in &self.edges {
            d[e.u] += e.weight;
            d[e.v] += e.weight;
        }
        d
    }

    /// Neighbor lists, ignoring zero-weight edges for traversal purposes.
    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        let mut nbrs = vec![Vec::new(); self.n];
        for e in &self.edges {
            if e.weight > 0.0 {
                nbrs[e.u].push(e.v);
                nbrs[e.v].push(e.u);
            }
        }
        nbrs
    }

    /// True when every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let nbrs = self.neighbor_lists();
        let mut visited = vec![false; self.n];
        let mut stack = vec![0usize];
        visited[0] = true;
        let mut count = 1usize;
        while let Some(v) = stack.pop() {
            for &w in &nbrs[v] {
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}

/// The two variation operators supported for graph Fourier analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Combinatorial,
    SymmetricNormalized,
}

impl OperatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorKind::Combinatorial => "combinatorial",
            OperatorKind::SymmetricNormalized => "normalized",
        }
    }
}

/// A dense symmetric variation operator (a graph Laplacian).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    kind: OperatorKind,
    values: Array2<f64>,
}

const SYMMETRY_TOL: f64 = 1e-12;
const ROW_SUM_TOL: f64 = 1e-10;

impl OperatorMatrix {
    /// Wraps a matrix after checking symmetry (1e-12) and, for the
    /// combinatorial kind, zero row sums (1e-10).
    pub fn new(kind: OperatorKind, values: Array2<f64>) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: values.ncols(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (values[[i, j]] - values[[j, i]]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "operator is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if kind == OperatorKind::Combinatorial {
            for i in 0..n {
                let s: f64 = values.row(i).sum();
                if s.abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "combinatorial Laplacian row {i} sums to {s}"
                    )));
                }
            }
        }
        Ok(OperatorMatrix { kind, values })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Content hash of (kind, n, entries); used as the basis cache key.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.kind.as_str().as_bytes());
        hasher.update((self.n() as u64).to_le_bytes());
        for v in self.values.iter() {
            hasher.update(v.to_le_bytes());
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Builds the requested Laplacian of a graph.
///
/// The normalized kind requires every vertex to have positive degree.
pub fn laplacian(g: &Graph, kind: OperatorKind) -> Result<OperatorMatrix> {
    let n = g.n();
    let a = g.adjacency();
    let d = g.degrees();
    let mut l = Array2::zeros((n, n));
    match kind {
        OperatorKind::Combinatorial => {
            for i in 0..n {
                l[[i, i]] = d[i];
                for j in 0..n {
                    if i != j {
                        l[[i, j]] = -a[[i, j]];
                    }
                }
            }
        }
        OperatorKind::SymmetricNormalized => {
            for i in 0..n {
                if d[i] <= 0.0 {
                    return Err(Error::IsolatedVertex(i));
                }
            }
            let d_inv_sqrt: Array1<f64> = d.mapv(|x| 1.0 / x.sqrt());
            for i in 0..n {
                l[[i, i]] = 1.0;
                for j in 0..n {
                    if i != j && a[[i, j]] != 0.0 {
                        l[[i, j]] = -d_inv_sqrt[i] * a[[i, j]] * d_inv_sqrt[j];
                    }
                }
            }
        }
    }
    OperatorMatrix::new(kind, l)
}

/// A two-coloring of the vertex set: every edge crosses between the sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    pub set_low: Vec<usize>,
    pub set_high: Vec<usize>,
}

impl VertexPartition {
    /// Validates that the two ordered lists partition `{0..n-1}`.
    pub fn new(n: usize, set_low: Vec<usize>, set_high: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; n];
        for &v in set_low.iter().chain(set_high.iter()) {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
            if seen[v] {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} appears twice in the partition"
                )));
            }
            seen[v] = true;
        }
        if set_low.len() + set_high.len() != n {
            return Err(Error::InvalidParameter(
                "partition does not cover all vertices".into(),
            ));
        }
        Ok(VertexPartition { set_low, set_high })
    }
}

/// Two-colors the graph by breadth-first search, one component at a time.
/// Returns `None` when some component contains an odd cycle.
pub fn bipartite_partition(g: &Graph) -> Option<VertexPartition> {
    let n = g.n();
    let nbrs = g.neighbor_lists();
    let mut color: Vec<Option<bool>> = vec![None; n];
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].unwrap();
            for &w in &nbrs[v] {
                match color[w] {
                    None => {
                        color[w] = Some(!cv);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cv => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let set_low: Vec<usize> = (0..n).filter(|&v| color[v] == Some(false)).collect();
    let set_high: Vec<usize> = (0..n).filter(|&v| color[v] == Some(true)).collect();
    Some(VertexPartition { set_low, set_high })
}

/// Reads the edge-list text format: a header line `n <count>`, then one
/// `u v w` triple per line. Violations are rejected with line numbers.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "expected header `n <count>`".into(),
                    });
                }
                let count = fields[1].parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad vertex count: {e}"),
                })?;
                n = Some(count);
            }
            Some(_) => {
                if fields.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "expected `u v w`".into(),
                    });
                }
                let u = fields[0].parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad vertex index: {e}"),
                })?;
                let v = fields[1].parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad vertex index: {e}"),
                })?;
                let w = fields[2].parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad weight: {e}"),
                })?;
                edges.push((u, v, w, lineno));
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 1,
        message: "missing header `n <count>`".into(),
    })?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(edges.len());
    for (u, v, weight, lineno) in edges {
        check_edge(n, &mut seen, u, v, weight).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        out.push(Edge { u, v, weight });
    }
    Ok(Graph { n, edges: out })
}

/// Writes the edge-list text format. Weights round-trip exactly.
pub fn write_edge_list<W: Write>(g: &Graph, mut writer: W) -> Result<()> {
    writeln!(writer, "n {}", g.n())?;
    for e in g.edges() {
        writeln!(writer, "{} {} {}", e.u, e.v, e.weight)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn path2() -> Graph {
        Graph::new(2, [(0, 1, 1.0)]).unwrap()
    }

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn k22() -> Graph {
        Graph::new(4, [(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)]).unwrap()
    }

    #[test]
    fn builds_smallest_graphs() {
        assert_eq!(path2().n(), 2);
        assert_eq!(triangle().edges().len(), 3);
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::new(2, [(0, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::SelfLoop(0)));
    }

    #[test]
    fn rejects_negative_weight_and_duplicates() {
        assert!(matches!(
            Graph::new(2, [(0, 1, -1.0)]).unwrap_err(),
            Error::NegativeWeight { .. }
        ));
        assert!(matches!(
            Graph::new(3, [(0, 1, 1.0), (1, 0, 2.0)]).unwrap_err(),
            Error::DuplicateEdge(0, 1)
        ));
        assert!(matches!(
            Graph::new(2, [(0, 5, 1.0)]).unwrap_err(),
            Error::IndexOutOfRange { index: 5, n: 2 }
        ));
    }

    #[test]
    fn laplacian_of_p2() {
        let l = laplacian(&path2(), OperatorKind::Combinatorial).unwrap();
        let expect = [[1.0, -1.0], [-1.0, 1.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert_abs_diff_eq!(l.values()[[i, j]], *want, epsilon = 1e-15);
            }
        }
        // unit degrees: normalized equals combinatorial
        let ln = laplacian(&path2(), OperatorKind::SymmetricNormalized).unwrap();
        for (i, row) in expect.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert_abs_diff_eq!(ln.values()[[i, j]], *want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn laplacian_of_triangle() {
        let l = laplacian(&triangle(), OperatorKind::Combinatorial).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { -1.0 };
                assert_abs_diff_eq!(l.values()[[i, j]], expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn normalized_rejects_isolated_vertex() {
        let g = Graph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            laplacian(&g, OperatorKind::SymmetricNormalized).unwrap_err(),
            Error::IsolatedVertex(2)
        ));
    }

    #[test]
    fn bipartition_examples() {
        let p = bipartite_partition(&path2()).unwrap();
        assert_eq!(p.set_low, vec![0]);
        assert_eq!(p.set_high, vec![1]);

        assert!(bipartite_partition(&triangle()).is_none());

        let p = bipartite_partition(&k22()).unwrap();
        assert_eq!(p.set_low, vec![0, 1]);
        assert_eq!(p.set_high, vec![2, 3]);
    }

    /// Brute-force 2-colorability oracle for small n.
    fn two_colorable_brute(g: &Graph) -> bool {
        let n = g.n();
        'outer: for mask in 0u32..(1 << n) {
            for e in g.edges() {
                if e.weight > 0.0 && (mask >> e.u) & 1 == (mask >> e.v) & 1 {
                    continue 'outer;
                }
            }
            return true;
        }
        false
    }

    #[test]
    fn bipartition_matches_brute_force() {
        // Deterministic sweep over small random-ish graphs.
        let mut state = 0x2545F4914F6CDD1Du64;
        for n in 2..=10usize {
            for _ in 0..40 {
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in (u + 1)..n {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                        if state >> 62 == 0 {
                            edges.push((u, v, 1.0));
                        }
                    }
                }
                let g = Graph::new(n, edges).unwrap();
                let bfs = bipartite_partition(&g);
                assert_eq!(bfs.is_some(), two_colorable_brute(&g));
                if let Some(p) = bfs {
                    // Every edge must cross the partition.
                    let in_low: Vec<bool> = {
                        let mut v = vec![false; n];
                        for &i in &p.set_low {
                            v[i] = true;
                        }
                        v
                    };
                    for e in g.edges() {
                        assert_ne!(in_low[e.u], in_low[e.v]);
                    }
                }
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::new(4, [(0, 1, 0.5), (1, 2, 1.25), (2, 3, 1e-3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_reports_line_numbers() {
        let text = "n 3\n0 1 1.0\n1 1 2.0\n";
        let err = read_edge_list(text.as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("self-loop"));
            }
            other => panic!("unexpected error {other}"),
        }
        let err = read_edge_list("0 1 1.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn operator_fingerprint_is_content_keyed() {
        let a = laplacian(&path2(), OperatorKind::Combinatorial).unwrap();
        let b = laplacian(&path2(), OperatorKind::Combinatorial).unwrap();
        let c = laplacian(&path2(), OperatorKind::SymmetricNormalized).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        // same entries, different kind tag
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
