//! Simple undirected graphs with optional integer vertex attributes.
//!
//! Graphs are immutable after construction and always normalized: edges are
//! stored as `(u, v)` with `u < v` in lexicographic order, adjacency lists
//! are sorted, and constructors reject loops, duplicate edges and
//! out-of-range endpoints.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    vertex_attrs: Option<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertex_attrs: Option<Vec<Vec<i64>>>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges.clone(),
            vertex_attrs: self.vertex_attrs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        let g = Graph::new(repr.n, repr.edges).map_err(serde::de::Error::custom)?;
        match repr.vertex_attrs {
            Some(a) => g.with_vertex_attrs(a).map_err(serde::de::Error::custom),
            None => Ok(g),
        }
    }
}

impl Graph {
    /// Builds a graph, normalizing edge order. Rejects loops, duplicates and
    /// endpoints `>= n`.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate edge".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        // adjacency lists come out sorted because the edge list is sorted,
        // except for the lower endpoints appended later
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: norm, adj, vertex_attrs: None })
    }

    /// Attaches one integer attribute vector per vertex.
    pub fn with_vertex_attrs(mut self, attrs: Vec<Vec<i64>>) -> Result<Self> {
        if attrs.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "{} attribute vectors for {} vertices",
                attrs.len(),
                self.n
            )));
        }
        self.vertex_attrs = Some(attrs);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn vertex_attrs(&self) -> Option<&[Vec<i64>]> {
        self.vertex_attrs.as_deref()
    }

    /// Induced subgraph on `s`, with vertices relabeled to `0..s.len()` in
    /// the order they appear in `s`. Attributes are carried over.
    pub fn induced_subgraph(&self, s: &[usize]) -> Result<Graph> {
        let k = s.len();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in s.iter().enumerate() {
            if v >= self.n {
                return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
            }
            if pos[v] != usize::MAX {
                return Err(Error::InvalidArgument(format!("repeated vertex {v}")));
            }
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in s.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = pos[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        let sub = Graph::new(k, edges)?;
        match &self.vertex_attrs {
            Some(attrs) => sub.with_vertex_attrs(s.iter().map(|&v| attrs[v].clone()).collect()),
            None => Ok(sub),
        }
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`. `perm` must be a
    /// permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let g = Graph::new(self.n, edges)?;
        match &self.vertex_attrs {
            Some(attrs) => {
                let mut out = vec![Vec::new(); self.n];
                for (v, a) in attrs.iter().enumerate() {
                    out[perm[v]] = a.clone();
                }
                g.with_vertex_attrs(out)
            }
            None => Ok(g),
        }
    }

    /// Disjoint union; attributes survive only if both sides carry them.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + self.n, v + self.n)));
        let g = Graph::new(n, edges).expect("union of valid graphs is valid");
        match (&self.vertex_attrs, &other.vertex_attrs) {
            (Some(a), Some(b)) => {
                let mut attrs = a.clone();
                attrs.extend(b.iter().cloned());
                g.with_vertex_attrs(attrs).expect("attribute count matches")
            }
            _ => g,
        }
    }

    /// True when every pair of vertices is joined by a path.
    /// The empty graph and a single vertex count as connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Parses the plain text edge-list format: a header line `n m` followed
    /// by `m` lines `u v`.
    pub fn from_edge_list_text(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty edge list".into()))?;
        let mut it = header.split_whitespace();
        let parse = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::InvalidArgument(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::InvalidArgument(format!("bad {what}: {e}")))
        };
        let n = parse(it.next(), "vertex count")?;
        let m = parse(it.next(), "edge count")?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let u = parse(it.next(), "edge endpoint")?;
            let v = parse(it.next(), "edge endpoint")?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::InvalidArgument(format!(
                "header promises {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges)
    }

    /// Renders the `n m` / `u v` edge-list format.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}
