//! Graph-family constructors, label oracles for the synthetic regression
//! targets, and the random generators the dataset builders draw from.

use crate::error::{Error, Result};
use crate::graph::Graph;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Cycle on `n >= 3` vertices.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "a cycle needs at least 3 vertices, got {n}"
        )));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
}

/// Path on `n >= 1` vertices.
pub fn path_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("a path needs at least 1 vertex".into()));
    }
    Graph::new(n, (1..n).map(|i| (i - 1, i)).collect())
}

/// Complete graph on `n >= 1` vertices.
pub fn complete_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("a complete graph needs at least 1 vertex".into()));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
}

/// Star on `n >= 2` vertices: vertex 0 joined to all others.
pub fn star_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a star needs at least 2 vertices, got {n}"
        )));
    }
    Graph::new(n, (1..n).map(|v| (0, v)).collect())
}

/// Spider: a center vertex joined to at least three disjoint paths (legs),
/// each of length at least one. Vertex 0 is the center and legs occupy
/// consecutive labels in the given order.
pub fn spider_graph(legs: &[usize]) -> Result<Graph> {
    if legs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "a spider needs at least 3 legs, got {}",
            legs.len()
        )));
    }
    if legs.iter().any(|&l| l == 0) {
        return Err(Error::InvalidArgument("spider legs must have length at least 1".into()));
    }
    let mut edges = Vec::new();
    let mut next = 1usize;
    for &len in legs {
        let mut prev = 0usize;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    Graph::new(next, edges)
}

/// Circular skip link graph: an m-cycle plus the skip cycle generated by
/// repeatedly stepping `r` around it. Requires `2 <= r < m - 1` and
/// `gcd(m, r) = 1`; the result is 4-regular (duplicate edges collapse).
pub fn csl_graph(m: usize, r: usize) -> Result<Graph> {
    if r < 2 || r + 1 >= m {
        return Err(Error::InvalidArgument(format!(
            "skip must satisfy 2 <= r < m - 1, got m = {m}, r = {r}"
        )));
    }
    if gcd(m, r) != 1 {
        return Err(Error::InvalidArgument(format!(
            "skip must be coprime with the cycle length, got m = {m}, r = {r}"
        )));
    }
    let mut edges = BTreeSet::new();
    for i in 0..m {
        edges.insert(norm(i, (i + 1) % m));
        edges.insert(norm(i, (i + r) % m));
    }
    Graph::new(m, edges.into_iter().collect())
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The classic strongly regular pair with parameters (16, 6, 2, 2): the
/// 4x4 rook's graph (same row or column on a 4x4 grid) and the Shrikhande
/// graph (grid differences in {±(1,0), ±(0,1), ±(1,1)} mod 4). They share
/// all four parameters yet are non-isomorphic.
pub fn srg_pair() -> (Graph, Graph) {
    let idx = |r: usize, c: usize| 4 * (r % 4) + c % 4;
    let mut rook = Vec::new();
    let mut shrikhande = Vec::new();
    for r1 in 0..4 {
        for c1 in 0..4 {
            let u = idx(r1, c1);
            for r2 in 0..4 {
                for c2 in 0..4 {
                    let v = idx(r2, c2);
                    if u >= v {
                        continue;
                    }
                    if (r1 == r2) != (c1 == c2) {
                        rook.push((u, v));
                    }
                    let (dr, dc) = ((r2 + 4 - r1) % 4, (c2 + 4 - c1) % 4);
                    if matches!((dr, dc), (1, 0) | (3, 0) | (0, 1) | (0, 3) | (1, 1) | (3, 3)) {
                        shrikhande.push((u, v));
                    }
                }
            }
        }
    }
    (
        Graph::new(16, rook).expect("rook edges are valid"),
        Graph::new(16, shrikhande).expect("shrikhande edges are valid"),
    )
}

/// Petersen graph: 2-subsets of a 5-set, adjacent when disjoint.
pub fn petersen_graph() -> Graph {
    let mut pairs = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            pairs.push((a, b));
        }
    }
    let mut edges = Vec::new();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (a, b) = pairs[i];
            let (c, d) = pairs[j];
            if a != c && a != d && b != c && b != d {
                edges.push((i, j));
            }
        }
    }
    Graph::new(10, edges).expect("petersen edges are valid")
}

/// The three regression targets used by the multitask dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphLabels {
    pub connected: bool,
    /// Longest shortest path; on disconnected graphs, the maximum over
    /// the components' internal diameters (kept finite on purpose).
    pub diameter: f64,
    /// Largest adjacency eigenvalue, by shifted power iteration.
    pub spectral_radius: f64,
}

impl GraphLabels {
    /// Targets as a fixed-arity vector (connectivity encoded 0/1).
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            if self.connected { 1.0 } else { 0.0 },
            self.diameter,
            self.spectral_radius,
        ]
    }
}

/// Computes connectivity, diameter, and spectral radius exactly enough for
/// regression targets (eigenvalue to power-iteration tolerance 1e-9).
pub fn label_oracles(g: &Graph) -> GraphLabels {
    GraphLabels {
        connected: g.is_connected(),
        diameter: diameter(g) as f64,
        spectral_radius: spectral_radius(g),
    }
}

fn diameter(g: &Graph) -> usize {
    let n = g.n();
    let mut best = 0usize;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        for &d in &dist {
            if d != usize::MAX && d > best {
                best = d;
            }
        }
    }
    best
}

fn spectral_radius(g: &Graph) -> f64 {
    let n = g.n();
    if n == 0 {
        return 0.0;
    }
    let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap_or(0) as f64;
    let c = max_deg + 1.0;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0f64; n];
    let mut prev = f64::NAN;
    let mut stable = 0;
    for _ in 0..500_000 {
        for (u, slot) in w.iter_mut().enumerate() {
            let mut acc = c * v[u];
            for &x in g.neighbors(u) {
                acc += v[x];
            }
            *slot = acc;
        }
        let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (a, b) in v.iter_mut().zip(&w) {
            *a = b / norm;
        }
        if (lambda - prev).abs() <= 1e-9 * lambda.abs().max(1.0) {
            stable += 1;
            if stable >= 3 {
                return (lambda - c).max(0.0);
            }
        } else {
            stable = 0;
        }
        prev = lambda;
    }
    (prev - c).max(0.0)
}

/// True when the graph contains a (not necessarily induced) cycle of
/// length exactly `l`. Each cycle is searched from its minimum vertex,
/// with a breadth-first distance bound pruning dead branches.
pub fn has_cycle_of_length(g: &Graph, l: usize) -> bool {
    if l < 3 || g.n() < l {
        return false;
    }
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    let mut on_path = vec![false; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if g.degree(s) < 2 {
            continue;
        }
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &x in g.neighbors(u) {
                if x >= s && dist[x] == usize::MAX {
                    dist[x] = dist[u] + 1;
                    queue.push_back(x);
                }
            }
        }
        on_path.iter_mut().for_each(|b| *b = false);
        on_path[s] = true;
        if extend_cycle(g, s, s, 1, l, &dist, &mut on_path) {
            return true;
        }
        on_path[s] = false;
    }
    false
}

fn extend_cycle(
    g: &Graph,
    s: usize,
    u: usize,
    depth: usize,
    l: usize,
    dist: &[usize],
    on_path: &mut [bool],
) -> bool {
    if depth == l {
        return g.has_edge(u, s);
    }
    for &x in g.neighbors(u) {
        if x <= s || on_path[x] || dist[x] > l - depth {
            continue;
        }
        on_path[x] = true;
        if extend_cycle(g, s, x, depth + 1, l, dist, on_path) {
            on_path[x] = false;
            return true;
        }
        on_path[x] = false;
    }
    false
}

/// Erdős–Rényi graph: each vertex pair is an edge independently with
/// probability `p`.
pub fn er_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("sampled edges are valid")
}

/// Uniformly random labeled tree on `n >= 1` vertices (Prüfer decoding).
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    if n <= 2 {
        let edges = if n == 2 { vec![(0, 1)] } else { Vec::new() };
        return Graph::new(n, edges).expect("tiny tree is valid");
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<usize> =
        (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let leaf = *leaves.iter().next().expect("a tree always has a leaf");
        leaves.remove(&leaf);
        edges.push(norm(leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let mut rest = leaves.into_iter();
    let (a, b) = (rest.next().expect("two ends remain"), rest.next().expect("two ends remain"));
    edges.push(norm(a, b));
    Graph::new(n, edges).expect("decoded tree is valid")
}

/// An n-cycle plus `chord_count` distinct chords chosen uniformly among
/// the non-cycle pairs.
pub fn cycle_with_chords<R: Rng>(n: usize, chord_count: usize, rng: &mut R) -> Result<Graph> {
    let base = cycle_graph(n)?;
    let mut candidates = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !base.has_edge(u, v) {
                candidates.push((u, v));
            }
        }
    }
    if chord_count > candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "asked for {chord_count} chords but only {} pairs are available",
            candidates.len()
        )));
    }
    let mut edges = base.edges().to_vec();
    for i in 0..chord_count {
        let j = rng.gen_range(i..candidates.len());
        candidates.swap(i, j);
        edges.push(candidates[i]);
    }
    Graph::new(n, edges)
}
