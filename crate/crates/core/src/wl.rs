//! Weisfeiler-Leman color refinement on vertices (1-WL) and on ordered
//! vertex pairs (2-WL).
//!
//! Refinement runs jointly over a collection of graphs: each round collects
//! the signatures of every vertex (or pair) across all graphs, sorts the
//! distinct signatures, and assigns dense color ids in that order. Colors
//! and histograms are therefore comparable *within one joint run*: to decide
//! whether two graphs are distinguished, refine them together and compare
//! histograms. Initial colors come from vertex-attribute classes; pair
//! colors additionally encode equal / adjacent / non-adjacent.

use crate::canon::attr_hash;
use crate::combin::binomial;
use crate::deck::DEFAULT_DECK_BUDGET;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::item_stream;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Vertex-count cap for 2-WL; the pair table is dense in n².
pub const WL2_CAP: usize = 32;

/// Stable coloring of one graph from a joint refinement run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    /// Color per vertex (1-WL) or per ordered pair in row-major order (2-WL).
    pub colors: Vec<u32>,
    /// Multiset of colors.
    pub histogram: BTreeMap<u32, u32>,
    /// Rounds until the joint partition stabilized.
    pub rounds: usize,
}

impl Coloring {
    fn from_colors(colors: Vec<u32>, rounds: usize) -> Self {
        let mut histogram = BTreeMap::new();
        for &c in &colors {
            *histogram.entry(c).or_insert(0) += 1;
        }
        Coloring { colors, histogram, rounds }
    }
}

/// Refinement arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WlArity {
    One,
    Two,
}

/// 1-WL on a single graph.
pub fn wl1(g: &Graph) -> Coloring {
    wl1_joint(&[g]).pop().expect("one coloring per graph")
}

/// Joint 1-WL over several graphs; histograms are cross-comparable.
pub fn wl1_joint(graphs: &[&Graph]) -> Vec<Coloring> {
    // flatten vertices; remember each graph's slice
    let mut offsets = Vec::with_capacity(graphs.len() + 1);
    let mut total = 0usize;
    for g in graphs {
        offsets.push(total);
        total += g.n();
    }
    offsets.push(total);

    let mut colors = initial_vertex_colors(graphs, total, &offsets);
    let mut distinct = count_distinct(&colors);
    let mut rounds = 0usize;
    loop {
        let mut sigs: Vec<(u32, Vec<u32>)> = Vec::with_capacity(total);
        for (gi, g) in graphs.iter().enumerate() {
            let base = offsets[gi];
            for v in 0..g.n() {
                let mut nbr: Vec<u32> =
                    g.neighbors(v).iter().map(|&w| colors[base + w]).collect();
                nbr.sort_unstable();
                sigs.push((colors[base + v], nbr));
            }
        }
        colors = relabel(&sigs);
        rounds += 1;
        let now = count_distinct(&colors);
        if now == distinct {
            break;
        }
        distinct = now;
    }

    (0..graphs.len())
        .map(|gi| Coloring::from_colors(colors[offsets[gi]..offsets[gi + 1]].to_vec(), rounds))
        .collect()
}

/// 2-WL on a single graph.
pub fn wl2(g: &Graph) -> Result<Coloring> {
    Ok(wl2_joint(&[g])?.pop().expect("one coloring per graph"))
}

/// Joint 2-WL over several graphs. Colors live on ordered vertex pairs;
/// a pair's refined signature is the multiset over all vertices w of the
/// color pair (color(u, w), color(w, v)).
pub fn wl2_joint(graphs: &[&Graph]) -> Result<Vec<Coloring>> {
    for g in graphs {
        if g.n() > WL2_CAP {
            return Err(Error::UnsupportedSize(format!(
                "2-WL supports up to {WL2_CAP} vertices, got {}",
                g.n()
            )));
        }
    }
    let mut offsets = Vec::with_capacity(graphs.len() + 1);
    let mut total = 0usize;
    for g in graphs {
        offsets.push(total);
        total += g.n() * g.n();
    }
    offsets.push(total);

    // initial pair colors: (pair type, attribute class of u, of v)
    let attr_classes = joint_attr_classes(graphs);
    let mut init: Vec<(u32, u32, u32)> = Vec::with_capacity(total);
    for (gi, g) in graphs.iter().enumerate() {
        for u in 0..g.n() {
            for v in 0..g.n() {
                let t = if u == v {
                    0
                } else if g.has_edge(u, v) {
                    1
                } else {
                    2
                };
                init.push((t, attr_classes[gi][u], attr_classes[gi][v]));
            }
        }
    }
    let mut colors = rank_values(&init);
    let mut distinct = count_distinct(&colors);
    let mut rounds = 0usize;
    loop {
        let mut sigs: Vec<(u32, Vec<(u32, u32)>)> = Vec::with_capacity(total);
        for (gi, g) in graphs.iter().enumerate() {
            let n = g.n();
            let base = offsets[gi];
            for u in 0..n {
                for v in 0..n {
                    let mut around: Vec<(u32, u32)> = (0..n)
                        .map(|w| (colors[base + u * n + w], colors[base + w * n + v]))
                        .collect();
                    around.sort_unstable();
                    sigs.push((colors[base + u * n + v], around));
                }
            }
        }
        colors = relabel(&sigs);
        rounds += 1;
        let now = count_distinct(&colors);
        if now == distinct {
            break;
        }
        distinct = now;
    }

    Ok((0..graphs.len())
        .map(|gi| Coloring::from_colors(colors[offsets[gi]..offsets[gi + 1]].to_vec(), rounds))
        .collect())
}

/// True when joint refinement at the given arity assigns `a` and `b`
/// different stable histograms.
pub fn wl_distinguishes(a: &Graph, b: &Graph, arity: WlArity) -> Result<bool> {
    let colorings = match arity {
        WlArity::One => wl1_joint(&[a, b]),
        WlArity::Two => wl2_joint(&[a, b])?,
    };
    Ok(colorings[0].histogram != colorings[1].histogram)
}

/// Disjoint union of all `C(n, k)` induced k-vertex subgraphs of `g`, in
/// lexicographic subset order.
pub fn deck_union_graph(g: &Graph, k: usize) -> Result<Graph> {
    deck_union_graph_with_budget(g, k, DEFAULT_DECK_BUDGET)
}

/// As [`deck_union_graph`] with an explicit cap on the number of cards.
pub fn deck_union_graph_with_budget(g: &Graph, k: usize, budget: u128) -> Result<Graph> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "deck union requires 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let count = binomial(n, k);
    if count > budget {
        return Err(Error::BudgetExceeded(format!(
            "deck union would enumerate {count} cards (budget {budget})"
        )));
    }
    let mut union: Option<Graph> = None;
    let mut err = None;
    crate::combin::for_each_subset(n, k, |s| {
        if err.is_some() {
            return;
        }
        match g.induced_subgraph(s) {
            Ok(card) => {
                union = Some(match union.take() {
                    None => card,
                    Some(u) => u.disjoint_union(&card),
                });
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(union.expect("k <= n guarantees at least one card"))
}

/// Empirical 1-WL collision rate over sampled k-cards: the fraction of
/// unordered pairs of sampled cards that are non-isomorphic (by canonical
/// form) yet receive equal histograms under joint refinement. Cards are
/// sampled iid (with replacement) from the uniform distribution on
/// k-subsets.
pub fn wl_collision_rate(g: &Graph, k: usize, sample_count: usize, seed: u64) -> Result<f64> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "collision rate requires 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if sample_count < 2 {
        return Err(Error::InvalidArgument(
            "collision rate needs at least 2 sampled cards".into(),
        ));
    }
    let mut cache = crate::canon::CanonCache::new();
    let mut cards = Vec::with_capacity(sample_count);
    let mut forms = Vec::with_capacity(sample_count);
    for i in 0..sample_count {
        let mut rng = item_stream(seed, "wl-collision", i as u64);
        let s = random_subset(n, k, &mut rng);
        let card = g.induced_subgraph(&s)?;
        forms.push(cache.canonical_form(&card)?);
        cards.push(card);
    }
    let refs: Vec<&Graph> = cards.iter().collect();
    let colorings = wl1_joint(&refs);
    let mut collisions = 0usize;
    let mut pairs = 0usize;
    for i in 0..sample_count {
        for j in i + 1..sample_count {
            pairs += 1;
            if forms[i] != forms[j] && colorings[i].histogram == colorings[j].histogram {
                collisions += 1;
            }
        }
    }
    Ok(collisions as f64 / pairs as f64)
}

fn random_subset<R: rand::Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    let mut s = pool[..k].to_vec();
    s.sort_unstable();
    s
}

/// Dense attribute classes shared across all graphs in a joint run.
fn joint_attr_classes(graphs: &[&Graph]) -> Vec<Vec<u32>> {
    let mut hashes: Vec<Vec<u64>> = Vec::with_capacity(graphs.len());
    for g in graphs {
        hashes.push(match g.vertex_attrs() {
            None => vec![0; g.n()],
            Some(attrs) => attrs.iter().map(|a| attr_hash(a)).collect(),
        });
    }
    let mut distinct: Vec<u64> = hashes.iter().flatten().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    hashes
        .into_iter()
        .map(|hs| {
            hs.into_iter()
                .map(|h| distinct.binary_search(&h).expect("present") as u32)
                .collect()
        })
        .collect()
}

fn initial_vertex_colors(graphs: &[&Graph], total: usize, offsets: &[usize]) -> Vec<u32> {
    let classes = joint_attr_classes(graphs);
    let mut colors = vec![0u32; total];
    for (gi, cls) in classes.iter().enumerate() {
        for (v, &c) in cls.iter().enumerate() {
            colors[offsets[gi] + v] = c;
        }
    }
    colors
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut seen: Vec<u32> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Assigns dense ids to signatures in sorted order.
fn relabel<S: Ord + Clone>(sigs: &[S]) -> Vec<u32> {
    let mut distinct: Vec<S> = sigs.to_vec();
    distinct.sort_unstable_by(|a, b| a.cmp(b));
    distinct.dedup_by(|a, b| a == b);
    sigs.iter()
        .map(|s| {
            distinct
                .binary_search_by(|probe| probe.cmp(s))
                .expect("signature present") as u32
        })
        .collect()
}

fn rank_values<S: Ord + Clone>(vals: &[S]) -> Vec<u32> {
    relabel(vals)
}
