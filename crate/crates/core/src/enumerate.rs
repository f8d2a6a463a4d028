//! Exhaustive enumeration of small graphs up to isomorphism.
//!
//! Graphs are grown one vertex at a time: every n-vertex class is extended
//! by a new vertex with each of the 2^n possible neighborhoods, and the
//! candidates are deduplicated by canonical form. Output order is canonical
//! (sorted by form), so enumeration is deterministic.

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::generators::spider_graph;
use crate::graph::Graph;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Cap for full graph enumeration; class counts grow too fast beyond this.
pub const MAX_ENUMERATE_N: usize = 8;

/// Cap for tree enumeration.
pub const MAX_ENUMERATE_TREES_N: usize = 12;

/// One representative per isomorphism class of simple graphs on `n`
/// vertices, sorted by canonical form.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > MAX_ENUMERATE_N {
        return Err(Error::UnsupportedSize(format!(
            "graph enumeration supports 1..={MAX_ENUMERATE_N} vertices, got {n}"
        )));
    }
    let mut level = vec![Graph::new(1, vec![])?];
    for size in 2..=n {
        let candidates: Vec<Graph> = level
            .iter()
            .flat_map(|g| {
                (0u32..1 << (size - 1)).map(move |nbrs| {
                    let mut edges = g.edges().to_vec();
                    for v in 0..size - 1 {
                        if nbrs >> v & 1 == 1 {
                            edges.push((v, size - 1));
                        }
                    }
                    Graph::new(size, edges).expect("extension of a valid graph")
                })
            })
            .collect();
        level = dedupe(candidates)?;
    }
    Ok(level)
}

/// One representative per isomorphism class of trees on `n` vertices,
/// sorted by canonical form. Grown by leaf attachment.
pub fn enumerate_trees(n: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > MAX_ENUMERATE_TREES_N {
        return Err(Error::UnsupportedSize(format!(
            "tree enumeration supports 1..={MAX_ENUMERATE_TREES_N} vertices, got {n}"
        )));
    }
    let mut level = vec![Graph::new(1, vec![])?];
    for size in 2..=n {
        let candidates: Vec<Graph> = level
            .iter()
            .flat_map(|t| {
                (0..size - 1).map(move |attach| {
                    let mut edges = t.edges().to_vec();
                    edges.push((attach, size - 1));
                    Graph::new(size, edges).expect("leaf extension of a valid tree")
                })
            })
            .collect();
        level = dedupe(candidates)?;
    }
    Ok(level)
}

/// All spiders on `n` vertices: one center with at least three legs (paths)
/// whose lengths are a partition of `n - 1`. Sorted by leg profile.
pub fn enumerate_spiders(n: usize) -> Result<Vec<Graph>> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "the smallest spider has 4 vertices, got n = {n}"
        )));
    }
    let mut out = Vec::new();
    let mut legs = Vec::new();
    partitions(n - 1, n - 1, &mut legs, &mut out)?;
    return Ok(out);

    fn partitions(
        remaining: usize,
        max_part: usize,
        legs: &mut Vec<usize>,
        out: &mut Vec<Graph>,
    ) -> Result<()> {
        if remaining == 0 {
            if legs.len() >= 3 {
                out.push(spider_graph(legs)?);
            }
            return Ok(());
        }
        for part in (1..=max_part.min(remaining)).rev() {
            legs.push(part);
            partitions(remaining - part, part, legs, out)?;
            legs.pop();
        }
        Ok(())
    }
}

/// Representatives of regular graph classes on `n` vertices.
pub fn enumerate_regular(n: usize) -> Result<Vec<Graph>> {
    Ok(enumerate_graphs(n)?
        .into_iter()
        .filter(|g| {
            let d = g.degree(0);
            (0..g.n()).all(|v| g.degree(v) == d)
        })
        .collect())
}

fn dedupe(candidates: Vec<Graph>) -> Result<Vec<Graph>> {
    let keyed: Vec<_> = candidates
        .into_par_iter()
        .map(|g| canonical_form(&g).map(|f| (f, g)))
        .collect::<Result<_>>()?;
    let mut classes = BTreeMap::new();
    for (form, g) in keyed {
        classes.entry(form).or_insert(g);
    }
    Ok(classes.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_match_known_sequence() {
        // 1, 2, 4, 11, 34, 156 simple graphs on 1..=6 vertices
        let expected = [1usize, 2, 4, 11, 34, 156];
        for (i, &want) in expected.iter().enumerate() {
            assert_eq!(enumerate_graphs(i + 1).unwrap().len(), want, "n = {}", i + 1);
        }
    }

    #[test]
    fn tree_counts_match_known_sequence() {
        let expected = [1usize, 1, 1, 2, 3, 6, 11, 23, 47, 106];
        for (i, &want) in expected.iter().enumerate() {
            assert_eq!(enumerate_trees(i + 1).unwrap().len(), want, "n = {}", i + 1);
        }
    }

    #[test]
    fn spiders_on_six_vertices() {
        // legs: (3,1,1), (2,2,1), (1,1,1,1,1), (2,1,1,1)
        let sp = enumerate_spiders(6).unwrap();
        assert_eq!(sp.len(), 4);
        for s in &sp {
            assert_eq!(s.n(), 6);
            assert_eq!(s.m(), 5);
        }
    }

    #[test]
    fn size_caps_are_enforced() {
        assert!(enumerate_graphs(9).is_err());
        assert!(enumerate_trees(13).is_err());
    }
}
