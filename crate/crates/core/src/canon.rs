//! Exact canonical forms for small graphs.
//!
//! The canonical form is the lexicographically minimal adjacency bitstring
//! over all vertex orderings compatible with iterated equitable refinement,
//! found by individualization-refinement branch and bound. Two graphs have
//! equal canonical forms exactly when they are isomorphic (respecting vertex
//! attributes, which seed the initial color classes).
//!
//! Byte layout of a form: `n` as little-endian u16, an attribute flag byte
//! (0 = none, 1 = attributed), the per-vertex attribute hashes in canonical
//! order as little-endian u64 when attributed, then the upper-triangle
//! adjacency bits in placement order (for each position j, the bits toward
//! positions 0..j, earlier positions in more significant bits), packed
//! MSB-first into bytes.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::fnv1a;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Default vertex-count cap for canonicalization. The branch-and-bound
/// search is exact but exponential in the worst case; 16 covers every graph
/// the bundled analyses canonicalize by default.
pub const DEFAULT_CANON_CAP: usize = 16;

/// A canonical form; equality is isomorphism.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() % 2 != 0 {
            return Err(Error::InvalidArgument("odd hex length".into()));
        }
        let bytes = (0..s.len() / 2)
            .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad hex: {e}")))?;
        Ok(CanonicalForm { bytes })
    }

    /// Decodes the form back into a concrete representative graph.
    ///
    /// Attributed forms store one-way attribute hashes and cannot be
    /// decoded.
    pub fn to_graph(&self) -> Result<Graph> {
        if self.bytes.len() < 3 {
            return Err(Error::InvalidArgument("truncated canonical form".into()));
        }
        let n = u16::from_le_bytes([self.bytes[0], self.bytes[1]]) as usize;
        if self.bytes[2] != 0 {
            return Err(Error::InvalidArgument(
                "attributed canonical forms do not decode to graphs".into(),
            ));
        }
        let payload = &self.bytes[3..];
        let mut edges = Vec::new();
        let mut bit = 0usize;
        for pos in 1..n {
            for i in 0..pos {
                let byte = payload.get(bit / 8).copied().ok_or_else(|| {
                    Error::InvalidArgument("canonical form payload is too short".into())
                })?;
                if (byte >> (7 - bit % 8)) & 1 == 1 {
                    edges.push((i, pos));
                }
                bit += 1;
            }
        }
        Graph::new(n, edges)
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalForm::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Hashes one attribute vector to the integer used for initial color
/// classes: FNV-1a over the little-endian bytes of each component, prefixed
/// by the vector length.
pub fn attr_hash(attr: &[i64]) -> u64 {
    let mut bytes = Vec::with_capacity(8 + 8 * attr.len());
    bytes.extend_from_slice(&(attr.len() as u64).to_le_bytes());
    for &x in attr {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    fnv1a(&bytes)
}

/// Canonical form under the default size cap.
pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    canonical_form_with_cap(g, DEFAULT_CANON_CAP)
}

/// Canonical form with an explicit cap on the vertex count.
pub fn canonical_form_with_cap(g: &Graph, cap: usize) -> Result<CanonicalForm> {
    if g.n() > cap {
        return Err(Error::UnsupportedSize(format!(
            "canonical form supports up to {cap} vertices, got {}",
            g.n()
        )));
    }
    Ok(Canonizer::new(g).run())
}

/// Ordered partition of the vertices; cells listed first take earlier
/// canonical positions.
type Partition = Vec<Vec<usize>>;

struct Canonizer<'a> {
    g: &'a Graph,
    n: usize,
    attr_hashes: Option<Vec<u64>>,
    /// Best complete candidate so far: per-position adjacency columns.
    best: Option<Vec<u64>>,
}

impl<'a> Canonizer<'a> {
    fn new(g: &'a Graph) -> Self {
        Canonizer {
            g,
            n: g.n(),
            attr_hashes: g
                .vertex_attrs()
                .map(|attrs| attrs.iter().map(|a| attr_hash(a)).collect()),
            best: None,
        }
    }

    fn run(mut self) -> CanonicalForm {
        let initial = self.initial_partition();
        if self.n > 0 {
            self.search(initial);
        }
        self.encode()
    }

    /// Initial cells: attribute classes in ascending hash order, or one cell
    /// holding every vertex when unattributed.
    fn initial_partition(&self) -> Partition {
        match &self.attr_hashes {
            None => {
                if self.n == 0 {
                    vec![]
                } else {
                    vec![(0..self.n).collect()]
                }
            }
            Some(hashes) => {
                let mut by_hash: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
                for v in 0..self.n {
                    by_hash.entry(hashes[v]).or_default().push(v);
                }
                by_hash.into_values().collect()
            }
        }
    }

    /// Equitable refinement: repeatedly split every cell by the vector of
    /// neighbor counts into each current cell, new sub-cells ordered by
    /// signature. Deterministic and isomorphism-invariant.
    fn refine(&self, partition: &mut Partition) {
        loop {
            let mut cell_of = vec![0usize; self.n];
            for (ci, cell) in partition.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = ci;
                }
            }
            let ncells = partition.len();
            let mut next: Partition = Vec::with_capacity(ncells);
            let mut split = false;
            for cell in partition.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut by_sig: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
                for &v in cell {
                    let mut sig = vec![0u32; ncells];
                    for &w in self.g.neighbors(v) {
                        sig[cell_of[w]] += 1;
                    }
                    by_sig.entry(sig).or_default().push(v);
                }
                if by_sig.len() > 1 {
                    split = true;
                }
                next.extend(by_sig.into_values());
            }
            *partition = next;
            if !split {
                return;
            }
        }
    }

    /// Adjacency column for placing vertex `v` at position `placed.len()`:
    /// bit toward the vertex at position i sits at `1 << (pos - 1 - i)`.
    fn column(&self, v: usize, placed: &[usize]) -> u64 {
        let pos = placed.len();
        let mut col = 0u64;
        for (i, &u) in placed.iter().enumerate() {
            if self.g.has_edge(v, u) {
                col |= 1 << (pos - 1 - i);
            }
        }
        col
    }

    fn search(&mut self, mut partition: Partition) {
        self.refine(&mut partition);

        // candidate prefix from the leading run of singleton cells
        let mut placed: Vec<usize> = Vec::new();
        let mut cols: Vec<u64> = Vec::new();
        let mut first_nonsingleton = None;
        for (ci, cell) in partition.iter().enumerate() {
            if cell.len() == 1 {
                let v = cell[0];
                cols.push(self.column(v, &placed));
                placed.push(v);
            } else {
                first_nonsingleton = Some(ci);
                break;
            }
        }

        // prune against the best candidate: a strictly larger prefix can
        // never become minimal; a strictly smaller one always continues
        if let Some(best) = &self.best {
            for (j, &c) in cols.iter().enumerate() {
                match c.cmp(&best[j]) {
                    std::cmp::Ordering::Greater => return,
                    std::cmp::Ordering::Less => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }

        let Some(ci) = first_nonsingleton else {
            // complete ordering
            let better = match &self.best {
                None => true,
                Some(best) => cols < *best,
            };
            if better {
                self.best = Some(cols);
            }
            return;
        };

        let cell = partition[ci].clone();
        for &v in &cell {
            let mut child = Vec::with_capacity(partition.len() + 1);
            child.extend(partition[..ci].iter().cloned());
            child.push(vec![v]);
            child.push(cell.iter().copied().filter(|&u| u != v).collect());
            child.extend(partition[ci + 1..].iter().cloned());
            self.search(child);
        }
    }

    fn encode(&self) -> CanonicalForm {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&(self.n as u16).to_le_bytes());
        match &self.attr_hashes {
            None => bytes.push(0),
            Some(hashes) => {
                bytes.push(1);
                // the attribute hash sequence is the same for every
                // admissible ordering: sorted ascending with multiplicity
                let mut sorted = hashes.clone();
                sorted.sort_unstable();
                for h in sorted {
                    bytes.extend_from_slice(&h.to_le_bytes());
                }
            }
        }
        let cols = self.best.as_deref().unwrap_or(&[]);
        let mut acc: u8 = 0;
        let mut nbits = 0;
        for (pos, &col) in cols.iter().enumerate() {
            for i in (0..pos).rev() {
                acc = (acc << 1) | ((col >> i) & 1) as u8;
                nbits += 1;
                if nbits == 8 {
                    bytes.push(acc);
                    acc = 0;
                    nbits = 0;
                }
            }
        }
        if nbits > 0 {
            bytes.push(acc << (8 - nbits));
        }
        CanonicalForm { bytes }
    }
}

/// Memoizing canonicalizer for the small cards that dominate deck
/// construction. Keys are (vertex count, upper-triangle edge bitmask,
/// attribute hash); graphs above the mask capacity fall through to the
/// plain search.
pub struct CanonCache {
    map: std::collections::HashMap<(usize, u128, u64), CanonicalForm>,
    pub hits: u64,
    pub misses: u64,
}

/// Largest vertex count whose edge set fits the u128 cache key.
pub const CACHE_MAX_N: usize = 16;

impl Default for CanonCache {
    fn default() -> Self {
        Self::new()
    }
}

impl CanonCache {
    pub fn new() -> Self {
        CanonCache { map: std::collections::HashMap::new(), hits: 0, misses: 0 }
    }

    fn key(g: &Graph) -> Option<(usize, u128, u64)> {
        let n = g.n();
        if n > CACHE_MAX_N {
            return None;
        }
        let mut mask: u128 = 0;
        for &(u, v) in g.edges() {
            let idx = u * n - u * (u + 1) / 2 + (v - u - 1);
            mask |= 1 << idx;
        }
        let ah = match g.vertex_attrs() {
            None => 0,
            Some(attrs) => {
                let mut bytes = Vec::new();
                for a in attrs {
                    bytes.extend_from_slice(&attr_hash(a).to_le_bytes());
                }
                fnv1a(&bytes)
            }
        };
        Some((n, mask, ah))
    }

    pub fn canonical_form(&mut self, g: &Graph) -> Result<CanonicalForm> {
        match Self::key(g) {
            None => canonical_form(g),
            Some(key) => {
                if let Some(f) = self.map.get(&key) {
                    self.hits += 1;
                    return Ok(f.clone());
                }
                self.misses += 1;
                let f = canonical_form(g)?;
                self.map.insert(key, f.clone());
                Ok(f)
            }
        }
    }
}
