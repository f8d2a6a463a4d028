//! Reconstructibility machinery: deck equality, exhaustive audits, Kelly
//! subgraph counts, deck-level WL distinguishability, and an exact
//! bottom-up fingerprint for small graphs.

use crate::canon::{canonical_form, CanonCache, CanonicalForm};
use crate::combin::{binomial, for_each_subset};
use crate::deck::{deck_with_budget, Deck, DEFAULT_DECK_BUDGET};
use crate::enumerate::{enumerate_graphs, enumerate_regular, enumerate_spiders, enumerate_trees};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::wl::wl1_joint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Graph families supported by the reconstructibility audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    All,
    Trees,
    Spiders,
    Regular,
}

impl Family {
    pub fn enumerate(&self, n: usize) -> Result<Vec<Graph>> {
        match self {
            Family::All => enumerate_graphs(n),
            Family::Trees => enumerate_trees(n),
            Family::Spiders => enumerate_spiders(n),
            Family::Regular => enumerate_regular(n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::All => "all",
            Family::Trees => "trees",
            Family::Spiders => "spiders",
            Family::Regular => "regular",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Family::All),
            "trees" => Ok(Family::Trees),
            "spiders" => Ok(Family::Spiders),
            "regular" => Ok(Family::Regular),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

/// Result of auditing a family for k-deck collisions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconReport {
    pub n: usize,
    pub k: usize,
    pub family: String,
    /// Isomorphism classes examined.
    pub class_count: usize,
    /// Groups of pairwise non-isomorphic graphs sharing a k-deck, each
    /// listed by canonical form.
    pub collision_groups: Vec<Vec<CanonicalForm>>,
    /// True when every class is determined by its k-deck.
    pub reconstructible: bool,
    /// Wall-clock audit time; excluded from serialized reports so that
    /// equal-seed runs emit byte-identical JSON (timings belong in
    /// sidecar metadata).
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

/// True when `a` and `b` have equal k-decks. Requires equal vertex counts.
pub fn same_deck(a: &Graph, b: &Graph, k: usize) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::InvalidArgument(format!(
            "deck comparison needs equal sizes, got {} and {}",
            a.n(),
            b.n()
        )));
    }
    Ok(deck_with_budget(a, k, DEFAULT_DECK_BUDGET)? == deck_with_budget(b, k, DEFAULT_DECK_BUDGET)?)
}

/// Groups every isomorphism class of `family` on `n` vertices by k-deck and
/// reports the collision groups.
pub fn audit_k_reconstructibility(n: usize, k: usize, family: Family) -> Result<ReconReport> {
    let graphs = family.enumerate(n)?;
    audit_graphs(&graphs, n, k, family.name())
}

/// Audit over a caller-supplied set of pairwise non-isomorphic graphs.
pub fn audit_graphs(graphs: &[Graph], n: usize, k: usize, family: &str) -> Result<ReconReport> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "audit requires 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let started = std::time::Instant::now();
    if let Some(g) = graphs.iter().find(|g| g.n() != n) {
        return Err(Error::InvalidArgument(format!(
            "family member has {} vertices, audit expects {n}",
            g.n()
        )));
    }
    let keyed: Vec<(Deck, CanonicalForm)> = graphs
        .par_iter()
        .map(|g| Ok((deck_with_budget(g, k, DEFAULT_DECK_BUDGET)?, canonical_form(g)?)))
        .collect::<Result<_>>()?;
    let mut groups: BTreeMap<Deck, Vec<CanonicalForm>> = BTreeMap::new();
    for (d, form) in keyed {
        groups.entry(d).or_default().push(form);
    }
    let mut collision_groups: Vec<Vec<CanonicalForm>> = groups
        .into_values()
        .filter(|members| members.len() > 1)
        .map(|mut members| {
            members.sort();
            members
        })
        .collect();
    collision_groups.sort();
    Ok(ReconReport {
        n,
        k,
        family: family.to_string(),
        class_count: graphs.len(),
        reconstructible: collision_groups.is_empty(),
        collision_groups,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

impl PartialOrd for Deck {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Deck {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n(), self.k(), self.cards()).cmp(&(other.n(), other.k(), other.cards()))
    }
}

/// Exact number of induced subgraphs of the deck's original graph that are
/// isomorphic to the pattern `h`, recovered from the deck alone: every
/// occurrence of `h` survives in `C(n - |h|, k - |h|)` cards, so the sum of
/// per-card counts is divisible by that factor. A failed division means the
/// card multiset is not a genuine deck.
pub fn kelly_count(d: &Deck, h: &Graph) -> Result<u128> {
    let (n, k, p) = (d.n(), d.k(), h.n());
    if p > k {
        return Err(Error::InvalidArgument(format!(
            "pattern has {p} vertices but cards only have {k}"
        )));
    }
    if p >= n {
        return Err(Error::InvalidArgument(format!(
            "pattern must be smaller than the original graph ({p} >= {n})"
        )));
    }
    let mut cache = CanonCache::new();
    let target = cache.canonical_form(h)?;
    let mut total: u128 = 0;
    for (form, &mult) in d.cards() {
        let card = graph_of_form(form, k)?;
        let mut count: u128 = 0;
        let mut err = None;
        for_each_subset(k, p, |s| {
            if err.is_some() {
                return;
            }
            match card.induced_subgraph(s).and_then(|sub| cache.canonical_form(&sub)) {
                Ok(f) => {
                    if f == target {
                        count += 1;
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        total += count * mult as u128;
    }
    let divisor = binomial(n - p, k - p);
    if total % divisor != 0 {
        return Err(Error::CorruptedDeck(format!(
            "pattern occurrence sum {total} is not divisible by {divisor}"
        )));
    }
    Ok(total / divisor)
}

/// Reconstructs a card graph from its canonical form bytes. Only used
/// internally on forms produced by this crate.
fn graph_of_form(form: &CanonicalForm, k: usize) -> Result<Graph> {
    let bytes = form.bytes();
    if bytes.len() < 3 {
        return Err(Error::CorruptedDeck("canonical form too short".into()));
    }
    let n = u16::from_le_bytes([bytes[0], bytes[1]]) as usize;
    if n != k {
        return Err(Error::CorruptedDeck(format!(
            "card form encodes {n} vertices, deck says {k}"
        )));
    }
    let attributed = bytes[2] == 1;
    let header = 3 + if attributed { 8 * n } else { 0 };
    let bits = &bytes[header..];
    let mut edges = Vec::new();
    let mut idx = 0usize;
    for pos in 1..n {
        for i in 0..pos {
            let byte = bits
                .get(idx / 8)
                .ok_or_else(|| Error::CorruptedDeck("truncated adjacency bits".into()))?;
            if byte >> (7 - idx % 8) & 1 == 1 {
                edges.push((i, pos));
            }
            idx += 1;
        }
    }
    Graph::new(n, edges)
}

/// True when the multisets of stable 1-WL histograms over the k-cards of
/// `a` and `b` differ (joint refinement across both decks).
pub fn deck_wl_distinguishes(a: &Graph, b: &Graph, k: usize) -> Result<bool> {
    deck_wl_distinguishes_with_budget(a, b, k, DEFAULT_DECK_BUDGET)
}

/// As [`deck_wl_distinguishes`] with an explicit card budget per graph.
pub fn deck_wl_distinguishes_with_budget(
    a: &Graph,
    b: &Graph,
    k: usize,
    budget: u128,
) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::InvalidArgument(format!(
            "deck comparison needs equal sizes, got {} and {}",
            a.n(),
            b.n()
        )));
    }
    let n = a.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "deck WL requires 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let count = binomial(n, k);
    if count > budget {
        return Err(Error::BudgetExceeded(format!(
            "deck WL would enumerate {count} cards per graph (budget {budget})"
        )));
    }
    let mut cards: Vec<Graph> = Vec::with_capacity(2 * count as usize);
    for g in [a, b] {
        let mut err = None;
        for_each_subset(n, k, |s| {
            if err.is_some() {
                return;
            }
            match g.induced_subgraph(s) {
                Ok(c) => cards.push(c),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    let refs: Vec<&Graph> = cards.iter().collect();
    let colorings = wl1_joint(&refs);
    let half = colorings.len() / 2;
    let mut ah: Vec<&BTreeMap<u32, u32>> = colorings[..half].iter().map(|c| &c.histogram).collect();
    let mut bh: Vec<&BTreeMap<u32, u32>> = colorings[half..].iter().map(|c| &c.histogram).collect();
    ah.sort();
    bh.sort();
    Ok(ah != bh)
}

/// Vertex-count cap for the full-reconstruction fingerprint (the table is
/// dense in 2^n).
pub const FINGERPRINT_CAP: usize = 8;

/// Order-independent digest of the full subgraph lattice: the fingerprint
/// of a vertex set is a 128-bit hash of the sorted fingerprints of its
/// one-vertex-deleted subsets, bottoming out at pairs (edge bit plus
/// attribute classes) and singletons (attribute class).
pub fn full_reconstruction_fingerprint(g: &Graph) -> Result<u128> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidArgument("fingerprint of the empty graph".into()));
    }
    if n > FINGERPRINT_CAP {
        return Err(Error::UnsupportedSize(format!(
            "fingerprint supports up to {FINGERPRINT_CAP} vertices, got {n}"
        )));
    }
    let attr = |v: usize| -> u64 {
        g.vertex_attrs().map_or(0, |a| crate::canon::attr_hash(&a[v]))
    };
    let mut table: Vec<u128> = vec![0; 1 << n];
    // masks in increasing popcount order: iterate all masks ascending and
    // process those of each size; sizes are handled in order because a
    // mask's children are smaller numbers only in popcount, so do two loops
    for size in 1..=n {
        for mask in 1u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let digest = match size {
                1 => {
                    let v = mask.trailing_zeros() as usize;
                    hash128(&[b"vertex".as_slice(), &attr(v).to_le_bytes()])
                }
                2 => {
                    let u = mask.trailing_zeros() as usize;
                    let v = (31 - mask.leading_zeros()) as usize;
                    let edge = g.has_edge(u, v) as u8;
                    let mut pair = [attr(u), attr(v)];
                    pair.sort_unstable();
                    hash128(&[
                        b"pair".as_slice(),
                        &[edge],
                        &pair[0].to_le_bytes(),
                        &pair[1].to_le_bytes(),
                    ])
                }
                _ => {
                    let mut children: Vec<u128> = (0..n)
                        .filter(|&v| mask >> v & 1 == 1)
                        .map(|v| table[(mask ^ (1 << v)) as usize])
                        .collect();
                    children.sort_unstable();
                    let child_bytes: Vec<Vec<u8>> =
                        children.iter().map(|c| c.to_le_bytes().to_vec()).collect();
                    let mut parts: Vec<&[u8]> = vec![b"set".as_slice()];
                    parts.extend(child_bytes.iter().map(|b| b.as_slice()));
                    hash128(&parts)
                }
            };
            table[mask as usize] = digest;
        }
    }
    Ok(table[(1usize << n) - 1])
}

fn hash128(parts: &[&[u8]]) -> u128 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update((p.len() as u64).to_le_bytes());
        hasher.update(p);
    }
    let out = hasher.finalize();
    u128::from_le_bytes(out[..16].try_into().expect("sha256 is long enough"))
}

/// Evaluation of the two size conditions under which an (n - ell)-deck
/// pins down the n-cycle, using natural logarithms. Condition one bounds
/// the number of removals; condition two bounds n from below by an
/// expression in ell. Margins are (rhs - lhs) scaled so positive means
/// satisfied; the slack variant multiplies the removal bound by 1.1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleConditions {
    pub n: usize,
    pub ell: usize,
    pub removal_ok: bool,
    pub size_ok: bool,
    /// Conjunction of both conditions.
    pub holds: bool,
    /// Conjunction with the removal bound relaxed by a factor of 1.1.
    pub holds_with_slack: bool,
    pub removal_margin: f64,
    pub size_margin: f64,
}

/// Checks the cycle-recognition size conditions for removing `ell` of `n`
/// vertices.
pub fn cycle_theorem_conditions(n: usize, ell: usize) -> Result<CycleConditions> {
    if n < 4 || ell == 0 || ell > n - 3 {
        return Err(Error::InvalidArgument(format!(
            "conditions need n >= 4 and 1 <= ell <= n - 3, got n = {n}, ell = {ell}"
        )));
    }
    let nf = n as f64;
    let lf = ell as f64;
    let removal_bound = (2.0 * nf.ln() / nf.ln().ln()).sqrt();
    let removal_ok = lf < removal_bound;
    let e = std::f64::consts::E;
    let size_bound = (lf - lf.ln() + 1.0) * ((e + e * lf.ln() + e + 1.0) / ((lf - 1.0) * lf.ln() - 1.0))
        + 1.0;
    let size_ok = nf >= size_bound;
    Ok(CycleConditions {
        n,
        ell,
        removal_ok,
        size_ok,
        holds: removal_ok && size_ok,
        holds_with_slack: (lf < 1.1 * removal_bound) && size_ok,
        removal_margin: removal_bound - lf,
        size_margin: nf - size_bound,
    })
}
