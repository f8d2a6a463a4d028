//! Decks: multisets of isomorphism types of induced k-vertex subgraphs.

use crate::canon::{CanonCache, CanonicalForm};
use crate::combin::{binomial, for_each_subset};
use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default cap on the number of cards a single deck may enumerate.
pub const DEFAULT_DECK_BUDGET: u128 = 4096;

/// The multiset of isomorphism types of all `C(n, k)` induced k-vertex
/// subgraphs ("cards") of a graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deck {
    n: usize,
    k: usize,
    cards: BTreeMap<CanonicalForm, u64>,
}

impl Deck {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Distinct card types with multiplicities, in canonical-form order.
    pub fn cards(&self) -> &BTreeMap<CanonicalForm, u64> {
        &self.cards
    }

    pub fn multiplicity(&self, form: &CanonicalForm) -> u64 {
        self.cards.get(form).copied().unwrap_or(0)
    }

    /// Total number of cards, counting multiplicity.
    pub fn total_cards(&self) -> u128 {
        self.cards.values().map(|&m| m as u128).sum()
    }
}

/// Builds the k-deck of `g` under the default card budget.
pub fn deck(g: &Graph, k: usize) -> Result<Deck> {
    deck_with_budget(g, k, DEFAULT_DECK_BUDGET)
}

/// Builds the k-deck of `g`, refusing to enumerate more than `budget` cards.
pub fn deck_with_budget(g: &Graph, k: usize, budget: u128) -> Result<Deck> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "deck requires 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let count = binomial(n, k);
    if count > budget {
        return Err(Error::BudgetExceeded(format!(
            "deck would enumerate {count} cards (budget {budget}); use sampled subgraphs instead of the exact deck at this size"
        )));
    }
    let mut cache = CanonCache::new();
    let mut cards: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
    let mut err = None;
    for_each_subset(n, k, |s| {
        if err.is_some() {
            return;
        }
        match g.induced_subgraph(s).and_then(|c| cache.canonical_form(&c)) {
            Ok(form) => *cards.entry(form).or_insert(0) += 1,
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Deck { n, k, cards })
}
