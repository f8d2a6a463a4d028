//! Graph reconstruction machinery.
//!
//! This crate provides the combinatorial core for working with decks of
//! vertex-deleted and k-vertex induced subgraphs: exact canonical forms for
//! small graphs, k-deck construction, Weisfeiler-Leman color refinement (on
//! vertices and on vertex pairs), Kelly-style subgraph counting from decks,
//! reconstructibility audits over exhaustively enumerated graph families, and
//! seeded generators for the synthetic benchmark datasets used by the
//! learning experiments in the companion crates.
//!
//! Everything is deterministic: a fixed seed reproduces datasets byte for
//! byte, and all multiset-valued results are kept in sorted containers.

pub mod canon;
pub mod combin;
pub mod dataset;
pub mod deck;
pub mod enumerate;
pub mod error;
pub mod generators;
pub mod graph;
pub mod recon;
pub mod rng;
pub mod wl;

pub use canon::{canonical_form, canonical_form_with_cap, CanonicalForm};
pub use deck::{deck, deck_with_budget, Deck};
pub use error::{Error, Result};
pub use graph::Graph;
