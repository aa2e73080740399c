//! Flip distances between non-crossing spanning trees on convex point sets.
//!
//! Points sit in convex position, labeled `1..=n` in cyclic order. A tree is a
//! set of `n - 1` pairwise non-crossing chords spanning all points. A *flip*
//! exchanges one tree edge for another such that the result is again a
//! non-crossing spanning tree. This crate provides:
//!
//! - the combinatorics of edges under a linear cut of the cyclic order (gap
//!   assignments, edge classes, pairings between two trees) in [`geom`] and
//!   [`gaps`],
//! - the conflict graph between paired edges and maximum acyclic vertex
//!   subsets in [`conflict`],
//! - three flip-sequence constructors with proven length bounds plus an
//!   all-boundary greedy in [`flip`],
//! - a brute-force flip-graph oracle (exact distances, eccentricities,
//!   diameters) for small `n` in [`oracle`],
//! - blowup instances that certify lower bounds beating `3/2 n` in [`blowup`],
//! - JSON instance/sequence formats in [`io`] and seeded random instances in
//!   [`random`].

pub mod blowup;
pub mod conflict;
pub mod flip;
pub mod gaps;
pub mod geom;
pub mod io;
pub mod oracle;
pub mod random;

pub use geom::{Edge, Instance, Tree, TreeError};

/// Exact rational type used in lower-bound certificates.
pub use num_rational::Ratio;
