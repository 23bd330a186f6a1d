//! Random algebraic constructions of sparse extremal hypergraphs.
//!
//! The pipeline: sample symmetric block polynomials over a finite field,
//! declare an r-set of vertices (field vectors) an edge when the polynomial
//! vanishes on it, union several independent layers into a multi-hypergraph,
//! then delete a vertex from every "bad" structure so the survivor is free
//! of a chosen forbidden configuration. Edge probabilities are governed by
//! an exact linear-algebra oracle: the chance that a uniform polynomial
//! vanishes on a tuple collection is q^-rank of the evaluation matrix.
//!
//! Modules layer bottom-up: [`gf`] (field arithmetic), [`sympoly`]
//! (symmetric polynomial bases and evaluation caches), [`hypergraph`]
//! (layered multi-hypergraphs and the HGR text format), [`construct`]
//! (the three random models), [`analysis`] (bad-structure detection,
//! counting oracles, cleanup), [`lab`] (seeded experiments and reports),
//! and [`cli`] (command-line front end). [`acceptance`] bundles the
//! release gate checks run by both `cargo test` and `turanlab verify`.

pub mod acceptance;
pub mod analysis;
pub mod cli;
pub mod construct;
pub mod gf;
pub mod hypergraph;
pub mod lab;
pub mod sympoly;
