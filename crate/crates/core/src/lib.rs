//! Bearing rigidity and bearing equivalence of directed formations.
//!
//! A directed formation is a sensing graph plus agent positions in `R^d`.
//! This crate builds the bearing rigidity matrix `R_B` and the bearing
//! Laplacian `L_B`, decides whether `Null(R_B) = Null(L_B)` is the trivial
//! `(d+1)`-dimensional space of translations and scalings, and simulates the
//! bearing-only control law `dp/dt = -L_B(g*) p`.
//!
//! ```
//! use bearing_equiv::analysis::{classify_equivalence, Tolerances};
//! use bearing_equiv::geometry::{Configuration, DirectedFormation};
//! use bearing_equiv::graph::DirectedGraph;
//!
//! // agent 2 observes 1, agent 3 observes 1 and 2 (ids are 1-based here)
//! let graph = DirectedGraph::from_one_based(3, &[(2, 1), (3, 1), (3, 2)])?;
//! let config = Configuration::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])?;
//! let f = DirectedFormation::new(graph, config)?;
//!
//! let report = classify_equivalence(&f, &Tolerances::default())?;
//! assert!(report.is_bearing_equivalent);
//! assert_eq!(report.dim_null_lb, 3);
//! # Ok::<(), bearing_equiv::Error>(())
//! ```
//!
//! Vertices are 0-based throughout the library. JSON documents ([`io`]) and
//! the `bearing` command line use 1-based ids.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod operators;

pub use error::{Error, Result};
