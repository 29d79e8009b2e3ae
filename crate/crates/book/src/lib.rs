//! The guide in `book/`, compiled so that every listing runs as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/projections.md")]
pub mod projections {}

#[doc = include_str!("../../../book/src/rigidity.md")]
pub mod rigidity {}

#[doc = include_str!("../../../book/src/laplacian.md")]
pub mod laplacian {}

#[doc = include_str!("../../../book/src/equivalence.md")]
pub mod equivalence {}

#[doc = include_str!("../../../book/src/acyclic.md")]
pub mod acyclic {}

#[doc = include_str!("../../../book/src/cycles.md")]
pub mod cycles {}

#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod dynamics {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
