//! The chapters of the book in `book/`, one module each, so `cargo test`
//! runs every code listing as a doctest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}
#[doc = include_str!("../../../book/src/sparsifier.md")]
pub mod sparsifier {}
#[doc = include_str!("../../../book/src/routing.md")]
pub mod routing {}
#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}
#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}
#[doc = include_str!("../../../book/src/lower-bound.md")]
pub mod lower_bound {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
