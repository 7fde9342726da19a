pub mod dual;
pub mod error;
pub mod graph;
pub mod rational;
pub mod sparsifier;
pub mod router;
pub mod harness;
pub mod tree_flow;
pub mod pipeline;
pub mod lowerbound;
