//! Infer customer-provider and sibling relationships between autonomous
//! systems from observed BGP AS paths.
//!
//! The pipeline reads paths, marks sibling links from organization names,
//! encodes the valley-free constraint as 2SAT, strips the part of the
//! instance that is conflict-free, and solves the rest as a weighted MAX2SAT
//! problem through a vector relaxation and randomized hyperplane rounding.

pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod relax;
pub mod relmap;
pub mod scc;
pub mod seeding;
pub mod siblings;
pub mod synth;
pub mod tor2sat;
