//! Citation, readership and text search over a bibliographic corpus, with
//! second order operators that rank documents by how they relate to the
//! results of another query.

pub mod config;
pub mod corpus;
pub mod engine;
pub mod fixtures;
pub mod graph;
pub mod netviz;
pub mod query;
pub mod readership;
pub mod report;
pub mod soo;
pub mod synth;
pub mod text;

pub use config::Config;
pub use engine::{Engine, QueryError, QueryOutcome};
