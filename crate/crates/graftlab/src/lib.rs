//! IO, file formats, campaign orchestration, parallel search drivers, and
//! the command-line surface for the `graftlab-core` fault-attack
//! laboratory.

pub mod artifacts;
pub mod campaign;
pub mod cli;
pub mod corpus_io;
pub mod kv;
pub mod parallel;
pub mod report;
