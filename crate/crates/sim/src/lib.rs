//! File formats, Monte Carlo experiments and reporting on top of
//! `dynsched-core`.

pub mod alist;
pub mod base_graph;
pub mod config;
pub mod experiment;
pub mod report;
pub mod stats;
pub mod trace;
