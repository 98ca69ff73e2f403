//! Exact next-to^k leading-log expansions of single-scale Dyson–Schwinger
//! equations through decorated chord diagrams.

pub mod apoly;
pub mod asymptotics;
pub mod diagrams;
pub mod exec;
pub mod expansions;
pub mod rational;
pub mod symexpr;
pub mod typegf;
