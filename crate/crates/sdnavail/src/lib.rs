//! File formats, multi-threaded Monte Carlo and the `sdnavail` command line on
//! top of [`sdnavail_core`].

pub mod cli;
pub mod parallel;
pub mod params_file;
pub mod spec_file;
pub mod table;
pub mod text;
pub mod topology_file;

pub use sdnavail_core;
