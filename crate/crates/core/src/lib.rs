//! Steady-state availability of SDN backbones under different controller
//! deployments.
//!
//! The model has two levels. [`dynamics`] solves a small Markov chain per
//! element class (links, forwarding nodes, controllers) to get component
//! availabilities; [`structure`] combines them, assuming independence, through
//! an operational predicate requiring every access network to be connected
//! via forwarding nodes that can reach a live controller. [`topology`] holds
//! the reference backbone and its case studies, [`scenarios`] the experiment
//! drivers built on top.
//!
//! The crate is `no_std` and only needs `alloc`; file formats and the CLI live
//! in the `sdnavail` crate.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod scenarios;
pub mod structure;
pub mod topology;
