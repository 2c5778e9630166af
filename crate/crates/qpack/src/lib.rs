//! Configs, file formats, reports and the `qpack` command line on top of
//! `qpack-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod csvio;
pub mod netlist;
pub mod report;
pub mod reproduce;
pub mod units;
