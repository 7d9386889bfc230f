//! Command-line companion: configuration files, CSV and JSON formats, the
//! `krf` subcommands and the acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod io;
pub mod report;
