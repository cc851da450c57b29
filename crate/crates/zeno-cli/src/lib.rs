//! Scenario files, CSV output, figure recipes and the acceptance suite
//! behind the `zeno` command.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod csv;
pub mod figures;
