//! Command implementations behind the `fracfib` binary. Every command
//! produces a [`RunReport`] of checked items.

pub mod commands;
pub mod group;
pub mod report;
pub mod reproduce;

pub use report::{Item, RunReport, Status};
