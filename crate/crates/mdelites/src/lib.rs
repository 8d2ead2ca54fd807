//! Files, formats and the command-line front end for `mdelites-core`.
//!
//! A run directory holds `archive.csv`, `history.log` and `manifest.json`
//! written by `mdelites run`; `mdelites export-ui` adds `map.json` and
//! `mdelites match` adds `annotations.csv`.

pub mod archive_csv;
pub mod bundle;
pub mod catalogue;
pub mod cli;
pub mod commands;
pub mod error;
pub mod instance_file;
pub mod logfile;
pub mod manifest;
pub mod numfmt;
pub mod render;
pub mod serve;

pub use error::{Error, Result};

pub const ARCHIVE_CSV: &str = "archive.csv";
pub const HISTORY_LOG: &str = "history.log";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const MAP_JSON: &str = "map.json";
pub const ANNOTATIONS_CSV: &str = "annotations.csv";
