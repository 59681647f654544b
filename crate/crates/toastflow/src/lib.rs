//! Std companion to `toastflow-core`: JSON file formats, static SVG/DOT
//! rendering, and the command implementations behind the `toastflow`
//! binary.

pub mod commands;
pub mod format;
pub mod render;
