//! Command-line companion to [`sentrack_core`]: file formats, a synthetic
//! corpus simulator, corpus-level evaluation, and SVG track overlays.
//!
//! The binary in `main.rs` is a thin clap wrapper over these modules; all of
//! the logic lives here so it can be exercised from integration tests.

pub mod check;
pub mod config;
pub mod eval;
pub mod io;
pub mod overlay;
pub mod pool;
pub mod sim;
pub mod truth;
