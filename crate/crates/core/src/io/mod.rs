//! Run configuration and file output.

pub mod config;
pub mod render;

pub use config::{OutputFormat, RunConfig};
pub use render::{cover_csv, cover_pgm, cover_svg, enumeration_csv, Frame};
