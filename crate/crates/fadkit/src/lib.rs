//! Files, manifests, reports and commands around [`fadkit_core`].
//!
//! ```no_run
//! use fadkit::manifest::Manifest;
//! use fadkit::pipeline::{fad_table, FadOptions};
//!
//! let manifest = Manifest::load("data/manifest.json".as_ref())?;
//! for row in fad_table(&manifest, "vggish", FadOptions::default())? {
//!     println!("{} {}", row.result.eval_id, row.result.value);
//! }
//! # Ok::<(), fadkit::Error>(())
//! ```

pub mod commands;
pub mod config;
mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod ratings;
pub mod report;

pub use error::{Error, Result};
pub use fadkit_core;
