//! File formats, randomized verification and the `qpefl` command-line
//! driver on top of [`qpefl_core`].

pub mod cli;
mod error;
pub mod io;
pub mod verify;

pub use error::{Error, Result};
pub use qpefl_core;
