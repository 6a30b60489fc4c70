//! File formats, resumable sweep archives and the `freqsweep` command-line
//! front end over [`freqsweep_core`].

pub mod cli;
pub mod io;

pub use freqsweep_core as core;
