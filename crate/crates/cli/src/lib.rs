//! Command line companion to the core crate: file formats, Graphviz export,
//! command execution and the verification suite.

pub mod dot;
pub mod json;
pub mod run;
pub mod suite;
