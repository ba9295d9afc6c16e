//! Support library for the `holonomy` command line tool: file formats,
//! result documents, and the self-check suite.

pub mod document;
pub mod io;
pub mod verify;
