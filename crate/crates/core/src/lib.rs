//! Compiles OBDA specifications whose ontology is a Horn-ALCHIQ TBox into
//! specifications over a DL-Lite_R TBox, moving the lost expressiveness into
//! the mapping layer.
//!
//! The pipeline lives in [`rewriter`]; [`dl`] holds the description logic
//! types and TBox transformations, [`datalog`] the Datalog translation and
//! evaluator, [`expansion`] the expansion-tree machinery and cutting operator,
//! and [`verify`] a chase-based semantic oracle used to check the guarantees
//! of a rewriting on concrete instances.

pub mod datalog;
pub mod dl;
pub mod error;
pub mod expansion;
pub mod io;
pub mod mapping;
pub mod name;
pub mod rewriter;
pub mod verify;

pub use error::{Error, Result};
pub use name::Name;
