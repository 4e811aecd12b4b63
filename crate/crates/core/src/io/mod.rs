//! Text formats and the run manifest.

mod lex;
pub mod manifest;
mod rules;
mod tbox;

use std::path::Path;

pub use manifest::{digest, RunManifest, TOOL_VERSION};
pub use rules::{
    parse_csv_facts, parse_facts, parse_generated_mapping, parse_lowlevel, parse_mapping,
    parse_oracle, parse_program, parse_queries, parse_schema, write_facts, write_mapping,
    write_program, write_queries, write_query, write_schema,
};
pub use tbox::{parse_dllite, parse_tbox, parse_tbox_with, write_dllite, write_tbox, NameRule};

use crate::error::Result;

pub fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}
