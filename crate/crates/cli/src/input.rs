//! Loading arguments that are either inline JSON or a path to a JSON file.

use std::fs;

use serde::de::DeserializeOwned;
use serde_json::error::Category;

use subspace_core::{Place, Rat};

use crate::{CliError, EXIT_DOMAIN, EXIT_IO, EXIT_USAGE};

fn is_inline(arg: &str) -> bool {
    matches!(arg.trim_start().chars().next(), Some('[' | '{' | '"'))
}

/// Parses `arg` as JSON when it looks like JSON, otherwise reads it as a path.
/// Malformed JSON exits 64; well-formed JSON the library rejects exits 65.
pub fn load<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let (text, origin) = if is_inline(arg) {
        (arg.to_string(), "inline argument".to_string())
    } else {
        let text = fs::read_to_string(arg).map_err(|e| CliError {
            code: EXIT_IO,
            msg: format!("{arg}: {e}"),
            detail: None,
        })?;
        (text, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| {
        let code = match e.classify() {
            Category::Syntax | Category::Eof => EXIT_USAGE,
            Category::Data => EXIT_DOMAIN,
            Category::Io => EXIT_IO,
        };
        CliError {
            code,
            msg: format!("{origin}: {e}"),
            detail: None,
        }
    })
}

pub fn parse_rat(s: &str) -> Result<Rat, CliError> {
    Ok(s.parse::<Rat>()?)
}

pub fn parse_place(s: &str) -> Result<Place, CliError> {
    Ok(s.parse::<Place>()?)
}
