//! Plain-text lifetime input: numbers separated by whitespace, commas or
//! newlines; lines starting with `#` are comments.

use std::path::Path;

use crate::error::{Error, Result};
use crate::sample::Sample;

pub fn parse_lifetimes(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_start();
        if line.starts_with('#') {
            continue;
        }
        for token in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let value = token.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                token: token.to_string(),
            })?;
            values.push(value);
        }
    }
    Ok(values)
}

pub fn parse_sample(text: &str) -> Result<Sample> {
    Sample::new(parse_lifetimes(text)?)
}

pub fn read_sample(path: impl AsRef<Path>) -> Result<Sample> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sample(&text)
}
