//! Parameter files: a JSON object with rationals carried as strings.
//!
//! ```json
//! { "n": 3, "a": ["1", "0"], "b": "0", "c": ["0", "1"], "rho": "1/2" }
//! ```

use std::fmt;

use serde::Deserialize;

use rbkit_core::hypgeo::{GeometryError, SolitonParams};
use rbkit_core::ratlaurent::{parse_rational, Rational};

/// Where and why a parameter file was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub field: Option<String>,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)?;
        if let Some(field) = &self.field {
            write!(f, ", field `{field}`")?;
        }
        write!(f, ": {}", self.msg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub n: usize,
    pub a: Vec<String>,
    pub b: String,
    pub c: Vec<String>,
    pub rho: String,
}

/// Position just after the `"key"` token, or the start of the file.
fn locate(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    let Some(offset) = text.find(&needle) else {
        return (1, 1);
    };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

impl ParamFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            field: None,
            msg: e.to_string(),
        })
    }

    fn field_error(text: &str, key: &str, field: String, msg: String) -> ParseError {
        let (line, column) = locate(text, key);
        ParseError {
            line,
            column,
            field: Some(field),
            msg,
        }
    }

    /// Validates against the source text so that errors point at the
    /// offending key.
    pub fn to_params(&self, text: &str) -> Result<SolitonParams, ParseError> {
        if self.n < 2 {
            return Err(Self::field_error(text, "n", "n".into(), format!("n must be at least 2, got {}", self.n)));
        }
        let rational = |key: &str, field: String, s: &str| -> Result<Rational, ParseError> {
            parse_rational(s).map_err(|e| Self::field_error(text, key, field, format!("{e} in {s:?}")))
        };
        let seq = |key: &str, vals: &[String]| -> Result<Vec<Rational>, ParseError> {
            if vals.len() != self.n - 1 {
                return Err(Self::field_error(
                    text,
                    key,
                    key.into(),
                    format!("expected {} entries for n = {}, got {}", self.n - 1, self.n, vals.len()),
                ));
            }
            vals.iter()
                .enumerate()
                .map(|(i, s)| rational(key, format!("{key}[{i}]"), s))
                .collect()
        };
        let a = seq("a", &self.a)?;
        let c = seq("c", &self.c)?;
        let b = rational("b", "b".into(), &self.b)?;
        let rho = rational("rho", "rho".into(), &self.rho)?;
        SolitonParams::new(a, b, c, rho).map_err(|e| {
            let key = match e {
                GeometryError::ZeroRho => "rho",
                _ => "a",
            };
            Self::field_error(text, key, key.into(), e.to_string())
        })
    }
}

/// Parses and validates a parameter file in one step.
pub fn parse_params(text: &str) -> Result<SolitonParams, ParseError> {
    ParamFile::parse(text)?.to_params(text)
}
