//! Lexing shared by the line-oriented input formats.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

/// Whitespace-separated tokens of every non-blank line, `#` comments removed,
/// with 1-based line numbers.
pub fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split_once('#').map_or(raw, |(before, _)| before);
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

/// A finite decimal number or a quotient `a/b` of two.
pub fn parse_number(token: &str) -> Option<f64> {
    let value = match token.split_once('/') {
        Some((a, b)) => a.parse::<f64>().ok()? / b.parse::<f64>().ok()?,
        None => token.parse().ok()?,
    };
    value.is_finite().then_some(value)
}
