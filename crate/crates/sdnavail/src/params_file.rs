//! Parameter files: `param <element-class> <name> <value>` per line.
//!
//! Classes are `link`, `forwarding-node`, `controller`, `router`, plus the
//! pseudo-class `defaults` for the alpha reference intensities `lambda_dS`,
//! `lambda_dO` and `lambda_dC`. Values are decimals or quotients such as
//! `1/4380`.

use std::collections::BTreeSet;

use sdnavail_core::dynamics::{ElementClass, ElementParams, ModelError};
use sdnavail_core::scenarios::ParamSet;
use thiserror::Error;

use crate::text::{lines, parse_number, ParseError};

/// The parameter file shipped with the tool.
pub const SHIPPED_PARAMS: &str = include_str!("../data/defaults.params");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsFileError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Applies the assignments in `text` on top of `base` and validates the result.
pub fn parse_params(text: &str, base: ParamSet) -> Result<ParamSet, ParamsFileError> {
    let mut p = base;
    let mut seen = BTreeSet::new();
    for (line, tokens) in lines(text) {
        let ["param", class, name, value] = tokens[..] else {
            return Err(ParseError::new(line, "expected `param <element-class> <name> <value>`").into());
        };
        let v = parse_number(value).ok_or_else(|| ParseError::new(line, format!("`{value}` is not a number")))?;
        if !seen.insert((class, name)) {
            return Err(ParseError::new(line, format!("{class} {name} assigned twice")).into());
        }
        if class == "defaults" {
            let slot = match name {
                "lambda_dS" => &mut p.lambda_ds,
                "lambda_dO" => &mut p.lambda_do,
                "lambda_dC" => &mut p.lambda_dc,
                _ => return Err(ParseError::new(line, format!("unknown default intensity `{name}`")).into()),
            };
            if !(v > 0.0) {
                return Err(ParseError::new(line, format!("{name} must be positive")).into());
            }
            *slot = Some(v);
            continue;
        }
        let class: ElementClass = class
            .parse()
            .map_err(|_| ParseError::new(line, format!("unknown element class `{class}`")))?;
        if !p.class_mut(class).set(name, v) {
            let names = ElementParams::NAMES.join(", ");
            return Err(ParseError::new(line, format!("unknown parameter `{name}` (expected one of {names})")).into());
        }
    }
    p.validate()?;
    Ok(p)
}

/// The shipped defaults, parsed from [`SHIPPED_PARAMS`].
pub fn shipped_params() -> ParamSet {
    parse_params(SHIPPED_PARAMS, ParamSet::shipped()).expect("shipped parameter file is valid")
}
