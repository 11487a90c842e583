//! Experiment specification files, one job per line:
//!
//! ```text
//! sweep case=3 axis=alpha_O grid=0.1,1,10 method=exact
//! sweep case=8 axis=alpha_S axis=alpha_H grid=0.5,2 alpha_C=1.5
//! locations pairs=TRD+OSL1,BRG+STV alpha_O=0.2
//! cases method=monte-carlo samples=100000 seed=7
//! ```
//!
//! `grid=` applies to the most recent `axis=`; axes without one use the
//! default grid. Samples imply Monte Carlo unless `method=exact` is given,
//! which is an error.

use sdnavail_core::dynamics::{AlphaAxis, AlphaFactors};
use sdnavail_core::scenarios::{LocationSpec, Method, MethodKind, SweepSpec, DEFAULT_GRID};
use sdnavail_core::topology::CaseId;

use crate::text::{lines, parse_number, ParseError};

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Sweep(SweepSpec),
    Locations(LocationSpec),
    Cases { alphas: AlphaFactors, method: Method },
}

pub fn parse_spec(text: &str) -> Result<Vec<Job>, ParseError> {
    lines(text).map(|(line, tokens)| parse_job(&tokens).map_err(|m| ParseError::new(line, m))).collect()
}

fn parse_job(tokens: &[&str]) -> Result<Job, String> {
    let kind = tokens[0];
    if !matches!(kind, "sweep" | "locations" | "cases") {
        return Err(format!("unknown job `{kind}` (expected sweep, locations or cases)"));
    }
    let mut case = None;
    let mut axes: Vec<(AlphaAxis, Option<Vec<f64>>)> = Vec::new();
    let mut alphas = if kind == "locations" { LocationSpec::default().alphas } else { AlphaFactors::default() };
    let mut pairs = None;
    let mut method = None;
    let mut samples = None;
    let mut seed = None;

    for token in &tokens[1..] {
        let (key, value) = token.split_once('=').ok_or_else(|| format!("expected key=value, found `{token}`"))?;
        let allowed = match key {
            "case" | "axis" | "grid" => kind == "sweep",
            "pairs" => kind == "locations",
            _ => true,
        };
        if !allowed {
            return Err(format!("`{key}` does not apply to {kind}"));
        }
        match key {
            "case" => {
                let n: i64 = value.parse().map_err(|_| format!("case `{value}` is not an integer"))?;
                case = Some(CaseId::new(n).map_err(|e| e.to_string())?);
            }
            "axis" => axes.push((value.parse()?, None)),
            "grid" => {
                let last = axes.last_mut().ok_or("grid= must follow axis=")?;
                if last.1.is_some() {
                    return Err(format!("axis {} already has a grid", last.0.name()));
                }
                last.1 = Some(parse_grid(value)?);
            }
            "pairs" => pairs = Some(parse_pairs(value)?),
            "method" => method = Some(value.parse::<MethodKind>()?),
            "samples" => samples = Some(value.parse::<u64>().map_err(|_| format!("samples `{value}` is not a count"))?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| format!("seed `{value}` is not an integer"))?),
            _ => {
                let axis: AlphaAxis = key.parse().map_err(|_| format!("unknown key `{key}`"))?;
                let v = parse_number(value).ok_or_else(|| format!("`{value}` is not a number"))?;
                alphas = alphas.with(axis, v);
            }
        }
    }

    let method = match (method, samples) {
        (Some(MethodKind::Exact), Some(_)) => return Err("samples= conflicts with method=exact".into()),
        (Some(MethodKind::MonteCarlo), None) => return Err("method=monte-carlo needs samples=".into()),
        (_, Some(samples)) => Method::MonteCarlo { samples, seed: seed.unwrap_or(0) },
        (_, None) if seed.is_some() => return Err("seed= needs samples=".into()),
        _ => Method::Exact,
    };
    alphas.validate().map_err(|e| e.to_string())?;

    Ok(match kind {
        "sweep" => {
            let spec = SweepSpec {
                case,
                axes: axes.into_iter().map(|(a, g)| (a, g.unwrap_or_else(|| DEFAULT_GRID.to_vec()))).collect(),
                fixed: alphas,
                method,
            };
            spec.validate().map_err(|e| e.to_string())?;
            Job::Sweep(spec)
        }
        "locations" => Job::Locations(LocationSpec {
            placements: pairs.unwrap_or_else(|| LocationSpec::default().placements),
            alphas,
            method,
        }),
        _ => Job::Cases { alphas, method },
    })
}

/// Comma-separated numbers, e.g. `0.1,1,10`.
pub fn parse_grid(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|v| parse_number(v).ok_or_else(|| format!("grid value `{v}` is not a number")))
        .collect()
}

/// Comma-separated site pairs, e.g. `TRD+OSL1,BRG+STV`.
pub fn parse_pairs(value: &str) -> Result<Vec<(String, String)>, String> {
    value
        .split(',')
        .map(|p| match p.split_once('+') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
            _ => Err(format!("placement `{p}` is not of the form SITE+SITE")),
        })
        .collect()
}
