//! Topology files.
//!
//! ```text
//! # nodes: id, city, kind (fwd | ctrl | acc)
//! node BRG_1 BRG fwd
//! node ACC_BRG BRG acc
//! # links: id, endpoints, optional `perfect` for access attachments
//! link ACC_BRG-BRG_1 ACC_BRG BRG_1 perfect
//! ```

use std::fmt::Write as _;

use sdnavail_core::topology::{validate, Link, Node, NodeKind, Topology, Violation};
use thiserror::Error;

use crate::text::{lines, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyFileError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("invalid topology: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Parses and validates a topology document.
pub fn parse_topology(text: &str) -> Result<Topology, TopologyFileError> {
    let mut nodes = Vec::new();
    let mut links = Vec::new();
    for (line, tokens) in lines(text) {
        match tokens[0] {
            "node" => {
                let [_, id, city, kind] = tokens[..] else {
                    return Err(ParseError::new(line, "expected `node <id> <city> <kind>`").into());
                };
                let kind = NodeKind::from_keyword(kind).ok_or_else(|| {
                    ParseError::new(line, format!("unknown node kind `{kind}` (expected fwd, ctrl or acc)"))
                })?;
                nodes.push(Node::new(id, city, kind));
            }
            "link" => {
                let perfect = match tokens[..] {
                    [_, _, _, _] => false,
                    [_, _, _, _, "perfect"] => true,
                    _ => return Err(ParseError::new(line, "expected `link <id> <a> <b> [perfect]`").into()),
                };
                links.push(Link::new(tokens[1], tokens[2], tokens[3], perfect));
            }
            other => return Err(ParseError::new(line, format!("unknown directive `{other}`")).into()),
        }
    }
    let t = Topology::new(nodes, links);
    let violations = validate(&t);
    if violations.is_empty() {
        Ok(t)
    } else {
        Err(TopologyFileError::Invalid(violations))
    }
}

/// Serialises `t` so that [`parse_topology`] gives it back.
pub fn write_topology(t: &Topology) -> String {
    let mut out = String::new();
    for n in t.nodes() {
        let _ = writeln!(out, "node {} {} {}", n.id, n.city, n.kind.keyword());
    }
    for l in t.links() {
        let flag = if l.perfect { " perfect" } else { "" };
        let _ = writeln!(out, "link {} {} {}{flag}", l.id, l.a, l.b);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdnavail_core::topology::{apply_case, build_reference_backbone, CaseId, ViolationKind};

    #[test]
    fn reference_round_trips() {
        let t = build_reference_backbone();
        assert_eq!(parse_topology(&write_topology(&t)).unwrap(), t);
        for case in CaseId::ALL {
            let t = apply_case(&build_reference_backbone(), case).unwrap();
            assert_eq!(parse_topology(&write_topology(&t)).unwrap(), t);
        }
    }

    #[test]
    fn empty_document() {
        let err = parse_topology("# nothing here\n").unwrap_err();
        assert!(err.to_string().contains("no nodes"), "{err}");
    }

    #[test]
    fn unknown_endpoint_is_named() {
        let mut text = write_topology(&build_reference_backbone());
        text.push_str("link BRG_1-X_9 BRG_1 X_9\n");
        let err = parse_topology(&text).unwrap_err();
        let TopologyFileError::Invalid(v) = &err else { panic!("{err}") };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::DanglingEndpoint);
        assert!(err.to_string().contains("X_9"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases = [
            ("node A X\n", 1),
            ("node A X fwd\nnode B X router\n", 2),
            ("\n\nlink L A B maybe\n", 3),
            ("edge A B\n", 1),
        ];
        for (text, line) in cases {
            match parse_topology(text) {
                Err(TopologyFileError::Syntax(e)) => assert_eq!(e.line, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn controller_to_controller_rejected() {
        let mut text = write_topology(&build_reference_backbone());
        text.push_str("link SC1-SC2 SC1 SC2\n");
        let err = parse_topology(&text).unwrap_err();
        assert!(err.to_string().contains("SC1-SC2"), "{err}");
    }
}
