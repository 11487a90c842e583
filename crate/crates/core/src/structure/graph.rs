//! Index-based view of a topology used by every structural evaluator.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{EvalMode, StructureError};
use crate::topology::{NodeKind, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Element {
    Vertex(u32),
    Edge(u32),
}

#[derive(Debug, Clone)]
pub(crate) struct Vertex {
    pub kind: NodeKind,
    pub comp: Option<u32>,
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub a: u32,
    pub b: u32,
    pub comp: Option<u32>,
}

/// Compiled form of a topology: failable components are numbered densely
/// (failable nodes first, then failable links) and adjacency is precomputed.
#[derive(Debug, Clone)]
pub struct SystemGraph {
    mode: EvalMode,
    ids: Vec<String>,
    elements: Vec<Element>,
    pub(crate) vertices: Vec<Vertex>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) adjacency: Vec<Vec<(u32, u32)>>,
    terminals: Vec<u32>,
    controllers: Vec<u32>,
}

/// Reusable buffers for [`SystemGraph::is_up`].
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    vertex_up: Vec<bool>,
    controlled: Vec<bool>,
    seen: Vec<bool>,
    stack: Vec<u32>,
}

impl SystemGraph {
    pub fn new(t: &Topology, mode: EvalMode) -> Result<Self, StructureError> {
        let mut index = BTreeMap::new();
        let mut ids = Vec::new();
        let mut elements = Vec::new();
        let mut vertices = Vec::with_capacity(t.nodes().len());
        for (i, n) in t.nodes().iter().enumerate() {
            if index.insert(n.id.as_str(), i as u32).is_some() {
                return Err(StructureError::InvalidTopology(alloc::format!("duplicate node `{}`", n.id)));
            }
            let comp = n.is_failable().then(|| {
                ids.push(n.id.clone());
                elements.push(Element::Vertex(i as u32));
                (ids.len() - 1) as u32
            });
            vertices.push(Vertex { kind: n.kind, comp });
        }
        let mut edges = Vec::with_capacity(t.links().len());
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (e, l) in t.links().iter().enumerate() {
            let lookup = |id: &str| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| StructureError::InvalidTopology(alloc::format!("link `{}` references unknown node `{id}`", l.id)))
            };
            let (a, b) = (lookup(&l.a)?, lookup(&l.b)?);
            let comp = (!l.perfect).then(|| {
                ids.push(l.id.clone());
                elements.push(Element::Edge(e as u32));
                (ids.len() - 1) as u32
            });
            edges.push(Edge { a, b, comp });
            adjacency[a as usize].push((b, e as u32));
            adjacency[b as usize].push((a, e as u32));
        }
        let of_kind = |k: NodeKind| -> Vec<u32> {
            (0..vertices.len() as u32).filter(|&v| vertices[v as usize].kind == k).collect()
        };
        Ok(SystemGraph {
            mode,
            terminals: of_kind(NodeKind::AccessTerminal),
            controllers: of_kind(NodeKind::Controller),
            ids,
            elements,
            vertices,
            edges,
            adjacency,
        })
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    /// Failable component ids, indexed by component number.
    pub fn component_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn component_count(&self) -> usize {
        self.ids.len()
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|c| c == id)
    }

    pub(crate) fn element(&self, comp: usize) -> Element {
        self.elements[comp]
    }

    /// Components that can never influence the outcome in this mode.
    pub(crate) fn is_ignored(&self, comp: usize) -> bool {
        if self.mode == EvalMode::Sdn {
            return false;
        }
        match self.elements[comp] {
            Element::Vertex(v) => self.vertices[v as usize].kind == NodeKind::Controller,
            Element::Edge(e) => {
                let e = &self.edges[e as usize];
                [e.a, e.b].iter().any(|&v| self.vertices[v as usize].kind == NodeKind::Controller)
            }
        }
    }

    pub fn scratch(&self) -> Scratch {
        let n = self.vertices.len();
        Scratch {
            vertex_up: vec![false; n],
            controlled: vec![false; n],
            seen: vec![false; n],
            stack: Vec::with_capacity(n),
        }
    }

    /// Operational predicate for a full up/down vector indexed by component.
    ///
    /// Traditional: all access terminals connected through up forwarding nodes
    /// and links. SDN: a forwarding node is controlled when it reaches an up
    /// controller over up elements; all access terminals must then be connected
    /// through controlled forwarding nodes only.
    pub fn is_up(&self, up: &[bool], scratch: &mut Scratch) -> bool {
        debug_assert_eq!(up.len(), self.ids.len());
        let Some((&first, rest)) = self.terminals.split_first() else {
            return true;
        };
        if rest.is_empty() {
            return true;
        }
        let Scratch { vertex_up, controlled, seen, stack } = scratch;
        for (v, vx) in self.vertices.iter().enumerate() {
            vertex_up[v] = vx.comp.map_or(true, |c| up[c as usize]);
        }
        let edge_up = |e: u32| {
            let e = &self.edges[e as usize];
            e.comp.map_or(true, |c| up[c as usize]) && vertex_up[e.a as usize] && vertex_up[e.b as usize]
        };

        if self.mode == EvalMode::Sdn {
            controlled.fill(false);
            stack.clear();
            for &c in &self.controllers {
                if vertex_up[c as usize] {
                    controlled[c as usize] = true;
                    stack.push(c);
                }
            }
            if stack.is_empty() {
                return false;
            }
            while let Some(v) = stack.pop() {
                for &(w, e) in &self.adjacency[v as usize] {
                    if !controlled[w as usize] && edge_up(e) {
                        controlled[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
        }

        let sdn = self.mode == EvalMode::Sdn;
        let allowed = |v: u32| match self.vertices[v as usize].kind {
            NodeKind::AccessTerminal => true,
            NodeKind::Forwarding => {
                if sdn {
                    controlled[v as usize]
                } else {
                    vertex_up[v as usize]
                }
            }
            NodeKind::Controller => false,
        };
        seen.fill(false);
        stack.clear();
        seen[first as usize] = true;
        stack.push(first);
        let mut remaining = rest.len();
        while let Some(v) = stack.pop() {
            for &(w, e) in &self.adjacency[v as usize] {
                if !seen[w as usize] && allowed(w) && edge_up(e) {
                    seen[w as usize] = true;
                    if self.vertices[w as usize].kind == NodeKind::AccessTerminal {
                        remaining -= 1;
                        if remaining == 0 {
                            return true;
                        }
                    }
                    stack.push(w);
                }
            }
        }
        false
    }
}
