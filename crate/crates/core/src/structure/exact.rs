//! Exact system availability by Shannon factoring.
//!
//! Factoring conditions on one free component at a time. Each residual
//! problem is canonicalised (up links contracted, irrelevant links fixed
//! down), bounded with two predicate calls (all free up false => 0, all free
//! down true => 1) and memoised on its canonical key. The recursion is
//! recorded as a diagram, so one compilation serves any number of
//! availability maps.
//!
//! Canonicalisation relies on an equivalent reading of the SDN predicate: the
//! system is up iff all terminals share one component of the up forwarding
//! graph and some up controller has an up link into that component.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::graph::Element;
use super::{AvailabilityMap, EvalMode, Scratch, StructureError, SystemGraph};
use crate::topology::{NodeKind, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Ref {
    Zero,
    One,
    Node(u32),
}

#[derive(Debug, Clone, Copy)]
struct Decision {
    comp: u32,
    up: Ref,
    down: Ref,
}

const FREE: u8 = 0;
const UP: u8 = 1;
const DOWN: u8 = 2;

/// Compiled factoring of one topology under one mode. Decisions are stored
/// children-first, so evaluation is a single forward pass.
#[derive(Debug, Clone)]
pub struct FactoringDiagram {
    graph: SystemGraph,
    decisions: Vec<Decision>,
    root: Ref,
}

struct Compiler<'g> {
    graph: &'g SystemGraph,
    scratch: Scratch,
    buffer: Vec<bool>,
    memo: HashMap<Vec<u8>, Ref>,
    decisions: Vec<Decision>,
}

impl Compiler<'_> {
    fn predicate(&mut self, state: &[u8], free_up: bool) -> bool {
        for (b, &s) in self.buffer.iter_mut().zip(state) {
            *b = s == UP || (free_up && s == FREE);
        }
        self.graph.is_up(&self.buffer, &mut self.scratch)
    }

    /// Rewrites `state` into a canonical residual problem and returns its memo key.
    ///
    /// Up links between up data vertices (forwarding nodes, terminals) contract
    /// their endpoints into classes. A class is attached once an up controller
    /// has an up link into it. Links that can no longer matter are fixed down:
    /// links touching a failed vertex, links inside one class, and controller
    /// links into an already attached class. Controller-to-controller links
    /// never matter, because a controller that is up attaches its own
    /// neighbours directly.
    fn canonicalise(&self, state: &mut [u8]) -> Vec<u8> {
        let g = self.graph;
        let nv = g.vertices.len();
        let vstate = |state: &[u8], v: u32| g.vertices[v as usize].comp.map_or(UP, |c| state[c as usize]);
        let is_ctrl = |v: u32| g.vertices[v as usize].kind == NodeKind::Controller;

        let mut parent: Vec<u32> = (0..nv as u32).collect();
        fn find(parent: &mut [u32], mut v: u32) -> u32 {
            while parent[v as usize] != v {
                parent[v as usize] = parent[parent[v as usize] as usize];
                v = parent[v as usize];
            }
            v
        }
        for e in &g.edges {
            let es = e.comp.map_or(UP, |c| state[c as usize]);
            if es == FREE && (vstate(state, e.a) == DOWN || vstate(state, e.b) == DOWN || (is_ctrl(e.a) && is_ctrl(e.b))) {
                state[e.comp.unwrap() as usize] = DOWN;
            }
        }
        for e in &g.edges {
            let es = e.comp.map_or(UP, |c| state[c as usize]);
            if es == UP && !is_ctrl(e.a) && !is_ctrl(e.b) && vstate(state, e.a) == UP && vstate(state, e.b) == UP {
                let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
                if ra != rb {
                    parent[ra.max(rb) as usize] = ra.min(rb);
                }
            }
        }
        let mut attached = vec![false; nv];
        for e in &g.edges {
            let es = e.comp.map_or(UP, |c| state[c as usize]);
            if es != UP || is_ctrl(e.a) == is_ctrl(e.b) {
                continue;
            }
            let (c, v) = if is_ctrl(e.a) { (e.a, e.b) } else { (e.b, e.a) };
            if vstate(state, c) == UP && vstate(state, v) == UP {
                let r = find(&mut parent, v);
                attached[r as usize] = true;
            }
        }
        for e in &g.edges {
            let Some(comp) = e.comp else { continue };
            if state[comp as usize] != FREE {
                continue;
            }
            let both_up = vstate(state, e.a) == UP && vstate(state, e.b) == UP;
            let irrelevant = if is_ctrl(e.a) || is_ctrl(e.b) {
                let v = if is_ctrl(e.a) { e.b } else { e.a };
                vstate(state, v) == UP && attached[find(&mut parent, v) as usize]
            } else {
                both_up && find(&mut parent, e.a) == find(&mut parent, e.b)
            };
            if irrelevant {
                state[comp as usize] = DOWN;
            }
        }

        let mut key = Vec::with_capacity(2 * nv + state.len());
        let mut label = vec![u8::MAX; nv];
        let mut next = 0u8;
        for v in 0..nv as u32 {
            match vstate(state, v) {
                DOWN => key.push(0xFF),
                FREE => key.push(0xFE),
                _ => {
                    let r = find(&mut parent, v) as usize;
                    if label[r] == u8::MAX {
                        label[r] = next;
                        next += 1;
                    }
                    key.push(label[r]);
                    key.push(attached[r] as u8);
                }
            }
        }
        for e in &g.edges {
            let Some(comp) = e.comp else { continue };
            let folded = vstate(state, e.a) == UP && vstate(state, e.b) == UP;
            key.push(match state[comp as usize] {
                FREE => 0,
                UP if !folded => 1,
                _ => 2,
            });
        }
        key
    }

    /// Free component with the highest degree in the residual graph; a vertex
    /// counts its incident links that are not down and lead to a vertex that
    /// is not down, a link counts its two endpoints. Ties go to the lower index.
    fn pivot(&self, state: &[u8]) -> Option<usize> {
        let g = self.graph;
        let alive = |v: u32| g.vertices[v as usize].comp.map_or(true, |c| state[c as usize] != DOWN);
        let mut best: Option<(usize, usize)> = None;
        for c in (0..state.len()).filter(|&c| state[c] == FREE) {
            let degree = match g.element(c) {
                Element::Vertex(v) => g.adjacency[v as usize]
                    .iter()
                    .filter(|&&(w, e)| {
                        alive(w) && g.edges[e as usize].comp.map_or(true, |ec| state[ec as usize] != DOWN)
                    })
                    .count(),
                Element::Edge(_) => 2,
            };
            if best.map_or(true, |(_, d)| degree > d) {
                best = Some((c, degree));
            }
        }
        best.map(|(c, _)| c)
    }

    fn visit(&mut self, mut state: Vec<u8>) -> Ref {
        let key = self.canonicalise(&mut state);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = if !self.predicate(&state, true) {
            Ref::Zero
        } else if self.predicate(&state, false) {
            Ref::One
        } else {
            let comp = self
                .pivot(&state)
                .expect("bounds differ, so at least one component is free");
            let mut up_state = state.clone();
            up_state[comp] = UP;
            let up = self.visit(up_state);
            let mut down_state = state.clone();
            down_state[comp] = DOWN;
            let down = self.visit(down_state);
            if up == down {
                up
            } else {
                self.decisions.push(Decision { comp: comp as u32, up, down });
                Ref::Node((self.decisions.len() - 1) as u32)
            }
        };
        self.memo.insert(key, r);
        r
    }
}

impl FactoringDiagram {
    pub fn compile(t: &Topology, mode: EvalMode) -> Result<Self, StructureError> {
        let graph = SystemGraph::new(t, mode)?;
        Ok(Self::from_graph(graph))
    }

    pub fn from_graph(graph: SystemGraph) -> Self {
        let n = graph.component_count();
        let mut initial = vec![FREE; n];
        for (c, s) in initial.iter_mut().enumerate() {
            if graph.is_ignored(c) {
                *s = DOWN;
            }
        }
        let mut compiler = Compiler {
            graph: &graph,
            scratch: graph.scratch(),
            buffer: vec![false; n],
            memo: HashMap::new(),
            decisions: Vec::new(),
        };
        let root = compiler.visit(initial);
        let decisions = compiler.decisions;
        FactoringDiagram { graph, decisions, root }
    }

    pub fn graph(&self) -> &SystemGraph {
        &self.graph
    }

    /// Number of decision nodes retained after reduction.
    pub fn size(&self) -> usize {
        self.decisions.len()
    }

    /// `(availability, unavailability)` for per-component availabilities given
    /// in component order. Both are propagated separately so that a small
    /// unavailability keeps its relative precision.
    pub fn evaluate_vector(&self, probs: &[f64]) -> (f64, f64) {
        let mut values: Vec<(f64, f64)> = Vec::with_capacity(self.decisions.len());
        let value = |values: &[(f64, f64)], r: Ref| match r {
            Ref::Zero => (0.0, 1.0),
            Ref::One => (1.0, 0.0),
            Ref::Node(i) => values[i as usize],
        };
        for d in &self.decisions {
            let p = probs[d.comp as usize];
            let q = 1.0 - p;
            let (ua, uu) = value(&values, d.up);
            let (da, du) = value(&values, d.down);
            values.push((p * ua + q * da, p * uu + q * du));
        }
        let (a, u) = value(&values, self.root);
        (a.clamp(0.0, 1.0), u.clamp(0.0, 1.0))
    }

    /// `(availability, unavailability)` for an availability map.
    pub fn evaluate(&self, a: &AvailabilityMap) -> Result<(f64, f64), StructureError> {
        let probs = a.to_vector(&self.graph)?;
        Ok(self.evaluate_vector(&probs))
    }
}

/// Exact system availability of `t` under `mode`.
pub fn evaluate_exact(t: &Topology, a: &AvailabilityMap, mode: EvalMode) -> Result<f64, StructureError> {
    let diagram = FactoringDiagram::compile(t, mode)?;
    Ok(diagram.evaluate(a)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::evaluate_bruteforce;
    use crate::topology::{apply_case, build_reference_backbone, CaseId, Link, Node, NodeKind};

    fn bridge() -> Topology {
        // Classic bridge between two terminals, all elements failable.
        let nodes = vec![
            Node::new("S", "X", NodeKind::AccessTerminal),
            Node::new("A", "X", NodeKind::Forwarding),
            Node::new("B", "X", NodeKind::Forwarding),
            Node::new("T", "Y", NodeKind::AccessTerminal),
        ];
        let links = vec![
            Link::new("S-A", "S", "A", false),
            Link::new("S-B", "S", "B", false),
            Link::new("A-B", "A", "B", false),
            Link::new("A-T", "A", "T", false),
            Link::new("B-T", "B", "T", false),
        ];
        Topology::new(nodes, links)
    }

    #[test]
    fn bridge_matches_bruteforce() {
        let t = bridge();
        for (i, p) in [0.5, 0.9, 0.99, 0.123].into_iter().enumerate() {
            let mut k = 0.0;
            let a = AvailabilityMap::from_fn(&t, |_| {
                k += 0.01 * i as f64;
                (p - k).max(0.05)
            });
            for mode in [EvalMode::Traditional, EvalMode::Sdn] {
                let exact = evaluate_exact(&t, &a, mode).unwrap();
                let brute = evaluate_bruteforce(&t, &a, mode).unwrap();
                assert!((exact - brute).abs() < 1e-12, "{exact} vs {brute}");
            }
        }
    }

    #[test]
    fn no_controller_means_down_in_sdn() {
        let t = bridge();
        let a = AvailabilityMap::uniform(&t, 0.9);
        assert_eq!(evaluate_exact(&t, &a, EvalMode::Sdn).unwrap(), 0.0);
    }

    #[test]
    fn availability_and_unavailability_are_complementary() {
        let t = build_reference_backbone();
        let d = FactoringDiagram::compile(&t, EvalMode::Sdn).unwrap();
        let (a, u) = d.evaluate(&AvailabilityMap::uniform(&t, 0.99)).unwrap();
        assert!((a + u - 1.0).abs() < 1e-14);
        assert!(u > 0.0);
    }

    #[test]
    fn perfect_components_give_one() {
        for case in CaseId::ALL {
            let t = apply_case(&build_reference_backbone(), case).unwrap();
            for mode in [EvalMode::Sdn, EvalMode::Traditional] {
                assert_eq!(evaluate_exact(&t, &AvailabilityMap::uniform(&t, 1.0), mode).unwrap(), 1.0);
            }
        }
    }
}
