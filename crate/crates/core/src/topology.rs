//! Network under study: forwarding nodes, SDN controllers, access terminals and
//! the links between them, plus the reference national backbone and its eight
//! controller-deployment case studies.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Sites of the reference backbone. Each site holds the replica pair `<SITE>_1`, `<SITE>_2`.
pub const REFERENCE_SITES: [&str; 5] = ["BRG", "STV", "TRD", "OSL1", "OSL2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Forwarding,
    Controller,
    AccessTerminal,
}

impl NodeKind {
    /// Short keyword used by the topology file format.
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Forwarding => "fwd",
            NodeKind::Controller => "ctrl",
            NodeKind::AccessTerminal => "acc",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "fwd" => Some(NodeKind::Forwarding),
            "ctrl" => Some(NodeKind::Controller),
            "acc" => Some(NodeKind::AccessTerminal),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub city: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn new(id: impl Into<String>, city: impl Into<String>, kind: NodeKind) -> Self {
        Node { id: id.into(), city: city.into(), kind }
    }

    /// Access terminals never fail; everything else is a failable component.
    pub fn is_failable(&self) -> bool {
        self.kind != NodeKind::AccessTerminal
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub id: String,
    pub a: String,
    pub b: String,
    pub perfect: bool,
}

impl Link {
    pub fn new(id: impl Into<String>, a: impl Into<String>, b: impl Into<String>, perfect: bool) -> Self {
        Link { id: id.into(), a: a.into(), b: b.into(), perfect }
    }

    pub fn touches(&self, node: &str) -> bool {
        self.a == node || self.b == node
    }

    pub fn other(&self, node: &str) -> Option<&str> {
        if self.a == node {
            Some(&self.b)
        } else if self.b == node {
            Some(&self.a)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("invalid case id {0}: valid range is 1..8")]
    InvalidCase(i64),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown site `{0}`")]
    UnknownSite(String),
    #[error("attachment point `{0}` is not a forwarding node")]
    NotForwarding(String),
    #[error("controller `{0}` has no attachment points")]
    NoAttachment(String),
    #[error("controller `{controller}` attaches twice to `{node}`")]
    DuplicateAttachment { controller: String, node: String },
    #[error("node id `{0}` already in use")]
    DuplicateId(String),
}

/// The typed network graph. Immutable once built; derive variants with
/// [`Topology::with_homing`] or [`apply_case`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Topology {
    nodes: Vec<Node>,
    links: Vec<Link>,
}

impl Topology {
    /// Assembles a topology without checking invariants; use [`validate`] for that.
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Self {
        Topology { nodes, links }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn forwarding_count(&self) -> usize {
        self.nodes_of_kind(NodeKind::Forwarding).count()
    }

    pub fn controller_count(&self) -> usize {
        self.nodes_of_kind(NodeKind::Controller).count()
    }

    /// Links incident to `node`, in file order.
    pub fn links_of<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Link> + 'a {
        self.links.iter().filter(move |l| l.touches(node))
    }

    /// Ids of every failable component: failable nodes first, then failable
    /// links, each in declaration order.
    pub fn failable_ids(&self) -> Vec<&str> {
        self.nodes
            .iter()
            .filter(|n| n.is_failable())
            .map(|n| n.id.as_str())
            .chain(self.links.iter().filter(|l| !l.perfect).map(|l| l.id.as_str()))
            .collect()
    }

    /// Controller attachment points as currently wired.
    pub fn homing(&self) -> HomingScheme {
        let mut scheme = HomingScheme::default();
        for ctrl in self.nodes_of_kind(NodeKind::Controller) {
            let points = self
                .links_of(&ctrl.id)
                .filter_map(|l| l.other(&ctrl.id))
                .map(|n| AttachmentPoint::from_node_id(n))
                .collect();
            scheme.controllers.push((ctrl.id.clone(), points));
        }
        scheme
    }

    /// Replaces every controller (and its homing links) with the controllers of
    /// `scheme`. Controllers are appended after the remaining nodes, homing links
    /// after the remaining links, both in scheme order.
    pub fn with_homing(&self, scheme: &HomingScheme) -> Result<Topology, TopologyError> {
        let mut nodes: Vec<Node> = self
            .nodes
            .iter()
            .filter(|n| n.kind != NodeKind::Controller)
            .cloned()
            .collect();
        let controllers: BTreeSet<&str> = self
            .nodes_of_kind(NodeKind::Controller)
            .map(|n| n.id.as_str())
            .collect();
        let mut links: Vec<Link> = self
            .links
            .iter()
            .filter(|l| !controllers.contains(l.a.as_str()) && !controllers.contains(l.b.as_str()))
            .cloned()
            .collect();

        for (ctrl, points) in &scheme.controllers {
            if points.is_empty() {
                return Err(TopologyError::NoAttachment(ctrl.clone()));
            }
            if nodes.iter().any(|n| &n.id == ctrl) {
                return Err(TopologyError::DuplicateId(ctrl.clone()));
            }
            let mut seen = BTreeSet::new();
            let mut city = None;
            let mut homing = Vec::with_capacity(points.len());
            for point in points {
                let target_id = point.node_id();
                let target = nodes
                    .iter()
                    .find(|n| n.id == target_id)
                    .ok_or_else(|| TopologyError::UnknownNode(target_id.clone()))?;
                if target.kind != NodeKind::Forwarding {
                    return Err(TopologyError::NotForwarding(target_id));
                }
                if !seen.insert(target_id.clone()) {
                    return Err(TopologyError::DuplicateAttachment {
                        controller: ctrl.clone(),
                        node: target_id,
                    });
                }
                city.get_or_insert_with(|| target.city.clone());
                homing.push(Link::new(format!("{ctrl}-{target_id}"), ctrl.clone(), target_id, false));
            }
            nodes.push(Node::new(ctrl.clone(), city.unwrap_or_default(), NodeKind::Controller));
            links.extend(homing);
        }
        Ok(Topology { nodes, links })
    }

    /// True when both replicas `<site>_1` and `<site>_2` exist as forwarding nodes.
    pub fn has_site(&self, site: &str) -> bool {
        [1, 2].iter().all(|i| {
            self.node(&format!("{site}_{i}"))
                .is_some_and(|n| n.kind == NodeKind::Forwarding)
        })
    }
}

/// One place a controller attaches: a site and its replica index, resolving to
/// node `<site>_<replica>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AttachmentPoint {
    pub site: String,
    pub replica: u32,
}

impl AttachmentPoint {
    pub fn new(site: impl Into<String>, replica: u32) -> Self {
        AttachmentPoint { site: site.into(), replica }
    }

    pub fn node_id(&self) -> String {
        format!("{}_{}", self.site, self.replica)
    }

    fn from_node_id(id: &str) -> Self {
        match id.rsplit_once('_').and_then(|(s, r)| r.parse().ok().map(|r| (s, r))) {
            Some((site, replica)) => AttachmentPoint::new(site, replica),
            None => AttachmentPoint::new(id, 0),
        }
    }
}

impl fmt::Display for AttachmentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.site, self.replica)
    }
}

/// Per-controller ordered attachment lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomingScheme {
    pub controllers: Vec<(String, Vec<AttachmentPoint>)>,
}

impl HomingScheme {
    pub fn controller(mut self, id: &str, points: &[(&str, u32)]) -> Self {
        self.controllers.push((
            id.to_string(),
            points.iter().map(|&(s, r)| AttachmentPoint::new(s, r)).collect(),
        ));
        self
    }

    /// SC1 and SC2 dual-homed to the given pair of sites, replica 1 for SC1
    /// and replica 2 for SC2.
    pub fn dual_homed_pair(first: &str, second: &str) -> Self {
        HomingScheme::default()
            .controller("SC1", &[(first, 1), (second, 1)])
            .controller("SC2", &[(first, 2), (second, 2)])
    }

    pub fn for_case(case: CaseId) -> Self {
        let reference = HomingScheme::dual_homed_pair("TRD", "OSL1");
        match case.get() {
            1 => HomingScheme::default().controller("SC1", &[("OSL1", 2)]),
            2 => HomingScheme::default()
                .controller("SC1", &[("TRD", 2)])
                .controller("SC2", &[("OSL1", 2)]),
            3 => reference,
            4 => HomingScheme::default()
                .controller("SC1", &[("TRD", 1), ("OSL1", 1), ("BRG", 1)])
                .controller("SC2", &[("TRD", 2), ("OSL1", 2), ("BRG", 2)]),
            5 => HomingScheme::default()
                .controller("SC1", &[("TRD", 1), ("OSL1", 1), ("BRG", 1), ("STV", 1)])
                .controller("SC2", &[("TRD", 2), ("OSL1", 2), ("BRG", 2), ("STV", 2)]),
            6 => reference.controller("SC3", &[("BRG", 1), ("BRG", 2)]),
            7 => reference
                .controller("SC3", &[("BRG", 1), ("BRG", 2)])
                .controller("SC4", &[("STV", 1), ("STV", 2)]),
            8 => HomingScheme::default().controller("SC1", &[("TRD", 1), ("OSL1", 1)]),
            _ => unreachable!("CaseId is range checked"),
        }
    }
}

/// One of the eight controller-deployment case studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CaseId(u8);

impl CaseId {
    pub const ALL: [CaseId; 8] = [
        CaseId(1),
        CaseId(2),
        CaseId(3),
        CaseId(4),
        CaseId(5),
        CaseId(6),
        CaseId(7),
        CaseId(8),
    ];
    pub const REFERENCE: CaseId = CaseId(3);

    pub fn new(value: i64) -> Result<Self, TopologyError> {
        if (1..=8).contains(&value) {
            Ok(CaseId(value as u8))
        } else {
            Err(TopologyError::InvalidCase(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<i64> for CaseId {
    type Error = TopologyError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        CaseId::new(value)
    }
}

/// City code of a reference site; both Oslo sites share `OSL`.
fn city_of_site(site: &str) -> &'static str {
    match site {
        "BRG" => "BRG",
        "STV" => "STV",
        "TRD" => "TRD",
        _ => "OSL",
    }
}

/// The national backbone: duplicated node pairs in Bergen, Stavanger and
/// Trondheim, four nodes in Oslo, one access terminal per city and two
/// dual-homed controllers (SC1 on TRD_1/OSL1_1, SC2 on TRD_2/OSL1_2).
///
/// Inter-node links: each replica pair, OSL1_i-OSL2_i, and a duplicated ring
/// BRG_i-STV_i-OSL2_i, OSL1_i-TRD_i-BRG_i for i in {1, 2}.
pub fn build_reference_backbone() -> Topology {
    let mut nodes = Vec::new();
    for site in REFERENCE_SITES {
        for i in 1..=2 {
            nodes.push(Node::new(format!("{site}_{i}"), city_of_site(site), NodeKind::Forwarding));
        }
    }
    for city in ["BRG", "STV", "TRD", "OSL"] {
        nodes.push(Node::new(format!("ACC_{city}"), city, NodeKind::AccessTerminal));
    }

    let mut links = Vec::new();
    let mut backbone = |a: String, b: String| {
        links.push(Link::new(format!("{a}-{b}"), a, b, false));
    };
    for site in REFERENCE_SITES {
        backbone(format!("{site}_1"), format!("{site}_2"));
    }
    for i in 1..=2 {
        backbone(format!("OSL1_{i}"), format!("OSL2_{i}"));
    }
    for i in 1..=2 {
        for (a, b) in [("BRG", "STV"), ("STV", "OSL2"), ("OSL1", "TRD"), ("TRD", "BRG")] {
            backbone(format!("{a}_{i}"), format!("{b}_{i}"));
        }
    }
    for city in ["BRG", "STV", "TRD", "OSL"] {
        let acc = format!("ACC_{city}");
        let members: Vec<String> = nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Forwarding && n.city == city)
            .map(|n| n.id.clone())
            .collect();
        for m in members {
            links.push(Link::new(format!("{acc}-{m}"), acc.clone(), m, true));
        }
    }

    Topology::new(nodes, links)
        .with_homing(&HomingScheme::for_case(CaseId::REFERENCE))
        .expect("reference homing resolves")
}

/// Derives the topology of case study `case` from the reference backbone.
pub fn apply_case(base: &Topology, case: CaseId) -> Result<Topology, TopologyError> {
    if case == CaseId::REFERENCE {
        return Ok(base.clone());
    }
    base.with_homing(&HomingScheme::for_case(case))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    NoNodes,
    DuplicateNodeId,
    DuplicateLinkId,
    DanglingEndpoint,
    SelfLoop,
    ControllerAttachment,
    AccessAttachment,
    PerfectFlag,
    Disconnected,
}

/// A broken topology invariant and the component that breaks it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.detail)
    }
}

fn violation(kind: ViolationKind, subject: &str, detail: impl Into<String>) -> Violation {
    Violation { kind, subject: subject.to_string(), detail: detail.into() }
}

/// Checks every topology invariant; an empty result means the topology is valid.
pub fn validate(t: &Topology) -> Vec<Violation> {
    let mut out = Vec::new();
    if t.nodes.is_empty() {
        out.push(violation(ViolationKind::NoNodes, "topology", "no nodes"));
        return out;
    }

    let mut by_id: BTreeMap<&str, &Node> = BTreeMap::new();
    for n in &t.nodes {
        if by_id.insert(&n.id, n).is_some() {
            out.push(violation(ViolationKind::DuplicateNodeId, &n.id, "duplicate node id"));
        }
    }
    let mut link_ids = BTreeSet::new();
    let mut sound_links = Vec::new();
    for l in &t.links {
        if !link_ids.insert(l.id.as_str()) {
            out.push(violation(ViolationKind::DuplicateLinkId, &l.id, "duplicate link id"));
        }
        let missing: Vec<&str> = [l.a.as_str(), l.b.as_str()]
            .into_iter()
            .filter(|e| !by_id.contains_key(e))
            .collect();
        if !missing.is_empty() {
            out.push(violation(
                ViolationKind::DanglingEndpoint,
                &l.id,
                format!("endpoint {} does not exist", missing.join(", ")),
            ));
            continue;
        }
        if l.a == l.b {
            out.push(violation(ViolationKind::SelfLoop, &l.id, "link connects a node to itself"));
            continue;
        }
        sound_links.push(l);
    }

    for l in &sound_links {
        let (ka, kb) = (by_id[l.a.as_str()].kind, by_id[l.b.as_str()].kind);
        let has = |k| ka == k || kb == k;
        if has(NodeKind::Controller) && !(ka == NodeKind::Forwarding || kb == NodeKind::Forwarding) {
            out.push(violation(
                ViolationKind::ControllerAttachment,
                &l.id,
                "controllers attach only to forwarding nodes",
            ));
        }
        let touches_access = has(NodeKind::AccessTerminal);
        if touches_access != l.perfect {
            let detail = if touches_access {
                "access attachment links must be perfect"
            } else {
                "only access attachment links may be perfect"
            };
            out.push(violation(ViolationKind::PerfectFlag, &l.id, detail));
        }
    }

    for acc in t.nodes_of_kind(NodeKind::AccessTerminal) {
        let expected: BTreeSet<&str> = t
            .nodes_of_kind(NodeKind::Forwarding)
            .filter(|n| n.city == acc.city)
            .map(|n| n.id.as_str())
            .collect();
        let actual: BTreeSet<&str> = sound_links
            .iter()
            .filter_map(|l| l.other(&acc.id))
            .collect();
        if expected.is_empty() || expected != actual {
            let missing: Vec<&str> = expected.difference(&actual).copied().collect();
            let extra: Vec<&str> = actual.difference(&expected).copied().collect();
            out.push(violation(
                ViolationKind::AccessAttachment,
                &acc.id,
                format!(
                    "must attach to every forwarding node of city {} and nothing else (missing [{}], extra [{}])",
                    acc.city,
                    missing.join(", "),
                    extra.join(", ")
                ),
            ));
        }
    }

    // Connectivity of the all-up graph.
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for l in &sound_links {
        adjacency.entry(&l.a).or_default().push(&l.b);
        adjacency.entry(&l.b).or_default().push(&l.a);
    }
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![t.nodes[0].id.as_str()];
    seen.insert(t.nodes[0].id.as_str());
    while let Some(v) = stack.pop() {
        for &w in adjacency.get(v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    for n in &t.nodes {
        if !seen.contains(n.id.as_str()) {
            out.push(violation(
                ViolationKind::Disconnected,
                &n.id,
                format!("not connected to {}", t.nodes[0].id),
            ));
        }
    }
    out
}
