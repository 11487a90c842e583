//! Structural level: system availability from independent component
//! availabilities through the operational predicate.
//!
//! Four evaluators share one compiled [`SystemGraph`]: exhaustive enumeration
//! (the oracle), Shannon factoring with memoization (the production path),
//! Monte Carlo sampling, and minimal cut set enumeration.

mod bruteforce;
mod cutsets;
mod exact;
mod graph;
mod monte_carlo;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

pub use bruteforce::{evaluate_bruteforce, BRUTE_FORCE_LIMIT};
pub use cutsets::minimal_cut_sets;
pub use exact::{evaluate_exact, FactoringDiagram};
pub use graph::{Scratch, SystemGraph};
pub use monte_carlo::{evaluate_monte_carlo, EstimateWithCI, MonteCarloPlan, MC_CHUNK, Z_95, Z_99};

use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("no entry for failable component `{0}`")]
    MissingComponent(String),
    #[error("`{0}` is not a failable component of this topology")]
    UnknownComponent(String),
    #[error("availability of `{id}` is {value}, outside [0, 1]")]
    OutOfRange { id: String, value: f64 },
    #[error("{free} free components exceed the brute-force limit of {limit}")]
    TooLarge { free: usize, limit: usize },
    #[error("sample count must be positive")]
    NoSamples,
}

/// Which operational criterion to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EvalMode {
    /// Inter-city connectivity through controlled forwarding nodes.
    #[default]
    Sdn,
    /// Inter-city connectivity only; controllers are ignored.
    Traditional,
}

impl EvalMode {
    pub fn name(self) -> &'static str {
        match self {
            EvalMode::Sdn => "sdn",
            EvalMode::Traditional => "traditional",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sdn" => Ok(EvalMode::Sdn),
            "traditional" => Ok(EvalMode::Traditional),
            other => Err(alloc::format!("unknown mode `{other}` (expected sdn or traditional)")),
        }
    }
}

/// Up/down state of every failable component.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StatusAssignment(BTreeMap<String, bool>);

impl StatusAssignment {
    pub fn all_up(t: &Topology) -> Self {
        StatusAssignment(t.failable_ids().into_iter().map(|id| (id.to_string(), true)).collect())
    }

    /// Everything up except `down`.
    pub fn with_down(t: &Topology, down: &[&str]) -> Self {
        let mut s = Self::all_up(t);
        for id in down {
            s.set(id, false);
        }
        s
    }

    pub fn set(&mut self, id: &str, up: bool) {
        self.0.insert(id.to_string(), up);
    }

    pub fn get(&self, id: &str) -> Option<bool> {
        self.0.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn to_vector(&self, g: &SystemGraph) -> Result<Vec<bool>, StructureError> {
        if let Some(extra) = self.0.keys().find(|k| g.component_index(k).is_none()) {
            return Err(StructureError::UnknownComponent(extra.clone()));
        }
        g.component_ids()
            .iter()
            .map(|id| self.get(id).ok_or_else(|| StructureError::MissingComponent(id.clone())))
            .collect()
    }
}

/// Steady-state availability per component id. Entries for ids absent from a
/// topology are ignored, so one map can be shared by several case topologies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AvailabilityMap(BTreeMap<String, f64>);

impl AvailabilityMap {
    pub fn new() -> Self {
        AvailabilityMap::default()
    }

    /// Every failable component of `t` at availability `a`.
    pub fn uniform(t: &Topology, a: f64) -> Self {
        Self::from_fn(t, |_| a)
    }

    pub fn from_fn(t: &Topology, mut f: impl FnMut(&str) -> f64) -> Self {
        AvailabilityMap(t.failable_ids().into_iter().map(|id| (id.to_string(), f(id))).collect())
    }

    pub fn insert(&mut self, id: impl Into<String>, a: f64) {
        self.0.insert(id.into(), a);
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.0.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Availabilities in component order of `g`.
    pub fn to_vector(&self, g: &SystemGraph) -> Result<Vec<f64>, StructureError> {
        g.component_ids()
            .iter()
            .map(|id| {
                let a = self.get(id).ok_or_else(|| StructureError::MissingComponent(id.clone()))?;
                if (0.0..=1.0).contains(&a) {
                    Ok(a)
                } else {
                    Err(StructureError::OutOfRange { id: id.clone(), value: a })
                }
            })
            .collect()
    }
}

impl FromIterator<(String, f64)> for AvailabilityMap {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        AvailabilityMap(iter.into_iter().collect())
    }
}

/// Whether the system is up under status assignment `s`.
pub fn is_operational(t: &Topology, s: &StatusAssignment, mode: EvalMode) -> Result<bool, StructureError> {
    let g = SystemGraph::new(t, mode)?;
    let up = s.to_vector(&g)?;
    Ok(g.is_up(&up, &mut g.scratch()))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{apply_case, build_reference_backbone, CaseId, Link, Node, NodeKind};

    fn case(c: i64) -> Topology {
        apply_case(&build_reference_backbone(), CaseId::new(c).unwrap()).unwrap()
    }

    #[test]
    fn fully_up_reference_is_operational() {
        let t = case(3);
        for mode in [EvalMode::Sdn, EvalMode::Traditional] {
            assert!(is_operational(&t, &StatusAssignment::all_up(&t), mode).unwrap());
        }
    }

    #[test]
    fn losing_both_controllers() {
        let t = case(3);
        let s = StatusAssignment::with_down(&t, &["SC1", "SC2"]);
        assert!(!is_operational(&t, &s, EvalMode::Sdn).unwrap());
        assert!(is_operational(&t, &s, EvalMode::Traditional).unwrap());
    }

    #[test]
    fn losing_one_controller_is_survivable() {
        let t = case(3);
        assert!(is_operational(&t, &StatusAssignment::with_down(&t, &["SC1"]), EvalMode::Sdn).unwrap());
    }

    #[test]
    fn homing_links_sever_control() {
        let t = case(8);
        let s = StatusAssignment::with_down(&t, &["SC1-TRD_1", "SC1-OSL1_1"]);
        assert!(!is_operational(&t, &s, EvalMode::Sdn).unwrap());
        assert!(is_operational(&t, &s, EvalMode::Traditional).unwrap());
    }

    #[test]
    fn single_homed_controller_behind_failed_node() {
        let t = case(1);
        let s = StatusAssignment::with_down(&t, &["OSL1_2"]);
        assert!(!is_operational(&t, &s, EvalMode::Sdn).unwrap());
        assert!(is_operational(&t, &s, EvalMode::Traditional).unwrap());
    }

    #[test]
    fn isolated_city_fails_both_modes() {
        let t = case(3);
        let s = StatusAssignment::with_down(&t, &["BRG_1-STV_1", "BRG_2-STV_2", "TRD_2-BRG_2", "TRD_1-BRG_1"]);
        assert!(!is_operational(&t, &s, EvalMode::Traditional).unwrap());
        assert!(!is_operational(&t, &s, EvalMode::Sdn).unwrap());
        let s = StatusAssignment::with_down(&t, &["BRG_1-STV_1", "BRG_2-STV_2", "TRD_2-BRG_2"]);
        assert!(is_operational(&t, &s, EvalMode::Sdn).unwrap());
    }

    #[test]
    fn status_must_match_topology() {
        let t = case(3);
        let mut s = StatusAssignment::all_up(&t);
        s.set("NOPE", true);
        assert_eq!(is_operational(&t, &s, EvalMode::Sdn), Err(StructureError::UnknownComponent("NOPE".into())));
        let s = StatusAssignment::all_up(&case(8));
        assert!(matches!(is_operational(&t, &s, EvalMode::Sdn), Err(StructureError::MissingComponent(_))));
    }

    #[test]
    fn single_terminal_is_trivially_up() {
        let t = Topology::new(
            alloc::vec![Node::new("T", "X", NodeKind::AccessTerminal), Node::new("F", "X", NodeKind::Forwarding)],
            alloc::vec![Link::new("T-F", "T", "F", true)],
        );
        let s = StatusAssignment::with_down(&t, &["F"]);
        assert!(is_operational(&t, &s, EvalMode::Sdn).unwrap());
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [EvalMode::Sdn, EvalMode::Traditional] {
            assert_eq!(m.name().parse::<EvalMode>().unwrap(), m);
        }
        assert!("ip".parse::<EvalMode>().is_err());
    }

    #[test]
    fn compensated_sum() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }
}
