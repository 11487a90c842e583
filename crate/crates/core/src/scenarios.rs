//! Experiment drivers: single case evaluations, alpha sweeps, the controller
//! location study and the traditional IP baseline.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::dynamics::{
    apply_alpha, build_element_model, unavailability_of, AlphaAxis, AlphaFactors, DefaultIntensities,
    ElementClass, ElementParams, ModelError,
};
use crate::structure::{
    AvailabilityMap, EvalMode, FactoringDiagram, MonteCarloPlan, StructureError,
};
use crate::topology::{apply_case, CaseId, HomingScheme, NodeKind, Topology, TopologyError};

/// Controller count of the reference deployment; the per-node default
/// intensities are derived so that alpha = 1 reproduces the controller
/// parameters at this count.
pub const REFERENCE_CONTROLLERS: usize = 2;

/// Log-spaced grid used for swept axes when none is given.
pub const DEFAULT_GRID: [f64; 7] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];

/// Placements of the location study (SC1/SC2 dual-homed to a pair of sites).
pub const DEFAULT_PLACEMENTS: [(&str, &str); 4] = [("TRD", "OSL1"), ("BRG", "STV"), ("BRG", "TRD"), ("STV", "OSL1")];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl ScenarioError {
    /// True for failures of the numeric machinery rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, ScenarioError::Model(ModelError::Numeric(_)))
    }
}

/// Element parameters for every class plus optional explicit defaults for the
/// alpha reference intensities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub link: ElementParams,
    pub forwarding_node: ElementParams,
    pub controller: ElementParams,
    pub router: ElementParams,
    pub lambda_ds: Option<f64>,
    pub lambda_do: Option<f64>,
    pub lambda_dc: Option<f64>,
}

const HOUR_RATES: ElementParams = ElementParams {
    lambda_h: 1.0 / 4380.0,
    mu_h: 1.0 / 12.0,
    lambda_s: 1.0 / 1460.0,
    mu_s: 2.0,
    lambda_o: 1.0 / 2920.0,
    mu_o: 0.25,
    mu_m: 1.0 / 12.0,
    coverage: 0.97,
};

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet::shipped()
    }
}

impl ParamSet {
    /// Built-in defaults; identical to the shipped parameter file.
    pub const fn shipped() -> Self {
        ParamSet {
            link: ElementParams { lambda_h: 1.0 / 17520.0, mu_h: 0.5, ..HOUR_RATES },
            forwarding_node: HOUR_RATES,
            controller: HOUR_RATES,
            router: ElementParams { lambda_s: 1.0 / 730.0, lambda_o: 1.0 / 1460.0, ..HOUR_RATES },
            lambda_ds: None,
            lambda_do: None,
            lambda_dc: None,
        }
    }

    pub fn class(&self, class: ElementClass) -> &ElementParams {
        match class {
            ElementClass::Link => &self.link,
            ElementClass::ForwardingNode => &self.forwarding_node,
            ElementClass::Controller => &self.controller,
            ElementClass::Router => &self.router,
        }
    }

    pub fn class_mut(&mut self, class: ElementClass) -> &mut ElementParams {
        match class {
            ElementClass::Link => &mut self.link,
            ElementClass::ForwardingNode => &mut self.forwarding_node,
            ElementClass::Controller => &mut self.controller,
            ElementClass::Router => &mut self.router,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for class in ElementClass::ALL {
            self.class(class).validate()?;
        }
        Ok(())
    }

    /// Alpha reference intensities for a network with `nodes` forwarding nodes
    /// and `controllers` controllers.
    pub fn default_intensities(&self, nodes: usize, controllers: usize) -> DefaultIntensities {
        let derived = DefaultIntensities::consistent_with(&self.controller, nodes.max(1), REFERENCE_CONTROLLERS);
        DefaultIntensities {
            lambda_ds: self.lambda_ds.unwrap_or(derived.lambda_ds),
            lambda_do: self.lambda_do.unwrap_or(derived.lambda_do),
            lambda_dc: self.lambda_dc.unwrap_or(derived.lambda_dc),
            ..derived
        }
        .for_network(nodes, controllers)
    }

    /// Steady-state unavailability of every element class as deployed in `t`,
    /// with the alphas applied to the controllers.
    pub fn class_unavailabilities(&self, t: &Topology, alphas: &AlphaFactors) -> Result<ClassUnavailability, ModelError> {
        let solve = |class, p: &ElementParams| build_element_model(class, p).and_then(|m| unavailability_of(&m));
        let controllers = t.controller_count();
        let controller = if controllers == 0 {
            None
        } else {
            let defaults = self.default_intensities(t.forwarding_count(), controllers);
            let scaled = apply_alpha(&defaults, &self.controller, alphas)?;
            Some(solve(ElementClass::Controller, &scaled)?)
        };
        Ok(ClassUnavailability {
            link: solve(ElementClass::Link, &self.link)?,
            forwarding_node: solve(ElementClass::ForwardingNode, &self.forwarding_node)?,
            router: solve(ElementClass::Router, &self.router)?,
            controller,
        })
    }
}

/// Unavailability per element class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassUnavailability {
    pub link: f64,
    pub forwarding_node: f64,
    pub router: f64,
    pub controller: Option<f64>,
}

impl ClassUnavailability {
    /// Availability map of `t`; forwarding nodes take the router figure when
    /// the network is evaluated as a traditional IP network.
    pub fn availability_map(&self, t: &Topology, mode: EvalMode) -> AvailabilityMap {
        let node = match mode {
            EvalMode::Sdn => self.forwarding_node,
            EvalMode::Traditional => self.router,
        };
        let mut map = AvailabilityMap::new();
        for n in t.nodes().iter().filter(|n| n.is_failable()) {
            let u = match n.kind {
                NodeKind::Controller => self.controller.unwrap_or(1.0),
                _ => node,
            };
            map.insert(n.id.clone(), 1.0 - u);
        }
        for l in t.links().iter().filter(|l| !l.perfect) {
            map.insert(l.id.clone(), 1.0 - self.link);
        }
        map
    }
}

/// What a table row describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scenario {
    Case(CaseId),
    Traditional,
    Placement(String, String),
    /// A user-supplied topology evaluated as given.
    Custom,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Case(c) => write!(f, "{c}"),
            Scenario::Traditional => f.write_str("traditional"),
            Scenario::Placement(a, b) => write!(f, "{a}+{b}"),
            Scenario::Custom => f.write_str("custom"),
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "traditional" => return Ok(Scenario::Traditional),
            "custom" => return Ok(Scenario::Custom),
            _ => {}
        }
        if let Some((a, b)) = s.split_once('+') {
            return Ok(Scenario::Placement(a.to_string(), b.to_string()));
        }
        let n: i64 = s.parse().map_err(|_| alloc::format!("unrecognised scenario `{s}`"))?;
        CaseId::new(n).map(Scenario::Case).map_err(|e| e.to_string())
    }
}

/// How system availability is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

impl Method {
    pub fn kind(self) -> MethodKind {
        match self {
            Method::Exact => MethodKind::Exact,
            Method::MonteCarlo { .. } => MethodKind::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Exact,
    MonteCarlo,
}

impl MethodKind {
    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Exact => "exact",
            MethodKind::MonteCarlo => "monte-carlo",
        }
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(MethodKind::Exact),
            "monte-carlo" => Ok(MethodKind::MonteCarlo),
            other => Err(alloc::format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: Scenario,
    pub alphas: AlphaFactors,
    pub unavailability: f64,
    pub method: MethodKind,
    /// 95% interval on the unavailability; `None` for exact rows.
    pub ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn find(&self, scenario: &Scenario) -> Option<&SweepRow> {
        self.rows.iter().find(|r| &r.scenario == scenario)
    }
}

/// One topology in one mode, compiled once and evaluated for many parameter
/// points.
#[derive(Debug, Clone)]
pub struct Evaluator {
    topology: Topology,
    mode: EvalMode,
    diagram: Option<FactoringDiagram>,
}

impl Evaluator {
    pub fn new(topology: Topology, mode: EvalMode) -> Self {
        Evaluator { topology, mode, diagram: None }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Unavailability and, for Monte Carlo, its 95% interval.
    pub fn unavailability(
        &mut self,
        params: &ParamSet,
        alphas: &AlphaFactors,
        method: Method,
    ) -> Result<(f64, Option<(f64, f64)>), ScenarioError> {
        let map = params.class_unavailabilities(&self.topology, alphas)?.availability_map(&self.topology, self.mode);
        self.unavailability_for(&map, method)
    }

    pub fn unavailability_for(
        &mut self,
        map: &AvailabilityMap,
        method: Method,
    ) -> Result<(f64, Option<(f64, f64)>), ScenarioError> {
        match method {
            Method::Exact => {
                if self.diagram.is_none() {
                    self.diagram = Some(FactoringDiagram::compile(&self.topology, self.mode)?);
                }
                let (_, u) = self.diagram.as_ref().expect("compiled above").evaluate(map)?;
                Ok((u, None))
            }
            Method::MonteCarlo { samples, seed } => {
                let est = MonteCarloPlan::new(&self.topology, map, self.mode)?.run(samples, seed)?.complement();
                Ok((est.estimate, Some((est.ci_low, est.ci_high))))
            }
        }
    }
}

fn row(
    scenario: Scenario,
    evaluator: &mut Evaluator,
    params: &ParamSet,
    alphas: AlphaFactors,
    method: Method,
) -> Result<SweepRow, ScenarioError> {
    alphas.validate()?;
    let (unavailability, ci) = evaluator.unavailability(params, &alphas, method)?;
    Ok(SweepRow { scenario, alphas, unavailability, method: method.kind(), ci })
}

/// Unavailability of `t` as given, labelled `scenario`.
pub fn run_topology(
    t: &Topology,
    scenario: Scenario,
    mode: EvalMode,
    params: &ParamSet,
    alphas: AlphaFactors,
    method: Method,
) -> Result<SweepRow, ScenarioError> {
    let mut ev = Evaluator::new(t.clone(), mode);
    row(scenario, &mut ev, params, alphas, method)
}

/// Unavailability of case study `case` as an SDN.
pub fn run_case(
    base: &Topology,
    case: CaseId,
    params: &ParamSet,
    alphas: AlphaFactors,
    method: Method,
) -> Result<SweepRow, ScenarioError> {
    run_topology(&apply_case(base, case)?, Scenario::Case(case), EvalMode::Sdn, params, alphas, method)
}

/// The same backbone operated as a traditional IP network: controllers are
/// ignored and forwarding nodes are routers.
pub fn traditional_baseline(
    base: &Topology,
    params: &ParamSet,
    alphas: AlphaFactors,
    method: Method,
) -> Result<SweepRow, ScenarioError> {
    run_topology(base, Scenario::Traditional, EvalMode::Traditional, params, alphas, method)
}

/// All eight cases at fixed alphas followed by the traditional baseline.
pub fn case_suite(
    base: &Topology,
    params: &ParamSet,
    alphas: AlphaFactors,
    method: Method,
) -> Result<SweepTable, ScenarioError> {
    let mut rows = CaseId::ALL
        .into_iter()
        .map(|c| run_case(base, c, params, alphas, method))
        .collect::<Result<Vec<_>, _>>()?;
    rows.push(traditional_baseline(base, params, alphas, method)?);
    Ok(SweepTable { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Case applied to the base topology; `None` sweeps the base as given.
    pub case: Option<CaseId>,
    /// Swept axes, outermost first.
    pub axes: Vec<(AlphaAxis, Vec<f64>)>,
    /// Values of the axes that are not swept.
    pub fixed: AlphaFactors,
    pub method: Method,
}

impl SweepSpec {
    pub fn new(case: CaseId) -> Self {
        SweepSpec { case: Some(case), axes: Vec::new(), fixed: AlphaFactors::default(), method: Method::Exact }
    }

    pub fn axis(mut self, axis: AlphaAxis, grid: &[f64]) -> Self {
        self.axes.push((axis, grid.to_vec()));
        self
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |msg: String| Err(ScenarioError::InvalidSpec(msg));
        for (i, (axis, grid)) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|(a, _)| a == axis) {
                return bad(alloc::format!("axis {} listed twice", axis.name()));
            }
            if grid.is_empty() {
                return bad(alloc::format!("grid of {} is empty", axis.name()));
            }
            if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return bad(alloc::format!("grid of {} has non-positive values", axis.name()));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return bad(alloc::format!("grid of {} is not strictly increasing", axis.name()));
            }
        }
        self.fixed.validate()?;
        Ok(())
    }

    /// Alpha vectors of the Cartesian product, last axis varying fastest.
    pub fn points(&self) -> Vec<AlphaFactors> {
        let mut points = vec![self.fixed];
        for (axis, grid) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| grid.iter().map(move |&v| p.with(*axis, v)))
                .collect();
        }
        points
    }
}

/// Evaluates every grid point of `spec`, rows in grid order.
pub fn alpha_sweep(base: &Topology, spec: &SweepSpec, params: &ParamSet) -> Result<SweepTable, ScenarioError> {
    spec.validate()?;
    let (t, scenario) = match spec.case {
        Some(c) => (apply_case(base, c)?, Scenario::Case(c)),
        None => (base.clone(), Scenario::Custom),
    };
    let mut ev = Evaluator::new(t, EvalMode::Sdn);
    let rows = spec
        .points()
        .into_iter()
        .map(|alphas| row(scenario.clone(), &mut ev, params, alphas, spec.method))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationSpec {
    pub placements: Vec<(String, String)>,
    pub alphas: AlphaFactors,
    pub method: Method,
}

impl Default for LocationSpec {
    /// The default placement set at alpha = (1, 1, 0.2, 1).
    fn default() -> Self {
        LocationSpec {
            placements: DEFAULT_PLACEMENTS.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect(),
            alphas: AlphaFactors::new(1.0, 1.0, 0.2, 1.0),
            method: Method::Exact,
        }
    }
}

/// Re-homes SC1/SC2 onto each placement of `spec` and evaluates it.
pub fn location_study(base: &Topology, spec: &LocationSpec, params: &ParamSet) -> Result<SweepTable, ScenarioError> {
    let mut rows = Vec::with_capacity(spec.placements.len());
    for (a, b) in &spec.placements {
        for site in [a, b] {
            if !base.has_site(site) {
                return Err(TopologyError::UnknownSite(site.clone()).into());
            }
        }
        let t = base.with_homing(&HomingScheme::dual_homed_pair(a, b))?;
        let mut ev = Evaluator::new(t, EvalMode::Sdn);
        rows.push(row(Scenario::Placement(a.clone(), b.clone()), &mut ev, params, spec.alphas, spec.method)?);
    }
    Ok(SweepTable { rows })
}
