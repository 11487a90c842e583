//! Element-level continuous-time Markov models and their steady-state solution.
//!
//! Links are two-state (up/down). Forwarding nodes, routers and controllers
//! share a five-state model with hardware, software and O&M failure modes; a
//! software failure is recovered automatically with probability `coverage` and
//! otherwise needs a manual repair.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown element class `{0}`")]
    UnknownClass(String),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParam { name: &'static str, value: f64, reason: &'static str },
    #[error("alpha_C * (1 - c) = {0} exceeds 1; coverage would be negative")]
    NegativeCoverage(f64),
    #[error("malformed generator: {0}")]
    Malformed(String),
    #[error("chain is reducible; states outside the first recurrent class: {}", .0.join(", "))]
    Reducible(Vec<String>),
    #[error("steady-state solve failed: {0}")]
    Numeric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementClass {
    Link,
    ForwardingNode,
    Controller,
    /// A traditional IP router (forwarding plus its own control plane).
    Router,
}

impl ElementClass {
    pub const ALL: [ElementClass; 4] = [
        ElementClass::Link,
        ElementClass::ForwardingNode,
        ElementClass::Controller,
        ElementClass::Router,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementClass::Link => "link",
            ElementClass::ForwardingNode => "forwarding-node",
            ElementClass::Controller => "controller",
            ElementClass::Router => "router",
        }
    }
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementClass {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ElementClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ModelError::UnknownClass(s.to_string()))
    }
}

/// Failure and repair intensities (per hour) of one element class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementParams {
    pub lambda_h: f64,
    pub mu_h: f64,
    pub lambda_s: f64,
    pub mu_s: f64,
    pub lambda_o: f64,
    pub mu_o: f64,
    /// Manual repair rate after an uncovered software recovery.
    pub mu_m: f64,
    /// Probability that automatic software recovery succeeds.
    pub coverage: f64,
}

impl ElementParams {
    pub const NAMES: [&'static str; 8] =
        ["lambda_H", "mu_H", "lambda_S", "mu_S", "lambda_O", "mu_O", "mu_M", "c"];

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "lambda_H" => self.lambda_h,
            "mu_H" => self.mu_h,
            "lambda_S" => self.lambda_s,
            "mu_S" => self.mu_s,
            "lambda_O" => self.lambda_o,
            "mu_O" => self.mu_o,
            "mu_M" => self.mu_m,
            "c" => self.coverage,
            _ => return None,
        })
    }

    /// Sets a parameter by its file name; returns false for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "lambda_H" => &mut self.lambda_h,
            "mu_H" => &mut self.mu_h,
            "lambda_S" => &mut self.lambda_s,
            "mu_S" => &mut self.mu_s,
            "lambda_O" => &mut self.lambda_o,
            "mu_O" => &mut self.mu_o,
            "mu_M" => &mut self.mu_m,
            "c" => &mut self.coverage,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for name in Self::NAMES {
            let value = self.get(name).unwrap_or(f64::NAN);
            let ok = if name == "c" {
                (0.0..=1.0).contains(&value)
            } else {
                value.is_finite() && value > 0.0
            };
            if !ok {
                let reason = if name == "c" { "coverage must lie in [0, 1]" } else { "rates must be positive and finite" };
                return Err(ModelError::InvalidParam { name, value, reason });
            }
        }
        Ok(())
    }
}

/// Multipliers on the controller failure sources; all 1.0 reproduces the defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaFactors {
    pub software: f64,
    pub hardware: f64,
    pub om: f64,
    pub coverage: f64,
}

impl Default for AlphaFactors {
    fn default() -> Self {
        AlphaFactors { software: 1.0, hardware: 1.0, om: 1.0, coverage: 1.0 }
    }
}

/// The four alpha knobs, named as in the CLI and CSV (`alpha_S` etc).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlphaAxis {
    Software,
    Hardware,
    Om,
    Coverage,
}

impl AlphaAxis {
    pub const ALL: [AlphaAxis; 4] = [AlphaAxis::Software, AlphaAxis::Hardware, AlphaAxis::Om, AlphaAxis::Coverage];

    pub fn name(self) -> &'static str {
        match self {
            AlphaAxis::Software => "alpha_S",
            AlphaAxis::Hardware => "alpha_H",
            AlphaAxis::Om => "alpha_O",
            AlphaAxis::Coverage => "alpha_C",
        }
    }
}

impl FromStr for AlphaAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlphaAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| alloc::format!("unknown alpha axis `{s}` (expected alpha_S, alpha_H, alpha_O or alpha_C)"))
    }
}

impl AlphaFactors {
    pub fn new(software: f64, hardware: f64, om: f64, coverage: f64) -> Self {
        AlphaFactors { software, hardware, om, coverage }
    }

    pub fn get(&self, axis: AlphaAxis) -> f64 {
        match axis {
            AlphaAxis::Software => self.software,
            AlphaAxis::Hardware => self.hardware,
            AlphaAxis::Om => self.om,
            AlphaAxis::Coverage => self.coverage,
        }
    }

    pub fn with(mut self, axis: AlphaAxis, value: f64) -> Self {
        match axis {
            AlphaAxis::Software => self.software = value,
            AlphaAxis::Hardware => self.hardware = value,
            AlphaAxis::Om => self.om = value,
            AlphaAxis::Coverage => self.coverage = value,
        }
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for axis in AlphaAxis::ALL {
            let v = self.get(axis);
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidParam { name: axis.name(), value: v, reason: "alpha factors must be positive" });
            }
        }
        Ok(())
    }
}

/// Per-node default intensities against which the controller alphas are defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefaultIntensities {
    pub lambda_ds: f64,
    pub lambda_do: f64,
    pub lambda_dc: f64,
    /// Number of forwarding nodes.
    pub nodes: usize,
    /// Number of controllers.
    pub controllers: usize,
}

impl DefaultIntensities {
    /// Defaults under which alpha = 1 reproduces `controller` for a network of
    /// `nodes` forwarding nodes and `controllers` controllers.
    pub fn consistent_with(controller: &ElementParams, nodes: usize, controllers: usize) -> Self {
        let n = nodes as f64;
        DefaultIntensities {
            lambda_ds: controller.lambda_s / n,
            lambda_do: controller.lambda_o / n,
            lambda_dc: controllers as f64 * controller.lambda_h / n,
            nodes,
            controllers,
        }
    }

    /// Same intensities, evaluated for a different node/controller count.
    pub fn for_network(self, nodes: usize, controllers: usize) -> Self {
        DefaultIntensities { nodes, controllers, ..self }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.nodes == 0 {
            return Err(ModelError::InvalidParam { name: "N", value: 0.0, reason: "at least one forwarding node" });
        }
        if self.controllers == 0 {
            return Err(ModelError::InvalidParam { name: "K", value: 0.0, reason: "at least one controller" });
        }
        for (name, v) in [("lambda_dS", self.lambda_ds), ("lambda_dO", self.lambda_do), ("lambda_dC", self.lambda_dc)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidParam { name, value: v, reason: "rates must be positive and finite" });
            }
        }
        Ok(())
    }

    pub fn hardware_rate(&self) -> f64 {
        (self.nodes as f64 / self.controllers as f64) * self.lambda_dc
    }

    pub fn software_rate(&self) -> f64 {
        self.nodes as f64 * self.lambda_ds
    }

    pub fn om_rate(&self) -> f64 {
        self.nodes as f64 * self.lambda_do
    }
}

/// Scales the controller failure sources:
/// `lambda_H = alpha_H (N/K) lambda_dC`, `lambda_S = alpha_S N lambda_dS`,
/// `lambda_O = alpha_O N lambda_dO`, and the uncoverage `1 - c` by `alpha_C`.
pub fn apply_alpha(
    defaults: &DefaultIntensities,
    base: &ElementParams,
    alphas: &AlphaFactors,
) -> Result<ElementParams, ModelError> {
    defaults.validate()?;
    base.validate()?;
    alphas.validate()?;
    let uncovered = 1.0 - base.coverage;
    let scaled = alphas.coverage * uncovered;
    if scaled > 1.0 {
        return Err(ModelError::NegativeCoverage(scaled));
    }
    Ok(ElementParams {
        lambda_h: alphas.hardware * defaults.hardware_rate(),
        lambda_s: alphas.software * defaults.software_rate(),
        lambda_o: alphas.om * defaults.om_rate(),
        // 1 - alpha_C (1 - c), arranged to be exact at alpha_C = 1.
        coverage: (base.coverage - (alphas.coverage - 1.0) * uncovered).clamp(0.0, 1.0),
        ..*base
    })
}

/// A finite CTMC with a designated set of up states.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentModel {
    labels: Vec<String>,
    generator: Vec<f64>,
    up: Vec<usize>,
}

impl ComponentModel {
    /// `generator` is row-major `n x n`; rows must sum to zero.
    pub fn new(labels: Vec<String>, generator: Vec<f64>, up: Vec<usize>) -> Result<Self, ModelError> {
        let n = labels.len();
        if n < 2 {
            return Err(ModelError::Malformed("at least two states required".into()));
        }
        if generator.len() != n * n {
            return Err(ModelError::Malformed(alloc::format!("generator has {} entries, expected {}", generator.len(), n * n)));
        }
        for i in 0..n {
            let row = &generator[i * n..(i + 1) * n];
            let scale = row.iter().fold(0.0f64, |m, q| m.max(libm::fabs(*q)));
            for (j, q) in row.iter().enumerate() {
                if !q.is_finite() || (i != j && *q < 0.0) {
                    return Err(ModelError::Malformed(alloc::format!("invalid rate {q} at ({i}, {j})")));
                }
            }
            let sum: f64 = row.iter().sum();
            if libm::fabs(sum) > 1e-12 * scale.max(1.0) {
                return Err(ModelError::Malformed(alloc::format!("row {i} sums to {sum}")));
            }
        }
        let mut up = up;
        up.sort_unstable();
        up.dedup();
        if up.is_empty() || up.len() >= n || up.iter().any(|&s| s >= n) {
            return Err(ModelError::Malformed("up states must be a non-empty proper subset".into()));
        }
        Ok(ComponentModel { labels, generator, up })
    }

    /// Builds a generator from off-diagonal transitions `(from, to, rate)`.
    pub fn from_transitions(
        labels: &[&str],
        transitions: &[(usize, usize, f64)],
        up: &[usize],
    ) -> Result<Self, ModelError> {
        let n = labels.len();
        let mut q = vec![0.0; n * n];
        for &(from, to, rate) in transitions {
            if from >= n || to >= n || from == to {
                return Err(ModelError::Malformed(alloc::format!("bad transition {from} -> {to}")));
            }
            q[from * n + to] += rate;
        }
        for i in 0..n {
            let out: f64 = (0..n).filter(|&j| j != i).map(|j| q[i * n + j]).sum();
            q[i * n + i] = -out;
        }
        ComponentModel::new(labels.iter().map(|s| s.to_string()).collect(), q, up.to_vec())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn up_states(&self) -> &[usize] {
        &self.up
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.generator[from * self.len() + to]
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    pub fn state(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

pub const NODE_STATES: [&str; 5] = ["OK", "H", "S", "C", "O"];
pub const LINK_STATES: [&str; 2] = ["UP", "DOWN"];

pub fn build_element_model(class: ElementClass, params: &ElementParams) -> Result<ComponentModel, ModelError> {
    params.validate()?;
    let p = params;
    match class {
        ElementClass::Link => {
            ComponentModel::from_transitions(&LINK_STATES, &[(0, 1, p.lambda_h), (1, 0, p.mu_h)], &[0])
        }
        ElementClass::ForwardingNode | ElementClass::Controller | ElementClass::Router => {
            const OK: usize = 0;
            const H: usize = 1;
            const S: usize = 2;
            const C: usize = 3;
            const O: usize = 4;
            ComponentModel::from_transitions(
                &NODE_STATES,
                &[
                    (OK, H, p.lambda_h),
                    (OK, S, p.lambda_s),
                    (OK, O, p.lambda_o),
                    (H, OK, p.mu_h),
                    (S, OK, p.coverage * p.mu_s),
                    (S, C, (1.0 - p.coverage) * p.mu_s),
                    (C, OK, p.mu_m),
                    (O, OK, p.mu_o),
                ],
                &[OK],
            )
        }
    }
}

/// Accepts chains with exactly one closed class; transient states are allowed
/// and end up with zero probability. Returns a state of the closed class.
fn check_unichain(m: &ComponentModel) -> Result<usize, ModelError> {
    let n = m.len();
    let mut reach = vec![false; n * n];
    for i in 0..n {
        reach[i * n + i] = true;
        for j in 0..n {
            if i != j && m.rate(i, j) > 0.0 {
                reach[i * n + j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i * n + k] {
                for j in 0..n {
                    if reach[k * n + j] {
                        reach[i * n + j] = true;
                    }
                }
            }
        }
    }
    let recurrent: Vec<usize> = (0..n)
        .filter(|&i| (0..n).all(|j| !reach[i * n + j] || reach[j * n + i]))
        .collect();
    let first = recurrent[0];
    let stray: Vec<String> = recurrent
        .iter()
        .filter(|&&j| !reach[first * n + j])
        .map(|&j| m.labels[j].clone())
        .collect();
    if stray.is_empty() {
        Ok(first)
    } else {
        Err(ModelError::Reducible(stray))
    }
}

/// Max-norm of `pi Q`.
pub fn balance_residual(m: &ComponentModel, pi: &[f64]) -> f64 {
    let n = m.len();
    (0..n)
        .map(|j| libm::fabs((0..n).map(|i| pi[i] * m.rate(i, j)).sum::<f64>()))
        .fold(0.0, f64::max)
}

/// Stationary distribution by state reduction (the Grassmann-Taksar-Heyman
/// variant of Gaussian elimination on `pi Q = 0`, normalised afterwards).
///
/// States are eliminated one at a time; the rate out of an eliminated state is
/// taken as the sum of its remaining off-diagonal rates instead of the
/// diagonal entry, so no subtraction occurs and every probability keeps full
/// relative precision however stiff the rates are.
pub fn steady_state(m: &ComponentModel) -> Result<Vec<f64>, ModelError> {
    let anchor = check_unichain(m)?;
    let n = m.len();
    // Elimination order with a recurrent state last to go, so every reduced
    // state still has a path to it.
    let mut order: Vec<usize> = (0..n).collect();
    order.swap(0, anchor);
    let mut a: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j { 0.0 } else { m.rate(order[i], order[j]) }
        })
        .collect();
    for k in (1..n).rev() {
        let out: f64 = (0..k).map(|j| a[k * n + j]).sum();
        if !(out > 0.0) {
            return Err(ModelError::Numeric(alloc::format!("state {} cannot be reduced", m.labels[order[k]])));
        }
        for i in 0..k {
            a[i * n + k] /= out;
        }
        for i in 0..k {
            let via = a[i * n + k];
            if via != 0.0 {
                for j in 0..k {
                    if i != j {
                        a[i * n + j] += via * a[k * n + j];
                    }
                }
            }
        }
    }
    let mut reduced = vec![0.0; n];
    reduced[0] = 1.0;
    for j in 1..n {
        reduced[j] = (0..j).map(|i| reduced[i] * a[i * n + j]).sum();
    }
    let total: f64 = reduced.iter().sum();
    let mut pi = vec![0.0; n];
    for (k, &s) in order.iter().enumerate() {
        pi[s] = reduced[k] / total;
    }

    for p in pi.iter_mut() {
        if *p < 0.0 {
            if *p < -1e-15 {
                return Err(ModelError::Numeric(alloc::format!("negative probability {p}")));
            }
            *p = 0.0;
        }
    }
    let scale = m.generator.iter().fold(1.0f64, |acc, q| acc.max(libm::fabs(*q)));
    let residual = balance_residual(m, &pi);
    if residual > 1e-12 * scale {
        return Err(ModelError::Numeric(alloc::format!("balance residual {residual:e}")));
    }
    Ok(pi)
}

pub fn availability_of(m: &ComponentModel) -> Result<f64, ModelError> {
    let pi = steady_state(m)?;
    Ok(m.up.iter().map(|&s| pi[s]).sum::<f64>().clamp(0.0, 1.0))
}

/// Probability mass on the down states, summed directly rather than as
/// `1 - availability` so small values keep their relative precision.
pub fn unavailability_of(m: &ComponentModel) -> Result<f64, ModelError> {
    let pi = steady_state(m)?;
    Ok((0..m.len())
        .filter(|s| !m.up.contains(s))
        .map(|s| pi[s])
        .sum::<f64>()
        .clamp(0.0, 1.0))
}
