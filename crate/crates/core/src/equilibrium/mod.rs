//! User-equilibrium assignment of truck, rail and intermodal demand.
//!
//! Two solvers share one state representation ([`PathSet`]s plus link
//! flows): the path-based gradient projection [`solve_gp`] and the
//! link-based Frank-Wolfe baseline [`solve_fw`]. Link flows are measured in
//! road vehicles on road links and trains on rail links; intermodal path
//! flow is converted with [`SolverConfig::intermodal_road_factor`] and
//! [`SolverConfig::intermodal_rail_factor`].

mod engine;
mod fw;
mod gp;
mod report;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{ClassDemand, DemandError, DemandTable, OdPair};
use crate::lpf::{LinkLpf, LpfError, DEFAULT_BETA};
use crate::network::{LinkKind, Mode, Network, NetworkError};
use crate::paths::{Path, PathError};

pub use fw::{solve_fw, solve_fw_observed};
pub use gp::{solve_gp, solve_gp_observed, GradientProjection};
pub use report::{
    beta_sweep, congested_links, ton_miles, ton_miles_from_flows, ue_cost_spread, BetaSweep, CongestedLink, CostSpread,
    PayloadFactors, SweepRow, TonMiles,
};

#[derive(Debug, Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("link '{link}': {source}")]
    Lpf { link: String, source: LpfError },
    #[error("{} demand entr{} cannot be routed:\n{}", .0.len(), if .0.len() == 1 { "y" } else { "ies" }, UnreachableList(.0))]
    Unreachable(Vec<UnreachableDemand>),
    #[error("cannot normalize the {0} term: its total demand is zero but it carries flow")]
    Normalization(&'static str),
    #[error("relative gap needs a positive previous objective, got {0}")]
    NonPositiveObjective(f64),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Report(String),
}

/// One O-D class whose demand has no path in its sub-network.
#[derive(Debug, Clone, PartialEq)]
pub struct UnreachableDemand {
    pub origin: String,
    pub destination: String,
    pub mode: Mode,
    pub demand: f64,
}

struct UnreachableList<'a>(&'a [UnreachableDemand]);

impl fmt::Display for UnreachableList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for u in self.0 {
            writeln!(f, "  {} -> {} ({}): {} per day", u.origin, u.destination, u.mode, u.demand)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "gp")]
    GradientProjection,
    #[serde(rename = "fw")]
    FrankWolfe,
}

impl Algorithm {
    pub fn short_name(self) -> &'static str {
        match self {
            Algorithm::GradientProjection => "gp",
            Algorithm::FrankWolfe => "fw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Gradient projection step size.
    pub step_size: f64,
    /// Stop once the relative objective change falls to this value.
    pub rel_gap_tol: f64,
    pub max_iterations: usize,
    /// Rail penalty rate for links without an override.
    pub beta: f64,
    /// Trucks per intermodal unit on road links and road connectors.
    pub intermodal_road_factor: f64,
    /// Trains per intermodal unit on rail links.
    pub intermodal_rail_factor: f64,
    /// Report and test convergence on the demand-normalized objective.
    pub normalization: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_size: 1.0,
            rel_gap_tol: 1e-4,
            max_iterations: 100,
            beta: DEFAULT_BETA,
            intermodal_road_factor: 1.0,
            intermodal_rail_factor: 1.0,
            normalization: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), EquilibriumError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(EquilibriumError::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("step_size", self.step_size)?;
        positive("rel_gap_tol", self.rel_gap_tol)?;
        positive("intermodal_road_factor", self.intermodal_road_factor)?;
        positive("intermodal_rail_factor", self.intermodal_rail_factor)?;
        if !(self.beta >= 1.0 && self.beta.is_finite()) {
            return Err(EquilibriumError::InvalidConfig(format!("beta must be >= 1, got {}", self.beta)));
        }
        Ok(())
    }

    /// Link-flow units carried per unit of path flow of `mode` on a link of
    /// `kind`.
    pub fn flow_weight(&self, kind: LinkKind, mode: Mode) -> f64 {
        match (mode, kind) {
            (Mode::Truck, LinkKind::Road | LinkKind::RoadConnector) => 1.0,
            (Mode::Rail, LinkKind::Rail | LinkKind::RailConnector) => 1.0,
            (Mode::Intermodal, LinkKind::Road | LinkKind::RoadConnector) => self.intermodal_road_factor,
            (Mode::Intermodal, LinkKind::Rail | LinkKind::RailConnector) => self.intermodal_rail_factor,
            (Mode::Intermodal, LinkKind::Terminal) => 1.0,
            _ => 0.0,
        }
    }
}

/// Identifies one path set: an O-D pair and a demand class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathSetKey {
    pub od: OdPair,
    pub mode: Mode,
}

impl Ord for PathSetKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.od.cmp(&other.od).then(self.mode.cmp(&other.mode))
    }
}

impl PartialOrd for PathSetKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathFlow {
    pub path: Path,
    pub flow: f64,
}

/// Paths carrying positive flow for one O-D class.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub key: PathSetKey,
    pub demand: f64,
    pub paths: Vec<PathFlow>,
}

impl PathSet {
    pub fn total_flow(&self) -> f64 {
        self.paths.iter().map(|p| p.flow).sum()
    }
}

/// Objective value: raw integral sums and the demand-normalized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Objective {
    /// Σ road integrals, vehicle-hours per day.
    pub road_term: f64,
    /// Σ rail integrals once per twin pair, train-hours per day.
    pub rail_term: f64,
    pub raw: f64,
    /// Hours.
    pub normalized: f64,
}

impl Objective {
    /// The value traced and tested for convergence.
    pub fn tracked(&self, config: &SolverConfig) -> f64 {
        if config.normalization {
            self.normalized
        } else {
            self.raw
        }
    }
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct AssignmentResult {
    pub algorithm: Algorithm,
    /// Indexed like `Network::links`.
    pub link_flows: Vec<f64>,
    /// In sweep order.
    pub path_sets: Vec<PathSet>,
    /// Tracked objective after initialization, then after each iteration.
    pub objective_trace: Vec<f64>,
    /// Relative change of the tracked objective, one entry per iteration.
    pub gap_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub objective: Objective,
    pub config: SolverConfig,
}

impl AssignmentResult {
    pub fn link_flow(&self, net: &Network, id: &str) -> Option<f64> {
        net.link_ix(id).map(|ix| self.link_flows[ix])
    }

    pub fn path_set(&self, origin: &str, destination: &str, mode: Mode) -> Option<&PathSet> {
        self.path_sets
            .iter()
            .find(|s| s.key.mode == mode && s.key.od.origin == origin && s.key.od.destination == destination)
    }

    /// Link travel times at the converged flows.
    pub fn link_times(&self, net: &Network) -> Result<crate::paths::LinkTimeView, EquilibriumError> {
        let lpfs = link_lpfs(net, self.config.beta)?;
        Ok(crate::paths::LinkTimeView::at_flows(net, &lpfs, &self.link_flows)?)
    }
}

/// What an observer sees after initialization and after each iteration.
pub struct IterationSnapshot<'a> {
    pub iteration: usize,
    pub link_flows: &'a [f64],
    pub path_sets: &'a [PathSet],
    pub objective: f64,
    pub gap: Option<f64>,
}

/// Performance function of every link at penalty rate `beta`.
pub fn link_lpfs(net: &Network, beta: f64) -> Result<Vec<LinkLpf>, EquilibriumError> {
    net.links()
        .iter()
        .map(|l| LinkLpf::for_link(l, beta).map_err(|source| EquilibriumError::Lpf { link: l.id.clone(), source }))
        .collect()
}

/// Link flows implied by path flows.
pub fn accumulate_link_flows(net: &Network, path_sets: &[PathSet], config: &SolverConfig) -> Vec<f64> {
    let mut flows = vec![0.0; net.links().len()];
    for set in path_sets {
        for pf in &set.paths {
            for &a in &pf.path.links {
                flows[a] += config.flow_weight(net.link(a).kind, set.key.mode) * pf.flow;
            }
        }
    }
    flows
}

/// Demand denominators of the road and rail objective terms.
pub(crate) fn normalizers(totals: &ClassDemand, config: &SolverConfig) -> (f64, f64) {
    (
        totals.truck + config.intermodal_road_factor * totals.intermodal,
        totals.rail + config.intermodal_rail_factor * totals.intermodal,
    )
}

pub(crate) fn objective_with(
    net: &Network,
    lpfs: &[LinkLpf],
    flows: &[f64],
    totals: &ClassDemand,
    config: &SolverConfig,
) -> Result<Objective, EquilibriumError> {
    let mut road_term = 0.0;
    let mut rail_term = 0.0;
    for (a, lpf) in lpfs.iter().enumerate() {
        let err = |source| EquilibriumError::Lpf { link: net.link(a).id.clone(), source };
        match lpf {
            LinkLpf::Road(f) => road_term += f.integral(flows[a]).map_err(err)?,
            LinkLpf::Rail(f) => {
                let twin = net.twin_ix(a);
                // once per unordered twin pair
                if twin.is_none_or(|t| a < t) {
                    let y = flows[a] + twin.map_or(0.0, |t| flows[t]);
                    rail_term += f.integral(y).map_err(err)?;
                }
            }
            LinkLpf::Fixed(_) => {}
        }
    }
    let (road_den, rail_den) = normalizers(totals, config);
    let term = |value: f64, den: f64, name| {
        if den > 0.0 {
            Ok(value / den)
        } else if value == 0.0 {
            Ok(0.0)
        } else {
            Err(EquilibriumError::Normalization(name))
        }
    };
    let normalized = if config.normalization {
        term(road_term, road_den, "road")? + term(rail_term, rail_den, "rail")?
    } else {
        road_term + rail_term
    };
    Ok(Objective { road_term, rail_term, raw: road_term + rail_term, normalized })
}

/// Objective at the given link flows.
pub fn objective(
    net: &Network,
    link_flows: &[f64],
    demand: &DemandTable,
    config: &SolverConfig,
) -> Result<Objective, EquilibriumError> {
    let lpfs = link_lpfs(net, config.beta)?;
    objective_with(net, &lpfs, link_flows, &demand.totals(), config)
}

/// `|prev - curr| / prev`
pub fn relative_gap(prev: f64, curr: f64) -> Result<f64, EquilibriumError> {
    if prev.is_nan() || prev <= 0.0 {
        return Err(EquilibriumError::NonPositiveObjective(prev));
    }
    Ok((prev - curr).abs() / prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Link, Node, NodeKind};

    fn road_net() -> Network {
        Network::new(
            vec![Node::new("a", NodeKind::RoadJunction), Node::new("b", NodeKind::RoadJunction)],
            vec![Link::new("1", "a", "b", LinkKind::Road, 1.0, 1.0).with_capacity(100.0)],
        )
    }

    #[test]
    fn gap_definition() {
        assert!((relative_gap(100.0, 99.99).unwrap() - 1e-4).abs() < 1e-12);
        assert_eq!(relative_gap(37.3594, 37.3594).unwrap(), 0.0);
        assert!((relative_gap(10.0, 11.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(relative_gap(0.0, 1.0).is_err());
    }

    #[test]
    fn road_objective_normalized_by_truck_demand() {
        let net = road_net();
        let mut d = DemandTable::new();
        d.add("o", "d", ClassDemand::new(100.0, 0.0, 0.0)).unwrap();
        let z = objective(&net, &[100.0], &d, &SolverConfig::default()).unwrap();
        assert!((z.raw - 103.0).abs() < 1e-12);
        assert!((z.normalized - 1.03).abs() < 1e-12);
        assert_eq!(objective(&net, &[0.0], &d, &SolverConfig::default()).unwrap().normalized, 0.0);
    }

    #[test]
    fn rail_pair_counted_once() {
        let net = Network::new(
            vec![Node::new("a", NodeKind::RailJunction), Node::new("b", NodeKind::RailJunction)],
            vec![
                Link::new("1", "a", "b", LinkKind::Rail, 1.0, 1.0).with_capacity(10.0).with_twin("2"),
                Link::new("2", "b", "a", LinkKind::Rail, 1.0, 1.0).with_capacity(10.0).with_twin("1"),
            ],
        );
        let mut d = DemandTable::new();
        d.add("o", "d", ClassDemand::new(0.0, 10.0, 0.0)).unwrap();
        let z = objective(&net, &[6.0, 4.0], &d, &SolverConfig::default()).unwrap();
        assert!((z.raw - 12.0).abs() < 1e-12);
        assert!((z.normalized - 1.2).abs() < 1e-12);
    }

    #[test]
    fn normalization_error_without_demand() {
        let net = road_net();
        let d = DemandTable::new();
        assert!(matches!(
            objective(&net, &[5.0], &d, &SolverConfig::default()),
            Err(EquilibriumError::Normalization("road"))
        ));
    }

    #[test]
    fn accumulation_adds_weighted_intermodal_flow() {
        let net = road_net();
        let key = |mode| PathSetKey { od: OdPair::new("o", "d"), mode };
        let path = |mode| Path { origin: 0, destination: 1, mode, links: vec![0] };
        let sets = vec![
            PathSet {
                key: key(Mode::Truck),
                demand: 5.0,
                paths: vec![PathFlow { path: path(Mode::Truck), flow: 5.0 }],
            },
            PathSet {
                key: key(Mode::Intermodal),
                demand: 2.0,
                paths: vec![PathFlow { path: path(Mode::Intermodal), flow: 2.0 }],
            },
        ];
        assert_eq!(accumulate_link_flows(&net, &sets, &SolverConfig::default()), vec![7.0]);
        let cfg = SolverConfig { intermodal_road_factor: 2.0, ..Default::default() };
        assert_eq!(accumulate_link_flows(&net, &sets, &cfg), vec![9.0]);
        assert_eq!(accumulate_link_flows(&net, &[], &cfg), vec![0.0]);
    }
}
