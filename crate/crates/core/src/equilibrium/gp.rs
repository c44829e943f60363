//! Path-based gradient projection.
//!
//! Each iteration sweeps the O-D pairs in ascending (origin, destination,
//! class) order. For every path set the current least-time path `k̄` is
//! added if new, and each other path `k` sheds
//!
//! ```text
//! min(f_k, step / s_k * (d_k - d_k̄))
//! ```
//!
//! where `d` is path time and `s_k` sums the flow derivatives of link times
//! over links on exactly one of `k` and `k̄`. `k̄` takes up the remainder so
//! the set keeps its demand exactly. Flows are updated in place, so later
//! pairs in the same sweep see the shifted times.

use crate::demand::DemandTable;
use crate::network::{Mode, Network};
use crate::paths::{symmetric_difference_links, Path};

use super::engine::{mode_slot, Engine};
use super::{Algorithm, AssignmentResult, EquilibriumError, IterationSnapshot, PathFlow, SolverConfig};

pub fn solve_gp(
    net: &Network,
    demand: &DemandTable,
    config: &SolverConfig,
) -> Result<AssignmentResult, EquilibriumError> {
    solve_gp_observed(net, demand, config, &mut |_| {})
}

/// As [`solve_gp`], calling `observer` after initialization and after every
/// iteration.
pub fn solve_gp_observed(
    net: &Network,
    demand: &DemandTable,
    config: &SolverConfig,
    observer: &mut dyn FnMut(&IterationSnapshot<'_>),
) -> Result<AssignmentResult, EquilibriumError> {
    let engine = Engine::new(net, demand, config)?;
    engine.run(Algorithm::GradientProjection, observer, sweep)
}

fn sweep(engine: &mut Engine<'_>) -> Result<(), EquilibriumError> {
    for g in 0..engine.groups.len() {
        let group = &engine.groups[g];
        let start = group.tasks.start;
        let paths = engine.group_paths(group);
        for (offset, row) in paths.into_iter().enumerate() {
            for (mode, candidate) in Mode::ALL.into_iter().zip(row) {
                let (Some(set), Some(candidate)) = (engine.set_index(start + offset, mode), candidate) else {
                    continue;
                };
                inner_update(engine, set, candidate)?;
            }
        }
    }
    Ok(())
}

/// One move for one path set. `candidate` is the least-time path found by
/// the search for this class.
pub(crate) fn inner_update(engine: &mut Engine<'_>, set_ix: usize, candidate: Path) -> Result<(), EquilibriumError> {
    let mode = candidate.mode;
    {
        let set = &mut engine.sets[set_ix];
        if !set.paths.iter().any(|p| p.path.links == candidate.links) {
            set.paths.push(PathFlow { path: candidate, flow: 0.0 });
        }
        if set.paths.len() == 1 {
            return Ok(());
        }
    }

    let set = &engine.sets[set_ix];
    let costs: Vec<f64> = set.paths.iter().map(|p| p.path.links.iter().map(|&a| engine.times[a]).sum()).collect();
    let best = costs.iter().enumerate().fold(0, |best, (i, &c)| if c < costs[best] { i } else { best });

    let step = engine.config.step_size;
    let mut new_flows = Vec::with_capacity(set.paths.len());
    let mut others = 0.0;
    for (k, p) in set.paths.iter().enumerate() {
        if k == best {
            new_flows.push(0.0);
            continue;
        }
        let diff = costs[k] - costs[best];
        let f = if diff <= 0.0 {
            p.flow
        } else {
            let mut scale = 0.0;
            for a in symmetric_difference_links(&p.path, &set.paths[best].path)? {
                scale += engine.weight(a, mode) * engine.derivative(a)?;
            }
            if scale > 0.0 {
                (p.flow - step / scale * diff).max(0.0)
            } else {
                // no curvature between the two paths: move everything
                0.0
            }
        };
        others += f;
        new_flows.push(f);
    }
    new_flows[best] = (set.demand - others).max(0.0);

    let mut touched = Vec::new();
    let weights = &engine.weights[mode_slot(mode)];
    let set = &mut engine.sets[set_ix];
    for (p, &f) in set.paths.iter_mut().zip(&new_flows) {
        let delta = f - p.flow;
        if delta == 0.0 {
            continue;
        }
        p.flow = f;
        for &a in &p.path.links {
            engine.flows[a] = (engine.flows[a] + weights[a] * delta).max(0.0);
            touched.push(a);
        }
    }
    set.paths.retain(|p| p.flow > 0.0);
    touched.sort_unstable();
    touched.dedup();
    engine.refresh_times(touched)
}

/// Gradient projection with explicit control over each step, for callers
/// that want to inspect intermediate state.
pub struct GradientProjection<'n> {
    engine: Engine<'n>,
}

impl<'n> GradientProjection<'n> {
    /// Builds the state and performs the initial all-or-nothing loading.
    pub fn initialize(net: &'n Network, demand: &DemandTable, config: &SolverConfig) -> Result<Self, EquilibriumError> {
        let mut engine = Engine::new(net, demand, config)?;
        engine.initialize()?;
        Ok(GradientProjection { engine })
    }

    pub fn link_flows(&self) -> &[f64] {
        &self.engine.flows
    }

    pub fn path_sets(&self) -> &[super::PathSet] {
        &self.engine.sets
    }

    pub fn link_times(&self) -> &[f64] {
        &self.engine.times
    }

    /// Runs the move for a single path set against a freshly searched
    /// least-time path.
    pub fn update_path_set(&mut self, set_ix: usize) -> Result<(), EquilibriumError> {
        let set = &self.engine.sets[set_ix];
        let (origin, destination, mode) = (set.paths[0].path.origin, set.paths[0].path.destination, set.key.mode);
        let terminals = match mode {
            Mode::Intermodal => self.engine.net.whitelist_for(&set.key.od.origin, &set.key.od.destination),
            _ => None,
        };
        let filter = crate::paths::SearchFilter { mode, terminals };
        let tree = crate::paths::ShortestPathTree::build(self.engine.net, &self.engine.times, origin, &filter);
        let candidate = tree.path_to(self.engine.net, destination).expect("path set exists only for reachable pairs");
        inner_update(&mut self.engine, set_ix, candidate)
    }

    /// One full sweep over all path sets.
    pub fn sweep(&mut self) -> Result<(), EquilibriumError> {
        sweep(&mut self.engine)
    }

    pub fn objective(&self) -> Result<super::Objective, EquilibriumError> {
        self.engine.objective()
    }
}
