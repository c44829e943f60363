//! Link-based Frank-Wolfe baseline.
//!
//! Each iteration loads all demand all-or-nothing at current times, then
//! moves toward that loading by the step that minimizes the Beckmann
//! potential along the segment. Path sets are carried along as the same
//! convex combination so results expose the same contract as gradient
//! projection.

use crate::demand::DemandTable;
use crate::network::{Mode, Network};
use crate::paths::{link_time, Path};

use super::engine::Engine;
use super::{Algorithm, AssignmentResult, EquilibriumError, IterationSnapshot, PathFlow, SolverConfig};

/// Bisection stops once the bracket is this narrow. The lower end is
/// returned, so a step never raises the potential.
pub const LINE_SEARCH_TOL: f64 = 1e-8;
pub const LINE_SEARCH_MAX_ITER: usize = 64;

pub fn solve_fw(
    net: &Network,
    demand: &DemandTable,
    config: &SolverConfig,
) -> Result<AssignmentResult, EquilibriumError> {
    solve_fw_observed(net, demand, config, &mut |_| {})
}

pub fn solve_fw_observed(
    net: &Network,
    demand: &DemandTable,
    config: &SolverConfig,
    observer: &mut dyn FnMut(&IterationSnapshot<'_>),
) -> Result<AssignmentResult, EquilibriumError> {
    let engine = Engine::new(net, demand, config)?;
    engine.run(Algorithm::FrankWolfe, observer, iterate)
}

fn iterate(engine: &mut Engine<'_>) -> Result<(), EquilibriumError> {
    // all-or-nothing target
    let mut targets: Vec<(usize, Path)> = Vec::with_capacity(engine.sets.len());
    for group in &engine.groups {
        let rows = engine.group_paths(group);
        for (offset, row) in rows.into_iter().enumerate() {
            for (mode, path) in Mode::ALL.into_iter().zip(row) {
                if let (Some(set), Some(path)) = (engine.set_index(group.tasks.start + offset, mode), path) {
                    targets.push((set, path));
                }
            }
        }
    }
    let mut target_flows = vec![0.0; engine.flows.len()];
    for (set, path) in &targets {
        let q = engine.sets[*set].demand;
        for &a in &path.links {
            target_flows[a] += engine.weight(a, path.mode) * q;
        }
    }
    let direction: Vec<f64> = target_flows.iter().zip(&engine.flows).map(|(y, x)| y - x).collect();

    let lambda = line_search(engine, &direction)?;
    if lambda == 0.0 {
        return Ok(());
    }

    for (x, d) in engine.flows.iter_mut().zip(&direction) {
        *x = (*x + lambda * d).max(0.0);
    }
    for (set_ix, path) in targets {
        let set = &mut engine.sets[set_ix];
        for p in &mut set.paths {
            p.flow *= 1.0 - lambda;
        }
        let add = lambda * set.demand;
        match set.paths.iter_mut().find(|p| p.path.links == path.links) {
            Some(p) => p.flow += add,
            None => set.paths.push(PathFlow { path, flow: add }),
        }
        set.paths.retain(|p| p.flow > 0.0);
    }
    engine.refresh_all_times()
}

/// Derivative of the potential at `x + lambda d` along `d`.
fn directional_derivative(engine: &Engine<'_>, direction: &[f64], lambda: f64) -> Result<f64, EquilibriumError> {
    let trial: Vec<f64> = engine.flows.iter().zip(direction).map(|(x, d)| (x + lambda * d).max(0.0)).collect();
    let mut total = 0.0;
    for (a, &d) in direction.iter().enumerate() {
        if d != 0.0 {
            total += link_time(engine.net, &engine.lpfs, &trial, a)? * d;
        }
    }
    Ok(total)
}

fn line_search(engine: &Engine<'_>, direction: &[f64]) -> Result<f64, EquilibriumError> {
    if directional_derivative(engine, direction, 0.0)? >= 0.0 {
        return Ok(0.0);
    }
    if directional_derivative(engine, direction, 1.0)? <= 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..LINE_SEARCH_MAX_ITER {
        if hi - lo < LINE_SEARCH_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if directional_derivative(engine, direction, mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}
