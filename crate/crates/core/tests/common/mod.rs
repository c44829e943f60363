#![allow(dead_code)]

use std::collections::BTreeMap;

use freight_assign::equilibrium::{accumulate_link_flows, IterationSnapshot, SolverConfig};
use freight_assign::{DemandTable, LinkKind, Mode, Network, NodeKind};

/// Every simple path of `mode` from `origin` to `destination`, as link
/// index lists, enumerated by depth-first search. Other centroids are not
/// passed through; intermodal paths may not use rail connectors.
pub fn enumerate_paths(net: &Network, mode: Mode, origin: &str, destination: &str) -> Vec<Vec<usize>> {
    let allowed = |kind: LinkKind| match mode {
        Mode::Truck => matches!(kind, LinkKind::Road | LinkKind::RoadConnector),
        Mode::Rail => matches!(kind, LinkKind::Rail | LinkKind::RailConnector),
        Mode::Intermodal => kind != LinkKind::RailConnector,
    };
    let o = net.node_ix(origin).unwrap();
    let d = net.node_ix(destination).unwrap();
    let mut out = Vec::new();
    let mut visited = vec![false; net.nodes().len()];
    let mut stack = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        net: &Network,
        u: usize,
        d: usize,
        allowed: &dyn Fn(LinkKind) -> bool,
        visited: &mut Vec<bool>,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        origin: usize,
    ) {
        if u == d {
            out.push(stack.clone());
            return;
        }
        if u != origin && net.node(u).kind == NodeKind::Centroid {
            return;
        }
        visited[u] = true;
        for (a, link) in net.links().iter().enumerate() {
            if link.from != net.node(u).id || !allowed(link.kind) || net.is_restricted(a) {
                continue;
            }
            let v = net.node_ix(&link.to).unwrap();
            if visited[v] {
                continue;
            }
            stack.push(a);
            dfs(net, v, d, allowed, visited, stack, out, origin);
            stack.pop();
        }
        visited[u] = false;
    }
    dfs(net, o, d, &allowed, &mut visited, &mut stack, &mut out, o);
    out
}

/// Beckmann potential written out from the delay formulas: road
/// integrals, rail integrals once per twin pair at combined flow, and
/// fixed delay times flow for terminals and connectors.
pub fn potential(net: &Network, flows: &[f64], beta: f64) -> f64 {
    let mut z = 0.0;
    for (a, l) in net.links().iter().enumerate() {
        let x = flows[a];
        match l.kind {
            LinkKind::Road => {
                let c = l.capacity.unwrap();
                z += l.free_flow_time * (x + 0.03 * x.powi(5) / c.powi(4));
            }
            LinkKind::Rail => {
                let twin = net.link_ix(l.twin.as_deref().unwrap()).unwrap();
                if twin < a {
                    continue;
                }
                let b = l.beta.unwrap_or(beta);
                let c = l.capacity.unwrap();
                let y = x + flows[twin];
                z += l.free_flow_time * (y + y.powf(b + 1.0) / ((b + 1.0) * c.powf(b)));
            }
            _ => z += l.free_flow_time * x,
        }
    }
    z
}

/// One O-D class with its enumerated paths.
pub struct OracleSet {
    pub origin: String,
    pub destination: String,
    pub mode: Mode,
    pub demand: f64,
    pub paths: Vec<Vec<usize>>,
}

pub fn oracle_sets(net: &Network, demand: &DemandTable) -> Vec<OracleSet> {
    let mut sets = Vec::new();
    for (od, q) in demand.iter() {
        for mode in Mode::ALL {
            if q.get(mode) > 0.0 {
                sets.push(OracleSet {
                    origin: od.origin.clone(),
                    destination: od.destination.clone(),
                    mode,
                    demand: q.get(mode),
                    paths: enumerate_paths(net, mode, &od.origin, &od.destination),
                });
            }
        }
    }
    sets
}

/// Grid points of the simplex {f >= 0, sum f = q} in `n` dimensions with
/// step `q / steps`.
fn simplex_points(n: usize, steps: usize, q: f64) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(n - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, steps, &mut Vec::new(), &mut out);
    out.into_iter().map(|p| p.into_iter().map(|k| q * k as f64 / steps as f64).collect()).collect()
}

/// Path flows minimizing the potential over the product of per-set
/// simplex grids with resolution `q / steps`.
pub fn brute_force_equilibrium(net: &Network, sets: &[OracleSet], cfg: &SolverConfig, steps: usize) -> Vec<Vec<f64>> {
    let grids: Vec<Vec<Vec<f64>>> = sets
        .iter()
        .map(|s| simplex_points(s.paths.len(), if s.paths.len() == 1 { 1 } else { steps }, s.demand))
        .collect();
    let weight = |kind: LinkKind, mode: Mode| cfg.flow_weight(kind, mode);
    let mut best = f64::INFINITY;
    let mut best_choice = vec![0usize; sets.len()];
    let mut choice = vec![0usize; sets.len()];
    let mut flows = vec![0.0; net.links().len()];
    loop {
        flows.iter_mut().for_each(|x| *x = 0.0);
        for (s, set) in sets.iter().enumerate() {
            for (p, links) in set.paths.iter().enumerate() {
                let f = grids[s][choice[s]][p];
                for &a in links {
                    flows[a] += weight(net.link(a).kind, set.mode) * f;
                }
            }
        }
        let z = potential(net, &flows, cfg.beta);
        if z < best {
            best = z;
            best_choice = choice.clone();
        }
        // odometer over the grids
        let mut k = 0;
        loop {
            if k == sets.len() {
                return sets.iter().enumerate().map(|(s, _)| grids[s][best_choice[s]].clone()).collect();
            }
            choice[k] += 1;
            if choice[k] < grids[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Flow on each enumerated path of `set` in a solver result.
pub fn solver_path_flows(result: &freight_assign::AssignmentResult, set: &OracleSet) -> Vec<f64> {
    let ps = result.path_set(&set.origin, &set.destination, set.mode);
    set.paths
        .iter()
        .map(|links| ps.map_or(0.0, |ps| ps.paths.iter().filter(|p| &p.path.links == links).map(|p| p.flow).sum()))
        .collect()
}

/// Demand conservation, non-negativity and flow consistency for one
/// solver snapshot. Returns a description of the first breach.
pub fn check_snapshot(net: &Network, cfg: &SolverConfig, snap: &IterationSnapshot<'_>) -> Result<(), String> {
    for set in snap.path_sets {
        let total: f64 = set.paths.iter().map(|p| p.flow).sum();
        if (total - set.demand).abs() > 1e-9 * set.demand {
            return Err(format!("iteration {}: {:?} carries {total}, demand {}", snap.iteration, set.key, set.demand));
        }
        if let Some(p) = set.paths.iter().find(|p| p.flow.is_nan() || p.flow < 0.0) {
            return Err(format!("iteration {}: negative path flow {}", snap.iteration, p.flow));
        }
    }
    if let Some(x) = snap.link_flows.iter().find(|x| x.is_nan() || **x < 0.0) {
        return Err(format!("iteration {}: negative link flow {x}", snap.iteration));
    }
    let fresh = accumulate_link_flows(net, snap.path_sets, cfg);
    let scale = fresh.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (a, (x, y)) in snap.link_flows.iter().zip(&fresh).enumerate() {
        if (x - y).abs() > 1e-9 * scale {
            return Err(format!(
                "iteration {}: link {} incremental {x} vs recomputed {y}",
                snap.iteration,
                net.link(a).id
            ));
        }
    }
    Ok(())
}

/// Collects every snapshot breach of a run.
#[derive(Default)]
pub struct Audit {
    pub snapshots: usize,
    pub breaches: Vec<String>,
}

impl Audit {
    pub fn observe<'a>(
        &'a mut self,
        net: &'a Network,
        cfg: &'a SolverConfig,
    ) -> impl FnMut(&IterationSnapshot<'_>) + 'a {
        move |snap| {
            self.snapshots += 1;
            if let Err(e) = check_snapshot(net, cfg, snap) {
                self.breaches.push(e);
            }
        }
    }
}

pub fn flows_by_id(net: &Network, flows: &[f64]) -> BTreeMap<String, f64> {
    net.links().iter().zip(flows).map(|(l, x)| (l.id.clone(), *x)).collect()
}
