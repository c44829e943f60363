//! Solver state shared by gradient projection and Frank-Wolfe.

use std::collections::BTreeSet;

use crate::demand::{ClassDemand, DemandTable};
use crate::lpf::LinkLpf;
use crate::network::{Mode, Network};
use crate::paths::{link_derivative, link_time, Path, SearchFilter, ShortestPathTree};

use super::{
    accumulate_link_flows, link_lpfs, objective_with, relative_gap, Algorithm, AssignmentResult, EquilibriumError,
    IterationSnapshot, Objective, PathFlow, PathSet, PathSetKey, SolverConfig, UnreachableDemand,
};

/// Incremental flows are replaced by a fresh accumulation this often.
pub(crate) const RESYNC_INTERVAL: usize = 10;

pub(crate) struct OdTask<'n> {
    pub origin: usize,
    pub destination: usize,
    pub demand: ClassDemand,
    pub terminals: Option<&'n BTreeSet<String>>,
    /// Index into `Engine::sets` per mode.
    pub sets: [Option<usize>; 3],
}

/// Tasks sharing an origin, processed together.
pub(crate) struct OriginGroup {
    pub origin: usize,
    pub tasks: std::ops::Range<usize>,
}

pub(crate) struct Engine<'n> {
    pub net: &'n Network,
    pub config: SolverConfig,
    pub lpfs: Vec<LinkLpf>,
    pub totals: ClassDemand,
    pub tasks: Vec<OdTask<'n>>,
    pub groups: Vec<OriginGroup>,
    pub sets: Vec<PathSet>,
    pub flows: Vec<f64>,
    pub times: Vec<f64>,
    /// Per mode, link-flow units per unit of path flow on each link.
    pub weights: [Vec<f64>; 3],
}

pub(crate) fn mode_slot(mode: Mode) -> usize {
    match mode {
        Mode::Truck => 0,
        Mode::Rail => 1,
        Mode::Intermodal => 2,
    }
}

impl<'n> Engine<'n> {
    pub fn new(net: &'n Network, demand: &DemandTable, config: &SolverConfig) -> Result<Self, EquilibriumError> {
        config.validate()?;
        net.ensure_valid()?;
        demand.check_against(net)?;
        let lpfs = link_lpfs(net, config.beta)?;

        let mut tasks = Vec::new();
        let mut groups: Vec<OriginGroup> = Vec::new();
        for (od, d) in demand.iter() {
            if d.is_zero() {
                continue;
            }
            let origin = net.node_ix(&od.origin).expect("checked centroid");
            let destination = net.node_ix(&od.destination).expect("checked centroid");
            match groups.last_mut() {
                Some(g) if g.origin == origin => g.tasks.end += 1,
                _ => groups.push(OriginGroup { origin, tasks: tasks.len()..tasks.len() + 1 }),
            }
            tasks.push(OdTask {
                origin,
                destination,
                demand: *d,
                terminals: net.whitelist_for(&od.origin, &od.destination),
                sets: [None; 3],
            });
        }

        let weights =
            Mode::ALL.map(|mode| net.links().iter().map(|l| config.flow_weight(l.kind, mode)).collect::<Vec<_>>());

        Ok(Engine {
            net,
            config: config.clone(),
            lpfs,
            totals: demand.totals(),
            tasks,
            groups,
            sets: Vec::new(),
            flows: vec![0.0; net.links().len()],
            times: vec![0.0; net.links().len()],
            weights,
        })
    }

    pub fn weight(&self, link: usize, mode: Mode) -> f64 {
        self.weights[mode_slot(mode)][link]
    }

    pub fn refresh_all_times(&mut self) -> Result<(), EquilibriumError> {
        for a in 0..self.times.len() {
            self.times[a] = link_time(self.net, &self.lpfs, &self.flows, a)?;
        }
        Ok(())
    }

    /// Recomputes times of the given links and their twins.
    pub fn refresh_times<I: IntoIterator<Item = usize>>(&mut self, links: I) -> Result<(), EquilibriumError> {
        for a in links {
            self.times[a] = link_time(self.net, &self.lpfs, &self.flows, a)?;
            if let Some(t) = self.net.twin_ix(a) {
                self.times[t] = link_time(self.net, &self.lpfs, &self.flows, t)?;
            }
        }
        Ok(())
    }

    pub fn derivative(&self, link: usize) -> Result<f64, EquilibriumError> {
        Ok(link_derivative(self.net, &self.lpfs, &self.flows, link)?)
    }

    /// Shortest paths of every class with demand, for one origin group, at
    /// the current times. Entries follow the group's task order.
    pub fn group_paths(&self, group: &OriginGroup) -> Vec<[Option<Path>; 3]> {
        let mut shared: [Option<ShortestPathTree>; 3] = [None, None, None];
        let mut out = Vec::with_capacity(group.tasks.len());
        for task in &self.tasks[group.tasks.clone()] {
            let mut row: [Option<Path>; 3] = [None, None, None];
            for mode in Mode::ALL {
                if task.demand.get(mode) <= 0.0 {
                    continue;
                }
                let whitelist = if mode == Mode::Intermodal { task.terminals } else { None };
                row[mode_slot(mode)] = match whitelist {
                    Some(terminals) => {
                        let filter = SearchFilter { mode, terminals: Some(terminals) };
                        ShortestPathTree::build(self.net, &self.times, group.origin, &filter)
                            .path_to(self.net, task.destination)
                    }
                    None => shared[mode_slot(mode)]
                        .get_or_insert_with(|| {
                            ShortestPathTree::build(self.net, &self.times, group.origin, &SearchFilter::mode(mode))
                        })
                        .path_to(self.net, task.destination),
                };
            }
            out.push(row);
        }
        out
    }

    /// All-or-nothing loading at free-flow times; seeds one path per class.
    pub fn initialize(&mut self) -> Result<(), EquilibriumError> {
        self.flows.iter_mut().for_each(|x| *x = 0.0);
        self.refresh_all_times()?;
        let mut unreachable = Vec::new();
        let mut sets = Vec::new();
        for g in 0..self.groups.len() {
            let group = &self.groups[g];
            let paths = self.group_paths(group);
            for (offset, row) in paths.into_iter().enumerate() {
                let t = group.tasks.start + offset;
                let task = &self.tasks[t];
                for mode in Mode::ALL {
                    let q = task.demand.get(mode);
                    if q <= 0.0 {
                        continue;
                    }
                    let od = crate::demand::OdPair::new(
                        self.net.node(task.origin).id.clone(),
                        self.net.node(task.destination).id.clone(),
                    );
                    match &row[mode_slot(mode)] {
                        Some(path) => sets.push((
                            t,
                            mode,
                            PathSet {
                                key: PathSetKey { od, mode },
                                demand: q,
                                paths: vec![PathFlow { path: path.clone(), flow: q }],
                            },
                        )),
                        None => unreachable.push(UnreachableDemand {
                            origin: od.origin,
                            destination: od.destination,
                            mode,
                            demand: q,
                        }),
                    }
                }
            }
        }
        if !unreachable.is_empty() {
            return Err(EquilibriumError::Unreachable(unreachable));
        }
        for (t, mode, set) in sets {
            self.tasks[t].sets[mode_slot(mode)] = Some(self.sets.len());
            self.sets.push(set);
        }
        self.flows = accumulate_link_flows(self.net, &self.sets, &self.config);
        self.refresh_all_times()
    }

    pub fn set_index(&self, task: usize, mode: Mode) -> Option<usize> {
        self.tasks[task].sets[mode_slot(mode)]
    }

    /// Replaces incrementally maintained flows with a fresh accumulation.
    pub fn resync(&mut self) -> Result<(), EquilibriumError> {
        self.flows = accumulate_link_flows(self.net, &self.sets, &self.config);
        self.refresh_all_times()
    }

    pub fn objective(&self) -> Result<Objective, EquilibriumError> {
        objective_with(self.net, &self.lpfs, &self.flows, &self.totals, &self.config)
    }

    /// Shared outer loop: `step` performs one iteration.
    pub fn run<F>(
        mut self,
        algorithm: Algorithm,
        observer: &mut dyn FnMut(&IterationSnapshot<'_>),
        mut step: F,
    ) -> Result<AssignmentResult, EquilibriumError>
    where
        F: FnMut(&mut Self) -> Result<(), EquilibriumError>,
    {
        self.initialize()?;
        let mut z = self.objective()?;
        let mut tracked = z.tracked(&self.config);
        let mut objective_trace = vec![tracked];
        let mut gap_trace = Vec::new();
        observer(&IterationSnapshot {
            iteration: 0,
            link_flows: &self.flows,
            path_sets: &self.sets,
            objective: tracked,
            gap: None,
        });

        // nothing to move when every path set is a single forced path at zero cost
        let mut converged = self.sets.is_empty() && self.config.max_iterations > 0;
        let mut iterations = 0;
        while !converged && iterations < self.config.max_iterations {
            iterations += 1;
            step(&mut self)?;
            if iterations % RESYNC_INTERVAL == 0 {
                self.resync()?;
            }
            z = self.objective()?;
            let next = z.tracked(&self.config);
            let gap = if tracked > 0.0 { relative_gap(tracked, next)? } else { (next - tracked).abs() };
            tracked = next;
            objective_trace.push(tracked);
            gap_trace.push(gap);
            observer(&IterationSnapshot {
                iteration: iterations,
                link_flows: &self.flows,
                path_sets: &self.sets,
                objective: tracked,
                gap: Some(gap),
            });
            converged = gap <= self.config.rel_gap_tol;
        }

        Ok(AssignmentResult {
            algorithm,
            link_flows: self.flows,
            path_sets: self.sets,
            objective_trace,
            gap_trace,
            iterations,
            converged,
            objective: z,
            config: self.config,
        })
    }
}
