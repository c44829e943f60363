//! Mode-restricted least-time paths over the intermodal network.
//!
//! Searches are label-setting with a lexicographic label of
//! (time, link count, link-id sequence). Every link adds one hop, so the
//! label strictly grows along any edge even when a connector or terminal
//! has zero delay, and the search stays exact.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::lpf::{LinkLpf, LpfError};
use crate::network::{LinkKind, Mode, Network, NodeKind};

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("node '{0}' is not a centroid")]
    NotCentroid(String),
    #[error("origin and destination are both '{0}'")]
    SameEndpoints(String),
    #[error("link index {0} is not in the time view")]
    MissingLink(usize),
    #[error("paths differ in origin, destination or mode")]
    Mismatched,
    #[error("travel time on link '{link}': {source}")]
    Lpf { link: String, source: LpfError },
}

/// A simple path between two centroids, as link indices into its network.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub origin: usize,
    pub destination: usize,
    pub mode: Mode,
    pub links: Vec<usize>,
}

impl Path {
    pub fn link_ids<'a>(&self, net: &'a Network) -> Vec<&'a str> {
        self.links.iter().map(|&l| net.link(l).id.as_str()).collect()
    }
}

/// Current travel time of every link, indexed like `Network::links`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTimeView {
    times: Vec<f64>,
}

impl LinkTimeView {
    pub fn from_times(times: Vec<f64>) -> Self {
        LinkTimeView { times }
    }

    /// Times at the given link flows.
    pub fn at_flows(net: &Network, lpfs: &[LinkLpf], flows: &[f64]) -> Result<Self, PathError> {
        let times = (0..net.links().len()).map(|a| link_time(net, lpfs, flows, a)).collect::<Result<_, _>>()?;
        Ok(LinkTimeView { times })
    }

    pub fn get(&self, link: usize) -> Option<f64> {
        self.times.get(link).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.times
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.times
    }
}

/// Travel time of one link at the given flows; rail links see their twin.
pub fn link_time(net: &Network, lpfs: &[LinkLpf], flows: &[f64], a: usize) -> Result<f64, PathError> {
    let opp = net.twin_ix(a).map(|t| flows[t]).unwrap_or(0.0);
    lpfs[a].time(flows[a], opp).map_err(|source| PathError::Lpf { link: net.link(a).id.clone(), source })
}

/// Derivative of one link's time with respect to its own flow.
pub fn link_derivative(net: &Network, lpfs: &[LinkLpf], flows: &[f64], a: usize) -> Result<f64, PathError> {
    let opp = net.twin_ix(a).map(|t| flows[t]).unwrap_or(0.0);
    lpfs[a].derivative(flows[a], opp).map_err(|source| PathError::Lpf { link: net.link(a).id.clone(), source })
}

pub fn path_time(path: &Path, times: &LinkTimeView) -> Result<f64, PathError> {
    path.links.iter().map(|&a| times.get(a).ok_or(PathError::MissingLink(a))).sum()
}

/// Links on exactly one of the two paths, in ascending index order.
pub fn symmetric_difference_links(p1: &Path, p2: &Path) -> Result<BTreeSet<usize>, PathError> {
    if p1.origin != p2.origin || p1.destination != p2.destination || p1.mode != p2.mode {
        return Err(PathError::Mismatched);
    }
    let a: BTreeSet<usize> = p1.links.iter().copied().collect();
    let b: BTreeSet<usize> = p2.links.iter().copied().collect();
    Ok(a.symmetric_difference(&b).copied().collect())
}

/// Which links a search may traverse.
#[derive(Debug, Clone)]
pub struct SearchFilter<'a> {
    pub mode: Mode,
    /// Terminal links allowed for this search (intermodal only).
    pub terminals: Option<&'a BTreeSet<String>>,
}

impl SearchFilter<'_> {
    pub fn mode(mode: Mode) -> Self {
        SearchFilter { mode, terminals: None }
    }

    fn allows(&self, net: &Network, link: usize) -> bool {
        if !net.mode_allows(link, self.mode) {
            return false;
        }
        let l = net.link(link);
        match (self.mode, l.kind) {
            // intermodal shipments reach the rail network only through terminals
            (Mode::Intermodal, LinkKind::RailConnector) => false,
            (Mode::Intermodal, LinkKind::Terminal) => self.terminals.is_none_or(|set| set.contains(&l.id)),
            _ => true,
        }
    }
}

#[derive(Clone, Copy)]
struct HeapEntry {
    cost: f64,
    hops: u32,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.hops.cmp(&self.hops))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-origin search result, reusable for every destination.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    origin: usize,
    mode: Mode,
    cost: Vec<f64>,
    hops: Vec<u32>,
    pred: Vec<Option<usize>>,
}

impl ShortestPathTree {
    /// Searches from `origin` over links allowed by `filter`. Centroids
    /// other than the origin are never passed through.
    pub fn build(net: &Network, times: &[f64], origin: usize, filter: &SearchFilter<'_>) -> Self {
        let n = net.nodes().len();
        let mut cost = vec![f64::INFINITY; n];
        let mut hops = vec![u32::MAX; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();

        cost[origin] = 0.0;
        hops[origin] = 0;
        heap.push(HeapEntry { cost: 0.0, hops: 0, node: origin });

        while let Some(HeapEntry { cost: c, hops: h, node: u }) = heap.pop() {
            if done[u] || c > cost[u] || (c == cost[u] && h > hops[u]) {
                continue;
            }
            done[u] = true;
            if u != origin && net.node(u).kind == NodeKind::Centroid {
                continue;
            }
            for &a in net.out_links(u) {
                if !filter.allows(net, a) {
                    continue;
                }
                let (_, v) = net.endpoints(a);
                if done[v] {
                    continue;
                }
                let nc = c + times[a];
                let nh = h + 1;
                let better = match nc.total_cmp(&cost[v]).then(nh.cmp(&hops[v])) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => lex_less(net, &pred, u, a, v),
                };
                if better {
                    cost[v] = nc;
                    hops[v] = nh;
                    pred[v] = Some(a);
                    heap.push(HeapEntry { cost: nc, hops: nh, node: v });
                }
            }
        }

        ShortestPathTree { origin, mode: filter.mode, cost, hops, pred }
    }

    pub fn cost_to(&self, node: usize) -> f64 {
        self.cost[node]
    }

    pub fn path_to(&self, net: &Network, destination: usize) -> Option<Path> {
        if destination == self.origin || !self.cost[destination].is_finite() {
            return None;
        }
        let mut links = Vec::with_capacity(self.hops[destination] as usize);
        let mut v = destination;
        while let Some(a) = self.pred[v] {
            links.push(a);
            v = net.endpoints(a).0;
        }
        links.reverse();
        Some(Path { origin: self.origin, destination, mode: self.mode, links })
    }
}

fn rank_sequence(net: &Network, pred: &[Option<usize>], mut v: usize) -> Vec<u32> {
    let mut seq = Vec::new();
    while let Some(a) = pred[v] {
        seq.push(net.link_rank(a));
        v = net.endpoints(a).0;
    }
    seq.reverse();
    seq
}

/// Whether reaching `v` through `u` and link `a` gives a lexicographically
/// smaller link-id sequence than `v`'s current label.
fn lex_less(net: &Network, pred: &[Option<usize>], u: usize, a: usize, v: usize) -> bool {
    let mut candidate = rank_sequence(net, pred, u);
    candidate.push(net.link_rank(a));
    candidate < rank_sequence(net, pred, v)
}

fn centroid(net: &Network, id: &str) -> Result<usize, PathError> {
    let ix = net.node_ix(id).ok_or_else(|| PathError::UnknownNode(id.to_string()))?;
    if net.node(ix).kind != NodeKind::Centroid {
        return Err(PathError::NotCentroid(id.to_string()));
    }
    Ok(ix)
}

/// Least-time path of `mode` between two centroids, or `None` when the
/// destination is unreachable. Honors the network's terminal whitelist
/// for intermodal searches.
pub fn shortest_path(
    net: &Network,
    times: &LinkTimeView,
    mode: Mode,
    origin: &str,
    destination: &str,
) -> Result<Option<Path>, PathError> {
    if origin == destination {
        return Err(PathError::SameEndpoints(origin.to_string()));
    }
    let o = centroid(net, origin)?;
    let d = centroid(net, destination)?;
    if times.as_slice().len() != net.links().len() {
        return Err(PathError::MissingLink(times.as_slice().len()));
    }
    let terminals = match mode {
        Mode::Intermodal => net.whitelist_for(origin, destination),
        _ => None,
    };
    let tree = ShortestPathTree::build(net, times.as_slice(), o, &SearchFilter { mode, terminals });
    Ok(tree.path_to(net, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Link, Node};

    fn times(net: &Network) -> LinkTimeView {
        LinkTimeView::from_times(net.links().iter().map(|l| l.free_flow_time).collect())
    }

    #[test]
    fn single_link() {
        let net = Network::new(
            vec![
                Node::new("O", NodeKind::Centroid),
                Node::new("a", NodeKind::RoadJunction),
                Node::new("b", NodeKind::RoadJunction),
                Node::new("D", NodeKind::Centroid),
            ],
            vec![
                Link::new("c1", "O", "a", LinkKind::RoadConnector, 0.0, 0.0),
                Link::new("r", "a", "b", LinkKind::Road, 100.0, 2.0).with_capacity(10.0),
                Link::new("c2", "b", "D", LinkKind::RoadConnector, 0.0, 0.0),
            ],
        );
        let t = times(&net);
        let p = shortest_path(&net, &t, Mode::Truck, "O", "D").unwrap().unwrap();
        assert_eq!(p.link_ids(&net), vec!["c1", "r", "c2"]);
        assert_eq!(path_time(&p, &t).unwrap(), 2.0);
        assert!(shortest_path(&net, &t, Mode::Rail, "O", "D").unwrap().is_none());
        assert_eq!(shortest_path(&net, &t, Mode::Truck, "O", "O"), Err(PathError::SameEndpoints("O".into())));
        assert!(matches!(shortest_path(&net, &t, Mode::Truck, "O", "zz"), Err(PathError::UnknownNode(_))));
    }

    #[test]
    fn does_not_route_through_other_centroids() {
        let net = Network::new(
            vec![
                Node::new("O", NodeKind::Centroid),
                Node::new("M", NodeKind::Centroid),
                Node::new("a", NodeKind::RoadJunction),
                Node::new("b", NodeKind::RoadJunction),
                Node::new("D", NodeKind::Centroid),
            ],
            vec![
                Link::new("1", "O", "a", LinkKind::RoadConnector, 0.0, 0.0),
                Link::new("2", "a", "M", LinkKind::RoadConnector, 0.0, 0.0),
                Link::new("3", "M", "b", LinkKind::RoadConnector, 0.0, 0.0),
                Link::new("4", "a", "b", LinkKind::Road, 1.0, 5.0).with_capacity(1.0),
                Link::new("5", "b", "D", LinkKind::RoadConnector, 0.0, 0.0),
            ],
        );
        let p = shortest_path(&net, &times(&net), Mode::Truck, "O", "D").unwrap().unwrap();
        assert_eq!(p.link_ids(&net), vec!["1", "4", "5"]);
    }

    #[test]
    fn symmetric_difference() {
        let p = |links: Vec<usize>| Path { origin: 0, destination: 1, mode: Mode::Truck, links };
        assert!(symmetric_difference_links(&p(vec![1, 2]), &p(vec![1, 2])).unwrap().is_empty());
        assert_eq!(symmetric_difference_links(&p(vec![1, 2]), &p(vec![3, 4, 5])).unwrap().len(), 5);
        assert_eq!(
            symmetric_difference_links(&p(vec![1, 2, 3]), &p(vec![4, 2, 5])).unwrap().into_iter().collect::<Vec<_>>(),
            vec![1, 3, 4, 5]
        );
        let mut other = p(vec![1]);
        other.mode = Mode::Rail;
        assert_eq!(symmetric_difference_links(&p(vec![1]), &other), Err(PathError::Mismatched));
    }

    #[test]
    fn path_time_additivity_and_missing_link() {
        let t = LinkTimeView::from_times(vec![1.0, 0.5, 1.0]);
        let p = Path { origin: 0, destination: 1, mode: Mode::Truck, links: vec![0, 1, 2] };
        assert_eq!(path_time(&p, &t).unwrap(), 2.5);
        let q = Path { links: vec![0, 7], ..p };
        assert_eq!(path_time(&q, &t), Err(PathError::MissingLink(7)));
    }
}
