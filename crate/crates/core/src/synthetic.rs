//! Small deterministic networks and demand tables used by the tests, the
//! examples and the shipped sample data. None of the numbers describe a
//! real network; the factor tables are made up and are not FAF values.

use crate::conversion::{DistanceRange, FactorTables, ModeCategory, RailGroups, ShipmentRecord, TruckEquivalency};
use crate::demand::{ClassDemand, DemandTable};
use crate::network::{Link, LinkKind, Network, Node, NodeKind};

fn demand(cells: &[(&str, &str, ClassDemand)]) -> DemandTable {
    let mut t = DemandTable::new();
    for (o, d, q) in cells {
        t.add(o, d, *q).expect("fixture demand is valid");
    }
    t
}

fn road(id: &str, from: &str, to: &str, length: f64, t0: f64, cap: f64) -> Link {
    Link::new(id, from, to, LinkKind::Road, length, t0).with_capacity(cap)
}

/// Both directions of one rail track.
fn track(id: &str, rev: &str, a: &str, b: &str, length: f64, t0: f64, cap: f64) -> [Link; 2] {
    [
        Link::new(id, a, b, LinkKind::Rail, length, t0).with_capacity(cap).with_twin(rev),
        Link::new(rev, b, a, LinkKind::Rail, length, t0).with_capacity(cap).with_twin(id),
    ]
}

fn link(id: &str, from: &str, to: &str, kind: LinkKind, t: f64) -> Link {
    Link::new(id, from, to, kind, 0.0, t)
}

/// Two road links between one O-D pair: t0 = 1 h, capacities 20 and 10,
/// 30 trucks per day. The equilibrium split is (20, 10).
pub fn two_parallel_links() -> (Network, DemandTable) {
    let net = Network::new(
        vec![
            Node::new("A", NodeKind::Centroid),
            Node::new("a", NodeKind::RoadJunction),
            Node::new("b", NodeKind::RoadJunction),
            Node::new("B", NodeKind::Centroid),
        ],
        vec![
            link("c1", "A", "a", LinkKind::RoadConnector, 0.0),
            road("1", "a", "b", 50.0, 1.0, 20.0),
            road("2", "a", "b", 50.0, 1.0, 10.0),
            link("c2", "b", "B", LinkKind::RoadConnector, 0.0),
        ],
    );
    (net, demand(&[("A", "B", ClassDemand::new(30.0, 0.0, 0.0))]))
}

/// Three road links between one O-D pair with different free-flow times
/// and capacities.
pub fn three_parallel_links() -> (Network, DemandTable) {
    let net = Network::new(
        vec![
            Node::new("A", NodeKind::Centroid),
            Node::new("a", NodeKind::RoadJunction),
            Node::new("b", NodeKind::RoadJunction),
            Node::new("B", NodeKind::Centroid),
        ],
        vec![
            link("c1", "A", "a", LinkKind::RoadConnector, 0.0),
            road("1", "a", "b", 50.0, 1.0, 15.0),
            road("2", "a", "b", 60.0, 1.2, 25.0),
            road("3", "a", "b", 80.0, 1.5, 40.0),
            link("c2", "b", "B", LinkKind::RoadConnector, 0.0),
        ],
    );
    (net, demand(&[("A", "B", ClassDemand::new(60.0, 0.0, 0.0))]))
}

/// One origin and one destination with road access, a road-rail-road
/// intermodal chain through two terminals, a direct road long haul and
/// rail connectors. At free flow the intermodal chain takes 6 h and the
/// road-only route 10 h; the road distance is 580 miles.
///
/// ```text
///  O -1- r1 -2- r2 ----------9---------- r3 -7- r4 -8- D
///  |             \3                  6/               |
///  +------10----- l1 ======4/5====== l2 -----11-------+
/// ```
pub fn figure_one_chain() -> Network {
    let mut links = vec![
        link("1", "O", "r1", LinkKind::RoadConnector, 0.0),
        road("2", "r1", "r2", 50.0, 1.0, 500.0),
        link("3", "r2", "l1", LinkKind::Terminal, 0.5),
    ];
    links.extend(track("4", "5", "l1", "l2", 180.0, 3.0, 20.0));
    links.extend([
        link("6", "l2", "r3", LinkKind::Terminal, 0.5),
        road("7", "r3", "r4", 50.0, 1.0, 500.0),
        link("8", "r4", "D", LinkKind::RoadConnector, 0.0),
        road("9", "r2", "r3", 480.0, 8.0, 300.0),
        link("10", "O", "l1", LinkKind::RailConnector, 0.5),
        link("11", "l2", "D", LinkKind::RailConnector, 0.5),
    ]);
    Network::new(
        vec![
            Node::new("O", NodeKind::Centroid).at(-97.0, 35.0),
            Node::new("r1", NodeKind::RoadJunction).at(-96.6, 35.0),
            Node::new("r2", NodeKind::RoadJunction).at(-96.0, 35.0),
            Node::new("l1", NodeKind::RailJunction).at(-96.0, 34.8),
            Node::new("l2", NodeKind::RailJunction).at(-88.0, 34.8),
            Node::new("r3", NodeKind::RoadJunction).at(-88.0, 35.0),
            Node::new("r4", NodeKind::RoadJunction).at(-87.4, 35.0),
            Node::new("D", NodeKind::Centroid).at(-87.0, 35.0),
        ],
        links,
    )
}

pub fn figure_one_demand() -> DemandTable {
    demand(&[("O", "D", ClassDemand::new(100.0, 5.0, 20.0))])
}

/// One twinned rail track and a one-way road link in each direction
/// between two centroids, with equal intermodal demand both ways. The
/// intermodal split between road and rail is unique, so the two
/// directions of the track carry equal flow.
pub fn symmetric_rail_pair() -> (Network, DemandTable) {
    let mut links = vec![
        link("1", "A", "a", LinkKind::RoadConnector, 0.1),
        link("2", "a", "A", LinkKind::RoadConnector, 0.1),
        link("3", "B", "b", LinkKind::RoadConnector, 0.1),
        link("4", "b", "B", LinkKind::RoadConnector, 0.1),
        road("5", "a", "b", 165.0, 3.0, 10.0),
        road("6", "b", "a", 165.0, 3.0, 10.0),
        link("7", "a", "x", LinkKind::Terminal, 0.5),
        link("8", "x", "a", LinkKind::Terminal, 0.5),
        link("9", "b", "y", LinkKind::Terminal, 0.5),
        link("10", "y", "b", LinkKind::Terminal, 0.5),
    ];
    links.extend(track("11", "12", "x", "y", 90.0, 1.5, 10.0));
    let net = Network::new(
        vec![
            Node::new("A", NodeKind::Centroid),
            Node::new("a", NodeKind::RoadJunction),
            Node::new("x", NodeKind::RailJunction),
            Node::new("y", NodeKind::RailJunction),
            Node::new("b", NodeKind::RoadJunction),
            Node::new("B", NodeKind::Centroid),
        ],
        links,
    );
    let q = ClassDemand::new(0.0, 0.0, 12.0);
    (net, demand(&[("A", "B", q), ("B", "A", q)]))
}

/// Two twinned tracks between two rail junctions and equal rail demand in
/// both directions. Only the combined flow on each track is determined at
/// equilibrium; how it divides between the directions is not.
pub fn shared_rail_tracks() -> (Network, DemandTable) {
    let mut links = vec![
        link("1", "A", "x", LinkKind::RailConnector, 0.1),
        link("2", "x", "A", LinkKind::RailConnector, 0.1),
        link("3", "B", "y", LinkKind::RailConnector, 0.1),
        link("4", "y", "B", LinkKind::RailConnector, 0.1),
    ];
    links.extend(track("5", "6", "x", "y", 100.0, 2.0, 10.0));
    links.extend(track("7", "8", "x", "y", 150.0, 3.0, 20.0));
    let net = Network::new(
        vec![
            Node::new("A", NodeKind::Centroid),
            Node::new("x", NodeKind::RailJunction),
            Node::new("y", NodeKind::RailJunction),
            Node::new("B", NodeKind::Centroid),
        ],
        links,
    );
    let q = ClassDemand::new(0.0, 12.0, 0.0);
    (net, demand(&[("A", "B", q), ("B", "A", q)]))
}

/// A short fast track and a long slow track between two rail junctions.
/// At the default penalty rate the fast track runs over capacity.
pub fn congested_rail_corridor() -> (Network, DemandTable) {
    let mut links =
        vec![link("1", "A", "x", LinkKind::RailConnector, 0.1), link("2", "y", "B", LinkKind::RailConnector, 0.1)];
    links.extend(track("11", "12", "x", "y", 60.0, 1.0, 10.0));
    links.extend(track("21", "22", "x", "y", 180.0, 3.0, 50.0));
    let net = Network::new(
        vec![
            Node::new("A", NodeKind::Centroid),
            Node::new("x", NodeKind::RailJunction),
            Node::new("y", NodeKind::RailJunction),
            Node::new("B", NodeKind::Centroid),
        ],
        links,
    );
    (net, demand(&[("A", "B", ClassDemand::new(0.0, 20.0, 0.0))]))
}

/// A single rail track far below capacity.
pub fn uncongested_rail_line() -> (Network, DemandTable) {
    let mut links =
        vec![link("1", "A", "x", LinkKind::RailConnector, 0.1), link("2", "y", "B", LinkKind::RailConnector, 0.1)];
    links.extend(track("11", "12", "x", "y", 60.0, 1.0, 1000.0));
    let net = Network::new(
        vec![
            Node::new("A", NodeKind::Centroid),
            Node::new("x", NodeKind::RailJunction),
            Node::new("y", NodeKind::RailJunction),
            Node::new("B", NodeKind::Centroid),
        ],
        links,
    );
    (net, demand(&[("A", "B", ClassDemand::new(0.0, 5.0, 0.0))]))
}

pub const GRID_SIZE: usize = 5;
pub const GRID_CENTROIDS: usize = 20;
const GRID_SPACING_MILES: f64 = 50.0;
const GRID_SPACING_DEG: f64 = 0.7;
const RAIL_ROWS: [usize; 2] = [1, 3];
const TERMINAL_COLS: [usize; 3] = [0, 2, 4];

fn grid_pos(i: usize, j: usize) -> (f64, f64) {
    (-95.0 + j as f64 * GRID_SPACING_DEG, 33.0 + i as f64 * GRID_SPACING_DEG)
}

/// Grid cell of centroid `k`: every road junction outside the middle row.
fn centroid_cell(k: usize) -> (usize, usize) {
    let row = [0, 1, 3, 4][k / GRID_SIZE];
    (row, k % GRID_SIZE)
}

/// A 5 x 5 road grid with two east-west rail lines joined by a north-south
/// spur, six intermodal terminals and 20 centroids, loaded well past
/// capacity with all three demand classes.
pub fn congested_grid() -> (Network, DemandTable) {
    let mut nodes = Vec::new();
    let mut links = Vec::new();
    let mut next_id = 1u32;
    let mut id = || {
        let s = next_id.to_string();
        next_id += 1;
        s
    };
    let r = |i: usize, j: usize| format!("r{i}{j}");
    let l = |i: usize, j: usize| format!("l{i}{j}");

    for i in 0..GRID_SIZE {
        for j in 0..GRID_SIZE {
            let (lon, lat) = grid_pos(i, j);
            nodes.push(Node::new(r(i, j), NodeKind::RoadJunction).at(lon, lat));
        }
    }
    let road_t0 = GRID_SPACING_MILES / 55.0;
    let cap_scale = [1.0, 1.5, 0.8, 1.2, 0.6];
    for i in 0..GRID_SIZE {
        for j in 0..GRID_SIZE {
            let mut neighbours = Vec::new();
            if j + 1 < GRID_SIZE {
                neighbours.push((i, j + 1));
            }
            if i + 1 < GRID_SIZE {
                neighbours.push((i + 1, j));
            }
            for (p, q) in neighbours {
                let cap = 600.0 * cap_scale[(i + 2 * j + p + q) % cap_scale.len()];
                links.push(road(&id(), &r(i, j), &r(p, q), GRID_SPACING_MILES, road_t0, cap));
                links.push(road(&id(), &r(p, q), &r(i, j), GRID_SPACING_MILES, road_t0, cap));
            }
        }
    }

    let rail_t0 = GRID_SPACING_MILES / 60.0;
    let mut rail_nodes: Vec<(usize, usize)> =
        RAIL_ROWS.iter().flat_map(|&i| (0..GRID_SIZE).map(move |j| (i, j))).collect();
    rail_nodes.push((2, 2));
    for &(i, j) in &rail_nodes {
        let (lon, lat) = grid_pos(i, j);
        nodes.push(Node::new(l(i, j), NodeKind::RailJunction).at(lon + 0.1, lat - 0.1));
    }
    let mut rail_edges: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for &i in &RAIL_ROWS {
        for j in 0..GRID_SIZE - 1 {
            rail_edges.push(((i, j), (i, j + 1)));
        }
    }
    rail_edges.push(((1, 2), (2, 2)));
    rail_edges.push(((2, 2), (3, 2)));
    for (a, b) in rail_edges {
        let (fwd, rev) = (id(), id());
        links.extend(track(&fwd, &rev, &l(a.0, a.1), &l(b.0, b.1), GRID_SPACING_MILES, rail_t0, 40.0));
    }
    for &i in &RAIL_ROWS {
        for &j in &TERMINAL_COLS {
            links.push(link(&id(), &r(i, j), &l(i, j), LinkKind::Terminal, 1.0));
            links.push(link(&id(), &l(i, j), &r(i, j), LinkKind::Terminal, 1.0));
        }
    }

    for k in 0..GRID_CENTROIDS {
        let (i, j) = centroid_cell(k);
        let z = format!("z{k}");
        let (lon, lat) = grid_pos(i, j);
        nodes.push(Node::new(z.clone(), NodeKind::Centroid).at(lon - 0.1, lat + 0.1));
        let mut c = link(&id(), &z, &r(i, j), LinkKind::RoadConnector, 0.1);
        c.length = 5.0;
        let mut back = link(&id(), &r(i, j), &z, LinkKind::RoadConnector, 0.1);
        back.length = 5.0;
        links.extend([c, back]);
        if RAIL_ROWS.contains(&i) {
            links.push(link(&id(), &z, &l(i, j), LinkKind::RailConnector, 0.2));
            links.push(link(&id(), &l(i, j), &z, LinkKind::RailConnector, 0.2));
        }
    }
    let net = Network::new(nodes, links);

    let mut table = DemandTable::new();
    for o in 0..GRID_CENTROIDS {
        for d in 0..GRID_CENTROIDS {
            if o == d {
                continue;
            }
            let h = (o * 7 + d * 11) % 13;
            let (oi, oj) = centroid_cell(o);
            let (di, dj) = centroid_cell(d);
            let mut q = ClassDemand::default();
            if h < 8 {
                q.truck = 60.0 + 20.0 * (h % 5) as f64;
            }
            if RAIL_ROWS.contains(&oi) && RAIL_ROWS.contains(&di) && h % 3 == 0 {
                q.rail = 4.0 + (h % 4) as f64;
            }
            if oi.abs_diff(di) + oj.abs_diff(dj) >= 5 && h % 2 == 0 {
                q.intermodal = 8.0 + 2.0 * (h % 3) as f64;
            }
            if !q.is_zero() {
                table.add(&format!("z{o}"), &format!("z{d}"), q).expect("fixture demand is valid");
            }
        }
    }
    (net, table)
}

/// (free-flow hours, capacity) of the parallel road trunks.
const CORRIDOR_TRUNKS: [(f64, f64); 5] = [(4.0, 700.0), (4.2, 1200.0), (4.5, 900.0), (4.8, 1400.0), (5.5, 1000.0)];
const CORRIDOR_TRACKS: [(f64, f64); 2] = [(4.0, 120.0), (4.6, 120.0)];
const CORRIDOR_TERMINAL_HOURS: f64 = 1.5;

/// Ten western and ten eastern centroids joined by five parallel road
/// trunks and two rail tracks, with a terminal at each end. Every truck
/// O-D pair crosses the corridor; even-numbered centroids also have rail
/// access. At equilibrium every trunk carries flow and most run over
/// capacity. The terminal delay keeps intermodal shipments on the road.
pub fn intermodal_corridor() -> (Network, DemandTable) {
    intermodal_corridor_with_terminals(CORRIDOR_TERMINAL_HOURS)
}

/// The corridor with a different terminal delay. Below about one hour
/// intermodal shipments start to use the rail tracks.
pub fn intermodal_corridor_with_terminals(terminal_hours: f64) -> (Network, DemandTable) {
    let mut nodes = vec![
        Node::new("W", NodeKind::RoadJunction).at(-100.0, 40.0),
        Node::new("E", NodeKind::RoadJunction).at(-90.0, 40.0),
        Node::new("LW", NodeKind::RailJunction).at(-100.0, 39.8),
        Node::new("LE", NodeKind::RailJunction).at(-90.0, 39.8),
    ];
    let mut links = Vec::new();
    let mut next_id = 1u32;
    let mut id = || {
        let s = next_id.to_string();
        next_id += 1;
        s
    };
    for (t0, cap) in CORRIDOR_TRUNKS {
        links.push(road(&id(), "W", "E", t0 * 55.0, t0, cap));
        links.push(road(&id(), "E", "W", t0 * 55.0, t0, cap));
    }
    for (t0, cap) in CORRIDOR_TRACKS {
        let (fwd, rev) = (id(), id());
        links.extend(track(&fwd, &rev, "LW", "LE", t0 * 60.0, t0, cap));
    }
    for (a, b) in [("W", "LW"), ("LW", "W"), ("E", "LE"), ("LE", "E")] {
        links.push(link(&id(), a, b, LinkKind::Terminal, terminal_hours));
    }
    for k in 0..20usize {
        let z = format!("z{k}");
        let (hub, rail_hub, lon) = if k < 10 { ("W", "LW", -101.0) } else { ("E", "LE", -89.0) };
        nodes.push(Node::new(z.clone(), NodeKind::Centroid).at(lon, 38.0 + 0.4 * (k % 10) as f64));
        let t = 0.1 + 0.05 * (k % 5) as f64;
        let mut pair =
            vec![link(&id(), &z, hub, LinkKind::RoadConnector, t), link(&id(), hub, &z, LinkKind::RoadConnector, t)];
        if k % 2 == 0 {
            pair.push(link(&id(), &z, rail_hub, LinkKind::RailConnector, t));
            pair.push(link(&id(), rail_hub, &z, LinkKind::RailConnector, t));
        }
        for mut l in pair {
            l.length = 5.0;
            links.push(l);
        }
    }
    let net = Network::new(nodes, links);

    let mut table = DemandTable::new();
    for o in 0..20usize {
        for d in 0..20usize {
            if (o < 10) == (d < 10) {
                continue;
            }
            let h = (o * 7 + d * 11) % 13;
            let mut q = ClassDemand::new(40.0 + 10.0 * (h % 5) as f64, 0.0, 0.0);
            if o % 2 == 0 && d % 2 == 0 {
                q.rail = 0.4 * (1 + h % 3) as f64;
            }
            if h % 2 == 0 {
                q.intermodal = 6.0 + 2.0 * (h % 4) as f64;
            }
            table.add(&format!("z{o}"), &format!("z{d}"), q).expect("fixture demand is valid");
        }
    }
    (net, table)
}

/// Illustrative factor tables for the figure-one network. Not FAF values.
pub fn sample_factor_tables() -> FactorTables {
    FactorTables {
        truck_allocation: vec![
            DistanceRange {
                min_miles: 0.0,
                max_miles: Some(100.0),
                shares: [("single_unit".to_string(), 0.6), ("combination".to_string(), 0.4)].into(),
            },
            DistanceRange {
                min_miles: 100.0,
                max_miles: Some(500.0),
                shares: [("single_unit".to_string(), 0.2), ("combination".to_string(), 0.8)].into(),
            },
            DistanceRange {
                min_miles: 500.0,
                max_miles: None,
                shares: [("single_unit".to_string(), 0.05), ("combination".to_string(), 0.95)].into(),
            },
        ],
        truck_equivalency: vec![
            TruckEquivalency {
                truck_type: "single_unit".into(),
                body_type: "van".into(),
                tons_per_truck: 8.0,
                share: 0.7,
            },
            TruckEquivalency {
                truck_type: "single_unit".into(),
                body_type: "flatbed".into(),
                tons_per_truck: 10.0,
                share: 0.3,
            },
            TruckEquivalency {
                truck_type: "combination".into(),
                body_type: "van".into(),
                tons_per_truck: 18.0,
                share: 0.6,
            },
            TruckEquivalency {
                truck_type: "combination".into(),
                body_type: "tank".into(),
                tons_per_truck: 22.0,
                share: 0.4,
            },
        ],
        empty_truck: [("single_unit".to_string(), 0.25), ("combination".to_string(), 0.15)].into(),
        rail_groups: RailGroups {
            commodity_groups: [
                ("coal".to_string(), "bulk".to_string()),
                ("grain".to_string(), "bulk".to_string()),
                ("chemicals".to_string(), "liquid".to_string()),
            ]
            .into(),
            tons_per_trainload: [("bulk".to_string(), 9000.0), ("liquid".to_string(), 6000.0)].into(),
        },
        intermodal_eligible: ["electronics".to_string(), "machinery".to_string()].into(),
        container_load: Some(16.0),
        train_length: Some(200.0),
        ..FactorTables::default()
    }
}

pub fn sample_records() -> Vec<ShipmentRecord> {
    let rec = |o: &str, d: &str, c: &str, tons: f64, m: ModeCategory| ShipmentRecord {
        origin: o.into(),
        destination: d.into(),
        commodity: c.into(),
        tons_per_year: tons,
        mode_category: m,
    };
    vec![
        rec("O", "D", "electronics", 250_000.0, ModeCategory::Truck),
        rec("O", "D", "grain", 180_000.0, ModeCategory::Truck),
        rec("O", "D", "coal", 2_500_000.0, ModeCategory::Rail),
        rec("O", "D", "chemicals", 900_000.0, ModeCategory::Rail),
        rec("O", "D", "electronics", 60_000.0, ModeCategory::MultipleModesAndMail),
        rec("O", "D", "grain", 40_000.0, ModeCategory::MultipleModesAndMail),
    ]
}
