mod common;

use std::collections::BTreeSet;

use freight_assign::io::{read_network, write_network_csv, write_network_json, IngestOptions};
use freight_assign::{synthetic, Link, LinkKind, Mode, Network, Node, NodeKind};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Spec {
    road: Vec<(usize, usize, f64, f64)>,
    rail: Vec<(usize, usize, f64, f64, Option<f64>)>,
    terminals: Vec<(usize, f64)>,
    coords: Option<Vec<(f64, f64)>>,
}

const ROAD_NODES: usize = 4;
const RAIL_NODES: usize = 3;

fn build(spec: &Spec) -> Network {
    let mut nodes = vec![Node::new("A", NodeKind::Centroid), Node::new("B", NodeKind::Centroid)];
    nodes.extend((0..ROAD_NODES).map(|i| Node::new(format!("r{i}"), NodeKind::RoadJunction)));
    nodes.extend((0..RAIL_NODES).map(|i| Node::new(format!("l{i}"), NodeKind::RailJunction)));
    if let Some(c) = &spec.coords {
        for (n, (lon, lat)) in nodes.iter_mut().zip(c) {
            n.coords = Some((*lon, *lat));
        }
    }
    let mut links = vec![
        Link::new("ca", "A", "r0", LinkKind::RoadConnector, 1.5, 0.05),
        Link::new("cb", "r1", "B", LinkKind::RoadConnector, 2.5, 0.05),
        Link::new("ka", "A", "l0", LinkKind::RailConnector, 1.0, 0.2),
        Link::new("kb", "l1", "B", LinkKind::RailConnector, 1.0, 0.2),
    ];
    for (k, &(u, v, t, c)) in spec.road.iter().enumerate() {
        if u != v {
            links.push(
                Link::new(format!("road{k}"), format!("r{u}"), format!("r{v}"), LinkKind::Road, t * 50.0, t)
                    .with_capacity(c),
            );
        }
    }
    for (k, &(u, v, t, c, beta)) in spec.rail.iter().enumerate() {
        if u != v {
            let (f, b) = (format!("rail{k}"), format!("rail{k}'"));
            let mut fwd = Link::new(&f, format!("l{u}"), format!("l{v}"), LinkKind::Rail, t * 60.0, t)
                .with_capacity(c)
                .with_twin(&b);
            let mut rev = Link::new(&b, format!("l{v}"), format!("l{u}"), LinkKind::Rail, t * 60.0, t)
                .with_capacity(c)
                .with_twin(&f);
            fwd.beta = beta;
            rev.beta = beta;
            links.push(fwd);
            links.push(rev);
        }
    }
    for (k, &(i, t)) in spec.terminals.iter().enumerate() {
        links.push(Link::new(format!("t{k}a"), format!("r{i}"), format!("l{i}"), LinkKind::Terminal, 0.0, t));
        links.push(Link::new(format!("t{k}b"), format!("l{i}"), format!("r{i}"), LinkKind::Terminal, 0.0, t));
    }
    Network::new(nodes, links)
}

fn spec_strategy() -> impl Strategy<Value = Spec> {
    (
        prop::collection::vec((0..ROAD_NODES, 0..ROAD_NODES, 0.01f64..9.0, 1.0f64..5000.0), 1..8),
        prop::collection::vec(
            (0..RAIL_NODES, 0..RAIL_NODES, 0.01f64..9.0, 1.0f64..200.0, prop::option::of(1.0f64..15.0)),
            1..4,
        ),
        prop::collection::vec((0..RAIL_NODES, 0.0f64..3.0), 0..4),
        prop::option::of(prop::collection::vec((-180.0f64..180.0, -90.0f64..90.0), 2 + ROAD_NODES + RAIL_NODES)),
    )
        .prop_map(|(road, rail, terminals, coords)| Spec { road, rail, terminals, coords })
}

/// Does some enumerated path between the centroids use both a road and a
/// rail link?
fn mixed_path_exists(net: &Network) -> bool {
    common::enumerate_paths(net, Mode::Intermodal, "A", "B").iter().any(|p| {
        let kinds: BTreeSet<LinkKind> = p.iter().map(|&a| net.link(a).kind).collect();
        kinds.contains(&LinkKind::Road) && kinds.contains(&LinkKind::Rail)
    })
}

#[test]
fn mode_set_examples() {
    let net = Network::new(
        vec![
            Node::new("r", NodeKind::RoadJunction),
            Node::new("s", NodeKind::RoadJunction),
            Node::new("l", NodeKind::RailJunction),
            Node::new("m", NodeKind::RailJunction),
        ],
        vec![
            Link::new("road", "r", "s", LinkKind::Road, 1.0, 1.0).with_capacity(10.0),
            Link::new("rail", "l", "m", LinkKind::Rail, 1.0, 1.0).with_capacity(10.0).with_twin("back"),
            Link::new("back", "m", "l", LinkKind::Rail, 1.0, 1.0).with_capacity(10.0).with_twin("rail"),
            Link::new("term", "s", "l", LinkKind::Terminal, 0.0, 0.5),
        ],
    );
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    assert_eq!(net.mode_link_set(Mode::Truck), set(&["road"]));
    assert_eq!(net.mode_link_set(Mode::Intermodal), set(&["road", "rail", "back", "term"]));
    let restricted = net.with_restricted_links(["rail", "back"]);
    assert!(restricted.mode_link_set(Mode::Rail).is_empty());
}

#[test]
fn twin_lookup_errors_on_road() {
    let net = synthetic::figure_one_chain();
    assert_eq!(net.twin_of("4").unwrap(), "5");
    assert_eq!(net.twin_of("5").unwrap(), "4");
    assert!(net.twin_of("2").is_err());
    assert!(net.twin_of("missing").is_err());
}

#[test]
fn fixtures_round_trip_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for (k, net) in [synthetic::figure_one_chain(), synthetic::congested_grid().0, synthetic::intermodal_corridor().0]
        .into_iter()
        .enumerate()
    {
        let csv_dir = dir.path().join(format!("net{k}"));
        write_network_csv(&csv_dir, &net).unwrap();
        assert_eq!(read_network(&csv_dir, &IngestOptions::default()).unwrap(), net);
        let json = dir.path().join(format!("net{k}.json"));
        write_network_json(&json, &net).unwrap();
        assert_eq!(read_network(&json, &IngestOptions::default()).unwrap(), net);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_networks_are_valid_and_mode_sets_partition(spec in spec_strategy()) {
        let net = build(&spec);
        prop_assert!(net.validate().is_valid(), "{}", net.validate());
        let truck = net.mode_link_set(Mode::Truck);
        let rail = net.mode_link_set(Mode::Rail);
        let all = net.mode_link_set(Mode::Intermodal);
        prop_assert!(truck.is_disjoint(&rail));
        prop_assert!(truck.is_subset(&all) && rail.is_subset(&all));
    }

    #[test]
    fn twin_is_a_fixed_point_free_involution(spec in spec_strategy()) {
        let net = build(&spec);
        for l in net.links().iter().filter(|l| l.kind == LinkKind::Rail) {
            let t = net.twin_of(&l.id).unwrap();
            prop_assert_ne!(t, l.id.as_str());
            prop_assert_eq!(net.twin_of(t).unwrap(), l.id.as_str());
        }
    }

    #[test]
    fn terminals_are_the_only_road_rail_bridge(spec in spec_strategy()) {
        let net = build(&spec);
        let terminals: Vec<String> = net.links().iter().filter(|l| l.kind == LinkKind::Terminal).map(|l| l.id.clone()).collect();
        let cut = net.clone().with_restricted_links(terminals);
        prop_assert!(!mixed_path_exists(&cut));
    }

    #[test]
    fn random_networks_round_trip(spec in spec_strategy()) {
        let net = build(&spec);
        let dir = tempfile::tempdir().unwrap();
        write_network_csv(&dir.path().join("csv"), &net).unwrap();
        prop_assert_eq!(&read_network(&dir.path().join("csv"), &IngestOptions::default()).unwrap(), &net);
        write_network_json(&dir.path().join("net.json"), &net).unwrap();
        prop_assert_eq!(&read_network(&dir.path().join("net.json"), &IngestOptions::default()).unwrap(), &net);
    }
}
