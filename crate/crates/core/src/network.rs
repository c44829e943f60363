//! Intermodal network graph: centroids, road and rail junctions joined by
//! road, rail, terminal and connector links.
//!
//! A [`Network`] can be built from arbitrary node/link tables. Structural
//! problems are reported by [`Network::validate`] rather than at
//! construction, so a malformed input file can still be loaded and
//! diagnosed. Everything downstream (shortest paths, the solvers) calls
//! [`Network::ensure_valid`] first.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default freight train speed used when a rail link has no explicit
/// free-flow time.
pub const RAIL_DEFAULT_SPEED_MPH: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Centroid,
    RoadJunction,
    RailJunction,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Centroid => "centroid",
            NodeKind::RoadJunction => "road_junction",
            NodeKind::RailJunction => "rail_junction",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "centroid" => Ok(NodeKind::Centroid),
            "road_junction" => Ok(NodeKind::RoadJunction),
            "rail_junction" => Ok(NodeKind::RailJunction),
            other => Err(NetworkError::UnknownNodeKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Road,
    Rail,
    Terminal,
    RoadConnector,
    RailConnector,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Road => "road",
            LinkKind::Rail => "rail",
            LinkKind::Terminal => "terminal",
            LinkKind::RoadConnector => "road_connector",
            LinkKind::RailConnector => "rail_connector",
        }
    }

    /// Links whose travel time depends on flow.
    pub fn is_congestible(self) -> bool {
        matches!(self, LinkKind::Road | LinkKind::Rail)
    }

    pub fn is_connector(self) -> bool {
        matches!(self, LinkKind::RoadConnector | LinkKind::RailConnector)
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinkKind {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "road" => Ok(LinkKind::Road),
            "rail" => Ok(LinkKind::Rail),
            "terminal" => Ok(LinkKind::Terminal),
            "road_connector" => Ok(LinkKind::RoadConnector),
            "rail_connector" => Ok(LinkKind::RailConnector),
            other => Err(NetworkError::UnknownLinkKind(other.to_string())),
        }
    }
}

/// Demand class, which also selects the sub-network a path may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Truck,
    Rail,
    Intermodal,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Truck, Mode::Rail, Mode::Intermodal];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Truck => "truck",
            Mode::Rail => "rail",
            Mode::Intermodal => "intermodal",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "truck" => Ok(Mode::Truck),
            "rail" => Ok(Mode::Rail),
            "intermodal" => Ok(Mode::Intermodal),
            other => Err(NetworkError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// (lon, lat) in WGS84 degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<(f64, f64)>,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        Node { id: id.into(), kind, coords: None }
    }

    pub fn at(mut self, lon: f64, lat: f64) -> Self {
        self.coords = Some((lon, lat));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub id: String,
    pub from: String,
    pub to: String,
    pub kind: LinkKind,
    /// Miles.
    pub length: f64,
    /// Hours. For terminal links this is the fixed transfer delay.
    pub free_flow_time: f64,
    /// Vehicles or trains per day; unused for terminal and connector links.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    /// Opposite-direction link on the same track (rail only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin: Option<String>,
    /// Per-link override of the rail penalty rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl Link {
    pub fn new(
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        kind: LinkKind,
        length: f64,
        free_flow_time: f64,
    ) -> Self {
        Link {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            kind,
            length,
            free_flow_time,
            capacity: None,
            twin: None,
            beta: None,
        }
    }

    pub fn with_capacity(mut self, capacity: f64) -> Self {
        self.capacity = Some(capacity);
        self
    }

    pub fn with_twin(mut self, twin: impl Into<String>) -> Self {
        self.twin = Some(twin.into());
        self
    }
}

/// Free-flow time in hours from a length in miles and a speed in mph.
pub fn free_flow_time_from_speed(length: f64, speed_mph: f64) -> Result<f64, NetworkError> {
    if !(speed_mph > 0.0 && speed_mph.is_finite()) {
        return Err(NetworkError::InvalidSpeed(speed_mph));
    }
    if !(length >= 0.0 && length.is_finite()) {
        return Err(NetworkError::InvalidLength(length));
    }
    Ok(length / speed_mph)
}

/// User-supplied rail capacity lookup: (control type, track count) to
/// trains per day.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RailCapacityTable {
    pub entries: Vec<RailCapacityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RailCapacityEntry {
    pub control_type: String,
    pub tracks: u32,
    pub trains_per_day: f64,
}

impl RailCapacityTable {
    pub fn lookup(&self, control_type: &str, tracks: u32) -> Option<f64> {
        self.entries.iter().find(|e| e.control_type == control_type && e.tracks == tracks).map(|e| e.trains_per_day)
    }
}

/// Orders identifiers numerically when both parse as integers, and
/// lexicographically otherwise. Integer ids sort before non-integer ones.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateNodeId(String),
    DuplicateLinkId(String),
    UnknownEndpoint { link: String, node: String },
    SelfLoop { link: String },
    InvalidLength { link: String },
    InvalidFreeFlowTime { link: String },
    MissingCapacity { link: String },
    InvalidBeta { link: String },
    TerminalEndpoints { link: String },
    ConnectorEndpoints { link: String },
    PhysicalLinkEndpoints { link: String },
    MissingTwin { link: String },
    TwinNotFound { link: String, twin: String },
    TwinNotRail { link: String, twin: String },
    TwinNotSymmetric { link: String, twin: String },
    TwinNotOpposite { link: String, twin: String },
    TwinPropertyMismatch { link: String, twin: String },
    TwinOnNonRail { link: String },
    UnknownRestrictedLink(String),
    WhitelistNotTerminal { origin: String, destination: String, link: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateNodeId(id) => write!(f, "node {id}: duplicate id"),
            DuplicateLinkId(id) => write!(f, "link {id}: duplicate id"),
            UnknownEndpoint { link, node } => write!(f, "link {link}: endpoint {node} is not a node"),
            SelfLoop { link } => write!(f, "link {link}: starts and ends at the same node"),
            InvalidLength { link } => write!(f, "link {link}: length must be finite and >= 0"),
            InvalidFreeFlowTime { link } => write!(f, "link {link}: free_flow_time out of range"),
            MissingCapacity { link } => write!(f, "link {link}: road/rail link needs a capacity > 0"),
            InvalidBeta { link } => write!(f, "link {link}: beta override must be >= 1"),
            TerminalEndpoints { link } => {
                write!(f, "link {link}: terminal link must join a road junction and a rail junction")
            }
            ConnectorEndpoints { link } => {
                write!(f, "link {link}: connector must join a centroid to a junction of its mode")
            }
            PhysicalLinkEndpoints { link } => {
                write!(f, "link {link}: road/rail link must join two junctions of its own mode")
            }
            MissingTwin { link } => write!(f, "link {link}: rail link has no twin"),
            TwinNotFound { link, twin } => write!(f, "link {link}: twin {twin} does not exist"),
            TwinNotRail { link, twin } => write!(f, "link {link}: twin {twin} is not a rail link"),
            TwinNotSymmetric { link, twin } => {
                write!(f, "link {link}: twin {twin} does not name {link} back")
            }
            TwinNotOpposite { link, twin } => {
                write!(f, "link {link}: twin {twin} does not run in the opposite direction")
            }
            TwinPropertyMismatch { link, twin } => {
                write!(f, "link {link}: twin {twin} differs in length, free_flow_time, capacity or beta")
            }
            TwinOnNonRail { link } => write!(f, "link {link}: only rail links may have a twin"),
            UnknownRestrictedLink(id) => write!(f, "restricted link {id} does not exist"),
            WhitelistNotTerminal { origin, destination, link } => {
                write!(f, "terminal whitelist for {origin}->{destination}: {link} is not a terminal link")
            }
        }
    }
}

/// Every invariant breach found in a network. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "network is valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("unknown node kind '{0}'")]
    UnknownNodeKind(String),
    #[error("unknown link kind '{0}'")]
    UnknownLinkKind(String),
    #[error("unknown mode '{0}'")]
    UnknownMode(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("unknown link '{0}'")]
    UnknownLink(String),
    #[error("link '{0}' is not a rail link")]
    NotRail(String),
    #[error("rail link '{0}' has no twin")]
    NoTwin(String),
    #[error("speed must be positive and finite, got {0}")]
    InvalidSpeed(f64),
    #[error("length must be non-negative and finite, got {0}")]
    InvalidLength(f64),
    #[error("network is invalid:\n{0}")]
    Invalid(ValidationReport),
}

/// The intermodal network. Immutable once built; restriction hooks are set
/// through the `with_*` builders before solving.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    links: Vec<Link>,
    node_index: HashMap<String, usize>,
    link_index: HashMap<String, usize>,
    /// Resolved (from, to) node indices; `None` when an endpoint is unknown.
    endpoints: Vec<Option<(usize, usize)>>,
    out_links: Vec<Vec<usize>>,
    twin_ix: Vec<Option<usize>>,
    link_rank: Vec<u32>,
    restricted: Vec<bool>,
    unknown_restricted: Vec<String>,
    terminal_whitelist: BTreeMap<(String, String), BTreeSet<String>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.links == other.links
            && self.restricted == other.restricted
            && self.terminal_whitelist == other.terminal_whitelist
    }
}

impl Network {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Self {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            node_index.entry(n.id.clone()).or_insert(i);
        }
        let mut link_index = HashMap::with_capacity(links.len());
        for (i, l) in links.iter().enumerate() {
            link_index.entry(l.id.clone()).or_insert(i);
        }

        let mut order: Vec<usize> = (0..links.len()).collect();
        order.sort_by(|&a, &b| natural_cmp(&links[a].id, &links[b].id).then(a.cmp(&b)));
        let mut link_rank = vec![0u32; links.len()];
        for (rank, &ix) in order.iter().enumerate() {
            link_rank[ix] = rank as u32;
        }

        let endpoints: Vec<Option<(usize, usize)>> =
            links.iter().map(|l| Some((*node_index.get(&l.from)?, *node_index.get(&l.to)?))).collect();

        let mut out_links = vec![Vec::new(); nodes.len()];
        for &ix in &order {
            if let Some((from, _)) = endpoints[ix] {
                out_links[from].push(ix);
            }
        }

        let twin_ix = links.iter().map(|l| l.twin.as_ref().and_then(|t| link_index.get(t).copied())).collect();

        let restricted = vec![false; links.len()];
        Network {
            nodes,
            links,
            node_index,
            link_index,
            endpoints,
            out_links,
            twin_ix,
            link_rank,
            restricted,
            unknown_restricted: Vec::new(),
            terminal_whitelist: BTreeMap::new(),
        }
    }

    /// Excludes the given links from every shortest-path search.
    pub fn with_restricted_links<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for id in ids {
            match self.link_index.get(id.as_ref()) {
                Some(&ix) => self.restricted[ix] = true,
                None => self.unknown_restricted.push(id.as_ref().to_string()),
            }
        }
        self
    }

    /// Restricts the intermodal search for one O-D pair to the given
    /// terminal links.
    pub fn with_terminal_whitelist<I, S>(mut self, origin: &str, destination: &str, terminals: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set = terminals.into_iter().map(|s| s.as_ref().to_string()).collect();
        self.terminal_whitelist.insert((origin.to_string(), destination.to_string()), set);
        self
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node(&self, ix: usize) -> &Node {
        &self.nodes[ix]
    }

    pub fn link(&self, ix: usize) -> &Link {
        &self.links[ix]
    }

    pub fn node_ix(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn link_ix(&self, id: &str) -> Option<usize> {
        self.link_index.get(id).copied()
    }

    /// Resolved (from, to) node indices. Only meaningful on a valid network.
    pub fn endpoints(&self, link: usize) -> (usize, usize) {
        self.endpoints[link].expect("link endpoints resolved on a validated network")
    }

    /// Outgoing links of a node in natural link-id order.
    pub fn out_links(&self, node: usize) -> &[usize] {
        &self.out_links[node]
    }

    pub fn twin_ix(&self, link: usize) -> Option<usize> {
        self.twin_ix[link]
    }

    /// Position of the link in natural id order; used for deterministic
    /// tie-breaking.
    pub fn link_rank(&self, link: usize) -> u32 {
        self.link_rank[link]
    }

    pub fn is_restricted(&self, link: usize) -> bool {
        self.restricted[link]
    }

    pub fn restricted_link_ids(&self) -> Vec<&str> {
        (0..self.links.len()).filter(|&i| self.restricted[i]).map(|i| self.links[i].id.as_str()).collect()
    }

    pub fn terminal_whitelist(&self) -> &BTreeMap<(String, String), BTreeSet<String>> {
        &self.terminal_whitelist
    }

    /// Terminal links allowed for an O-D pair, if that pair is restricted.
    pub fn whitelist_for(&self, origin: &str, destination: &str) -> Option<&BTreeSet<String>> {
        self.terminal_whitelist.get(&(origin.to_string(), destination.to_string()))
    }

    /// Centroid node indices in natural id order.
    pub fn centroids(&self) -> Vec<usize> {
        let mut c: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.nodes[i].kind == NodeKind::Centroid).collect();
        c.sort_by(|&a, &b| natural_cmp(&self.nodes[a].id, &self.nodes[b].id));
        c
    }

    /// Whether a link may carry flow of the given mode, ignoring restrictions.
    pub fn kind_allowed(kind: LinkKind, mode: Mode) -> bool {
        match mode {
            Mode::Truck => matches!(kind, LinkKind::Road | LinkKind::RoadConnector),
            Mode::Rail => matches!(kind, LinkKind::Rail | LinkKind::RailConnector),
            Mode::Intermodal => true,
        }
    }

    pub fn mode_allows(&self, link: usize, mode: Mode) -> bool {
        !self.restricted[link] && Self::kind_allowed(self.links[link].kind, mode)
    }

    /// Ids of the links a path of `mode` may use, after restrictions.
    pub fn mode_link_set(&self, mode: Mode) -> BTreeSet<String> {
        (0..self.links.len()).filter(|&i| self.mode_allows(i, mode)).map(|i| self.links[i].id.clone()).collect()
    }

    /// Opposite-direction rail link on the same track.
    pub fn twin_of(&self, rail_link: &str) -> Result<&str, NetworkError> {
        let ix = self.link_ix(rail_link).ok_or_else(|| NetworkError::UnknownLink(rail_link.to_string()))?;
        if self.links[ix].kind != LinkKind::Rail {
            return Err(NetworkError::NotRail(rail_link.to_string()));
        }
        let twin = self.twin_ix[ix].ok_or_else(|| NetworkError::NoTwin(rail_link.to_string()))?;
        Ok(&self.links[twin].id)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();

        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id.as_str()) {
                v.push(Violation::DuplicateNodeId(n.id.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for l in &self.links {
            if !seen.insert(l.id.as_str()) {
                v.push(Violation::DuplicateLinkId(l.id.clone()));
            }
        }

        for (ix, l) in self.links.iter().enumerate() {
            let link = || l.id.clone();
            for end in [&l.from, &l.to] {
                if !self.node_index.contains_key(end) {
                    v.push(Violation::UnknownEndpoint { link: link(), node: end.clone() });
                }
            }
            if !(l.length >= 0.0 && l.length.is_finite()) {
                v.push(Violation::InvalidLength { link: link() });
            }
            let ff_ok = match l.kind {
                // terminal delays and connector times may be zero
                LinkKind::Terminal | LinkKind::RoadConnector | LinkKind::RailConnector => {
                    l.free_flow_time >= 0.0 && l.free_flow_time.is_finite()
                }
                LinkKind::Road | LinkKind::Rail => l.free_flow_time > 0.0 && l.free_flow_time.is_finite(),
            };
            if !ff_ok {
                v.push(Violation::InvalidFreeFlowTime { link: link() });
            }
            if l.kind.is_congestible() && !matches!(l.capacity, Some(c) if c > 0.0 && c.is_finite()) {
                v.push(Violation::MissingCapacity { link: link() });
            }
            if let Some(b) = l.beta {
                if !(b >= 1.0 && b.is_finite()) {
                    v.push(Violation::InvalidBeta { link: link() });
                }
            }

            if let Some((from, to)) = self.endpoints[ix] {
                if from == to {
                    v.push(Violation::SelfLoop { link: link() });
                }
                let (a, b) = (self.nodes[from].kind, self.nodes[to].kind);
                use NodeKind::*;
                let ok = match l.kind {
                    LinkKind::Road => a == RoadJunction && b == RoadJunction,
                    LinkKind::Rail => a == RailJunction && b == RailJunction,
                    LinkKind::Terminal => {
                        matches!((a, b), (RoadJunction, RailJunction) | (RailJunction, RoadJunction))
                    }
                    LinkKind::RoadConnector => {
                        matches!((a, b), (Centroid, RoadJunction) | (RoadJunction, Centroid))
                    }
                    LinkKind::RailConnector => {
                        matches!((a, b), (Centroid, RailJunction) | (RailJunction, Centroid))
                    }
                };
                if !ok {
                    v.push(match l.kind {
                        LinkKind::Terminal => Violation::TerminalEndpoints { link: link() },
                        LinkKind::RoadConnector | LinkKind::RailConnector => {
                            Violation::ConnectorEndpoints { link: link() }
                        }
                        LinkKind::Road | LinkKind::Rail => Violation::PhysicalLinkEndpoints { link: link() },
                    });
                }
            }

            match (l.kind, &l.twin) {
                (LinkKind::Rail, None) => v.push(Violation::MissingTwin { link: link() }),
                (LinkKind::Rail, Some(twin)) => match self.link_index.get(twin) {
                    None => v.push(Violation::TwinNotFound { link: link(), twin: twin.clone() }),
                    Some(&t) => {
                        let other = &self.links[t];
                        if other.kind != LinkKind::Rail {
                            v.push(Violation::TwinNotRail { link: link(), twin: twin.clone() });
                        } else if other.twin.as_deref() != Some(l.id.as_str()) || t == ix {
                            v.push(Violation::TwinNotSymmetric { link: link(), twin: twin.clone() });
                        } else {
                            if other.from != l.to || other.to != l.from {
                                v.push(Violation::TwinNotOpposite { link: link(), twin: twin.clone() });
                            }
                            if other.length != l.length
                                || other.free_flow_time != l.free_flow_time
                                || other.capacity != l.capacity
                                || other.beta != l.beta
                            {
                                v.push(Violation::TwinPropertyMismatch { link: link(), twin: twin.clone() });
                            }
                        }
                    }
                },
                (_, Some(_)) => v.push(Violation::TwinOnNonRail { link: link() }),
                (_, None) => {}
            }
        }

        for id in &self.unknown_restricted {
            v.push(Violation::UnknownRestrictedLink(id.clone()));
        }
        for ((o, d), set) in &self.terminal_whitelist {
            for t in set {
                let is_terminal = self.link_ix(t).map(|ix| self.links[ix].kind == LinkKind::Terminal).unwrap_or(false);
                if !is_terminal {
                    v.push(Violation::WhitelistNotTerminal {
                        origin: o.clone(),
                        destination: d.clone(),
                        link: t.clone(),
                    });
                }
            }
        }

        ValidationReport { violations: v }
    }

    pub fn ensure_valid(&self) -> Result<(), NetworkError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(NetworkError::Invalid(report))
        }
    }

    pub fn has_coordinates(&self) -> bool {
        !self.nodes.is_empty() && self.nodes.iter().all(|n| n.coords.is_some())
    }
}
