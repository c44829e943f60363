//! Network tables: a directory holding `nodes.csv` and `links.csv`, or one
//! JSON document with `nodes` and `links` arrays. Both carry the same
//! columns.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::network::{
    free_flow_time_from_speed, Link, LinkKind, Network, Node, NodeKind, RailCapacityTable, RAIL_DEFAULT_SPEED_MPH,
};

use super::{csv_bytes, csv_reader, read_to_string, write_atomic, IoError};

pub const NODES_FILE: &str = "nodes.csv";
pub const LINKS_FILE: &str = "links.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    pub kind: String,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_flow_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Used for free-flow time when `free_flow_time` is blank.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_limit: Option<f64>,
    /// With `control_type`, looks up rail capacity when `capacity` is blank.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tracks: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_type: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDoc {
    nodes: Vec<NodeRecord>,
    links: Vec<LinkRecord>,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub rail_capacity: Option<RailCapacityTable>,
}

fn blank(s: &Option<String>) -> Option<&str> {
    s.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

impl NodeRecord {
    fn into_node(self) -> Result<Node, String> {
        let kind: NodeKind = self.kind.parse().map_err(|e: crate::network::NetworkError| e.to_string())?;
        let mut node = Node::new(self.id, kind);
        match (self.lon, self.lat) {
            (Some(lon), Some(lat)) => node.coords = Some((lon, lat)),
            (None, None) => {}
            _ => return Err(format!("node {}: lon and lat must be given together", node.id)),
        }
        Ok(node)
    }

    fn from_node(n: &Node) -> Self {
        NodeRecord {
            id: n.id.clone(),
            kind: n.kind.as_str().to_string(),
            lon: n.coords.map(|c| c.0),
            lat: n.coords.map(|c| c.1),
        }
    }
}

impl LinkRecord {
    fn into_link(self, opts: &IngestOptions) -> Result<Link, String> {
        let kind: LinkKind = self.kind.parse().map_err(|e: crate::network::NetworkError| e.to_string())?;
        let id = self.id;
        let free_flow_time = match (self.free_flow_time, self.speed_limit, kind) {
            (Some(t), _, _) => t,
            (None, Some(v), _) => free_flow_time_from_speed(self.length, v).map_err(|e| format!("link {id}: {e}"))?,
            (None, None, LinkKind::Rail) => {
                free_flow_time_from_speed(self.length, RAIL_DEFAULT_SPEED_MPH).map_err(|e| format!("link {id}: {e}"))?
            }
            (None, None, _) => return Err(format!("link {id}: free_flow_time or speed_limit is required")),
        };
        let capacity = match (self.capacity, kind) {
            (Some(c), _) => Some(c),
            (None, LinkKind::Rail) => match (self.tracks, blank(&self.control_type)) {
                (Some(tracks), Some(control)) => {
                    let table = opts
                        .rail_capacity
                        .as_ref()
                        .ok_or_else(|| format!("link {id}: capacity is blank and no rail capacity table was given"))?;
                    Some(table.lookup(control, tracks).ok_or_else(|| {
                        format!("link {id}: no rail capacity entry for control type '{control}' with {tracks} tracks")
                    })?)
                }
                _ => None,
            },
            (None, _) => None,
        };
        Ok(Link {
            twin: blank(&self.twin_id).map(str::to_string),
            id,
            from: self.from,
            to: self.to,
            kind,
            length: self.length,
            free_flow_time,
            capacity,
            beta: self.beta,
        })
    }

    fn from_link(l: &Link) -> Self {
        LinkRecord {
            id: l.id.clone(),
            from: l.from.clone(),
            to: l.to.clone(),
            kind: l.kind.as_str().to_string(),
            length: l.length,
            free_flow_time: Some(l.free_flow_time),
            capacity: l.capacity,
            twin_id: l.twin.clone(),
            beta: l.beta,
            speed_limit: None,
            tracks: None,
            control_type: None,
        }
    }
}

fn read_table<T: DeserializeOwned>(path: &Path) -> Result<Vec<(u64, T)>, IoError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers().map_err(|e| IoError::csv(path, e))?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IoError::csv(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec.deserialize(Some(&headers)).map_err(|e| IoError::csv(path, e))?;
        out.push((line, row));
    }
    Ok(out)
}

fn build(
    nodes: Vec<(u64, NodeRecord)>,
    links: Vec<(u64, LinkRecord)>,
    nodes_path: &Path,
    links_path: &Path,
    opts: &IngestOptions,
) -> Result<Network, IoError> {
    let parse_err =
        |path: &Path, line: u64, message: String| IoError::Parse { path: path.to_path_buf(), line, message };
    let nodes = nodes
        .into_iter()
        .map(|(line, r)| r.into_node().map_err(|m| parse_err(nodes_path, line, m)))
        .collect::<Result<Vec<_>, _>>()?;
    let links = links
        .into_iter()
        .map(|(line, r)| r.into_link(opts).map_err(|m| parse_err(links_path, line, m)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Network::new(nodes, links))
}

/// Reads a network directory (`nodes.csv`, `links.csv`) or a `.json`
/// document. The result is not validated.
pub fn read_network(path: &Path, opts: &IngestOptions) -> Result<Network, IoError> {
    if path.is_dir() {
        let nodes_path = path.join(NODES_FILE);
        let links_path = path.join(LINKS_FILE);
        let nodes = read_table(&nodes_path)?;
        let links = read_table(&links_path)?;
        return build(nodes, links, &nodes_path, &links_path, opts);
    }
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = read_to_string(path)?;
        let doc: NetworkDoc = serde_json::from_str(&text).map_err(|e| IoError::json(path, e))?;
        // JSON rows are numbered by array position
        let nodes = doc.nodes.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r)).collect();
        let links = doc.links.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r)).collect();
        return build(nodes, links, path, path, opts);
    }
    if !path.exists() {
        return Err(IoError::io(path, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    Err(IoError::format(path, "expected a directory with nodes.csv and links.csv, or a .json file"))
}

fn num(x: f64) -> String {
    // shortest representation that parses back to the same value
    x.to_string()
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes `nodes.csv` and `links.csv` into `dir`. Floats keep full
/// precision so the tables read back to an identical network.
pub fn write_network_csv(dir: &Path, net: &Network) -> Result<(), IoError> {
    let nodes = csv_bytes(
        &["id", "kind", "lon", "lat"],
        net.nodes().iter().map(|n| {
            vec![
                n.id.clone(),
                n.kind.as_str().to_string(),
                opt_num(n.coords.map(|c| c.0)),
                opt_num(n.coords.map(|c| c.1)),
            ]
        }),
    );
    let links = csv_bytes(
        &["id", "from", "to", "kind", "length", "free_flow_time", "capacity", "twin_id", "beta"],
        net.links().iter().map(|l| {
            vec![
                l.id.clone(),
                l.from.clone(),
                l.to.clone(),
                l.kind.as_str().to_string(),
                num(l.length),
                num(l.free_flow_time),
                opt_num(l.capacity),
                l.twin.clone().unwrap_or_default(),
                opt_num(l.beta),
            ]
        }),
    );
    write_atomic(&dir.join(NODES_FILE), &nodes)?;
    write_atomic(&dir.join(LINKS_FILE), &links)
}

pub fn write_network_json(path: &Path, net: &Network) -> Result<(), IoError> {
    let doc = NetworkDoc {
        nodes: net.nodes().iter().map(NodeRecord::from_node).collect(),
        links: net.links().iter().map(LinkRecord::from_link).collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| IoError::json(path, e))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}
