//! Assignment exports: flows CSV, flows GeoJSON, run report JSON and the
//! penalty-rate sweep table.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equilibrium::{
    congested_links, ton_miles_from_flows, AssignmentResult, CongestedLink, EquilibriumError, PayloadFactors, SweepRow,
    TonMiles,
};
use crate::network::{LinkKind, Network};

use super::{csv_bytes, csv_reader, fmt_opt, fmt_sig, write_atomic, IoError};

pub const FLOWS_HEADER: [&str; 6] = ["link_id", "kind", "flow", "capacity", "volume_capacity", "travel_time_hours"];
pub const SWEEP_HEADER: [&str; 4] = ["beta", "link_id", "over_capacity_pct", "travel_time_hours"];

/// One line of the flows table. Rail volume/capacity uses the flow of
/// both directions on the track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRow {
    pub link_id: String,
    pub kind: LinkKind,
    pub flow: f64,
    pub capacity: Option<f64>,
    pub volume_capacity: Option<f64>,
    pub travel_time_hours: f64,
}

pub fn flow_rows(net: &Network, result: &AssignmentResult) -> Result<Vec<FlowRow>, EquilibriumError> {
    let times = result.link_times(net)?;
    Ok(net
        .links()
        .iter()
        .enumerate()
        .map(|(a, link)| {
            let flow = result.link_flows[a];
            let capacity = if link.kind.is_congestible() { link.capacity } else { None };
            let volume = flow + net.twin_ix(a).map_or(0.0, |t| result.link_flows[t]);
            FlowRow {
                link_id: link.id.clone(),
                kind: link.kind,
                flow,
                capacity,
                volume_capacity: capacity.map(|c| volume / c),
                travel_time_hours: times.get(a).unwrap_or(0.0),
            }
        })
        .collect())
}

/// Flow values as they appear in the written file.
fn exported(x: f64) -> f64 {
    fmt_sig(x).parse().expect("formatted float parses")
}

pub fn write_flows_csv(path: &Path, rows: &[FlowRow]) -> Result<(), IoError> {
    let bytes = csv_bytes(
        &FLOWS_HEADER,
        rows.iter().map(|r| {
            vec![
                r.link_id.clone(),
                r.kind.as_str().to_string(),
                fmt_sig(r.flow),
                fmt_opt(r.capacity),
                fmt_opt(r.volume_capacity),
                fmt_sig(r.travel_time_hours),
            ]
        }),
    );
    write_atomic(path, &bytes)
}

pub fn read_flows_csv(path: &Path) -> Result<Vec<FlowRow>, IoError> {
    let mut rdr = csv_reader(path)?;
    rdr.deserialize().map(|r| r.map_err(|e| IoError::csv(path, e))).collect()
}

/// LineString features for links whose endpoints both have coordinates.
/// Returns `false` without writing when no link qualifies.
pub fn write_flows_geojson(path: &Path, net: &Network, rows: &[FlowRow]) -> Result<bool, IoError> {
    let mut features = Vec::new();
    for (a, row) in rows.iter().enumerate() {
        let (from, to) = net.endpoints(a);
        let (Some(p), Some(q)) = (net.node(from).coords, net.node(to).coords) else { continue };
        let num = |x: f64| json!(exported(x));
        let opt = |x: Option<f64>| x.map_or(Value::Null, |v| json!(exported(v)));
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "LineString", "coordinates": [[p.0, p.1], [q.0, q.1]] },
            "properties": {
                "link_id": row.link_id,
                "kind": row.kind.as_str(),
                "flow": num(row.flow),
                "capacity": opt(row.capacity),
                "volume_capacity": opt(row.volume_capacity),
                "travel_time_hours": num(row.travel_time_hours),
            },
        }));
    }
    if features.is_empty() {
        return Ok(false);
    }
    let doc = json!({ "type": "FeatureCollection", "features": features });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| IoError::json(path, e))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)?;
    Ok(true)
}

/// Summary of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub iterations: usize,
    pub converged: bool,
    /// Hours.
    pub normalized_objective: f64,
    pub raw_objective: f64,
    pub objective_trace: Vec<f64>,
    pub gap_trace: Vec<f64>,
    pub wall_clock_seconds: f64,
    /// Computed from the flows as exported, so the report and the flows
    /// file agree.
    pub ton_miles: Option<TonMiles>,
    pub congested_links: Vec<CongestedLink>,
}

impl RunReport {
    pub fn build(
        net: &Network,
        result: &AssignmentResult,
        payload: Option<&PayloadFactors>,
        top_n: usize,
        wall_clock_seconds: f64,
    ) -> Result<Self, EquilibriumError> {
        let ton_miles = match payload {
            Some(p) => {
                let flows: Vec<f64> = result.link_flows.iter().map(|&x| exported(x)).collect();
                Some(ton_miles_from_flows(&flows, net, p)?)
            }
            None => None,
        };
        Ok(RunReport {
            algorithm: result.algorithm.short_name().to_string(),
            iterations: result.iterations,
            converged: result.converged,
            normalized_objective: result.objective.normalized,
            raw_objective: result.objective.raw,
            objective_trace: result.objective_trace.clone(),
            gap_trace: result.gap_trace.clone(),
            wall_clock_seconds,
            ton_miles,
            congested_links: congested_links(net, result, top_n)?,
        })
    }
}

pub fn write_report_json(path: &Path, report: &RunReport) -> Result<(), IoError> {
    let mut bytes = serde_json::to_vec_pretty(report).map_err(|e| IoError::json(path, e))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), IoError> {
    let bytes = csv_bytes(
        &SWEEP_HEADER,
        rows.iter()
            .map(|r| vec![fmt_sig(r.beta), r.link_id.clone(), fmt_sig(r.over_capacity_pct), fmt_sig(r.travel_time)]),
    );
    write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{solve_gp, SolverConfig};
    use crate::synthetic;

    #[test]
    fn flows_csv_round_trip() {
        let (net, demand) = synthetic::two_parallel_links();
        let result = solve_gp(&net, &demand, &SolverConfig::default()).unwrap();
        let rows = flow_rows(&net, &result).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("flows.csv");
        write_flows_csv(&p, &rows).unwrap();
        let back = read_flows_csv(&p).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.link_id, b.link_id);
            assert_eq!(a.kind, b.kind);
            assert_eq!(exported(a.flow), b.flow);
            assert_eq!(a.capacity.is_some(), b.capacity.is_some());
        }
    }

    #[test]
    fn geojson_skipped_without_coordinates() {
        let (net, demand) = synthetic::two_parallel_links();
        let result = solve_gp(&net, &demand, &SolverConfig::default()).unwrap();
        let rows = flow_rows(&net, &result).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.geojson");
        let has_coords = net.has_coordinates();
        assert_eq!(write_flows_geojson(&p, &net, &rows).unwrap(), has_coords);
        assert_eq!(p.exists(), has_coords);
    }
}
