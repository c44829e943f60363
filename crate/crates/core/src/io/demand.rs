//! Demand tables, shipment records and factor tables.

use std::path::Path;

use serde::Deserialize;

use crate::conversion::{FactorTables, ModeCategory, ShipmentRecord};
use crate::demand::{ClassDemand, DemandTable};

use super::{csv_bytes, csv_reader, fmt_sig, read_to_string, write_atomic, IoError};

pub const DEMAND_HEADER: [&str; 5] = ["origin", "destination", "q_truck", "q_rail", "q_intermodal"];

#[derive(Debug, Deserialize)]
struct DemandRow {
    origin: String,
    destination: String,
    #[serde(default)]
    q_truck: Option<f64>,
    #[serde(default)]
    q_rail: Option<f64>,
    #[serde(default)]
    q_intermodal: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RecordRow {
    origin: String,
    destination: String,
    commodity: String,
    tons_per_year: f64,
    mode_category: String,
}

fn rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(u64, T)>, IoError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers().map_err(|e| IoError::csv(path, e))?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IoError::csv(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push((line, rec.deserialize(Some(&headers)).map_err(|e| IoError::csv(path, e))?));
    }
    Ok(out)
}

/// Reads a demand CSV. Blank class columns count as zero; repeated O-D
/// rows are summed.
pub fn read_demand_csv(path: &Path) -> Result<DemandTable, IoError> {
    let mut table = DemandTable::new();
    for (line, row) in rows::<DemandRow>(path)? {
        let d =
            ClassDemand::new(row.q_truck.unwrap_or(0.0), row.q_rail.unwrap_or(0.0), row.q_intermodal.unwrap_or(0.0));
        table.add(&row.origin, &row.destination, d).map_err(|e| IoError::Parse {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
    }
    Ok(table)
}

pub fn write_demand_csv(path: &Path, table: &DemandTable) -> Result<(), IoError> {
    let bytes = csv_bytes(
        &DEMAND_HEADER,
        table.iter().map(|(od, d)| {
            vec![od.origin.clone(), od.destination.clone(), fmt_sig(d.truck), fmt_sig(d.rail), fmt_sig(d.intermodal)]
        }),
    );
    write_atomic(path, &bytes)
}

pub fn read_records_csv(path: &Path) -> Result<Vec<ShipmentRecord>, IoError> {
    rows::<RecordRow>(path)?
        .into_iter()
        .map(|(line, r)| {
            let mode_category: ModeCategory =
                r.mode_category.parse().map_err(|e: crate::conversion::ConversionError| IoError::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: e.to_string(),
                })?;
            Ok(ShipmentRecord {
                origin: r.origin,
                destination: r.destination,
                commodity: r.commodity,
                tons_per_year: r.tons_per_year,
                mode_category,
            })
        })
        .collect()
}

pub fn read_factors_json(path: &Path) -> Result<FactorTables, IoError> {
    let text = read_to_string(path)?;
    let tables: FactorTables = serde_json::from_str(&text).map_err(|e| IoError::json(path, e))?;
    tables.validate()?;
    Ok(tables)
}
