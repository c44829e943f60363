//! Annual commodity tonnage to daily O-D vehicle demand.
//!
//! Three converters, one per shipment mode category:
//!
//! * truck: tons are split across truck types by a distance-range share,
//!   turned into loaded trips with per-body-type payloads, grossed up by
//!   empty-trip factors, and summed.
//! * rail: tons are divided by the trainload weight of the commodity group.
//! * intermodal: eligible commodities shipped at least a minimum distance
//!   become containers; every container makes a loaded and an empty dray,
//!   and containers over train length give trainloads.
//!
//! The factor tables are inputs. The repository's sample tables are
//! synthetic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{ClassDemand, DemandError, DemandTable};
use crate::network::{Mode, Network, NodeKind};
use crate::paths::{SearchFilter, ShortestPathTree};

pub const DEFAULT_MIN_INTERMODAL_DISTANCE: f64 = 500.0;
pub const DEFAULT_DAYS_PER_YEAR: f64 = 365.0;
/// Mean Earth radius in statute miles.
pub const EARTH_RADIUS_MILES: f64 = 3958.8;

#[derive(Debug, Error, PartialEq)]
pub enum ConversionError {
    #[error("no truck distance range covers {0} miles")]
    DistanceOutOfRange(f64),
    #[error("missing factor: {0}")]
    MissingFactor(String),
    #[error("commodity '{0}' has no rail commodity group")]
    UnmappedCommodity(String),
    #[error("record is for mode category '{found}', converter expects '{expected}'")]
    WrongModeCategory { expected: ModeCategory, found: ModeCategory },
    #[error("tons_per_year must be finite and >= 0, got {0}")]
    InvalidTonnage(f64),
    #[error("invalid factor tables: {0}")]
    InvalidTables(String),
    #[error("unknown mode category '{0}'")]
    UnknownModeCategory(String),
    #[error("no distance between {0} and {1}: no road path and no coordinates")]
    NoDistance(String, String),
    #[error("'{0}' is not a centroid of the network")]
    NotCentroid(String),
    #[error("record {index}: {source}")]
    Record { index: usize, source: Box<ConversionError> },
    #[error(transparent)]
    Demand(#[from] DemandError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeCategory {
    Truck,
    Rail,
    MultipleModesAndMail,
}

impl fmt::Display for ModeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeCategory::Truck => "truck",
            ModeCategory::Rail => "rail",
            ModeCategory::MultipleModesAndMail => "multiple_modes_and_mail",
        })
    }
}

impl FromStr for ModeCategory {
    type Err = ConversionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "truck" => Ok(ModeCategory::Truck),
            "rail" => Ok(ModeCategory::Rail),
            "multiple_modes_and_mail" => Ok(ModeCategory::MultipleModesAndMail),
            other => Err(ConversionError::UnknownModeCategory(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShipmentRecord {
    pub origin: String,
    pub destination: String,
    pub commodity: String,
    pub tons_per_year: f64,
    pub mode_category: ModeCategory,
}

/// Truck-type shares for shipments whose distance falls in
/// `[min_miles, max_miles)`; an absent `max_miles` is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRange {
    pub min_miles: f64,
    #[serde(default)]
    pub max_miles: Option<f64>,
    pub shares: BTreeMap<String, f64>,
}

impl DistanceRange {
    fn contains(&self, d: f64) -> bool {
        d >= self.min_miles && self.max_miles.is_none_or(|m| d < m)
    }
}

/// Average payload of one truck type with one body type, and the share of
/// that truck type's tonnage carried in that body type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruckEquivalency {
    pub truck_type: String,
    pub body_type: String,
    pub tons_per_truck: f64,
    #[serde(default = "one")]
    pub share: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RailGroups {
    /// Commodity code to group name.
    pub commodity_groups: BTreeMap<String, String>,
    /// Group name to average tons per trainload.
    pub tons_per_trainload: BTreeMap<String, f64>,
}

fn default_min_distance() -> f64 {
    DEFAULT_MIN_INTERMODAL_DISTANCE
}

fn default_days() -> f64 {
    DEFAULT_DAYS_PER_YEAR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorTables {
    #[serde(default)]
    pub truck_allocation: Vec<DistanceRange>,
    #[serde(default)]
    pub truck_equivalency: Vec<TruckEquivalency>,
    /// Empty trips per loaded trip, by truck type.
    #[serde(default)]
    pub empty_truck: BTreeMap<String, f64>,
    #[serde(default)]
    pub rail_groups: RailGroups,
    #[serde(default)]
    pub intermodal_eligible: BTreeSet<String>,
    /// Tons per container or trailer.
    #[serde(default)]
    pub container_load: Option<f64>,
    /// Containers per intermodal train.
    #[serde(default)]
    pub train_length: Option<f64>,
    #[serde(default = "default_min_distance")]
    pub min_intermodal_distance: f64,
    #[serde(default = "default_days")]
    pub days_per_year: f64,
}

impl Default for FactorTables {
    fn default() -> Self {
        FactorTables {
            truck_allocation: Vec::new(),
            truck_equivalency: Vec::new(),
            empty_truck: BTreeMap::new(),
            rail_groups: RailGroups::default(),
            intermodal_eligible: BTreeSet::new(),
            container_load: None,
            train_length: None,
            min_intermodal_distance: DEFAULT_MIN_INTERMODAL_DISTANCE,
            days_per_year: DEFAULT_DAYS_PER_YEAR,
        }
    }
}

const SHARE_TOL: f64 = 1e-9;

impl FactorTables {
    pub fn validate(&self) -> Result<(), ConversionError> {
        let bad = |msg: String| Err(ConversionError::InvalidTables(msg));
        for (i, r) in self.truck_allocation.iter().enumerate() {
            let sum: f64 = r.shares.values().sum();
            if (sum - 1.0).abs() > SHARE_TOL {
                return bad(format!("truck_allocation[{i}] shares sum to {sum}, not 1"));
            }
            if r.shares.values().any(|&s| s.is_nan() || s < 0.0) {
                return bad(format!("truck_allocation[{i}] has a negative share"));
            }
        }
        let mut body_share: BTreeMap<&str, f64> = BTreeMap::new();
        for e in &self.truck_equivalency {
            if !(e.tons_per_truck > 0.0 && e.tons_per_truck.is_finite()) {
                return bad(format!("tons_per_truck for {}/{} must be > 0", e.truck_type, e.body_type));
            }
            *body_share.entry(&e.truck_type).or_default() += e.share;
        }
        for (t, sum) in body_share {
            if (sum - 1.0).abs() > SHARE_TOL {
                return bad(format!("body-type shares of truck type {t} sum to {sum}, not 1"));
            }
        }
        for (t, &f) in &self.empty_truck {
            if !(f >= 0.0 && f.is_finite()) {
                return bad(format!("empty truck factor for {t} must be >= 0"));
            }
        }
        for (g, &w) in &self.rail_groups.tons_per_trainload {
            if !(w > 0.0 && w.is_finite()) {
                return bad(format!("tons_per_trainload for group {g} must be > 0"));
            }
        }
        for (name, v) in [("container_load", self.container_load), ("train_length", self.train_length)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be > 0"));
                }
            }
        }
        if self.days_per_year.is_nan() || self.days_per_year <= 0.0 {
            return bad("days_per_year must be > 0".into());
        }
        Ok(())
    }
}

fn check_tons(rec: &ShipmentRecord) -> Result<f64, ConversionError> {
    if rec.tons_per_year >= 0.0 && rec.tons_per_year.is_finite() {
        Ok(rec.tons_per_year)
    } else {
        Err(ConversionError::InvalidTonnage(rec.tons_per_year))
    }
}

fn expect_category(rec: &ShipmentRecord, expected: ModeCategory) -> Result<(), ConversionError> {
    if rec.mode_category == expected {
        Ok(())
    } else {
        Err(ConversionError::WrongModeCategory { expected, found: rec.mode_category })
    }
}

/// Great-circle distance in miles between two (lon, lat) points.
pub fn great_circle_miles(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lon1, lat1) = (a.0.to_radians(), a.1.to_radians());
    let (lon2, lat2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((lat2 - lat1) / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_MILES * h.sqrt().asin()
}

fn centroid(net: &Network, id: &str) -> Result<usize, ConversionError> {
    net.node_ix(id)
        .filter(|&ix| net.node(ix).kind == NodeKind::Centroid)
        .ok_or_else(|| ConversionError::NotCentroid(id.to_string()))
}

/// Shortest road distance between two centroids, falling back to the
/// great-circle distance when no road path exists.
pub fn od_distance(net: &Network, origin: &str, destination: &str) -> Result<f64, ConversionError> {
    let o = centroid(net, origin)?;
    let d = centroid(net, destination)?;
    let lengths: Vec<f64> = net.links().iter().map(|l| l.length).collect();
    let tree = ShortestPathTree::build(net, &lengths, o, &SearchFilter::mode(Mode::Truck));
    let road = tree.cost_to(d);
    if road.is_finite() {
        return Ok(road);
    }
    match (net.node(o).coords, net.node(d).coords) {
        (Some(a), Some(b)) => Ok(great_circle_miles(a, b)),
        _ => Err(ConversionError::NoDistance(origin.to_string(), destination.to_string())),
    }
}

/// Trucks per day (loaded plus empty) for a truck shipment.
pub fn trucks_from_tonnage(rec: &ShipmentRecord, distance: f64, tables: &FactorTables) -> Result<f64, ConversionError> {
    expect_category(rec, ModeCategory::Truck)?;
    let tons = check_tons(rec)?;
    let range = tables
        .truck_allocation
        .iter()
        .find(|r| r.contains(distance))
        .ok_or(ConversionError::DistanceOutOfRange(distance))?;
    let mut annual = 0.0;
    for (truck_type, &share) in &range.shares {
        if share == 0.0 {
            continue;
        }
        let type_tons = tons * share;
        let mut loaded = 0.0;
        let mut found = false;
        for e in tables.truck_equivalency.iter().filter(|e| &e.truck_type == truck_type) {
            found = true;
            loaded += type_tons * e.share / e.tons_per_truck;
        }
        if !found {
            return Err(ConversionError::MissingFactor(format!("truck_equivalency for truck type {truck_type}")));
        }
        let empty = tables
            .empty_truck
            .get(truck_type)
            .ok_or_else(|| ConversionError::MissingFactor(format!("empty_truck for truck type {truck_type}")))?;
        annual += loaded * (1.0 + empty);
    }
    Ok(annual / tables.days_per_year)
}

/// Trains per day for a rail shipment.
pub fn trainloads_from_tonnage(rec: &ShipmentRecord, tables: &FactorTables) -> Result<f64, ConversionError> {
    expect_category(rec, ModeCategory::Rail)?;
    let tons = check_tons(rec)?;
    let group = tables
        .rail_groups
        .commodity_groups
        .get(&rec.commodity)
        .ok_or_else(|| ConversionError::UnmappedCommodity(rec.commodity.clone()))?;
    let per_train = tables
        .rail_groups
        .tons_per_trainload
        .get(group)
        .ok_or_else(|| ConversionError::MissingFactor(format!("tons_per_trainload for group {group}")))?;
    Ok(tons / per_train / tables.days_per_year)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntermodalDemand {
    pub trains_per_day: f64,
    /// Loaded plus empty drayage trips per day (two per container).
    pub truck_trips_per_day: f64,
}

pub fn intermodal_from_tonnage(
    rec: &ShipmentRecord,
    distance: f64,
    tables: &FactorTables,
) -> Result<IntermodalDemand, ConversionError> {
    expect_category(rec, ModeCategory::MultipleModesAndMail)?;
    let tons = check_tons(rec)?;
    let container_load =
        tables.container_load.ok_or_else(|| ConversionError::MissingFactor("container_load".into()))?;
    let train_length = tables.train_length.ok_or_else(|| ConversionError::MissingFactor("train_length".into()))?;
    if !tables.intermodal_eligible.contains(&rec.commodity) || distance < tables.min_intermodal_distance {
        return Ok(IntermodalDemand::default());
    }
    let containers = tons / container_load;
    Ok(IntermodalDemand {
        trains_per_day: containers / train_length / tables.days_per_year,
        truck_trips_per_day: 2.0 * containers / tables.days_per_year,
    })
}

/// A demand table plus the intermodal trainloads that go with its
/// intermodal cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Conversion {
    /// `intermodal` cells hold drayage truck trips per day.
    pub table: DemandTable,
    pub intermodal_trains: BTreeMap<crate::demand::OdPair, f64>,
}

impl Conversion {
    pub fn intermodal_trains_total(&self) -> f64 {
        self.intermodal_trains.values().sum()
    }
}

/// Converts every record and sums per (origin, destination, class).
pub fn build_demand_table(
    records: &[ShipmentRecord],
    net: &Network,
    tables: &FactorTables,
) -> Result<Conversion, ConversionError> {
    tables.validate()?;
    let mut distances: HashMap<(String, String), f64> = HashMap::new();
    let mut out = Conversion::default();
    for (index, rec) in records.iter().enumerate() {
        let wrap = |e: ConversionError| ConversionError::Record { index, source: Box::new(e) };
        centroid(net, &rec.origin).map_err(wrap)?;
        centroid(net, &rec.destination).map_err(wrap)?;
        let mut distance = || -> Result<f64, ConversionError> {
            let key = (rec.origin.clone(), rec.destination.clone());
            if let Some(&d) = distances.get(&key) {
                return Ok(d);
            }
            let d = od_distance(net, &rec.origin, &rec.destination)?;
            distances.insert(key, d);
            Ok(d)
        };
        let mut cell = ClassDemand::default();
        match rec.mode_category {
            ModeCategory::Truck => {
                let d = distance().map_err(wrap)?;
                cell.truck = trucks_from_tonnage(rec, d, tables).map_err(wrap)?;
            }
            ModeCategory::Rail => cell.rail = trainloads_from_tonnage(rec, tables).map_err(wrap)?,
            ModeCategory::MultipleModesAndMail => {
                let d = distance().map_err(wrap)?;
                let im = intermodal_from_tonnage(rec, d, tables).map_err(wrap)?;
                cell.intermodal = im.truck_trips_per_day;
                *out.intermodal_trains
                    .entry(crate::demand::OdPair::new(rec.origin.clone(), rec.destination.clone()))
                    .or_default() += im.trains_per_day;
            }
        }
        out.table.add(&rec.origin, &rec.destination, cell).map_err(|e| wrap(e.into()))?;
    }
    Ok(out)
}
