//! Daily O-D demand in vehicle units for the three freight classes.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{natural_cmp, Mode, Network, NodeKind};

#[derive(Debug, Error, PartialEq)]
pub enum DemandError {
    #[error("demand {origin}->{destination}: origin equals destination")]
    SameEndpoints { origin: String, destination: String },
    #[error("demand {origin}->{destination}: {class} value {value} must be finite and >= 0")]
    InvalidValue { origin: String, destination: String, class: Mode, value: f64 },
    #[error("demand {origin}->{destination}: '{node}' is not a centroid of the network")]
    NotCentroid { origin: String, destination: String, node: String },
}

/// Ordered by natural id order of origin, then destination.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OdPair {
    pub origin: String,
    pub destination: String,
}

impl OdPair {
    pub fn new(origin: impl Into<String>, destination: impl Into<String>) -> Self {
        OdPair { origin: origin.into(), destination: destination.into() }
    }
}

impl Ord for OdPair {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.origin, &other.origin).then_with(|| natural_cmp(&self.destination, &other.destination))
    }
}

impl PartialOrd for OdPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Trucks, trains and intermodal units per day for one O-D pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassDemand {
    pub truck: f64,
    pub rail: f64,
    pub intermodal: f64,
}

impl ClassDemand {
    pub fn new(truck: f64, rail: f64, intermodal: f64) -> Self {
        ClassDemand { truck, rail, intermodal }
    }

    pub fn get(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Truck => self.truck,
            Mode::Rail => self.rail,
            Mode::Intermodal => self.intermodal,
        }
    }

    pub fn get_mut(&mut self, mode: Mode) -> &mut f64 {
        match mode {
            Mode::Truck => &mut self.truck,
            Mode::Rail => &mut self.rail,
            Mode::Intermodal => &mut self.intermodal,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.truck == 0.0 && self.rail == 0.0 && self.intermodal == 0.0
    }

    pub fn scaled(&self, c: f64) -> Self {
        ClassDemand::new(self.truck * c, self.rail * c, self.intermodal * c)
    }
}

impl std::ops::AddAssign for ClassDemand {
    fn add_assign(&mut self, rhs: Self) {
        self.truck += rhs.truck;
        self.rail += rhs.rail;
        self.intermodal += rhs.intermodal;
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DemandTable {
    cells: BTreeMap<OdPair, ClassDemand>,
}

impl DemandTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds to the cell for (origin, destination).
    pub fn add(&mut self, origin: &str, destination: &str, demand: ClassDemand) -> Result<(), DemandError> {
        if origin == destination {
            return Err(DemandError::SameEndpoints {
                origin: origin.to_string(),
                destination: destination.to_string(),
            });
        }
        for mode in Mode::ALL {
            let value = demand.get(mode);
            if !(value >= 0.0 && value.is_finite()) {
                return Err(DemandError::InvalidValue {
                    origin: origin.to_string(),
                    destination: destination.to_string(),
                    class: mode,
                    value,
                });
            }
        }
        *self.cells.entry(OdPair::new(origin, destination)).or_default() += demand;
        Ok(())
    }

    pub fn get(&self, origin: &str, destination: &str) -> ClassDemand {
        self.cells.get(&OdPair::new(origin, destination)).copied().unwrap_or_default()
    }

    /// Cells in sweep order.
    pub fn iter(&self) -> impl Iterator<Item = (&OdPair, &ClassDemand)> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn totals(&self) -> ClassDemand {
        let mut t = ClassDemand::default();
        for d in self.cells.values() {
            t += *d;
        }
        t
    }

    pub fn scaled(&self, c: f64) -> Self {
        DemandTable { cells: self.cells.iter().map(|(k, v)| (k.clone(), v.scaled(c))).collect() }
    }

    /// Checks every cell's endpoints are centroids of `net`.
    pub fn check_against(&self, net: &Network) -> Result<(), DemandError> {
        for od in self.cells.keys() {
            for node in [&od.origin, &od.destination] {
                let ok = net.node_ix(node).map(|ix| net.node(ix).kind == NodeKind::Centroid).unwrap_or(false);
                if !ok {
                    return Err(DemandError::NotCentroid {
                        origin: od.origin.clone(),
                        destination: od.destination.clone(),
                        node: node.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_accumulates_and_orders_naturally() {
        let mut t = DemandTable::new();
        t.add("10", "2", ClassDemand::new(1.0, 0.0, 0.0)).unwrap();
        t.add("2", "10", ClassDemand::new(0.0, 1.0, 0.0)).unwrap();
        t.add("10", "2", ClassDemand::new(2.0, 0.0, 1.0)).unwrap();
        let keys: Vec<_> = t.iter().map(|(k, _)| (k.origin.as_str(), k.destination.as_str())).collect();
        assert_eq!(keys, vec![("2", "10"), ("10", "2")]);
        assert_eq!(t.get("10", "2"), ClassDemand::new(3.0, 0.0, 1.0));
        assert_eq!(t.totals(), ClassDemand::new(3.0, 1.0, 1.0));
    }

    #[test]
    fn rejects_bad_cells() {
        let mut t = DemandTable::new();
        assert!(t.add("a", "a", ClassDemand::default()).is_err());
        assert!(t.add("a", "b", ClassDemand::new(-1.0, 0.0, 0.0)).is_err());
        assert!(t.add("a", "b", ClassDemand::new(0.0, f64::NAN, 0.0)).is_err());
    }
}
