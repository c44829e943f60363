//! Run configuration document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::equilibrium::{PayloadFactors, SolverConfig};
use crate::network::RailCapacityTable;

use super::{read_to_string, IoError};

pub const DEFAULT_TOP_N: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmChoice {
    #[default]
    Gp,
    Fw,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitelistEntry {
    pub origin: String,
    pub destination: String,
    pub terminals: Vec<String>,
}

fn default_top_n() -> usize {
    DEFAULT_TOP_N
}

/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub network: Option<PathBuf>,
    #[serde(default)]
    pub demand: Option<PathBuf>,
    /// Shipment records, converted with `factors` when `demand` is absent.
    #[serde(default)]
    pub records: Option<PathBuf>,
    #[serde(default)]
    pub factors: Option<PathBuf>,
    #[serde(default)]
    pub rail_capacity: Option<RailCapacityTable>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub algorithm: AlgorithmChoice,
    #[serde(default)]
    pub beta_sweep: Option<Vec<f64>>,
    /// Rail links reported by the sweep; defaults to tracks over capacity
    /// at the first rate.
    #[serde(default)]
    pub sweep_links: Option<Vec<String>>,
    #[serde(default)]
    pub restricted_links: Vec<String>,
    #[serde(default)]
    pub terminal_whitelist: Vec<WhitelistEntry>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub payload_factors: Option<PayloadFactors>,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            network: None,
            demand: None,
            records: None,
            factors: None,
            rail_capacity: None,
            solver: SolverConfig::default(),
            algorithm: AlgorithmChoice::default(),
            beta_sweep: None,
            sweep_links: None,
            restricted_links: Vec::new(),
            terminal_whitelist: Vec::new(),
            output_dir: None,
            payload_factors: None,
            top_n: DEFAULT_TOP_N,
        }
    }
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self, IoError> {
        let text = read_to_string(path)?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| IoError::json(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        for p in [&mut cfg.network, &mut cfg.demand, &mut cfg.records, &mut cfg.factors, &mut cfg.output_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_resolves_paths() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        std::fs::write(
            &p,
            r#"{"network": "net", "demand": "/abs/d.csv", "algorithm": "both",
                "solver": {"beta": 7, "max_iterations": 5},
                "terminal_whitelist": [{"origin": "A", "destination": "B", "terminals": ["t1"]}]}"#,
        )
        .unwrap();
        let cfg = RunConfig::read(&p).unwrap();
        assert_eq!(cfg.network, Some(dir.path().join("net")));
        assert_eq!(cfg.demand, Some(PathBuf::from("/abs/d.csv")));
        assert_eq!(cfg.algorithm, AlgorithmChoice::Both);
        assert_eq!(cfg.solver.beta, 7.0);
        assert_eq!(cfg.solver.step_size, 1.0);
        assert_eq!(cfg.top_n, DEFAULT_TOP_N);
    }

    #[test]
    fn rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        std::fs::write(&p, r#"{"netwrok": "x"}"#).unwrap();
        assert!(RunConfig::read(&p).is_err());
        std::fs::write(&p, r#"{"solver": {"bta": 2}}"#).unwrap();
        assert!(RunConfig::read(&p).is_err());
    }
}
