//! Summaries of an assignment: equilibrium cost spread, ton-miles,
//! congested links, and penalty-rate sweeps.

use serde::{Deserialize, Serialize};

use crate::demand::DemandTable;
use crate::lpf::LinkLpf;
use crate::network::{natural_cmp, LinkKind, Network};
use crate::paths::{path_time, LinkTimeView};

use super::{link_lpfs, solve_gp, AssignmentResult, EquilibriumError, PathSetKey, SolverConfig};

/// Max minus min time over the used paths of each path set.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpread {
    pub per_set: Vec<(PathSetKey, f64)>,
    pub max: f64,
}

pub fn ue_cost_spread(result: &AssignmentResult, times: &LinkTimeView) -> Result<CostSpread, EquilibriumError> {
    let mut per_set = Vec::with_capacity(result.path_sets.len());
    let mut max = 0.0f64;
    for set in &result.path_sets {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in set.paths.iter().filter(|p| p.flow > 0.0) {
            let t = path_time(&p.path, times)?;
            lo = lo.min(t);
            hi = hi.max(t);
        }
        let spread = if hi >= lo { hi - lo } else { 0.0 };
        max = max.max(spread);
        per_set.push((set.key.clone(), spread));
    }
    Ok(CostSpread { per_set, max })
}

/// Average payload per vehicle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PayloadFactors {
    pub tons_per_truck: Option<f64>,
    pub tons_per_train: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TonMiles {
    pub road: f64,
    pub rail: f64,
}

/// Ton-miles per day on physical road and rail links.
pub fn ton_miles(
    result: &AssignmentResult,
    net: &Network,
    payload: &PayloadFactors,
) -> Result<TonMiles, EquilibriumError> {
    ton_miles_from_flows(&result.link_flows, net, payload)
}

pub fn ton_miles_from_flows(
    link_flows: &[f64],
    net: &Network,
    payload: &PayloadFactors,
) -> Result<TonMiles, EquilibriumError> {
    let truck = payload
        .tons_per_truck
        .ok_or_else(|| EquilibriumError::Report("payload factor tons_per_truck is missing".into()))?;
    let train = payload
        .tons_per_train
        .ok_or_else(|| EquilibriumError::Report("payload factor tons_per_train is missing".into()))?;
    let mut out = TonMiles::default();
    for (link, &x) in net.links().iter().zip(link_flows) {
        match link.kind {
            LinkKind::Road => out.road += x * link.length * truck,
            LinkKind::Rail => out.rail += x * link.length * train,
            _ => {}
        }
    }
    Ok(out)
}

/// Load on a road link, or on a rail track in both directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongestedLink {
    pub link_id: String,
    pub kind: LinkKind,
    pub volume_capacity: f64,
    /// `100 (v - C) / C` when positive, else 0.
    pub over_capacity_pct: f64,
    pub travel_time: f64,
}

fn track_load(net: &Network, lpfs: &[LinkLpf], flows: &[f64], a: usize) -> Option<(f64, f64)> {
    let cap = lpfs[a].capacity()?;
    let v = flows[a] + net.twin_ix(a).map_or(0.0, |t| flows[t]);
    Some((v, cap))
}

fn over_capacity_pct(v: f64, cap: f64) -> f64 {
    if v > cap {
        100.0 * (v - cap) / cap
    } else {
        0.0
    }
}

/// The `top_n` road links and rail tracks with the highest
/// volume/capacity ratio. A rail track is listed once, under its
/// lower-ordered link id.
pub fn congested_links(
    net: &Network,
    result: &AssignmentResult,
    top_n: usize,
) -> Result<Vec<CongestedLink>, EquilibriumError> {
    let lpfs = link_lpfs(net, result.config.beta)?;
    let times = LinkTimeView::at_flows(net, &lpfs, &result.link_flows)?;
    let mut rows = Vec::new();
    for (a, link) in net.links().iter().enumerate() {
        if !link.kind.is_congestible() {
            continue;
        }
        if let Some(t) = net.twin_ix(a) {
            if net.link_rank(t) < net.link_rank(a) {
                continue;
            }
        }
        let Some((v, cap)) = track_load(net, &lpfs, &result.link_flows, a) else { continue };
        if v <= 0.0 {
            continue;
        }
        rows.push(CongestedLink {
            link_id: link.id.clone(),
            kind: link.kind,
            volume_capacity: v / cap,
            over_capacity_pct: over_capacity_pct(v, cap),
            travel_time: times.get(a).unwrap_or(0.0),
        });
    }
    rows.sort_by(|x, y| {
        y.volume_capacity.total_cmp(&x.volume_capacity).then_with(|| natural_cmp(&x.link_id, &y.link_id))
    });
    rows.truncate(top_n);
    Ok(rows)
}

/// One tracked rail link at one penalty rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub link_id: String,
    pub over_capacity_pct: f64,
    pub travel_time: f64,
}

#[derive(Debug, Clone)]
pub struct BetaSweep {
    pub rows: Vec<SweepRow>,
    pub results: Vec<(f64, AssignmentResult)>,
}

/// Solves once per penalty rate and reports, for each tracked rail link,
/// the percentage of combined two-direction flow over capacity and the
/// link's travel time.
///
/// Without `tracked`, every rail track over capacity at the first rate is
/// tracked (one link id per twin pair).
pub fn beta_sweep(
    net: &Network,
    demand: &DemandTable,
    config: &SolverConfig,
    betas: &[f64],
    tracked: Option<&[String]>,
) -> Result<BetaSweep, EquilibriumError> {
    if betas.is_empty() {
        return Err(EquilibriumError::InvalidConfig("beta list is empty".into()));
    }
    let mut results = Vec::with_capacity(betas.len());
    for &beta in betas {
        let cfg = SolverConfig { beta, ..config.clone() };
        results.push((beta, solve_gp(net, demand, &cfg)?));
    }

    let tracked: Vec<usize> = match tracked {
        Some(ids) => ids
            .iter()
            .map(|id| {
                let ix = net
                    .link_ix(id)
                    .ok_or_else(|| EquilibriumError::Report(format!("tracked link '{id}' does not exist")))?;
                if net.link(ix).kind != LinkKind::Rail {
                    return Err(EquilibriumError::Report(format!("tracked link '{id}' is not a rail link")));
                }
                Ok(ix)
            })
            .collect::<Result<_, _>>()?,
        None => {
            let (_, first) = &results[0];
            let lpfs = link_lpfs(net, first.config.beta)?;
            let mut ids: Vec<usize> = (0..net.links().len())
                .filter(|&a| net.link(a).kind == LinkKind::Rail)
                .filter(|&a| net.twin_ix(a).is_none_or(|t| net.link_rank(a) < net.link_rank(t)))
                .filter(|&a| track_load(net, &lpfs, &first.link_flows, a).is_some_and(|(v, cap)| v > cap))
                .collect();
            ids.sort_by_key(|&a| net.link_rank(a));
            ids
        }
    };

    let mut rows = Vec::with_capacity(tracked.len() * results.len());
    for (beta, result) in &results {
        let lpfs = link_lpfs(net, result.config.beta)?;
        for &a in &tracked {
            let (v, cap) = track_load(net, &lpfs, &result.link_flows, a).expect("rail link has a capacity");
            let time = crate::paths::link_time(net, &lpfs, &result.link_flows, a)?;
            rows.push(SweepRow {
                beta: *beta,
                link_id: net.link(a).id.clone(),
                over_capacity_pct: over_capacity_pct(v, cap),
                travel_time: time,
            });
        }
    }
    Ok(BetaSweep { rows, results })
}
