//! Link performance functions: travel time as a function of flow, with
//! analytic first derivatives and closed-form integrals.

use thiserror::Error;

use crate::network::{Link, LinkKind};

/// BPR coefficient for road links.
pub const BPR_COEFFICIENT: f64 = 0.15;
/// BPR exponent for road links.
pub const BPR_EXPONENT: i32 = 4;
/// Default rail penalty rate.
pub const DEFAULT_BETA: f64 = 4.0;
/// Flows above this multiple of capacity are reported as saturated.
pub const SATURATION_RATIO: f64 = 1.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LpfError {
    #[error("flow must be non-negative and finite, got {0}")]
    InvalidFlow(f64),
    #[error("flow {flow} exceeds {SATURATION_RATIO:e} x capacity {capacity}")]
    Saturated { flow: f64, capacity: f64 },
    #[error("free-flow time must be positive, got {0}")]
    InvalidFreeFlowTime(f64),
    #[error("capacity must be positive, got {0}")]
    InvalidCapacity(f64),
    #[error("beta must be >= 1, got {0}")]
    InvalidBeta(f64),
}

fn check_flow(x: f64, capacity: f64) -> Result<f64, LpfError> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(LpfError::InvalidFlow(x));
    }
    if x > SATURATION_RATIO * capacity {
        return Err(LpfError::Saturated { flow: x, capacity });
    }
    Ok(x / capacity)
}

fn check_params(t0: f64, capacity: f64) -> Result<(), LpfError> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(LpfError::InvalidFreeFlowTime(t0));
    }
    if !(capacity > 0.0 && capacity.is_finite()) {
        return Err(LpfError::InvalidCapacity(capacity));
    }
    Ok(())
}

/// `t0 * (1 + 0.15 (x/C)^4)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadLpf {
    t0: f64,
    capacity: f64,
}

impl RoadLpf {
    pub fn new(t0: f64, capacity: f64) -> Result<Self, LpfError> {
        check_params(t0, capacity)?;
        Ok(RoadLpf { t0, capacity })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn time(&self, x: f64) -> Result<f64, LpfError> {
        let r = check_flow(x, self.capacity)?;
        Ok(self.t0 * (1.0 + BPR_COEFFICIENT * r.powi(BPR_EXPONENT)))
    }

    pub fn derivative(&self, x: f64) -> Result<f64, LpfError> {
        let r = check_flow(x, self.capacity)?;
        Ok(self.t0 * BPR_COEFFICIENT * f64::from(BPR_EXPONENT) * r.powi(BPR_EXPONENT - 1) / self.capacity)
    }

    /// `∫0^x t(w) dw = t0 (x + 0.03 x^5 / C^4)`
    pub fn integral(&self, x: f64) -> Result<f64, LpfError> {
        let r = check_flow(x, self.capacity)?;
        let k = BPR_COEFFICIENT / f64::from(BPR_EXPONENT + 1);
        Ok(self.t0 * x * (1.0 + k * r.powi(BPR_EXPONENT)))
    }
}

/// Rail delay on a shared track: `t0 * (1 + ((x + x')/C)^beta)` where `x'`
/// is the flow on the opposite-direction twin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RailLpf {
    t0: f64,
    capacity: f64,
    beta: f64,
}

impl RailLpf {
    pub fn new(t0: f64, capacity: f64, beta: f64) -> Result<Self, LpfError> {
        check_params(t0, capacity)?;
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(LpfError::InvalidBeta(beta));
        }
        Ok(RailLpf { t0, capacity, beta })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn combined(&self, x: f64, x_opp: f64) -> Result<f64, LpfError> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(LpfError::InvalidFlow(x));
        }
        if !(x_opp >= 0.0 && x_opp.is_finite()) {
            return Err(LpfError::InvalidFlow(x_opp));
        }
        check_flow(x + x_opp, self.capacity)
    }

    pub fn time(&self, x: f64, x_opp: f64) -> Result<f64, LpfError> {
        let r = self.combined(x, x_opp)?;
        Ok(self.t0 * (1.0 + r.powf(self.beta)))
    }

    /// Partial derivative with respect to the own-direction flow.
    pub fn derivative(&self, x: f64, x_opp: f64) -> Result<f64, LpfError> {
        let r = self.combined(x, x_opp)?;
        if r == 0.0 {
            // beta == 1 gives a constant slope
            return Ok(if self.beta == 1.0 { self.t0 / self.capacity } else { 0.0 });
        }
        Ok(self.t0 * self.beta * r.powf(self.beta - 1.0) / self.capacity)
    }

    /// `∫0^y t(w) dw` for combined two-direction flow `y`.
    pub fn integral(&self, y: f64) -> Result<f64, LpfError> {
        let r = check_flow(y, self.capacity)?;
        Ok(self.t0 * y * (1.0 + r.powf(self.beta) / (self.beta + 1.0)))
    }
}

/// Flow-independent delay (terminal transfer, connector access).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedDelay {
    t0: f64,
}

impl FixedDelay {
    pub fn new(t0: f64) -> Result<Self, LpfError> {
        if !(t0 >= 0.0 && t0.is_finite()) {
            return Err(LpfError::InvalidFreeFlowTime(t0));
        }
        Ok(FixedDelay { t0 })
    }

    pub fn time(&self) -> f64 {
        self.t0
    }
}

/// The performance function attached to one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkLpf {
    Road(RoadLpf),
    Rail(RailLpf),
    Fixed(FixedDelay),
}

impl LinkLpf {
    /// Builds the function for a link; `beta` applies to rail links that
    /// carry no per-link override.
    pub fn for_link(link: &Link, beta: f64) -> Result<Self, LpfError> {
        let cap = link.capacity.unwrap_or(0.0);
        Ok(match link.kind {
            LinkKind::Road => LinkLpf::Road(RoadLpf::new(link.free_flow_time, cap)?),
            LinkKind::Rail => LinkLpf::Rail(RailLpf::new(link.free_flow_time, cap, link.beta.unwrap_or(beta))?),
            LinkKind::Terminal | LinkKind::RoadConnector | LinkKind::RailConnector => {
                LinkLpf::Fixed(FixedDelay::new(link.free_flow_time)?)
            }
        })
    }

    /// Travel time given own flow and twin flow (ignored off rail).
    pub fn time(&self, x: f64, x_opp: f64) -> Result<f64, LpfError> {
        match self {
            LinkLpf::Road(f) => f.time(x),
            LinkLpf::Rail(f) => f.time(x, x_opp),
            LinkLpf::Fixed(f) => Ok(f.time()),
        }
    }

    pub fn derivative(&self, x: f64, x_opp: f64) -> Result<f64, LpfError> {
        match self {
            LinkLpf::Road(f) => f.derivative(x),
            LinkLpf::Rail(f) => f.derivative(x, x_opp),
            LinkLpf::Fixed(_) => Ok(0.0),
        }
    }

    pub fn capacity(&self) -> Option<f64> {
        match self {
            LinkLpf::Road(f) => Some(f.capacity()),
            LinkLpf::Rail(f) => Some(f.capacity()),
            LinkLpf::Fixed(_) => None,
        }
    }
}
