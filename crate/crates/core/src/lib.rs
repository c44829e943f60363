//! User-equilibrium freight assignment on road-rail intermodal networks.
//!
//! The crate covers the whole batch workflow:
//!
//! * [`network`]: the typed intermodal graph and its validation rules.
//! * [`lpf`]: road (BPR) and shared-track rail delay functions.
//! * [`paths`]: mode-restricted least-time path search.
//! * [`equilibrium`]: gradient projection and Frank-Wolfe solvers.
//! * [`conversion`]: annual commodity tonnage to daily vehicle demand.
//! * [`io`] and [`cli`]: file formats and the `freight-assign` command.

pub mod cli;
pub mod conversion;
pub mod demand;
pub mod equilibrium;
pub mod io;
pub mod lpf;
pub mod network;
pub mod paths;
pub mod synthetic;

pub use demand::{ClassDemand, DemandTable, OdPair};
pub use equilibrium::{solve_fw, solve_gp, AssignmentResult, SolverConfig};
pub use network::{Link, LinkKind, Mode, Network, Node, NodeKind};
