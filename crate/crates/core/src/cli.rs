//! The `freight-assign` command line.
//!
//! Exit codes: 0 success, 1 input error, 2 validation failure (invalid
//! network, demand that does not fit the network, unreachable demand),
//! 3 solver stopped before reaching the gap tolerance.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::conversion::build_demand_table;
use crate::demand::DemandTable;
use crate::equilibrium::{beta_sweep, solve_fw, solve_gp, AssignmentResult, EquilibriumError, PayloadFactors};
use crate::io::{
    flow_rows, read_demand_csv, read_factors_json, read_network, read_records_csv, write_demand_csv, write_flows_csv,
    write_flows_geojson, write_report_json, write_sweep_csv, AlgorithmChoice, IngestOptions, IoError, RunConfig,
    RunReport,
};
use crate::network::{Network, NetworkError, RailCapacityTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "freight-assign", version, about = "User-equilibrium freight assignment on road-rail networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a network against the structural rules.
    Validate(ValidateArgs),
    /// Convert annual shipment tonnage into a daily demand table.
    Convert(ConvertArgs),
    /// Solve the equilibrium and write flows and run reports.
    Assign(RunArgs),
    /// Solve once per rail penalty rate and tabulate tracked rail links.
    SweepBeta(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Network directory (nodes.csv, links.csv) or JSON file.
    pub network: PathBuf,
    /// JSON rail capacity lookup used for blank rail capacities.
    #[arg(long)]
    pub rail_capacity: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub factors: PathBuf,
    #[arg(long)]
    pub network: PathBuf,
    /// Demand CSV to write.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long)]
    pub rail_capacity: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgorithmArg {
    Gp,
    Fw,
    Both,
}

impl From<AlgorithmArg> for AlgorithmChoice {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Gp => AlgorithmChoice::Gp,
            AlgorithmArg::Fw => AlgorithmChoice::Fw,
            AlgorithmArg::Both => AlgorithmChoice::Both,
        }
    }
}

/// Every flag overrides the matching config entry.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long)]
    pub demand: Option<PathBuf>,
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub factors: Option<PathBuf>,
    #[arg(long)]
    pub rail_capacity: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long)]
    pub rel_gap_tol: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Track the raw objective instead of the demand-normalized one.
    #[arg(long)]
    pub no_normalization: bool,
    #[arg(long)]
    pub intermodal_road_factor: Option<f64>,
    #[arg(long)]
    pub intermodal_rail_factor: Option<f64>,
    /// Link ids excluded from path search.
    #[arg(long, value_delimiter = ',')]
    pub restricted: Option<Vec<String>>,
    #[arg(long)]
    pub tons_per_truck: Option<f64>,
    #[arg(long)]
    pub tons_per_train: Option<f64>,
    /// Rows in the congested-link table of each report.
    #[arg(long)]
    pub top_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Penalty rates, e.g. 2,4,7,15.
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    /// Rail link ids to report.
    #[arg(long, value_delimiter = ',')]
    pub links: Option<Vec<String>>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_INPUT, message: message.to_string() }
    }

    fn validation(message: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.to_string() }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Network(NetworkError::Invalid(_)) | IoError::Demand(_) => CliError::validation(e),
            other => CliError::input(other),
        }
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::Network(_) | EquilibriumError::Demand(_) | EquilibriumError::Unreachable(_) => {
                CliError::validation(e)
            }
            other => CliError::input(other),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Convert(a) => cmd_convert(&a, out),
        Command::Assign(a) => cmd_assign(&a, out),
        Command::SweepBeta(a) => cmd_sweep_beta(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn read_capacity_table(path: &Path) -> Result<RailCapacityTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn ingest(rail_capacity: Option<RailCapacityTable>) -> IngestOptions {
    IngestOptions { rail_capacity }
}

fn print_violations(net: &Network, out: &mut dyn Write) -> bool {
    let report = net.validate();
    if report.is_valid() {
        return true;
    }
    let _ = writeln!(out, "{} violations:", report.violations.len());
    for v in &report.violations {
        let _ = writeln!(out, "  {v}");
    }
    false
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let table = args.rail_capacity.as_deref().map(read_capacity_table).transpose()?;
    let net = read_network(&args.network, &ingest(table))?;
    if !print_violations(&net, out) {
        return Ok(EXIT_VALIDATION);
    }
    let _ = writeln!(
        out,
        "valid: {} nodes, {} links, {} centroids",
        net.nodes().len(),
        net.links().len(),
        net.centroids().len()
    );
    Ok(EXIT_OK)
}

pub fn cmd_convert(args: &ConvertArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let table = args.rail_capacity.as_deref().map(read_capacity_table).transpose()?;
    let net = read_network(&args.network, &ingest(table))?;
    if !print_violations(&net, out) {
        return Ok(EXIT_VALIDATION);
    }
    let records = read_records_csv(&args.records)?;
    let factors = read_factors_json(&args.factors)?;
    let conversion = build_demand_table(&records, &net, &factors).map_err(CliError::input)?;
    write_demand_csv(&args.output, &conversion.table)?;
    let totals = conversion.table.totals();
    let _ = writeln!(out, "records: {}", records.len());
    let _ = writeln!(out, "trucks/day: {}", crate::io::fmt_sig(totals.truck));
    let _ = writeln!(out, "trains/day: {}", crate::io::fmt_sig(totals.rail));
    let _ = writeln!(out, "intermodal truck trips/day: {}", crate::io::fmt_sig(totals.intermodal));
    let _ = writeln!(out, "intermodal trains/day: {}", crate::io::fmt_sig(conversion.intermodal_trains_total()));
    Ok(EXIT_OK)
}

/// Config file merged with command-line overrides.
fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($field:expr, $flag:expr) => {
            if let Some(v) = $flag.clone() {
                $field = v;
            }
        };
    }
    set!(cfg.network, args.network.clone().map(Some));
    set!(cfg.demand, args.demand.clone().map(Some));
    set!(cfg.records, args.records.clone().map(Some));
    set!(cfg.factors, args.factors.clone().map(Some));
    set!(cfg.output_dir, args.output_dir.clone().map(Some));
    if let Some(p) = &args.rail_capacity {
        cfg.rail_capacity = Some(read_capacity_table(p)?);
    }
    if let Some(a) = args.algorithm {
        cfg.algorithm = a.into();
    }
    set!(cfg.solver.beta, args.beta);
    set!(cfg.solver.step_size, args.step_size);
    set!(cfg.solver.rel_gap_tol, args.rel_gap_tol);
    set!(cfg.solver.max_iterations, args.max_iterations);
    set!(cfg.solver.intermodal_road_factor, args.intermodal_road_factor);
    set!(cfg.solver.intermodal_rail_factor, args.intermodal_rail_factor);
    if args.no_normalization {
        cfg.solver.normalization = false;
    }
    set!(cfg.restricted_links, args.restricted);
    set!(cfg.top_n, args.top_n);
    if args.tons_per_truck.is_some() || args.tons_per_train.is_some() {
        let p = cfg.payload_factors.get_or_insert_with(PayloadFactors::default);
        if args.tons_per_truck.is_some() {
            p.tons_per_truck = args.tons_per_truck;
        }
        if args.tons_per_train.is_some() {
            p.tons_per_train = args.tons_per_train;
        }
    }
    cfg.solver.validate().map_err(CliError::input)?;
    Ok(cfg)
}

fn load_inputs(cfg: &RunConfig) -> Result<(Network, DemandTable), CliError> {
    let path = cfg.network.as_deref().ok_or_else(|| CliError::input("no network given"))?;
    let mut net = read_network(path, &ingest(cfg.rail_capacity.clone()))?;
    if !cfg.restricted_links.is_empty() {
        net = net.with_restricted_links(cfg.restricted_links.iter());
    }
    for w in &cfg.terminal_whitelist {
        net = net.with_terminal_whitelist(&w.origin, &w.destination, w.terminals.iter());
    }
    let report = net.validate();
    if !report.is_valid() {
        return Err(CliError::validation(report));
    }
    let demand = match (&cfg.demand, &cfg.records, &cfg.factors) {
        (Some(d), _, _) => read_demand_csv(d)?,
        (None, Some(r), Some(f)) => {
            let records = read_records_csv(r)?;
            let factors = read_factors_json(f)?;
            build_demand_table(&records, &net, &factors).map_err(CliError::input)?.table
        }
        _ => return Err(CliError::input("no demand given: pass a demand table, or shipment records with factors")),
    };
    demand.check_against(&net).map_err(CliError::validation)?;
    Ok((net, demand))
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn export(
    net: &Network,
    result: &AssignmentResult,
    cfg: &RunConfig,
    seconds: f64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let dir = output_dir(cfg);
    let alg = result.algorithm.short_name();
    let rows = flow_rows(net, result)?;
    write_flows_csv(&dir.join(format!("flows_{alg}.csv")), &rows)?;
    write_flows_geojson(&dir.join(format!("flows_{alg}.geojson")), net, &rows)?;
    let report = RunReport::build(net, result, cfg.payload_factors.as_ref(), cfg.top_n, seconds)?;
    write_report_json(&dir.join(format!("report_{alg}.json")), &report)?;
    let _ = writeln!(
        out,
        "{alg}: {} after {} iterations, objective {} h, gap {}",
        if result.converged { "converged" } else { "not converged" },
        result.iterations,
        crate::io::fmt_sig(result.objective.tracked(&result.config)),
        result.gap_trace.last().map_or("n/a".to_string(), |g| crate::io::fmt_sig(*g)),
    );
    Ok(())
}

type Solver =
    fn(&Network, &DemandTable, &crate::equilibrium::SolverConfig) -> Result<AssignmentResult, EquilibriumError>;

pub fn cmd_assign(args: &RunArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = resolve(args)?;
    let (net, demand) = load_inputs(&cfg)?;
    let solvers: &[Solver] = match cfg.algorithm {
        AlgorithmChoice::Gp => &[solve_gp],
        AlgorithmChoice::Fw => &[solve_fw],
        AlgorithmChoice::Both => &[solve_gp, solve_fw],
    };
    let mut all_converged = true;
    for solve in solvers {
        let start = Instant::now();
        let result = solve(&net, &demand, &cfg.solver)?;
        let seconds = start.elapsed().as_secs_f64();
        all_converged &= result.converged;
        export(&net, &result, &cfg, seconds, out)?;
    }
    Ok(if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

pub fn cmd_sweep_beta(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = resolve(&args.run)?;
    if let Some(b) = &args.betas {
        cfg.beta_sweep = Some(b.clone());
    }
    if let Some(l) = &args.links {
        cfg.sweep_links = Some(l.clone());
    }
    let betas = cfg.beta_sweep.clone().unwrap_or_default();
    if betas.is_empty() {
        return Err(CliError::input("no penalty rates given"));
    }
    let (net, demand) = load_inputs(&cfg)?;
    let sweep = beta_sweep(&net, &demand, &cfg.solver, &betas, cfg.sweep_links.as_deref())?;
    let path = output_dir(&cfg).join("sweep_beta.csv");
    write_sweep_csv(&path, &sweep.rows)?;
    let mut all_converged = true;
    for (beta, result) in &sweep.results {
        all_converged &= result.converged;
        let _ = writeln!(
            out,
            "beta {}: {} after {} iterations",
            crate::io::fmt_sig(*beta),
            if result.converged { "converged" } else { "not converged" },
            result.iterations
        );
    }
    let _ = writeln!(out, "{} rows written to {}", sweep.rows.len(), path.display());
    Ok(if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}
