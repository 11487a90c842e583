//! Command-line front end. [`run`] does all the work and returns the output
//! streams and exit status instead of touching the process, so it can be
//! tested in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use sdnavail_core::dynamics::{AlphaAxis, AlphaFactors, ModelError};
use sdnavail_core::scenarios::{
    alpha_sweep, case_suite, location_study, run_topology, Evaluator, LocationSpec, Method, ParamSet, Scenario,
    ScenarioError, SweepSpec, SweepTable, DEFAULT_GRID,
};
use sdnavail_core::structure::{minimal_cut_sets, EvalMode, MonteCarloPlan, Z_99};
use sdnavail_core::topology::{apply_case, build_reference_backbone, CaseId, Topology};

use crate::parallel::run_monte_carlo;
use crate::params_file::{parse_params, shipped_params};
use crate::spec_file::{parse_grid, parse_pairs, parse_spec, Job};
use crate::table::{emit_csv, format_decimal};
use crate::topology_file::parse_topology;

#[derive(Debug, Parser)]
#[command(name = "sdnavail", version, about = "Steady-state availability of SDN backbones under different controller deployments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one case in one mode and print a single CSV row
    Eval {
        #[command(flatten)]
        inputs: Inputs,
        /// Case study 1..8 (default: the topology as given, case 3 for the built-in backbone)
        /// Case study 1..8
        #[arg(long)]
        case: Option<i64>,
        #[command(flatten)]
        alphas: AlphaArgs,
        /// Evaluation mode: sdn or traditional
        #[arg(long, default_value = "sdn", value_parser = parse_mode)]
        mode: EvalMode,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Sweep alpha factors over a grid
    Sweep {
        #[command(flatten)]
        inputs: Inputs,
        /// Case study 1..8
        #[arg(long)]
        case: Option<i64>,
        /// Axis to sweep (alpha_S, alpha_H, alpha_O, alpha_C); repeat for a Cartesian product, outermost first
        #[arg(long, value_parser = parse_axis)]
        axis: Vec<AlphaAxis>,
        /// Comma-separated grid for the matching --axis (default 0.1,0.2,0.5,1,2,5,10)
        #[arg(long)]
        grid: Vec<String>,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[command(flatten)]
        method: MethodArgs,
        /// Run the jobs of a specification file instead
        #[arg(long, conflicts_with_all = ["axis", "grid", "case", "alpha_s", "alpha_h", "alpha_o", "alpha_c", "exact", "samples", "seed"])]
        spec: Option<PathBuf>,
    },
    /// All eight cases followed by the traditional baseline
    Cases {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Controller location study (alpha_O defaults to 0.2 here)
    Locations {
        #[command(flatten)]
        inputs: Inputs,
        /// Site pair SITE+SITE for SC1/SC2; repeatable (default: TRD+OSL1, BRG+STV, BRG+TRD, STV+OSL1)
        #[arg(long = "pair")]
        pairs: Vec<String>,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Minimal cut sets up to a given order
    Cutsets {
        #[command(flatten)]
        inputs: Inputs,
        /// Case study 1..8
        #[arg(long)]
        case: Option<i64>,
        /// Evaluation mode: sdn or traditional
        #[arg(long, default_value = "sdn", value_parser = parse_mode)]
        mode: EvalMode,
        /// Largest cut-set size to enumerate
        #[arg(long, default_value_t = 2)]
        max_order: usize,
    },
    /// Compare Monte Carlo against the exact value
    McCheck {
        #[command(flatten)]
        inputs: Inputs,
        /// Case study 1..8
        #[arg(long)]
        case: Option<i64>,
        #[command(flatten)]
        alphas: AlphaArgs,
        /// Evaluation mode: sdn or traditional
        #[arg(long, default_value = "sdn", value_parser = parse_mode)]
        mode: EvalMode,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Inputs {
    /// Topology file (default: built-in reference backbone)
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Parameter file applied on top of the shipped defaults
    #[arg(long)]
    params: Option<PathBuf>,
    /// Write output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AlphaArgs {
    /// Controller software failure intensity factor
    #[arg(long = "alpha-S")]
    alpha_s: Option<f64>,
    /// Controller hardware failure intensity factor
    #[arg(long = "alpha-H")]
    alpha_h: Option<f64>,
    /// Controller O&M failure intensity factor
    #[arg(long = "alpha-O")]
    alpha_o: Option<f64>,
    /// Controller uncovered-failure factor
    #[arg(long = "alpha-C")]
    alpha_c: Option<f64>,
}

impl AlphaArgs {
    fn over(&self, base: AlphaFactors) -> AlphaFactors {
        AlphaFactors {
            software: self.alpha_s.unwrap_or(base.software),
            hardware: self.alpha_h.unwrap_or(base.hardware),
            om: self.alpha_o.unwrap_or(base.om),
            coverage: self.alpha_c.unwrap_or(base.coverage),
        }
    }
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// Exact evaluation (the default)
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Monte Carlo with this many samples
    #[arg(long)]
    samples: Option<u64>,
    /// Monte Carlo seed
    #[arg(long, requires = "samples")]
    seed: Option<u64>,
}

impl MethodArgs {
    fn method(&self) -> Method {
        match self.samples {
            Some(samples) => Method::MonteCarlo { samples, seed: self.seed.unwrap_or(0) },
            None => Method::Exact,
        }
    }
}

fn parse_mode(s: &str) -> Result<EvalMode, String> {
    s.parse()
}

fn parse_axis(s: &str) -> Result<AlphaAxis, String> {
    s.parse()
}

/// Exit status and the text written to each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: u8,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        ScenarioError::from(e).into()
    }
}

fn input<E: ToString>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { status: 0, stdout: text, stderr: String::new() },
                _ => Outcome { status: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    let out_path = cli.command.inputs().out.clone();
    let result = dispatch(cli.command).and_then(|text| match &out_path {
        Some(path) => std::fs::write(path, &text)
            .map(|_| String::new())
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => Ok(text),
    });
    match result {
        Ok(stdout) => Outcome { status: 0, stdout, stderr: String::new() },
        Err(Failure::Input(m)) => Outcome { status: 1, stdout: String::new(), stderr: format!("error: {m}\n") },
        Err(Failure::Numeric(m)) => Outcome { status: 2, stdout: String::new(), stderr: format!("numeric failure: {m}\n") },
    }
}

impl Command {
    fn inputs(&self) -> &Inputs {
        match self {
            Command::Eval { inputs, .. }
            | Command::Sweep { inputs, .. }
            | Command::Cases { inputs, .. }
            | Command::Locations { inputs, .. }
            | Command::Cutsets { inputs, .. }
            | Command::McCheck { inputs, .. } => inputs,
        }
    }
}

struct Loaded {
    base: Topology,
    custom: bool,
    params: ParamSet,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(inputs: &Inputs) -> Result<Loaded, Failure> {
    let base = match &inputs.topology {
        Some(p) => parse_topology(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => build_reference_backbone(),
    };
    let params = match &inputs.params {
        Some(p) => parse_params(&read(p)?, shipped_params()).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => shipped_params(),
    };
    Ok(Loaded { base, custom: inputs.topology.is_some(), params })
}

impl Loaded {
    /// Case to apply: the requested one, else the topology as given (labelled
    /// case 3 for the built-in backbone).
    fn case(&self, case: Option<i64>) -> Result<Option<CaseId>, Failure> {
        match case {
            Some(n) => CaseId::new(n).map(Some).map_err(input),
            None if self.custom => Ok(None),
            None => Ok(Some(CaseId::REFERENCE)),
        }
    }

    fn target(&self, case: Option<CaseId>, mode: EvalMode) -> Result<(Topology, Scenario), Failure> {
        let t = match case {
            Some(c) => apply_case(&self.base, c).map_err(input)?,
            None => self.base.clone(),
        };
        let label = match (mode, case) {
            (EvalMode::Traditional, _) => Scenario::Traditional,
            (EvalMode::Sdn, Some(c)) => Scenario::Case(c),
            (EvalMode::Sdn, None) => Scenario::Custom,
        };
        Ok((t, label))
    }
}

fn dispatch(command: Command) -> Result<String, Failure> {
    match command {
        Command::Eval { inputs, case, alphas, mode, method } => {
            let l = load(&inputs)?;
            let (t, label) = l.target(l.case(case)?, mode)?;
            let row = run_topology(&t, label, mode, &l.params, alphas.over(AlphaFactors::default()), method.method())?;
            Ok(emit_csv(&SweepTable { rows: vec![row] }))
        }
        Command::Sweep { inputs, case, axis, grid, alphas, method, spec } => {
            let l = load(&inputs)?;
            let jobs = match spec {
                Some(path) => parse_spec(&read(&path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => {
                    if axis.is_empty() {
                        return Err(Failure::Input("sweep needs at least one --axis, or --spec".into()));
                    }
                    if grid.len() > axis.len() {
                        return Err(Failure::Input("more --grid values than --axis flags".into()));
                    }
                    let mut axes = Vec::new();
                    for (i, a) in axis.into_iter().enumerate() {
                        let g = match grid.get(i) {
                            Some(g) => parse_grid(g).map_err(Failure::Input)?,
                            None => DEFAULT_GRID.to_vec(),
                        };
                        axes.push((a, g));
                    }
                    vec![Job::Sweep(SweepSpec {
                        case: l.case(case)?,
                        axes,
                        fixed: alphas.over(AlphaFactors::default()),
                        method: method.method(),
                    })]
                }
            };
            let mut table = SweepTable::default();
            for job in jobs {
                table.rows.extend(run_job(&l, job)?.rows);
            }
            Ok(emit_csv(&table))
        }
        Command::Cases { inputs, alphas, method } => {
            let l = load(&inputs)?;
            let job = Job::Cases { alphas: alphas.over(AlphaFactors::default()), method: method.method() };
            Ok(emit_csv(&run_job(&l, job)?))
        }
        Command::Locations { inputs, pairs, alphas, method } => {
            let l = load(&inputs)?;
            let default = LocationSpec::default();
            let placements = if pairs.is_empty() {
                default.placements
            } else {
                parse_pairs(&pairs.join(",")).map_err(Failure::Input)?
            };
            let spec = LocationSpec { placements, alphas: alphas.over(default.alphas), method: method.method() };
            Ok(emit_csv(&run_job(&l, Job::Locations(spec))?))
        }
        Command::Cutsets { inputs, case, mode, max_order } => {
            let l = load(&inputs)?;
            let (t, _) = l.target(l.case(case)?, mode)?;
            let cuts = minimal_cut_sets(&t, mode, max_order).map_err(input)?;
            let mut out = String::from("order,cut_set\n");
            for cut in cuts {
                let _ = writeln!(out, "{},{}", cut.len(), cut.join(";"));
            }
            Ok(out)
        }
        Command::McCheck { inputs, case, alphas, mode, samples, seed } => {
            let l = load(&inputs)?;
            let (t, label) = l.target(l.case(case)?, mode)?;
            let alphas = alphas.over(AlphaFactors::default());
            alphas.validate()?;
            let map = l.params.class_unavailabilities(&t, &alphas)?.availability_map(&t, mode);
            let (exact, _) = Evaluator::new(t.clone(), mode).unavailability_for(&map, Method::Exact)?;
            let plan = MonteCarloPlan::new(&t, &map, mode).map_err(input)?;
            let est = run_monte_carlo(&plan, samples, seed).map_err(input)?.complement();
            let (lo, hi) = est.interval(Z_99);
            let verdict = if lo <= exact && exact <= hi { "PASS" } else { "FAIL" };
            Ok(format!(
                "case,mode,exact,estimate,ci_low,ci_high,confidence,samples,seed,verdict\n{label},{},{},{},{},{},0.99,{samples},{seed},{verdict}\n",
                mode.name(),
                format_decimal(exact),
                format_decimal(est.estimate),
                format_decimal(lo),
                format_decimal(hi),
            ))
        }
    }
}

fn run_job(l: &Loaded, job: Job) -> Result<SweepTable, Failure> {
    Ok(match job {
        Job::Sweep(mut spec) => {
            if spec.case.is_none() && !l.custom {
                spec.case = Some(CaseId::REFERENCE);
            }
            alpha_sweep(&l.base, &spec, &l.params)?
        }
        Job::Locations(spec) => location_study(&l.base, &spec, &l.params)?,
        Job::Cases { alphas, method } => case_suite(&l.base, &l.params, alphas, method)?,
    })
}
