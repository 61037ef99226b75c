use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kanpol::exact::parse_rational;
use kanpol::measures::StateSpace;
use kanpol::monge::monge_polytope_vertices;
use kanpol::polytopes::{build_system, enumerate_vertices};
use kanpol::report::{
    classify_doc, coeff_vertex_set_doc, diamond_doc, figure_data_csv, mesh_to_off, reduced_doc,
    reduced_monge_doc, solve_doc, to_json, volume_doc, FigureKind,
};
use kanpol::transport::PairCost;
use kanpol::{Budget, Error};

const EXIT_DEFECT: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_VOLUME_STATES: u8 = 4;
const EXIT_REPULSIVE_B: u8 = 5;

#[derive(Parser)]
#[command(
    name = "kanpol",
    about = "Exact vertex enumeration, classification, volumes and transport \
             solves for symmetric multi-marginal Kantorovich polytopes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Kantorovich,
    Monge,
    Reduced,
    ReducedMonge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Off,
}

#[derive(Args)]
struct CommonArgs {
    /// Enumeration cap on basis candidates and permutation tuples
    #[arg(long)]
    budget: Option<u64>,
    /// Worker threads (default: all cores); output does not depend on this
    #[arg(long)]
    threads: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path (default: standard output)
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the vertex set of a polytope family
    Enumerate {
        #[arg(short = 'N', long = "marginals")]
        marginals: u32,
        #[arg(short = 'L', long = "states")]
        states: usize,
        #[arg(long, value_enum, default_value_t = Kind::Kantorovich)]
        kind: Kind,
        /// Attach a verified strict exposing cost to every vertex
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Enumerate a reduced (two-point marginal) vertex set
    Reduce {
        #[arg(short = 'N', long = "marginals")]
        marginals: u32,
        #[arg(short = 'L', long = "states")]
        states: usize,
        #[arg(long, value_enum, default_value_t = Kind::Reduced)]
        kind: Kind,
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Vertex counts and Monge classification for one parameter pair
    Classify {
        #[arg(short = 'N', long = "marginals")]
        marginals: u32,
        #[arg(short = 'L', long = "states")]
        states: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exact volumes of the reduced polytopes on three states
    Volume {
        #[arg(short = 'N', long = "marginals")]
        marginals: u32,
        #[arg(short = 'L', long = "states", default_value_t = 3)]
        states: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Solve the reduced transport problem for a pairwise cost
    Solve {
        #[arg(short = 'N', long = "marginals")]
        marginals: u32,
        #[arg(short = 'L', long = "states", default_value_t = 3)]
        states: usize,
        /// Builtin cost: discrete | gs | repulsive[:B=p/q] | coulomb[:B=p/q]
        #[arg(long, conflicts_with = "cost_file")]
        cost: Option<String>,
        /// JSON cost file: {"ell": k, "v": [["p/q", ...], ...]}
        #[arg(long)]
        cost_file: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Vertex-count grid over a range of marginals and states, as CSV
    FigureData {
        #[arg(long, default_value_t = 2)]
        n_min: u32,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 2)]
        l_min: usize,
        #[arg(long, default_value_t = 4)]
        l_max: usize,
        #[arg(long, value_enum, default_value_t = Kind::Reduced)]
        kind: Kind,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The hull of the five limit extreme points on three states
    Diamond {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the full verification suite
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not configuration errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(CliError { exit, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(exit)
        }
    }
}

struct CliError {
    exit: u8,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            exit: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match &e {
            Error::Budget { .. } => EXIT_BUDGET,
            Error::InvalidInput(_) => EXIT_CONFIG,
            Error::Defect(_) => EXIT_DEFECT,
        };
        CliError {
            exit,
            message: e.to_string(),
        }
    }
}

fn budget_of(common: &CommonArgs) -> Budget {
    match common.budget {
        Some(cap) => Budget::uniform(cap),
        None => Budget::default(),
    }
}

fn install_threads(common: &CommonArgs) -> Result<(), CliError> {
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(common: &CommonArgs, document: &str) -> Result<(), CliError> {
    match &common.output {
        Some(path) => fs::write(path, document)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(document.as_bytes())
                .map_err(|e| CliError::config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn require_format(common: &CommonArgs, allowed: &[Format]) -> Result<(), CliError> {
    if allowed.contains(&common.format) {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "--format {:?} is not supported by this command",
            common.format
        )))
    }
}

fn parse_cost(spec: &str, ell: usize) -> Result<PairCost, CliError> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    match name {
        "discrete" | "gs" => {
            if params.is_some() {
                return Err(CliError::config(format!("{name} takes no parameters")));
            }
            Ok(PairCost::discrete(ell))
        }
        "repulsive" | "coulomb" => {
            let b = match params {
                None => kanpol::exact::rat(2, 1),
                Some(p) => {
                    let value = p.strip_prefix("B=").ok_or_else(|| {
                        CliError::config(format!("expected {name}:B=p/q, got {spec:?}"))
                    })?;
                    parse_rational(value).map_err(CliError::config)?
                }
            };
            PairCost::repulsive(ell, b).map_err(|_| CliError {
                exit: EXIT_REPULSIVE_B,
                message: "the repulsive diagonal B must exceed 1".into(),
            })
        }
        _ => Err(CliError::config(format!(
            "unknown cost {name:?}; builtins are discrete, gs, repulsive, coulomb"
        ))),
    }
}

fn parse_cost_file(path: &PathBuf) -> Result<PairCost, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("bad cost file: {e}")))?;
    let ell = value
        .get("ell")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| CliError::config("cost file is missing the \"ell\" field"))?
        as usize;
    let rows = value
        .get("v")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::config("cost file is missing the \"v\" matrix"))?;
    if rows.len() != ell {
        return Err(CliError::config("cost matrix row count differs from ell"));
    }
    let mut entries = Vec::with_capacity(ell * ell);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| CliError::config("cost rows must be arrays"))?;
        if row.len() != ell {
            return Err(CliError::config("cost matrix is not square"));
        }
        for cell in row {
            let s = cell
                .as_str()
                .ok_or_else(|| CliError::config("cost entries must be \"p/q\" strings"))?;
            entries.push(parse_rational(s).map_err(CliError::config)?);
        }
    }
    PairCost::from_matrix(ell, entries).map_err(CliError::from)
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Enumerate {
            marginals,
            states,
            kind,
            certify,
            common,
        }
        | Command::Reduce {
            marginals,
            states,
            kind,
            certify,
            common,
        } => {
            install_threads(&common)?;
            require_format(&common, &[Format::Json])?;
            let budget = budget_of(&common);
            let space = StateSpace::new(states)?;
            let doc = match kind {
                Kind::Kantorovich => {
                    let sys = build_system(marginals, space, budget)?;
                    let vs = enumerate_vertices(&sys, budget)?;
                    to_json(&coeff_vertex_set_doc(
                        "kantorovich",
                        marginals,
                        space,
                        &vs,
                        certify,
                    )?)
                }
                Kind::Monge => {
                    let vs = monge_polytope_vertices(marginals, space, budget)?;
                    to_json(&coeff_vertex_set_doc("monge", marginals, space, &vs, certify)?)
                }
                Kind::Reduced => to_json(&reduced_doc(marginals, space, budget, certify)?),
                Kind::ReducedMonge => to_json(&reduced_monge_doc(marginals, space, budget)?),
            };
            emit(&common, &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify {
            marginals,
            states,
            common,
        } => {
            install_threads(&common)?;
            require_format(&common, &[Format::Json])?;
            let space = StateSpace::new(states)?;
            let doc = classify_doc(marginals, space, budget_of(&common))?;
            emit(&common, &to_json(&doc))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Volume {
            marginals,
            states,
            common,
        } => {
            install_threads(&common)?;
            require_format(&common, &[Format::Json, Format::Off])?;
            if states != 3 {
                return Err(CliError {
                    exit: EXIT_VOLUME_STATES,
                    message: format!("volumes are defined for 3 states, got {states}"),
                });
            }
            let (doc, report) = volume_doc(marginals, budget_of(&common))?;
            match common.format {
                Format::Json => emit(&common, &to_json(&doc))?,
                Format::Off => {
                    let base = common.output.clone().ok_or_else(|| {
                        CliError::config("--format off needs -o BASE to write two mesh files")
                    })?;
                    let kan = base.with_extension("kantorovich.off");
                    let monge = base.with_extension("monge.off");
                    fs::write(&kan, mesh_to_off(&report.mesh_kantorovich)).map_err(|e| {
                        CliError::config(format!("cannot write {}: {e}", kan.display()))
                    })?;
                    fs::write(&monge, mesh_to_off(&report.mesh_monge)).map_err(|e| {
                        CliError::config(format!("cannot write {}: {e}", monge.display()))
                    })?;
                    println!("{}", to_json(&doc).trim_end());
                }
                Format::Csv => unreachable!("rejected above"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            marginals,
            states,
            cost,
            cost_file,
            common,
        } => {
            install_threads(&common)?;
            require_format(&common, &[Format::Json])?;
            let space = StateSpace::new(states)?;
            let pair = match (&cost, &cost_file) {
                (Some(spec), None) => parse_cost(spec, states)?,
                (None, Some(path)) => {
                    let c = parse_cost_file(path)?;
                    if c.ell() != states {
                        return Err(CliError::config(format!(
                            "cost file is over {} states, -L is {states}",
                            c.ell()
                        )));
                    }
                    c
                }
                (None, None) => {
                    return Err(CliError::config("provide --cost or --cost-file"))
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let doc = solve_doc(marginals, space, &pair, budget_of(&common))?;
            emit(&common, &to_json(&doc))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::FigureData {
            n_min,
            n_max,
            l_min,
            l_max,
            kind,
            common,
        } => {
            install_threads(&common)?;
            require_format(&common, &[Format::Csv])?;
            if n_min > n_max || l_min > l_max || n_min == 0 || l_min == 0 {
                return Err(CliError::config("empty or invalid grid range"));
            }
            let kind = match kind {
                Kind::Kantorovich => FigureKind::Kantorovich,
                Kind::Reduced => FigureKind::Reduced,
                other => {
                    return Err(CliError::config(format!(
                        "figure-data supports kantorovich and reduced, got {other:?}"
                    )))
                }
            };
            let csv = figure_data_csv((n_min, n_max), (l_min, l_max), kind, budget_of(&common))?;
            emit(&common, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Diamond { common } => {
            install_threads(&common)?;
            require_format(&common, &[Format::Json, Format::Off])?;
            let (doc, mesh) = diamond_doc()?;
            match common.format {
                Format::Json => emit(&common, &to_json(&doc))?,
                Format::Off => emit(&common, &mesh_to_off(&mesh))?,
                Format::Csv => unreachable!("rejected above"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { common } => {
            install_threads(&common)?;
            require_format(&common, &[Format::Json])?;
            let results = kanpol::acceptance::run_all(budget_of(&common));
            let mut all_passed = true;
            let mut out = String::new();
            for r in &results {
                all_passed &= r.passed;
                out.push_str(&r.line());
                out.push('\n');
            }
            emit(&common, &out)?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_DEFECT)
            })
        }
    }
}
