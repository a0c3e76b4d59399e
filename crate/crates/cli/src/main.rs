use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqspread::census::{self, CensusReport};
use fqspread::expt::{self, ExperimentReport};
use fqspread::geom::{self, FVector};
use fqspread::{construct, Budget, Error, FieldDesc, PointSet};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "fqspread", version, about = "Spreads, distances and lines over F_q^d")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Field as "p^r" or a bare prime.
    #[arg(long, global = true, default_value = "5^1")]
    field: String,
    #[arg(long, global = true, default_value_t = 2)]
    d: usize,
    #[arg(long, global = true, env = "FQSPREAD_SEED", default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated objects; exceeding it is an error.
    #[arg(long, global = true, env = "FQSPREAD_BUDGET", default_value_t = Budget::DEFAULT.0)]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock time in census output.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    Field {
        #[command(subcommand)]
        cmd: FieldCmd,
    },
    Spread {
        #[command(subcommand)]
        cmd: SpreadCmd,
    },
    Kspread {
        #[command(subcommand)]
        cmd: KspreadCmd,
    },
    /// Emit an isotropic construction as a point-set file.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
    },
    Census {
        #[arg(value_enum)]
        kind: CensusKind,
        #[arg(long)]
        points: PathBuf,
        /// Spread value (element index) for `occurrences`.
        #[arg(long)]
        gamma: Option<u64>,
    },
    Search {
        #[command(subcommand)]
        cmd: SearchCmd,
    },
    /// Emit the sphere S_t as a point-set file.
    Sphere {
        #[arg(long, default_value_t = 1)]
        t: u64,
    },
    Experiment(ExperimentArgs),
}

#[derive(Subcommand, Debug)]
enum FieldCmd {
    Info,
}

#[derive(Subcommand, Debug)]
enum SpreadCmd {
    Eval {
        #[arg(long)]
        apex: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
    },
}

#[derive(Subcommand, Debug)]
enum KspreadCmd {
    Eval {
        #[arg(long)]
        points: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SearchCmd {
    IsoTriple,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConstructKind {
    Con1,
    Con2,
    Iso,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CensusKind {
    Spreads,
    Distances,
    Lines,
    Occurrences,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentKind {
    Bode,
    Threshold,
    Beck,
    Projection,
    Constructions,
    SphereDistance,
    SphereEquiv,
    IsoSearch,
    Properties,
    All,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentKind,
    /// Positive rational, e.g. 1, 0.5 or 2/3.
    #[arg(long, default_value = "1")]
    epsilon: String,
    /// Trial count (case count for `properties`); defaults per experiment.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long = "C", alias = "c", default_value = "2")]
    c: String,
    /// Set size for `projection`; defaults to q^k.
    #[arg(long)]
    n_points: Option<usize>,
    /// Run `threshold` on the isotropic construction instead of random sets.
    #[arg(long)]
    adversarial: bool,
}

enum Failure {
    Usage(String),
    Domain(Error),
    /// Experiment ran and its verdict was fail; output is already written.
    Verdict,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: UsageError");
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: UsageError");
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}", e.code());
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}

fn emit(g: &Global, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &g.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Domain(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_point(fd: &FieldDesc, d: usize, s: &str) -> Result<FVector, Failure> {
    let idx = s
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("bad point {s:?}: {e}")))?;
    if idx.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: idx.len() }.into());
    }
    Ok(FVector::from_indices(fd, &idx)?)
}

fn load_points(fd: &FieldDesc, path: &Path) -> Result<PointSet, Failure> {
    let ps = PointSet::read(path)?;
    if ps.field() != fd {
        return Err(Error::InvalidParameter(format!(
            "point file is over {}, but --field is {}",
            ps.field().spec(),
            fd.spec()
        ))
        .into());
    }
    Ok(ps)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let fd: FieldDesc = g.field.parse()?;
    let budget = Budget(g.budget);
    match cli.cmd {
        Cmd::Field { cmd: FieldCmd::Info } => {
            let info = json!({
                "field": fd.spec(),
                "p": fd.p(),
                "r": fd.r(),
                "q": fd.q(),
                "q_mod_4": fd.q_mod4(),
                "modulus": fd.modulus(),
                "encoding": "elements are integers 0..q-1 read as base-p digits c_0 + c_1 p + ... of the polynomial c_0 + c_1 x + ... modulo the listed monic modulus (coefficients lowest degree first)",
            });
            emit(g, &serde_json::to_string_pretty(&info).expect("json"))
        }
        Cmd::Spread { cmd: SpreadCmd::Eval { apex, b, c } } => {
            let a = parse_point(&fd, g.d, &apex)?;
            let b = parse_point(&fd, g.d, &b)?;
            let c = parse_point(&fd, g.d, &c)?;
            emit(g, &geom::spread(&fd, &a, &b, &c)?.to_string())
        }
        Cmd::Kspread { cmd: KspreadCmd::Eval { points } } => {
            let ps = load_points(&fd, &points)?;
            emit(g, &geom::k_spread(&fd, ps.points())?.to_string())
        }
        Cmd::Construct { kind } => {
            let ps = match kind {
                ConstructKind::Con1 => construct::con1_set(&fd, g.d, budget)?,
                ConstructKind::Con2 => construct::con2_set(&fd, g.d, budget)?,
                ConstructKind::Iso => {
                    let fam = construct::iso_family(&fd, g.d)?;
                    PointSet::new(fd.clone(), g.d, fam.vectors().to_vec())?
                }
            };
            emit(g, &ps.to_text())
        }
        Cmd::Census { kind, points, gamma } => {
            let ps = load_points(&fd, &points)?;
            let start = Instant::now();
            let report = CensusReport::for_set(&ps);
            let (mut report, csv) = match kind {
                CensusKind::Spreads => {
                    let c = census::distinct_spreads(&ps, budget)?;
                    let csv = census::values_csv("spread", &c.defined_values);
                    (report.with_spreads(&c), csv)
                }
                CensusKind::Distances => {
                    let c = census::distinct_distances(&ps)?;
                    let csv = census::values_csv("distance", &c.with_zero);
                    (report.with_distances(&c), csv)
                }
                CensusKind::Lines => {
                    let c = census::spanned_lines(&ps, budget)?;
                    let csv = format!("lines,max_degree\n{},{}\n", c.lines, c.max_degree);
                    (report.with_lines(&c), csv)
                }
                CensusKind::Occurrences => {
                    let gamma = gamma.ok_or_else(|| Failure::Usage("occurrences needs --gamma".into()))?;
                    let gamma = fd.elem(gamma)?;
                    let n = census::spread_occurrences(&ps, gamma, budget)?;
                    (report.with_occurrences(gamma, n), format!("gamma,occurrences\n{gamma},{n}\n"))
                }
            };
            if g.timing {
                report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
            }
            match g.format {
                Format::Json => emit(g, &report.to_json()),
                Format::Csv => emit(g, &csv),
            }
        }
        Cmd::Search { cmd: SearchCmd::IsoTriple } => match census::search_iso_triple(&fd, g.d, budget)? {
            None => emit(g, "NoneFound"),
            Some(fam) => emit(g, &PointSet::new(fd.clone(), g.d, fam.vectors().to_vec())?.to_text()),
        },
        Cmd::Sphere { t } => {
            let t = fd.elem(t)?;
            emit(g, &geom::sphere_points(&fd, g.d, t, budget)?.to_text())
        }
        Cmd::Experiment(args) => run_experiment(g, &fd, budget, &args),
    }
}

fn run_experiment(g: &Global, fd: &FieldDesc, budget: Budget, args: &ExperimentArgs) -> Result<(), Failure> {
    let eps = expt::parse_rational(&args.epsilon)?;
    let c = expt::parse_rational(&args.c)?;
    let trials = |default: usize| args.trials.unwrap_or(default);
    let reports: Vec<ExperimentReport> = match args.kind {
        ExperimentKind::Bode => vec![expt::run_bode(fd, trials(100), g.seed, budget)?],
        ExperimentKind::Threshold if args.adversarial => {
            vec![expt::run_threshold_adversarial(fd, g.d, budget)?]
        }
        ExperimentKind::Threshold => vec![expt::run_threshold(fd, g.d, eps, trials(100), g.seed, budget)?],
        ExperimentKind::Beck => vec![expt::run_beck(fd, g.d, eps, trials(100), g.seed, budget)?],
        ExperimentKind::Projection => {
            let n = match args.n_points {
                Some(n) => n,
                None => (fd.q() as usize)
                    .checked_pow(args.k as u32)
                    .ok_or_else(|| Failure::Usage("q^k too large; pass --n-points".into()))?,
            };
            vec![expt::run_projection(fd, g.d, args.k, n, trials(200), g.seed, budget)?]
        }
        ExperimentKind::Constructions => vec![expt::run_constructions(fd, g.d, budget)?],
        ExperimentKind::SphereDistance => {
            vec![expt::run_sphere_distance(fd, g.d, c, trials(20), g.seed, budget)?]
        }
        ExperimentKind::SphereEquiv => vec![expt::run_sphere_equiv(fd, g.d, budget)?],
        ExperimentKind::IsoSearch => vec![expt::run_iso_search(fd, g.d, budget)?],
        ExperimentKind::Properties => vec![expt::run_spread_properties(fd, trials(10_000), g.seed)?],
        ExperimentKind::All => expt::run_all(g.seed, budget)?,
    };
    let text = match (g.format, args.kind) {
        (Format::Csv, _) => {
            let mut out = String::new();
            for (i, r) in reports.iter().enumerate() {
                let csv = r.to_csv();
                // keep a single header when concatenating
                out.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |x| x.1) });
            }
            out
        }
        (Format::Json, ExperimentKind::All) => serde_json::to_string_pretty(&reports).expect("json"),
        (Format::Json, _) => reports[0].to_json(),
    };
    emit(g, &text)?;
    if reports.iter().all(ExperimentReport::passed) {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}
