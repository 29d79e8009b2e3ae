use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bearing_equiv::analysis::{
    acyclic_nonequivalence_conditions, classify_equivalence, is_lff, laplacian_spectrum,
    two_edge_sufficient_condition, Tolerances,
};
use bearing_equiv::dynamics::{simulate, SimulationOptions, TargetSpec};
use bearing_equiv::generate::{generate, random_configuration, GenKind, GenSpec, DEFAULT_BOX};
use bearing_equiv::geometry::{Configuration, DirectedFormation};
use bearing_equiv::io::{
    digest, export_trace, parse_formation, serialize_report, spectrum_pairs, to_sorted_json,
    FormationDocument, ReportDocument,
};
use bearing_equiv::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bearing",
    version,
    about = "Bearing rigidity and bearing equivalence of directed formations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify bearing equivalence. Several files are analyzed concurrently
    /// and reported as a JSON array in input order.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Relative singular-value threshold for numerical rank.
        #[arg(long)]
        tol_rank: Option<f64>,
        /// Threshold on |P_x y| below which two bearings count as parallel.
        #[arg(long)]
        tol_collinear: Option<f64>,
        /// Projector-distance threshold for subspace equality.
        #[arg(long)]
        tol_subspace: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Eigenvalues of the bearing Laplacian as a JSON array of [re, im].
    Spectrum { file: PathBuf },
    /// Integrate the bearing control law and write a CSV trace.
    ///
    /// The target is the document's `target` if present, otherwise the bearings
    /// of its own configuration. The initial condition is taken from
    /// `--initial`, or drawn with `--seed`, or else the document positions
    /// when a target is given.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        #[arg(long, conflicts_with = "seed")]
        initial: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add a vertex observing existing vertices (1-based ids).
    Grow {
        file: PathBuf,
        #[arg(long)]
        position: String,
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = bearing_equiv::geometry::COLLINEAR_TOL)]
        tol_collinear: f64,
    },
    /// Embed the formation in a higher dimension.
    Lift {
        file: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Generate a random formation.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Formation document whose graph receives random positions
        /// (`--kind random`).
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Evaluate one structural property.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long, default_value_t = bearing_equiv::geometry::COLLINEAR_TOL)]
        tol_collinear: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Lff,
    Cycle,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Acyclic,
    SpanningRoot,
    Lff,
    Prop2,
    Prop3,
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<(String, DirectedFormation, Option<TargetSpec>)> {
    let text = read(path)?;
    let (f, target) = parse_formation(&text)
        .map_err(Failure::from)
        .map_err(|e| with_path(e, path))?;
    Ok((text, f, target))
}

fn with_path(e: Failure, path: &Path) -> Failure {
    match e {
        Failure::Validation(m) => Failure::Validation(format!("{}: {m}", path.display())),
        Failure::Numerical(m) => Failure::Numerical(format!("{}: {m}", path.display())),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Failure::Validation(format!("bad {what} entry {x:?}")))
        })
        .collect()
}

fn one_based(v: Option<usize>) -> serde_json::Value {
    v.map_or(serde_json::Value::Null, |i| json!(i + 1))
}

fn analyze_one(path: &Path, tol: &Tolerances) -> CliResult<ReportDocument> {
    let (text, f, _) = load(path)?;
    let report = classify_equivalence(&f, tol).map_err(|e| with_path(e.into(), path))?;
    Ok(ReportDocument::new(&report, digest(&text)))
}

fn text_summary(path: &Path, r: &ReportDocument) -> String {
    format!(
        "{}: n={} m={} d={} rank_rb={} rank_lb={} dim_null_rb={} dim_null_lb={} ibr={} equivalent={} min_real_part={}",
        path.display(),
        r.vertex_count,
        r.edge_count,
        r.dimension,
        r.rank_rb,
        r.rank_lb,
        r.dim_null_rb,
        r.dim_null_lb,
        r.is_ibr,
        r.is_bearing_equivalent,
        r.min_real_part
    )
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Analyze {
            files,
            tol_rank,
            tol_collinear,
            tol_subspace,
            format,
        } => {
            let mut tol = Tolerances::default();
            if let Some(r) = tol_rank {
                tol.rank_rel = r;
            }
            if let Some(c) = tol_collinear {
                tol.collinear = c;
            }
            if let Some(s) = tol_subspace {
                tol.subspace = s;
            }
            let results: Vec<CliResult<ReportDocument>> = std::thread::scope(|s| {
                let handles: Vec<_> = files
                    .iter()
                    .map(|p| s.spawn(move || analyze_one(p, &tol)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("analysis thread panicked"))
                    .collect()
            });
            let reports = results.into_iter().collect::<CliResult<Vec<_>>>()?;
            Ok(match format {
                Format::Json if reports.len() == 1 => serialize_report(&reports[0]),
                Format::Json => {
                    let items: Vec<String> = reports.iter().map(serialize_report).collect();
                    format!("[\n{}\n]", items.join(",\n"))
                }
                Format::Text => files
                    .iter()
                    .zip(&reports)
                    .map(|(p, r)| text_summary(p, r))
                    .collect::<Vec<_>>()
                    .join("\n"),
            })
        }
        Command::Spectrum { file } => {
            let (_, f, _) = load(&file)?;
            let spectrum = laplacian_spectrum(&f, Tolerances::default().eigen_cap)?;
            Ok(serde_json::to_string(&spectrum_pairs(&spectrum)).expect("numbers serialize"))
        }
        Command::Simulate {
            file,
            dt,
            t_end,
            initial,
            seed,
            out,
        } => {
            let (_, f, target) = load(&file)?;
            let has_target = target.is_some();
            let target = target.unwrap_or_else(|| TargetSpec::from_formation(&f));
            let p0: Configuration = match (initial, seed) {
                (Some(path), _) => {
                    let (_, g, _) = load(&path)?;
                    if g.vertex_count() != f.vertex_count() || g.dim() != f.dim() {
                        return Err(Failure::Validation(format!(
                            "{}: initial condition has {} points in R^{}, expected {} in R^{}",
                            path.display(),
                            g.vertex_count(),
                            g.dim(),
                            f.vertex_count(),
                            f.dim()
                        )));
                    }
                    g.config().clone()
                }
                (None, Some(s)) => random_configuration(f.vertex_count(), f.dim(), s, DEFAULT_BOX)?,
                (None, None) if has_target => f.config().clone(),
                (None, None) => random_configuration(f.vertex_count(), f.dim(), 0, DEFAULT_BOX)?,
            };
            let opts = SimulationOptions {
                dt,
                t_end,
                ..SimulationOptions::default()
            };
            let trace = simulate(&target, &p0, &opts)?;
            fs::write(&out, export_trace(&trace))
                .map_err(|e| Failure::Validation(format!("{}: {e}", out.display())))?;
            Ok(format!(
                "verdict={} t={} final_bearing_error={} samples={}",
                trace.verdict,
                trace.times.last().copied().unwrap_or(0.0),
                trace.final_bearing_error(),
                trace.times.len()
            ))
        }
        Command::Grow {
            file,
            position,
            targets,
            tol_collinear,
        } => {
            let (_, f, _) = load(&file)?;
            let position: Vec<f64> = parse_list(&position, "position")?;
            let ids: Vec<usize> = parse_list(&targets, "target")?;
            if ids.contains(&0) {
                return Err(Failure::Validation("vertex ids are 1-based".into()));
            }
            let targets: Vec<usize> = ids.iter().map(|i| i - 1).collect();
            let grown = f.grow(&position, &targets, tol_collinear)?;
            Ok(FormationDocument::from_formation(&grown, None).to_json())
        }
        Command::Lift { file, dim } => {
            let (_, f, _) = load(&file)?;
            Ok(FormationDocument::from_formation(&f.lift(dim)?, None).to_json())
        }
        Command::Gen {
            kind,
            n,
            d,
            seed,
            graph,
        } => {
            let spec = match kind {
                KindArg::Random => {
                    let path = graph.ok_or_else(|| {
                        Failure::Validation("--kind random needs --graph <file>".into())
                    })?;
                    let (_, g, _) = load(&path)?;
                    if n.is_some_and(|n| n != g.vertex_count()) {
                        return Err(Failure::Validation(format!(
                            "--n {} disagrees with the {} vertices of {}",
                            n.unwrap_or(0),
                            g.vertex_count(),
                            path.display()
                        )));
                    }
                    GenSpec::on_graph(g.graph().clone(), d, seed)
                }
                KindArg::Lff | KindArg::Cycle => {
                    let n = n.ok_or_else(|| Failure::Validation("--n is required".into()))?;
                    let kind = match kind {
                        KindArg::Lff => GenKind::Lff,
                        _ => GenKind::DirectedCycleWithChords,
                    };
                    GenSpec::new(kind, n, d, seed)
                }
            };
            Ok(FormationDocument::from_formation(&generate(&spec)?, None).to_json())
        }
        Command::Check {
            file,
            property,
            tol_collinear,
        } => {
            let (_, f, _) = load(&file)?;
            let g = f.graph();
            let ids = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
            let block = match property {
                Property::Acyclic => json!({
                    "acyclic": g.is_acyclic(),
                    "sink_first_order": g.sink_first_order().map(|o| ids(&o)),
                }),
                Property::SpanningRoot => json!({
                    "spanning_root_exists": g.spanning_root().is_some(),
                    "spanning_root": one_based(g.spanning_root()),
                }),
                Property::Lff => {
                    let s = g.lff_structure();
                    json!({
                        "lff": is_lff(&f, tol_collinear),
                        "structural_lff": s.is_structural_lff,
                        "leader": one_based(s.leader),
                        "first_follower": one_based(s.first_follower),
                    })
                }
                Property::Prop2 => {
                    let c = acyclic_nonequivalence_conditions(&f, tol_collinear)?;
                    json!({
                        "cond_i": c.cond_i,
                        "cond_ii": c.cond_ii,
                        "cond_iii": c.cond_iii,
                        "cond_iii_with_degree_one": c.cond_iii_with_degree_one,
                        "leaders": ids(&c.leaders),
                        "single_edge": ids(&c.single_edge),
                        "collinear": ids(&c.collinear),
                    })
                }
                Property::Prop3 => json!({
                    "two_edge_sufficient": two_edge_sufficient_condition(&f, tol_collinear),
                    "out_degrees": g.out_degrees(),
                }),
            };
            Ok(to_sorted_json(&block))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
