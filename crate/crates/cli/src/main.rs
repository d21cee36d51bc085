//! Command-line driver: every verification of the lab with
//! machine-readable output and CI-friendly exit codes.
//!
//! Exit codes: 0 all requested checks passed, 1 at least one check
//! failed, 2 usage error, 3 internal error.  Identical invocations
//! (including seed and precision) produce byte-identical reports.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use divdivlab_core::complexlab::{self, ComplexId};
use divdivlab_core::error::Error;
use divdivlab_core::femdofs::ElementKind;
use divdivlab_core::meshfem::{Mesh, SpaceKind};
use divdivlab_core::report::{CheckResult, Report};
use divdivlab_core::suites::{self, CellSpec};

#[derive(Parser)]
#[command(name = "divdivlab", version, about = "divdiv / sym-curl finite element verification lab")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Working precision in bits (>= 64).
    #[arg(long, default_value_t = 256, global = true)]
    precision: u32,
    /// Output format.
    #[arg(long, default_value = "json", value_parser = ["json", "tsv"], global = true)]
    format: String,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Base seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads (defaults to the rayon heuristic).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Polynomial complex certificates.
    Complex {
        #[command(subcommand)]
        action: ComplexCmd,
    },
    /// Direct-sum decompositions and dimension formulas.
    Decomp {
        #[command(subcommand)]
        action: DecompCmd,
    },
    /// Element-level checks.
    Element {
        #[command(subcommand)]
        action: ElementCmd,
    },
    /// Bubble spaces and bubble complexes.
    Bubble {
        #[command(subcommand)]
        action: BubbleCmd,
    },
    /// Green's identities.
    Green {
        #[command(subcommand)]
        action: GreenCmd,
    },
    /// Trace relations and patching.
    Trace {
        #[command(subcommand)]
        action: TraceCmd,
    },
    /// Global finite element spaces on meshes.
    Mesh {
        #[command(subcommand)]
        action: MeshCmd,
    },
    /// Dimension tables.
    Dims {
        #[command(subcommand)]
        action: DimsCmd,
    },
    /// Pointwise matrix/vector identity suite.
    Identities {
        #[command(subcommand)]
        action: IdentitiesCmd,
    },
}

#[derive(Subcommand)]
enum ComplexCmd {
    Verify {
        /// Complex name (or "all").
        #[arg(long, default_value = "all")]
        name: String,
        /// Inclusive degree range, e.g. 3 or 2..5.
        #[arg(long)]
        k: Option<String>,
        /// Re-mix every basis by a seeded unimodular transform first.
        #[arg(long)]
        remix: bool,
    },
}

#[derive(Subcommand)]
enum DecompCmd {
    Verify {
        #[arg(long, default_value = "3..5")]
        k: String,
    },
}

#[derive(Subcommand)]
enum ElementCmd {
    Unisolvence {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 3)]
        l: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// "reference" or "random".
        #[arg(long, default_value = "reference")]
        cell: String,
        /// Seed range for random cells, e.g. 1..3.
        #[arg(long)]
        seeds: Option<String>,
    },
    Dualbasis {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 3)]
        l: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value = "reference")]
        cell: String,
        #[arg(long)]
        seeds: Option<String>,
    },
}

#[derive(Subcommand)]
enum BubbleCmd {
    Verify {
        #[arg(long, default_value = "3..4")]
        l: String,
        /// Matching k for the interior space (defaults to l).
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value = "reference")]
        cell: String,
        #[arg(long)]
        seeds: Option<String>,
    },
}

#[derive(Subcommand)]
enum GreenCmd {
    Check {
        /// Random fields per cell.
        #[arg(long, default_value_t = 2)]
        cases: usize,
        /// Random cells per identity.
        #[arg(long, default_value_t = 5)]
        cells: usize,
    },
}

#[derive(Subcommand)]
enum TraceCmd {
    Check {
        #[arg(long, default_value_t = 5)]
        cases: usize,
    },
}

#[derive(Subcommand)]
enum MeshCmd {
    Verify {
        /// Builtin mesh name (single_tet, two_tets, cube6) or "all".
        #[arg(long, default_value = "all")]
        mesh: String,
        /// Mesh file to load instead of a builtin.
        #[arg(long)]
        mesh_file: Option<String>,
        #[arg(long, default_value_t = 3)]
        l: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
}

#[derive(Subcommand)]
enum DimsCmd {
    Table {
        /// Space name: V_h, Sigma_h_T, Sigma_h_S, Q_h or "all".
        #[arg(long, default_value = "all")]
        name: String,
        #[arg(long, default_value = "two_tets")]
        mesh: String,
        #[arg(long, default_value_t = 3)]
        l: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
}

#[derive(Subcommand)]
enum IdentitiesCmd {
    Check {
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

fn parse_range(s: &str) -> Result<(u32, u32), Error> {
    if let Some((a, b)) = s.split_once("..") {
        let lo = a.parse().map_err(|_| Error::ParamRange(format!("bad range '{s}'")))?;
        let hi = b.parse().map_err(|_| Error::ParamRange(format!("bad range '{s}'")))?;
        Ok((lo, hi))
    } else {
        let v = s.parse().map_err(|_| Error::ParamRange(format!("bad range '{s}'")))?;
        Ok((v, v))
    }
}

fn cell_specs(cell: &str, seeds: &Option<String>, default_seed: u64) -> Result<Vec<CellSpec>, Error> {
    match cell {
        "reference" => Ok(vec![CellSpec::Reference]),
        "random" => {
            let (lo, hi) = match seeds {
                Some(r) => parse_range(r)?,
                None => (default_seed as u32 + 1, default_seed as u32 + 1),
            };
            Ok((lo..=hi).map(|s| CellSpec::Random(s as u64)).collect())
        }
        other => Err(Error::ParamRange(format!("unknown cell kind '{other}'"))),
    }
}

fn run(cli: &Cli) -> Result<(String, Vec<CheckResult>), Error> {
    let prec = cli.common.precision;
    if prec < 64 {
        return Err(Error::ParamRange("precision must be at least 64 bits".into()));
    }
    let seed = cli.common.seed;
    match &cli.command {
        Command::Complex {
            action: ComplexCmd::Verify { name, k, remix },
        } => {
            let ids: Vec<ComplexId> = if name == "all" {
                complexlab::builtin_complexes()
            } else {
                vec![ComplexId::parse(name)
                    .ok_or_else(|| Error::ParamRange(format!("unknown complex '{name}'")))?]
            };
            let range = match k {
                Some(r) => Some(parse_range(r)?),
                None => None,
            };
            let mut results = suites::complexes_suite(&ids, range)?;
            if *remix {
                for &id in &ids {
                    let (lo, hi) = id.degree_range();
                    let k0 = range.map(|(a, _)| a.max(lo)).unwrap_or(lo).min(hi);
                    let rep = complexlab::verify_complex_remixed(id, k0, seed)?;
                    let mut r = CheckResult::new(
                        format!("complex-remixed/{}", rep.name),
                        format!("k={k0} seed={seed}"),
                        rep.pass,
                    );
                    r.metric_int("alternating_sum", rep.alternating_sum);
                    results.push(r);
                }
            }
            let cfg = format!(
                "complex verify --name {name} --k {} --remix {remix} --precision {prec} --seed {seed}",
                k.clone().unwrap_or_else(|| "default".into())
            );
            Ok((cfg, results))
        }
        Command::Decomp {
            action: DecompCmd::Verify { k },
        } => {
            let (lo, hi) = parse_range(k)?;
            let ks: Vec<u32> = (lo..=hi).collect();
            let mut results = suites::decomp_suite(&ks)?;
            results.extend(suites::kernel_dims_suite(&ks)?);
            Ok((format!("decomp verify --k {k} --precision {prec}"), results))
        }
        Command::Element { action } => match action {
            ElementCmd::Unisolvence {
                name,
                l,
                k,
                cell,
                seeds,
            } => {
                let kind = ElementKind::parse(name)
                    .ok_or_else(|| Error::ParamRange(format!("unknown element '{name}'")))?;
                let cells = cell_specs(cell, seeds, seed)?;
                let results = suites::unisolvence_suite(kind, *l, *k, &cells, prec)?;
                let cfg = format!(
                    "element unisolvence --name {name} --l {l} --k {k} --cell {cell} --seeds {} --precision {prec}",
                    seeds.clone().unwrap_or_else(|| "default".into())
                );
                Ok((cfg, results))
            }
            ElementCmd::Dualbasis {
                name,
                l,
                k,
                cell,
                seeds,
            } => {
                let kind = ElementKind::parse(name)
                    .ok_or_else(|| Error::ParamRange(format!("unknown element '{name}'")))?;
                if kind == ElementKind::DivDiv2d {
                    return Err(Error::ParamRange(
                        "dual bases are computed for the tetrahedral elements".into(),
                    ));
                }
                let cells = cell_specs(cell, seeds, seed)?;
                let results = suites::dualbasis_suite(kind, *l, *k, &cells, prec)?;
                let cfg = format!(
                    "element dualbasis --name {name} --l {l} --k {k} --cell {cell} --precision {prec}"
                );
                Ok((cfg, results))
            }
        },
        Command::Bubble {
            action: BubbleCmd::Verify { l, k, cell, seeds },
        } => {
            let (lo, hi) = parse_range(l)?;
            let pairs: Vec<(u32, u32)> = (lo..=hi).map(|ll| (ll, k.unwrap_or(ll))).collect();
            let cells = cell_specs(cell, seeds, seed)?;
            let results = suites::bubble_suite(&pairs, &cells, prec)?;
            Ok((
                format!("bubble verify --l {l} --cell {cell} --precision {prec}"),
                results,
            ))
        }
        Command::Green {
            action: GreenCmd::Check { cases, cells },
        } => {
            let results = suites::green_suite(*cases, *cells, seed, prec)?;
            Ok((
                format!("green check --cases {cases} --cells {cells} --seed {seed} --precision {prec}"),
                results,
            ))
        }
        Command::Trace {
            action: TraceCmd::Check { cases },
        } => {
            let mut results = suites::trace_suite(*cases, seed, prec)?;
            results.extend(suites::patching_suite(seed, prec)?);
            results.extend(suites::boundary_degree_suite(3, 3, seed, prec)?);
            Ok((
                format!("trace check --cases {cases} --seed {seed} --precision {prec}"),
                results,
            ))
        }
        Command::Mesh {
            action:
                MeshCmd::Verify {
                    mesh,
                    mesh_file,
                    l,
                    k,
                },
        } => {
            let meshes: Vec<Mesh> = if let Some(path) = mesh_file {
                let src = std::fs::read_to_string(path)
                    .map_err(|e| Error::Mesh(format!("cannot read '{path}': {e}")))?;
                vec![Mesh::from_text(path, &src)?]
            } else if mesh == "all" {
                vec![
                    Mesh::builtin("single_tet")?,
                    Mesh::builtin("two_tets")?,
                    Mesh::builtin("cube6")?,
                ]
            } else {
                vec![Mesh::builtin(mesh)?]
            };
            let results = suites::mesh_suite(&meshes, *l, *k, prec)?;
            Ok((
                format!("mesh verify --mesh {mesh} --l {l} --k {k} --precision {prec}"),
                results,
            ))
        }
        Command::Dims {
            action: DimsCmd::Table { name, mesh, l, k },
        } => {
            let m = Mesh::builtin(mesh)?;
            let kinds: Vec<SpaceKind> = if name == "all" {
                vec![SpaceKind::Vh, SpaceKind::SigmaT, SpaceKind::SigmaS, SpaceKind::Qh]
            } else {
                vec![SpaceKind::parse(name)
                    .ok_or_else(|| Error::ParamRange(format!("unknown space '{name}'")))?]
            };
            let mut results = Vec::new();
            for kind in kinds {
                results.push(suites::dims_table(kind, &m, *l, *k, prec)?);
            }
            Ok((
                format!("dims table --name {name} --mesh {mesh} --l {l} --k {k}"),
                results,
            ))
        }
        Command::Identities {
            action: IdentitiesCmd::Check { cases },
        } => {
            let results = suites::identities_suite(*cases, seed)?;
            Ok((
                format!("identities check --cases {cases} --seed {seed}"),
                results,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.common.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok((config, results)) => {
            let report = Report::new(config, results);
            let body = match cli.common.format.as_str() {
                "tsv" => report.to_tsv(),
                _ => report.to_json(),
            };
            let ok = report.pass;
            match &cli.common.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, body) {
                        eprintln!("error: cannot write '{path}': {e}");
                        return ExitCode::from(3);
                    }
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    if stdout.write_all(body.as_bytes()).is_err() {
                        return ExitCode::from(3);
                    }
                    let _ = stdout.write_all(b"\n");
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::ParamRange(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Error::Mesh(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("internal error: {e}");
            ExitCode::from(3)
        }
    }
}
