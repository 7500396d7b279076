//! Command-line front end for `vorpca`.
//!
//! JSON results go to stdout, human-readable notes to stderr. Exit codes:
//! 0 success, 2 usage or validation, 3 oracle budget exceeded, 4 degenerate
//! diagnostic input, 1 anything else (I/O).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::RngCore;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use vorpca::bench::{render_table, run_benchmark, success_table, write_jsonl, BenchConfig};
use vorpca::grassmann::grassmannian_dimension;
use vorpca::io::{read_csv, write_csv};
use vorpca::nalgebra::DMatrix;
use vorpca::voronoi::{brute_force_solve_with_budget, DEFAULT_BUDGET};
use vorpca::{
    alpha_gap, ball_measure_lower_bound, build_arc_diagram_2d, generate_planted_instance,
    grassmannian_volume, mc_ball_measure, ordering_preservation_radius, randomized_solve,
    required_samples, voronoi::arc_diagram_svg, voronoi_solve_2d, voronoi_solve_sampled,
    DataMatrix64, Error, Method, PlantedSpec, SeededRng, SolveResult64, Subspace64,
};

#[derive(Debug, Parser)]
#[command(name = "vorpca", version, about = "PCA with outliers: exact, Voronoi and randomized solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a planted instance (CSV plus a JSON sidecar with the truth).
    Gen(GenArgs),
    /// Solve an instance and print the result as JSON.
    Solve(SolveArgs),
    /// Geometry and gap diagnostics.
    #[command(subcommand)]
    Diag(DiagCommand),
    /// Run a benchmark suite and emit JSON lines.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV path; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    /// Sample count for sampled methods; derived from --alpha/--eps if absent.
    #[arg(long = "T")]
    pub t: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub eps: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Subtract column means before solving.
    #[arg(long)]
    pub center: bool,
    /// Input CSV has a header row.
    #[arg(long)]
    pub header: bool,
    /// Largest number of subsets the brute-force oracle may enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Subcommand)]
pub enum DiagCommand {
    /// Closed-form volume of Gr(r, d).
    Volume {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: usize,
    },
    /// Lower bound on the measure of a ball of radius alpha.
    Ball {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: usize,
    },
    /// Number of uniform samples for target success eps.
    Samples {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: usize,
    },
    /// Monte-Carlo ball measure next to the closed-form bound.
    McBall {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Alpha gap of a dataset with respect to a basis.
    Gap(GapArgs),
    /// Ordering-preservation radius around a basis.
    Preserve {
        #[command(flatten)]
        gap: GapArgs,
        #[arg(long, default_value_t = vorpca::randomized::DEFAULT_PROBES)]
        probes: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Planar arc diagram cells (d = 2, r = 1), optionally as SVG.
    Arcs {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        header: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Basis as a d×r CSV, or a `gen` sidecar JSON.
    #[arg(long)]
    pub basis: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON suite configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// JSON-lines output; stdout if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

/// A failed command with its exit code. `json` is printed to stdout when
/// present.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    pub json: Option<String>,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
            json: None,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::BudgetExceeded { .. } => CliError {
                code: 3,
                message: format!("{message} (hint: --method voronoi-sampled or randomized)"),
                json: None,
            },
            Error::DegenerateGap { d1 } => CliError {
                code: 4,
                json: Some(
                    serde_json::json!({
                        "error": "degenerate_gap",
                        "d1": d1,
                        "message": message,
                    })
                    .to_string(),
                ),
                message,
            },
            Error::Io(_) | Error::Json(_) => CliError {
                code: 1,
                message,
                json: None,
            },
            _ => CliError::usage(message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn ser17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(format!("{x:.16e}"))
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

fn ser17_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let raws: Vec<Box<RawValue>> = xs
        .iter()
        .map(|x| RawValue::from_string(format!("{x:.16e}")))
        .collect::<Result<_, _>>()
        .map_err(serde::ser::Error::custom)?;
    raws.serialize(s)
}

fn column_major(s: &Subspace64) -> Vec<f64> {
    s.basis().iter().copied().collect()
}

/// Planted truth written next to a generated CSV.
#[derive(Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub k: usize,
    pub noise_sigma: f64,
    pub gap_gamma: f64,
    pub seed: u64,
    pub true_outliers: Vec<usize>,
    /// Column-major d×r.
    #[serde(serialize_with = "ser17_vec")]
    pub true_basis: Vec<f64>,
    #[serde(serialize_with = "ser17")]
    pub outlier_radius: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveOutput {
    pub method: Method,
    #[serde(serialize_with = "ser17")]
    pub loss: f64,
    pub outliers: Vec<usize>,
    /// Column-major d×r.
    #[serde(serialize_with = "ser17_vec")]
    pub basis: Vec<f64>,
    pub seed: Option<u64>,
    pub samples_used: Option<u64>,
}

impl From<&SolveResult64> for SolveOutput {
    fn from(res: &SolveResult64) -> Self {
        Self {
            method: res.method,
            loss: res.loss,
            outliers: res.outliers.as_slice().to_vec(),
            basis: column_major(&res.subspace),
            seed: res.seed,
            samples_used: res.samples_used,
        }
    }
}

fn seed_or_draw(seed: Option<u64>, err: &mut dyn Write) -> CliResult<u64> {
    Ok(match seed {
        Some(s) => s,
        None => {
            let s = rand::rng().next_u64();
            writeln!(err, "seed: {s}")?;
            s
        }
    })
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    let text = serde_json::to_string(value).map_err(Error::from)?;
    writeln!(out, "{text}")?;
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Gen(args) => cmd_gen(&args, out, err),
        Command::Solve(args) => cmd_solve(&args, out, err),
        Command::Diag(cmd) => cmd_diag(cmd, out, err),
        Command::Bench(args) => cmd_bench(&args, out, err),
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let spec = PlantedSpec {
        n: args.n,
        d: args.d,
        r: args.r,
        k: args.k,
        noise_sigma: args.sigma,
        gap_gamma: args.gamma,
    };
    spec.validate()?;
    let seed = seed_or_draw(args.seed, err)?;
    let inst = generate_planted_instance::<f64>(&spec, seed)?;
    let truth = inst.planted.as_ref().expect("generator plants truth");
    write_csv(&args.output, &inst.data)?;
    let sidecar = Sidecar {
        n: spec.n,
        d: spec.d,
        r: spec.r,
        k: spec.k,
        noise_sigma: spec.noise_sigma,
        gap_gamma: spec.gap_gamma,
        seed,
        true_outliers: truth.outliers.as_slice().to_vec(),
        true_basis: column_major(&truth.subspace),
        outlier_radius: truth.outlier_radius,
    };
    let path = sidecar_path(&args.output);
    let mut text = serde_json::to_string_pretty(&sidecar).map_err(Error::from)?;
    text.push('\n');
    fs::write(&path, text)?;
    writeln!(err, "wrote {} and {}", args.output.display(), path.display())?;
    emit(out, &sidecar)
}

fn load(input: &Path, header: bool) -> CliResult<DataMatrix64> {
    Ok(read_csv(input, header)?)
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut data = load(&args.input, args.header)?;
    let (n, d) = (data.nrows(), data.ncols());
    grassmannian_dimension(args.r, d)?;
    if args.k >= n {
        return Err(Error::OutlierCountOutOfRange { k: args.k, n }.into());
    }
    if args.method == Method::Voronoi2d && (d != 2 || args.r != 1) {
        return Err(Error::NotPlanar { d, r: args.r }.into());
    }
    if args.center {
        data = data.centered().0;
    }
    let result = match args.method {
        Method::Brute => brute_force_solve_with_budget(&data, args.r, args.k, args.budget)?,
        Method::Voronoi2d => voronoi_solve_2d(&data, args.k)?,
        Method::VoronoiSampled | Method::Randomized => {
            let t = match (args.t, args.alpha) {
                (Some(t), _) => t,
                (None, Some(alpha)) => {
                    let t = required_samples(alpha, args.eps, args.r, d)?;
                    writeln!(err, "T = {t} from alpha = {alpha}, eps = {}", args.eps)?;
                    t
                }
                (None, None) => {
                    return Err(CliError::usage(format!(
                        "--method {} needs --T or --alpha",
                        args.method
                    )))
                }
            };
            if t == 0 {
                return Err(CliError::usage("--T must be >= 1"));
            }
            let rng = SeededRng::new(seed_or_draw(args.seed, err)?);
            if args.method == Method::Randomized {
                randomized_solve(&data, args.r, args.k, t, &rng)?
            } else {
                voronoi_solve_sampled(&data, args.r, args.k, t, &rng)?
            }
        }
    };
    emit(out, &SolveOutput::from(&result))
}

/// Loads a basis from a d×r CSV or from the `true_basis` of a sidecar.
pub fn load_basis(path: &Path, d: usize) -> CliResult<Subspace64> {
    let matrix = if path.extension().is_some_and(|e| e == "json") {
        let text = fs::read_to_string(path)?;
        let sc: Sidecar = serde_json::from_str(&text).map_err(Error::from)?;
        if sc.true_basis.len() != sc.d * sc.r {
            return Err(CliError::usage("sidecar basis has the wrong length"));
        }
        DMatrix::from_column_slice(sc.d, sc.r, &sc.true_basis)
    } else {
        read_csv::<f64>(path, false)?.into_matrix()
    };
    if matrix.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: matrix.nrows(),
        }
        .into());
    }
    Ok(Subspace64::orthonormalize(matrix)?)
}

#[derive(Serialize)]
struct GapOutput {
    d1: f64,
    d2: f64,
    alpha: f64,
}

pub fn cmd_diag(cmd: DiagCommand, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cmd {
        DiagCommand::Volume { r, d } => {
            let volume = grassmannian_volume(r, d)?;
            let dual = grassmannian_volume(d - r, d).ok();
            emit(
                out,
                &serde_json::json!({
                    "r": r, "d": d,
                    "dimension": grassmannian_dimension(r, d)?,
                    "volume": volume,
                    "volume_of_dual": dual,
                }),
            )
        }
        DiagCommand::Ball { alpha, r, d } => emit(
            out,
            &serde_json::json!({
                "alpha": alpha, "r": r, "d": d,
                "bound": ball_measure_lower_bound(alpha, r, d)?,
            }),
        ),
        DiagCommand::Samples { alpha, eps, r, d } => {
            let bound = ball_measure_lower_bound(alpha, r, d)?;
            emit(
                out,
                &serde_json::json!({
                    "alpha": alpha, "eps": eps, "r": r, "d": d,
                    "delta": bound.min(1.0),
                    "T": required_samples(alpha, eps, r, d)?,
                }),
            )
        }
        DiagCommand::McBall {
            alpha,
            r,
            d,
            samples,
            seed,
        } => {
            grassmannian_dimension(r, d)?;
            let seed = seed_or_draw(seed, err)?;
            let center = Subspace64::orthonormalize(DMatrix::from_column_slice(
                d,
                r,
                &(0..d * r)
                    .map(|i| if i % d == i / d { 1.0 } else { 0.0 })
                    .collect::<Vec<_>>(),
            ))?;
            let est = mc_ball_measure(&center, alpha, samples, &SeededRng::new(seed))?;
            let bound = ball_measure_lower_bound(alpha, r, d)?;
            // Gr(1,2) has a closed form: lines within angle asin(α) of a fixed line.
            let exact = (r == 1 && d == 2)
                .then(|| 2.0 * alpha.min(1.0).asin() / std::f64::consts::PI);
            if let Some(exact) = exact {
                writeln!(
                    err,
                    "Gr(1,2), alpha = {alpha}: exact {exact:.4}, Monte-Carlo {:.4}, closed-form bound {bound:.4}",
                    est.fraction
                )?;
            }
            emit(
                out,
                &serde_json::json!({
                    "alpha": alpha, "r": r, "d": d, "seed": seed,
                    "samples": est.samples,
                    "fraction": est.fraction,
                    "std_error": est.std_error,
                    "bound": bound,
                    "exact": exact,
                }),
            )
        }
        DiagCommand::Gap(args) => {
            let data = load(&args.input, args.header)?;
            let basis = load_basis(&args.basis, data.ncols())?;
            let g = alpha_gap(&data, &basis, args.k)?;
            emit(
                out,
                &GapOutput {
                    d1: g.d1,
                    d2: g.d2,
                    alpha: g.alpha,
                },
            )
        }
        DiagCommand::Preserve { gap, probes, seed } => {
            let data = load(&gap.input, gap.header)?;
            let basis = load_basis(&gap.basis, data.ncols())?;
            let seed = seed_or_draw(seed, err)?;
            let rep =
                ordering_preservation_radius(&data, &basis, gap.k, probes, &SeededRng::new(seed))?;
            emit(
                out,
                &serde_json::json!({
                    "radius": rep.radius,
                    "alpha": rep.gap.alpha,
                    "d1": rep.gap.d1,
                    "d2": rep.gap.d2,
                    "probes_used": rep.probes_used,
                    "seed": seed,
                }),
            )
        }
        DiagCommand::Arcs {
            input,
            k,
            header,
            svg,
        } => {
            let data = load(&input, header)?;
            let cells = build_arc_diagram_2d(&data, k)?;
            if let Some(path) = svg {
                fs::write(&path, arc_diagram_svg(&cells, &data))?;
                writeln!(err, "wrote {}", path.display())?;
            }
            let cells: Vec<_> = cells
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "theta_lo": c.theta_lo,
                        "theta_hi": c.theta_hi,
                        "farthest_k": c.farthest_k.as_slice(),
                        "representative": c.representative,
                    })
                })
                .collect();
            emit(out, &serde_json::json!({ "cells": cells }))
        }
    }
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let text = fs::read_to_string(&args.config)?;
    let mut config: BenchConfig =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad config: {e}")))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let records = run_benchmark(&config)?;
    match &args.output {
        Some(path) => {
            let mut f = std::io::BufWriter::new(fs::File::create(path)?);
            write_jsonl(&mut f, &records)?;
            f.flush()?;
        }
        None => write_jsonl(&mut *out, &records)?,
    }
    write!(err, "{}", render_table(&success_table(&records)))?;
    Ok(())
}

/// Applies `VORPCA_THREADS` (0 or unset: rayon default).
pub fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var("VORPCA_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("VORPCA_THREADS must be an integer, got `{value}`")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    Ok(())
}
