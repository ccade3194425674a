//! `localizer-lab`: Clifford generators, model building, localizer probes,
//! λ-space scans, zero-set components, ray crossings, spectral flow and the
//! theorem verification suite.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use error::CliError;

const UNITS: &str = "Units: λ coordinates are dimensionless. For lattice models \
λ = (κ_X x₁, …, κ_X x_D, κ_H E), with distance x in units of the lattice constant a \
and energy E in units of the hopping t (the 4D model uses κ in t/a and κ_H = 1). \
Pass --physical to give coordinates in a and t instead.";

const MODEL_HELP: &str = "Model: a JSON config ({\"model\", \"params\", \"scale\"}), a sparse model file \
written by `build`, or builtin:<name> with name one of pauli, gamma5, gamma:<d>, abc:<t>, \
fuzzy:<n>, haldane, ai:<N>, a:<N>.";

#[derive(Parser, Debug)]
#[command(name = "localizer-lab", version, about = "Spectral localizer toolkit", after_help = UNITS)]
struct Cli {
    /// Worker threads for scans, rays and flows [default: available parallelism].
    #[arg(long, global = true, env = "LOCALIZER_LAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit irreducible Clifford generators as JSON.
    #[command(after_help = "Generators are dimensionless r×r matrices, r = 2^⌊d/2⌋; entries are [re, im] pairs.")]
    Gamma(GammaArgs),
    /// Build a model and write its tuple as sparse JSON plus a site table.
    #[command(after_help = concat!(
        "Matrices are written as probed: positions scaled by κ (dimensionless), Hamiltonian by κ_H. ",
        "Site coordinates in the CSV are in units of the lattice constant a."
    ))]
    Build(BuildArgs),
    /// Gap, signature, index and eigenvalues nearest zero at one λ.
    #[command(after_help = UNITS)]
    Probe(ProbeArgs),
    /// Gap (and optionally index) over a rectangular λ grid, written as CSV.
    #[command(after_help = UNITS)]
    Scan(ScanArgs),
    /// Connected components of the zero set in a scan CSV.
    #[command(after_help = "eps is a gap threshold and radius a distance, both in the λ units of the CSV.")]
    Components(ComponentsArgs),
    /// Count Clifford-spectrum crossings along random rays.
    #[command(after_help = UNITS)]
    Rays(RaysArgs),
    /// Check every closed-form theorem numerically.
    #[command(after_help = "All quantities are dimensionless. Exit status 0 iff every check passes, 2 otherwise.")]
    Verify(VerifyArgs),
    /// Eigenvalues nearest zero along a segment in λ-space, as CSV.
    #[command(after_help = UNITS)]
    Flow(FlowArgs),
}

#[derive(Args, Debug, Serialize)]
struct GammaArgs {
    /// Number of generators.
    #[arg(long)]
    d: usize,
    /// Use the explicit four-band generators instead of the recursive construction (d = 5 only).
    #[arg(long = "explicit-5")]
    explicit_5: bool,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct BuildArgs {
    #[arg(long, help = MODEL_HELP)]
    config: String,
    /// Sparse model JSON.
    #[arg(long)]
    out: PathBuf,
    /// Site table CSV [default: <out>.sites.csv, lattice models only].
    #[arg(long)]
    sites: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ModelArgs {
    #[arg(long, visible_alias = "config", help = MODEL_HELP)]
    model: String,
    /// Clifford representation: auto, pauli, gamma5 or recursive.
    #[arg(long, default_value = "auto")]
    rep: String,
    /// Read λ coordinates in physical units (a, t) and scale them by κ.
    #[arg(long)]
    physical: bool,
    /// Localizer dimension above which the sparse path is used.
    #[arg(long)]
    dense_threshold: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct ProbeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Probe point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Eigenvalues nearest zero to report.
    #[arg(long, default_value_t = 20)]
    k: usize,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Varying axes, e.g. "x1=-3:3:121,x2=-3:3:121" (name=min:max:count; E names the last axis).
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Values of the remaining axes, e.g. "x3=0,E=0" [default: 0].
    #[arg(long, default_value = "", hide_default_value = true, allow_hyphen_values = true)]
    fixed: String,
    /// Also compute the localizer index.
    #[arg(long)]
    index: bool,
    /// CSV output: λ₁…λ_d, gap, index.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ComponentsArgs {
    /// Scan CSV.
    #[arg(long = "in")]
    input: PathBuf,
    /// Zero-set threshold [default: 1.5 × grid step].
    #[arg(long)]
    eps: Option<f64>,
    /// Linking radius [default: 2 × grid step × √(varying axes)].
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct RaysArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of rays.
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Axes the directions span, e.g. "1,2,3,4" [default: positions for lattice models, all otherwise].
    #[arg(long)]
    axes: Option<String>,
    /// Ray origin [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    origin: Option<String>,
    /// Ray length [default: Σ‖A_j‖, beyond which the gap cannot vanish].
    #[arg(long)]
    t_max: Option<f64>,
    /// Sampling step along the ray [default: t_max / 400].
    #[arg(long)]
    step: Option<f64>,
    /// Zero-set threshold [default: 1.5 × step].
    #[arg(long)]
    eps: Option<f64>,
    /// JSON output [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Largest number of generators checked.
    #[arg(long, default_value_t = 11)]
    d_max: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the full reports here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Permit d_max above 11 (prints a memory estimate first).
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug, Serialize)]
struct FlowArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Segment start, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// Segment end, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// CSV output: t, λ₁…λ_d, e₁…e_k.
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            std::process::exit(1);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome: Result<(), CliError> = match &cli.command {
        Command::Gamma(a) => commands::gamma(a),
        Command::Build(a) => commands::build(a),
        Command::Probe(a) => commands::probe(a),
        Command::Scan(a) => commands::scan(a),
        Command::Components(a) => commands::components(a),
        Command::Rays(a) => commands::rays(a),
        Command::Verify(a) => commands::verify(a),
        Command::Flow(a) => commands::flow(a),
    };
    if let Err(e) = outcome {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
