//! `qclassical`: level criterion scans and diffusive Fock evolution from the
//! command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qclassical_core::KtGrid;

mod commands;
mod error;
mod output;
mod svg;

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "qclassical",
    version,
    about = "Classical measurability of discrete spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Criterion y(n) = |ΔE_n Δτ_n| for one level.
    Criterion {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Criterion over a range of levels, with the first unresolvable one.
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        /// Defaults to the first level that has a lower neighbor.
        #[arg(long)]
        n_min: Option<u32>,
        /// Defaults to 50, or the last bound level of a Morse well.
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fock populations P_b(n,t) along a κt grid.
    Evolve {
        #[command(flatten)]
        bath: BathArgs,
        #[arg(long, default_value_t = 1)]
        b: usize,
        /// Also emit the κt = 0 snapshot.
        #[arg(long)]
        include_zero: bool,
        /// Only print populations up to this index (trace still covers all).
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Neighbor fidelity Tr[ρ(t,b) ρ(t,b−1)], survival and purity.
    Fidelity {
        #[command(flatten)]
        bath: BathArgs,
        #[arg(long, default_value_t = 1)]
        b: usize,
        /// Also evaluate the closed-form triple sum and compare.
        #[arg(long)]
        audit: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Environment-averaged criterion ⟨y(b)⟩.
    Ymean {
        #[command(flatten)]
        bath: BathArgs,
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Data and SVG plots for the figure analogs (all four if none given).
    Figures {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        which: Option<u8>,
        /// Output directory.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value_t = KtGrid::default())]
        grid: KtGrid,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Initial indices; defaults to 1,5,10,15 (figures 1–2) or 2,5,10,15 (3–4).
        #[arg(long, value_delimiter = ',')]
        b: Vec<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Harmonic,
    Box,
    Hydrogenoid,
    Morse,
    Quartic,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(
        long,
        value_enum,
        required_unless_present = "preset",
        conflicts_with = "preset"
    )]
    model: Option<ModelKind>,
    /// Bundled preset name (h2, hydrogen) or a preset file.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    z: Option<u32>,
    #[arg(long)]
    charge: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    depth: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    ro: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct BathArgs {
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = KtGrid::default())]
    grid: KtGrid,
    /// Relative tolerance of every series.
    #[arg(long)]
    eps: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qclassical: {e}");
            e.exit_code()
        }
    }
}
