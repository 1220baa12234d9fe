//! `pulsemap` — command-line front end for the phase-map pipeline.
//!
//! Each subcommand drives part of the pipeline: locate a neuron model's
//! firing orbit and phase sensitivity (`prc`), turn a stimulus pulse into a
//! per-pulse phase response (`response`), analyse the per-cycle return map
//! (`map`), sweep stimulation frequency (`sweep`), scan the second-pulse
//! timing of an alternating train for stability changes (`bifurcate`), and
//! simulate a population of oscillators (`simulate`).
//!
//! Exit codes: 0 on success, 2 for invalid requests (bad flags, bad config
//! file, out-of-range settings), 3 when a pipeline stage fails.

mod commands;
mod config;
mod csvio;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Phase maps and cluster analysis for periodically pulsed neural oscillators.
#[derive(Parser)]
#[command(name = "pulsemap", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Locate the firing orbit and write the phase sensitivity curve.
    Prc(PrcArgs),
    /// Write the per-pulse phase response of a stimulus pulse.
    Response(ResponseArgs),
    /// Analyse the per-cycle return map: graph, fixed points, basins.
    Map(MapArgs),
    /// Sweep stimulation frequency and count the clusters formed.
    Sweep(SweepArgs),
    /// Scan second-pulse timing for changes in the number of stable points.
    Bifurcate(BifurcateArgs),
    /// Simulate a population of oscillators under a pulse train.
    Simulate(SimulateArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Config file with `key = value` lines; flags override file values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Neuron model: `hh` or `thalamic`.
    #[arg(long, value_name = "NAME")]
    pub model: Option<String>,

    /// Output directory (created if missing) [default: out].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PrcArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Fourier order of the stored sensitivity series [default: 32].
    #[arg(long)]
    pub order: Option<usize>,

    /// Samples in the dense curve file [default: 1024].
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args)]
pub struct ResponseArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Fourier order of the underlying sensitivity series [default: 32].
    #[arg(long)]
    pub order: Option<usize>,

    /// Samples in the dense curve file [default: 1024].
    #[arg(long)]
    pub points: Option<usize>,

    /// Positive-phase pulse amplitude in uA/cm2 [default: 20].
    #[arg(long)]
    pub u_max: Option<f64>,

    /// Positive-phase pulse width in ms [default: 0.5].
    #[arg(long)]
    pub p_ms: Option<f64>,

    /// Recovery-phase length as a multiple of the positive phase [default: 3].
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Stimulation frequency in Hz [default: 150].
    #[arg(long)]
    pub freq: Option<f64>,

    /// Analyse the n-times-iterated map [default: 1].
    #[arg(long)]
    pub n: Option<u32>,

    /// Scan resolution for the fixed-point search [default: 8192].
    #[arg(long)]
    pub grid: Option<usize>,

    /// Samples in the map graph file [default: 1024].
    #[arg(long)]
    pub points: Option<usize>,

    /// Positive-phase pulse amplitude in uA/cm2 [default: 20].
    #[arg(long)]
    pub u_max: Option<f64>,

    /// Positive-phase pulse width in ms [default: 0.5].
    #[arg(long)]
    pub p_ms: Option<f64>,

    /// Recovery-phase length as a multiple of the positive phase [default: 3].
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Amplitude of the alternating secondary pulse in uA/cm2 [default: 10].
    #[arg(long)]
    pub u2_max: Option<f64>,

    /// Alternate a secondary pulse between the primary pulses.
    #[arg(long)]
    pub alt: bool,

    /// Secondary-pulse offset as a fraction of the period [default: 0.5].
    #[arg(long)]
    pub tau2_frac: Option<f64>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Comma-separated frequency list in Hz (overrides start/stop/step).
    #[arg(long)]
    pub freqs: Option<String>,

    /// First grid frequency in Hz [default: 70].
    #[arg(long)]
    pub freq_start: Option<f64>,

    /// Last grid frequency in Hz [default: 300].
    #[arg(long)]
    pub freq_stop: Option<f64>,

    /// Grid spacing in Hz [default: 5].
    #[arg(long)]
    pub freq_step: Option<f64>,

    /// Initial phase distribution: `uniform` or `von_mises` [default: uniform].
    #[arg(long)]
    pub dist: Option<String>,

    /// Population size [default: 500].
    #[arg(long)]
    pub count: Option<usize>,

    /// Concentration of the von Mises distribution [default: 50].
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Center of the von Mises distribution in rad [default: 0].
    #[arg(long)]
    pub center: Option<f64>,

    /// Stimulation cycles per frequency [default: 40; 80 with --alt].
    #[arg(long)]
    pub periods: Option<usize>,

    /// Chain gap that separates clusters, in rad [default: 0.05].
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Worker threads; the output is identical for any value [default: 1].
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Positive-phase pulse amplitude in uA/cm2 [default: 20].
    #[arg(long)]
    pub u_max: Option<f64>,

    /// Positive-phase pulse width in ms [default: 0.5].
    #[arg(long)]
    pub p_ms: Option<f64>,

    /// Recovery-phase length as a multiple of the positive phase [default: 3].
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Amplitude of the alternating secondary pulse in uA/cm2 [default: 10].
    #[arg(long)]
    pub u2_max: Option<f64>,

    /// Alternate a secondary pulse between the primary pulses.
    #[arg(long)]
    pub alt: bool,

    /// Secondary-pulse offset as a fraction of the period [default: 0.5].
    #[arg(long)]
    pub tau2_frac: Option<f64>,
}

#[derive(Args)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Stimulation frequency in Hz [default: 150].
    #[arg(long)]
    pub freq: Option<f64>,

    /// Analyse the n-times-iterated composed map [default: 2].
    #[arg(long)]
    pub n: Option<u32>,

    /// Scan start, as a fraction of the period [default: 0.4].
    #[arg(long)]
    pub tau2_lo: Option<f64>,

    /// Scan end, as a fraction of the period [default: 0.6].
    #[arg(long)]
    pub tau2_hi: Option<f64>,

    /// Positive-phase pulse amplitude in uA/cm2 [default: 20].
    #[arg(long)]
    pub u_max: Option<f64>,

    /// Positive-phase pulse width in ms [default: 0.5].
    #[arg(long)]
    pub p_ms: Option<f64>,

    /// Recovery-phase length as a multiple of the positive phase [default: 3].
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Amplitude of the alternating secondary pulse in uA/cm2 [default: 10].
    #[arg(long)]
    pub u2_max: Option<f64>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Stimulation frequency in Hz [default: 150].
    #[arg(long)]
    pub freq: Option<f64>,

    /// Initial phase distribution: `uniform` or `von_mises` [default: uniform].
    #[arg(long)]
    pub dist: Option<String>,

    /// Population size [default: 500].
    #[arg(long)]
    pub count: Option<usize>,

    /// Concentration of the von Mises distribution [default: 50].
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Center of the von Mises distribution in rad [default: 0].
    #[arg(long)]
    pub center: Option<f64>,

    /// Stimulation cycles to run [default: 40; 80 with --alt].
    #[arg(long)]
    pub periods: Option<usize>,

    /// Chain gap that separates clusters, in rad [default: 0.05].
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Iterate the per-cycle map instead of integrating the phase equation.
    #[arg(long)]
    pub by_map: bool,

    /// Integration step in ms; must resolve the pulse [default: 0.01].
    #[arg(long)]
    pub dt: Option<f64>,

    /// Record a time-series row every this many steps [default: 50].
    #[arg(long)]
    pub record_stride: Option<usize>,

    /// Positive-phase pulse amplitude in uA/cm2 [default: 20].
    #[arg(long)]
    pub u_max: Option<f64>,

    /// Positive-phase pulse width in ms [default: 0.5].
    #[arg(long)]
    pub p_ms: Option<f64>,

    /// Recovery-phase length as a multiple of the positive phase [default: 3].
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Amplitude of the alternating secondary pulse in uA/cm2 [default: 10].
    #[arg(long)]
    pub u2_max: Option<f64>,

    /// Alternate a secondary pulse between the primary pulses.
    #[arg(long)]
    pub alt: bool,

    /// Secondary-pulse offset as a fraction of the period [default: 0.5].
    #[arg(long)]
    pub tau2_frac: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
