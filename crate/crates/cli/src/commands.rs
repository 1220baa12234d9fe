//! Implementations of the six subcommands.
//!
//! Each command resolves its settings with the precedence `flag > config
//! file > documented default`, validates them (invalid requests exit 2
//! before any computation starts), runs the pipeline stages it needs
//! (failures exit 3, tagged with the stage), and writes its files into the
//! output directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use pulsemap_core::analysis::{
    compute_basins, find_fixed_points, scan_tau2_bifurcation, AnalysisError, BasinPartition,
    FixedPoint, Stability, DEFAULT_FP_GRID,
};
use pulsemap_core::math::TAU;
use pulsemap_core::models::NeuronModel;
use pulsemap_core::orbit::{find_periodic_orbit, OrbitParams, PeriodicOrbit};
use pulsemap_core::population::{
    detect_clusters, simulate_population, simulate_population_by_map, InitialDistribution,
    PopulationError, PopulationParams, PopulationTrace, SweepContext, SweepPoint, SweepTable,
    TrainFamily, DEFAULT_CLUSTER_EPSILON, DEFAULT_POPULATION_DT, DEFAULT_RECORD_STRIDE,
    MAX_VON_MISES_KAPPA,
};
use pulsemap_core::prc::{compute_prc_adjoint, PhaseResponseCurve, DEFAULT_FOURIER_ORDER};
use pulsemap_core::response::{
    compute_response_function, iterate, make_alternating, make_g, CircleMap, ResponseFunction,
    DEFAULT_RESPONSE_GRID,
};
use pulsemap_core::stimulus::{Pulse, PulseTrain};

use crate::config::{stage, CliError, FileConfig};
use crate::csvio;
use crate::summary::{
    self, BifurcateSummary, ClusterOutcome, DistributionInfo, SimulateSummary, SweepSummary,
    TrainInfo,
};
use crate::{
    BifurcateArgs, Cli, Command, CommonArgs, MapArgs, PrcArgs, ResponseArgs, SimulateArgs,
    SweepArgs,
};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Prc(args) => cmd_prc(args),
        Command::Response(args) => cmd_response(args),
        Command::Map(args) => cmd_map(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bifurcate(args) => cmd_bifurcate(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

// ---------------------------------------------------------------------------
// Shared setting resolution

fn load_file_config(common: &CommonArgs) -> Result<FileConfig, CliError> {
    match &common.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::empty()),
    }
}

fn model_by_name(name: &str) -> Result<NeuronModel, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "hh" | "hodgkin-huxley" | "squid" => Ok(NeuronModel::hodgkin_huxley()),
        "thalamic" | "thal" => Ok(NeuronModel::thalamic()),
        other => Err(CliError::config(format!(
            "unknown model `{other}`; expected `hh` or `thalamic`"
        ))),
    }
}

struct ModelSetup {
    name: String,
    orbit: PeriodicOrbit,
    prc: PhaseResponseCurve,
}

/// Locate the firing orbit and compute its sensitivity curve — the front of
/// every pipeline.
fn build_model_prc(
    cfg: &FileConfig,
    model_flag: Option<String>,
    order_flag: Option<usize>,
) -> Result<ModelSetup, CliError> {
    let name_raw = cfg.string(model_flag, "model", "hh")?;
    let model = model_by_name(&name_raw)?;
    let order = cfg.usize(order_flag, "order", DEFAULT_FOURIER_ORDER)?;
    if order == 0 {
        return Err(CliError::config("Fourier order must be at least 1"));
    }
    let orbit = find_periodic_orbit(&model, &OrbitParams::default()).map_err(stage("orbit"))?;
    let prc = compute_prc_adjoint(&orbit, order).map_err(stage("prc"))?;
    Ok(ModelSetup {
        name: model.name().to_string(),
        orbit,
        prc,
    })
}

fn out_dir(cfg: &FileConfig, common: &CommonArgs) -> Result<PathBuf, CliError> {
    cfg.path(common.out.clone(), "out", "out")
}

fn resolve_points(cfg: &FileConfig, flag: Option<usize>) -> Result<usize, CliError> {
    let points = cfg.usize(flag, "points", 1024)?;
    if points < 2 {
        return Err(CliError::config("need at least 2 dense-curve points"));
    }
    Ok(points)
}

struct PulsePair {
    primary: Pulse,
    secondary: Pulse,
}

fn resolve_pulses(
    cfg: &FileConfig,
    u_max: Option<f64>,
    p_ms: Option<f64>,
    lambda: Option<f64>,
    u2_max: Option<f64>,
) -> Result<PulsePair, CliError> {
    let u_max = cfg.f64(u_max, "u_max", 20.0)?;
    let p_ms = cfg.f64(p_ms, "p_ms", 0.5)?;
    let lambda = cfg.f64(lambda, "lambda", 3.0)?;
    let u2_max = cfg.f64(u2_max, "u2_max", 10.0)?;
    let primary = Pulse::new(u_max, p_ms, lambda).map_err(|e| CliError::config(e.to_string()))?;
    let secondary =
        Pulse::new(u2_max, p_ms, lambda).map_err(|e| CliError::config(e.to_string()))?;
    Ok(PulsePair { primary, secondary })
}

fn resolve_family(
    cfg: &FileConfig,
    alt_flag: bool,
    tau2_frac_flag: Option<f64>,
    pulses: PulsePair,
) -> Result<TrainFamily, CliError> {
    if cfg.flag(alt_flag, "alt")? {
        let tau2_frac = cfg.f64(tau2_frac_flag, "tau2_frac", 0.5)?;
        if !(tau2_frac > 0.0 && tau2_frac < 1.0) {
            return Err(CliError::config(format!(
                "tau2_frac must lie strictly between 0 and 1, got {tau2_frac}"
            )));
        }
        Ok(TrainFamily::Alternating {
            primary: pulses.primary,
            secondary: pulses.secondary,
            tau2_frac,
        })
    } else {
        Ok(TrainFamily::Identical {
            pulse: pulses.primary,
        })
    }
}

fn resolve_freq(cfg: &FileConfig, flag: Option<f64>) -> Result<f64, CliError> {
    let freq = cfg.f64(flag, "freq_hz", 150.0)?;
    if !(freq > 0.0 && freq <= 2000.0) {
        return Err(CliError::config(format!(
            "stimulation frequency must lie in (0, 2000] Hz, got {freq}"
        )));
    }
    Ok(freq)
}

fn resolve_iterate(cfg: &FileConfig, flag: Option<u32>, default: u32) -> Result<u32, CliError> {
    let n = cfg.u32(flag, "n", default)?;
    if !(1..=32).contains(&n) {
        return Err(CliError::config(format!(
            "map iterate n must lie in 1..=32, got {n}"
        )));
    }
    Ok(n)
}

fn resolve_distribution(
    cfg: &FileConfig,
    dist: Option<String>,
    count: Option<usize>,
    kappa: Option<f64>,
    center: Option<f64>,
) -> Result<InitialDistribution, CliError> {
    let count = cfg.usize(count, "count", 500)?;
    if count == 0 {
        return Err(CliError::config("the population needs at least one neuron"));
    }
    let kind = cfg.string(dist, "distribution", "uniform")?;
    let normalized: String = kind
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    match normalized.as_str() {
        "uniform" => Ok(InitialDistribution::Uniform { count }),
        "vonmises" => {
            let kappa = cfg.f64(kappa, "kappa", 50.0)?;
            if !(kappa >= 0.0 && kappa <= MAX_VON_MISES_KAPPA) {
                return Err(CliError::config(format!(
                    "kappa must lie in [0, {MAX_VON_MISES_KAPPA}], got {kappa}"
                )));
            }
            let center = cfg.f64(center, "center", 0.0)?;
            if !center.is_finite() {
                return Err(CliError::config("center must be a finite angle"));
            }
            Ok(InitialDistribution::VonMises {
                count,
                kappa,
                center,
            })
        }
        other => Err(CliError::config(format!(
            "unknown distribution `{other}`; expected `uniform` or `von_mises`"
        ))),
    }
}

fn dist_info(dist: &InitialDistribution) -> DistributionInfo {
    match *dist {
        InitialDistribution::Uniform { count } => DistributionInfo {
            kind: "uniform",
            count,
            kappa: None,
            center: None,
        },
        InitialDistribution::VonMises {
            count,
            kappa,
            center,
        } => DistributionInfo {
            kind: "von_mises",
            count,
            kappa: Some(kappa),
            center: Some(center),
        },
    }
}

fn resolve_periods(
    cfg: &FileConfig,
    flag: Option<usize>,
    alternating: bool,
) -> Result<usize, CliError> {
    let default = if alternating { 80 } else { 40 };
    let periods = cfg.usize_opt(flag, "periods")?.unwrap_or(default);
    if periods == 0 {
        return Err(CliError::config("at least one stimulation cycle is required"));
    }
    Ok(periods)
}

fn resolve_epsilon(cfg: &FileConfig, flag: Option<f64>) -> Result<f64, CliError> {
    let epsilon = cfg.f64(flag, "epsilon", DEFAULT_CLUSTER_EPSILON)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CliError::config(format!(
            "cluster tolerance epsilon must be positive and finite, got {epsilon}"
        )));
    }
    Ok(epsilon)
}

/// Response function of one pulse, tagged with its pipeline stage.
fn response_of(prc: &PhaseResponseCurve, pulse: &Pulse) -> Result<ResponseFunction, CliError> {
    compute_response_function(prc, pulse, DEFAULT_RESPONSE_GRID).map_err(stage("response"))
}

/// Per-cycle return map of a train (single kick, or secondary-then-primary).
fn map_of_train(
    omega: f64,
    train: &PulseTrain,
    f1: &ResponseFunction,
    f2: Option<&ResponseFunction>,
) -> Result<CircleMap, CliError> {
    match train.secondary() {
        Some(sec) => make_alternating(
            omega,
            train.period(),
            sec.offset,
            f1,
            f2.expect("alternating trains carry a secondary response"),
        ),
        None => make_g(omega, train.period(), f1),
    }
    .map_err(stage("map"))
}

fn wrote(path: &Path) {
    println!("wrote {}", path.display());
}

fn dense_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |j| TAU * j as f64 / points as f64)
}

// ---------------------------------------------------------------------------
// prc

fn cmd_prc(args: PrcArgs) -> Result<(), CliError> {
    let cfg = load_file_config(&args.common)?;
    let out = out_dir(&cfg, &args.common)?;
    let points = resolve_points(&cfg, args.points)?;
    let setup = build_model_prc(&cfg, args.common.model, args.order)?;

    let prc_csv = csvio::series_csv(setup.prc.omega(), setup.prc.series());
    wrote(&csvio::write_file(&out, "prc.csv", &prc_csv)?);

    let curve: Vec<(f64, f64)> = dense_grid(points)
        .map(|th| (th, setup.prc.eval(th)))
        .collect();
    wrote(&csvio::write_file(
        &out,
        "prc_curve.csv",
        &csvio::curve_csv("theta", "z", &curve),
    )?);

    println!(
        "model {}: omega = {} rad/ms, period = {} ms, sensitivity order {}",
        setup.name,
        csvio::fmt_num(setup.prc.omega()),
        csvio::fmt_num(setup.orbit.period()),
        setup.prc.order()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// response

fn cmd_response(args: ResponseArgs) -> Result<(), CliError> {
    let cfg = load_file_config(&args.common)?;
    let out = out_dir(&cfg, &args.common)?;
    let points = resolve_points(&cfg, args.points)?;
    let pulses = resolve_pulses(&cfg, args.u_max, args.p_ms, args.lambda, None)?;
    let setup = build_model_prc(&cfg, args.common.model, args.order)?;

    let f = response_of(&setup.prc, &pulses.primary)?;
    wrote(&csvio::write_file(
        &out,
        "response.csv",
        &csvio::series_csv(f.omega(), f.series()),
    )?);
    let curve: Vec<(f64, f64)> = dense_grid(points).map(|th| (th, f.eval(th))).collect();
    wrote(&csvio::write_file(
        &out,
        "response_curve.csv",
        &csvio::curve_csv("theta", "f", &curve),
    )?);

    let max_abs = curve.iter().fold(0.0_f64, |m, &(_, y)| m.max(y.abs()));
    println!(
        "model {}: pulse {} uA/cm2 x {} ms (support {} ms): max |f| = {:.4} rad",
        setup.name,
        csvio::fmt_num(pulses.primary.u_max()),
        csvio::fmt_num(pulses.primary.width()),
        csvio::fmt_num(pulses.primary.support()),
        max_abs
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// map

fn cmd_map(args: MapArgs) -> Result<(), CliError> {
    let cfg = load_file_config(&args.common)?;
    let out = out_dir(&cfg, &args.common)?;
    let freq = resolve_freq(&cfg, args.freq)?;
    let n = resolve_iterate(&cfg, args.n, 1)?;
    let grid = cfg.usize(args.grid, "grid", DEFAULT_FP_GRID)?;
    if grid < 512 {
        return Err(CliError::config(format!(
            "fixed-point scan grid must be at least 512, got {grid}"
        )));
    }
    let points = resolve_points(&cfg, args.points)?;
    let pulses = resolve_pulses(&cfg, args.u_max, args.p_ms, args.lambda, args.u2_max)?;
    let family = resolve_family(&cfg, args.alt, args.tau2_frac, pulses)?;
    let setup = build_model_prc(&cfg, args.common.model, None)?;

    let train = family
        .train(freq)
        .map_err(|e| CliError::config(e.to_string()))?;
    let f1 = response_of(&setup.prc, family.primary())?;
    let f2 = family
        .secondary()
        .map(|p| response_of(&setup.prc, p))
        .transpose()?;
    let map = map_of_train(setup.prc.omega(), &train, &f1, f2.as_ref())?;
    let map_n = iterate(&map, n as usize).map_err(stage("map"))?;

    let graph: Vec<(f64, f64, f64)> = dense_grid(points)
        .map(|th| (th, map.eval(th), map_n.eval(th)))
        .collect();
    wrote(&csvio::write_file(
        &out,
        "map_graph.csv",
        &csvio::map_graph_csv(&graph),
    )?);

    let fps = find_fixed_points(&map, n, grid);
    wrote(&csvio::write_file(
        &out,
        "fixed_points.csv",
        &csvio::fixed_points_csv(freq, &fps),
    )?);

    let basins: Option<BasinPartition> = match compute_basins(&map, n) {
        Ok(p) => Some(p),
        Err(AnalysisError::NoStableFixedPoints { .. }) => None,
        Err(e) => return Err(stage("analysis")(e)),
    };
    wrote(&csvio::write_file(
        &out,
        "basins.csv",
        &csvio::basins_csv(freq, basins.as_ref()),
    )?);

    let stable: Vec<&FixedPoint> = fps
        .iter()
        .filter(|fp| fp.stability == Stability::Stable)
        .collect();
    println!(
        "model {} at {} Hz (tau = {} ms), iterate n = {}: {} fixed points ({} stable)",
        setup.name,
        csvio::fmt_num(freq),
        csvio::fmt_num(train.period()),
        n,
        fps.len(),
        stable.len()
    );
    for fp in &stable {
        println!(
            "  stable theta = {:.4}, multiplier = {:.4}",
            fp.theta_star, fp.multiplier
        );
    }
    if basins.is_none() {
        println!("  no attracting fixed points: basins.csv is header-only");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

fn resolve_freq_grid(cfg: &FileConfig, args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    if let Some(list) = cfg.string_opt(args.freqs.clone(), "freqs") {
        let freqs: Result<Vec<f64>, _> = list
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect();
        let freqs =
            freqs.map_err(|e| CliError::config(format!("freqs list `{list}`: {e}")))?;
        if freqs.is_empty() {
            return Err(CliError::config("freqs list is empty"));
        }
        return Ok(freqs);
    }
    let start = cfg.f64(args.freq_start, "freq_start", 70.0)?;
    let stop = cfg.f64(args.freq_stop, "freq_stop", 300.0)?;
    let step = cfg.f64(args.freq_step, "freq_step", 5.0)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::config(format!("freq_step must be positive, got {step}")));
    }
    if !(start > 0.0) || stop < start {
        return Err(CliError::config(format!(
            "need 0 < freq_start <= freq_stop, got {start}..{stop}"
        )));
    }
    let mut freqs = Vec::new();
    let mut k = 0u32;
    loop {
        let f = start + step * k as f64;
        if f > stop + step * 1e-9 {
            break;
        }
        freqs.push(f);
        k += 1;
    }
    Ok(freqs)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let cfg = load_file_config(&args.common)?;
    let out = out_dir(&cfg, &args.common)?;
    let pulses = resolve_pulses(&cfg, args.u_max, args.p_ms, args.lambda, args.u2_max)?;
    let family = resolve_family(&cfg, args.alt, args.tau2_frac, pulses)?;
    let alternating = matches!(family, TrainFamily::Alternating { .. });
    let freqs = resolve_freq_grid(&cfg, &args)?;
    let dist = resolve_distribution(&cfg, args.dist, args.count, args.kappa, args.center)?;
    let periods = resolve_periods(&cfg, args.periods, alternating)?;
    let epsilon = resolve_epsilon(&cfg, args.epsilon)?;
    let jobs = cfg.usize(args.jobs, "jobs", 1)?;
    if jobs == 0 {
        return Err(CliError::config("jobs must be at least 1"));
    }
    let setup = build_model_prc(&cfg, args.common.model, None)?;

    let ctx = SweepContext::new(&setup.prc, &family, &dist, periods, epsilon)
        .map_err(stage("population"))?;
    // Frequencies are independent; results are assembled in input order, so
    // the output is identical for every jobs value.
    let results: Vec<(f64, Result<SweepPoint, PopulationError>)> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::config(format!("cannot build a {jobs}-thread pool: {e}")))?;
        pool.install(|| {
            freqs
                .par_iter()
                .map(|&f| (f, ctx.point(f)))
                .collect()
        })
    } else {
        freqs.iter().map(|&f| (f, ctx.point(f))).collect()
    };

    let mut table = SweepTable {
        periods,
        epsilon,
        points: Vec::new(),
        failures: Vec::new(),
    };
    for (freq, result) in results {
        match result {
            Ok(point) => table.points.push(point),
            Err(e) => table.failures.push((freq, e)),
        }
    }

    wrote(&csvio::write_file(
        &out,
        "sweep.csv",
        &csvio::sweep_csv(&table.points),
    )?);
    let cluster_rows: Vec<_> = table
        .points
        .iter()
        .filter(|p| p.cluster_count.is_some())
        .map(|p| (p.freq_hz, &p.clusters))
        .collect();
    wrote(&csvio::write_file(
        &out,
        "clusters.csv",
        &csvio::clusters_csv(&cluster_rows),
    )?);
    let summary = SweepSummary::of(
        setup.name.clone(),
        setup.prc.omega(),
        &family,
        dist_info(&dist),
        &table,
    );
    wrote(&summary::write_summary(&out, &summary)?);

    for point in &table.points {
        match point.cluster_count {
            Some(c) => {
                let sizes: Vec<String> = point
                    .clusters
                    .clusters
                    .iter()
                    .map(|cl| cl.size.to_string())
                    .collect();
                println!(
                    "{} Hz: {} clusters (sizes {}), map predicts {}",
                    csvio::fmt_num(point.freq_hz),
                    c,
                    sizes.join("/"),
                    match point.predicted_cluster_count {
                        Some(p) => p.to_string(),
                        None => "none".to_string(),
                    }
                );
            }
            None => println!(
                "{} Hz: no clustering (map predicts {})",
                csvio::fmt_num(point.freq_hz),
                match point.predicted_cluster_count {
                    Some(p) => p.to_string(),
                    None => "none".to_string(),
                }
            ),
        }
    }
    for (freq, error) in &table.failures {
        println!("{} Hz: failed - {error}", csvio::fmt_num(*freq));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bifurcate

fn cmd_bifurcate(args: BifurcateArgs) -> Result<(), CliError> {
    let cfg = load_file_config(&args.common)?;
    let out = out_dir(&cfg, &args.common)?;
    let freq = resolve_freq(&cfg, args.freq)?;
    let n = resolve_iterate(&cfg, args.n, 2)?;
    let lo = cfg.f64(args.tau2_lo, "tau2_lo", 0.4)?;
    let hi = cfg.f64(args.tau2_hi, "tau2_hi", 0.6)?;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(CliError::config(format!(
            "need 0 < tau2_lo < tau2_hi < 1 (fractions of the period), got {lo}..{hi}"
        )));
    }
    let pulses = resolve_pulses(&cfg, args.u_max, args.p_ms, args.lambda, args.u2_max)?;
    let setup = build_model_prc(&cfg, args.common.model, None)?;

    let f1 = response_of(&setup.prc, &pulses.primary)?;
    let f2 = response_of(&setup.prc, &pulses.secondary)?;
    let tau = 1000.0 / freq;
    let scan = scan_tau2_bifurcation(setup.prc.omega(), tau, &f1, &f2, n, (lo, hi))
        .map_err(stage("analysis"))?;

    wrote(&csvio::write_file(
        &out,
        "bifurcation.csv",
        &csvio::bifurcation_csv(&scan),
    )?);
    wrote(&csvio::write_file(
        &out,
        "brackets.csv",
        &csvio::brackets_csv(scan.tau, &scan.events),
    )?);
    let summary = BifurcateSummary::of(setup.name.clone(), setup.prc.omega(), freq, &scan);
    wrote(&summary::write_summary(&out, &summary)?);

    println!(
        "model {} at {} Hz (tau = {} ms), iterate n = {}: scanned tau2/tau in [{}, {}], {} stable-count change(s)",
        setup.name,
        csvio::fmt_num(freq),
        csvio::fmt_num(tau),
        n,
        csvio::fmt_num(lo),
        csvio::fmt_num(hi),
        scan.events.len()
    );
    for ev in &scan.events {
        println!(
            "  bracket tau2/tau in [{:.6}, {:.6}] (star {:.6}): stable count {} -> {}, pair multipliers {:.4}/{:.4}",
            ev.tau2_lo / scan.tau,
            ev.tau2_hi / scan.tau,
            ev.tau2_star / scan.tau,
            ev.stable_below,
            ev.stable_above,
            ev.pair_multiplier_stable,
            ev.pair_multiplier_unstable
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = load_file_config(&args.common)?;
    let out = out_dir(&cfg, &args.common)?;
    let freq = resolve_freq(&cfg, args.freq)?;
    let pulses = resolve_pulses(&cfg, args.u_max, args.p_ms, args.lambda, args.u2_max)?;
    let family = resolve_family(&cfg, args.alt, args.tau2_frac, pulses)?;
    let alternating = matches!(family, TrainFamily::Alternating { .. });
    let dist = resolve_distribution(&cfg, args.dist, args.count, args.kappa, args.center)?;
    let periods = resolve_periods(&cfg, args.periods, alternating)?;
    let epsilon = resolve_epsilon(&cfg, args.epsilon)?;
    let by_map = cfg.flag(args.by_map, "by_map")?;
    let setup = build_model_prc(&cfg, args.common.model, None)?;

    let train = family
        .train(freq)
        .map_err(|e| CliError::config(e.to_string()))?;

    let (trace, method, dt_ms): (PopulationTrace, &'static str, Option<f64>) = if by_map {
        let f1 = response_of(&setup.prc, family.primary())?;
        let f2 = family
            .secondary()
            .map(|p| response_of(&setup.prc, p))
            .transpose()?;
        let map = map_of_train(setup.prc.omega(), &train, &f1, f2.as_ref())?;
        let trace =
            simulate_population_by_map(&map, &dist, periods).map_err(stage("population"))?;
        (trace, "map", None)
    } else {
        let dt = cfg.f64(args.dt, "dt", DEFAULT_POPULATION_DT)?;
        let record_stride = cfg.usize(args.record_stride, "record_stride", DEFAULT_RECORD_STRIDE)?;
        if record_stride == 0 {
            return Err(CliError::config("record_stride must be at least 1"));
        }
        let mut max_dt = train.primary().width() / 10.0;
        if let Some(sec) = train.secondary() {
            max_dt = max_dt.min(sec.pulse.width() / 10.0);
        }
        if !(dt > 0.0 && dt.is_finite() && dt <= max_dt) {
            return Err(CliError::config(format!(
                "integration step {dt} ms does not resolve the pulse; use dt <= {max_dt} ms \
                 (one tenth of the narrowest positive phase)"
            )));
        }
        let params = PopulationParams { dt, record_stride };
        let trace = simulate_population(&setup.prc, &train, &dist, periods, &params)
            .map_err(stage("population"))?;
        (trace, "ode", Some(dt))
    };

    let report = detect_clusters(&trace.final_phases, epsilon);
    let verdict = report.cluster_count();

    wrote(&csvio::write_file(
        &out,
        "timeseries.csv",
        &csvio::timeseries_csv(&trace),
    )?);
    wrote(&csvio::write_file(
        &out,
        "final_phases.csv",
        &csvio::final_phases_csv(&trace.initial, &trace.final_phases),
    )?);
    let cluster_rows: Vec<(f64, &pulsemap_core::population::ClusterReport)> =
        if verdict.is_some() {
            vec![(freq, &report)]
        } else {
            Vec::new()
        };
    wrote(&csvio::write_file(
        &out,
        "clusters.csv",
        &csvio::clusters_csv(&cluster_rows),
    )?);

    let summary = SimulateSummary {
        command: "simulate",
        model: setup.name.clone(),
        omega: setup.prc.omega(),
        freq_hz: freq,
        method,
        train: TrainInfo::of(&family),
        distribution: dist_info(&dist),
        periods,
        epsilon,
        dt_ms,
        final_time_ms: trace.final_time,
        covers_circle: report.covers_circle,
        outcome: ClusterOutcome::new(verdict, &report),
    };
    wrote(&summary::write_summary(&out, &summary)?);

    match verdict {
        Some(c) => {
            let reps: Vec<String> = report
                .clusters
                .iter()
                .map(|cl| format!("{:.4} (n = {})", cl.representative, cl.size))
                .collect();
            println!(
                "{} neurons, {} cycles at {} Hz ({method}): {} cluster(s): {}",
                report.total,
                periods,
                csvio::fmt_num(freq),
                c,
                reps.join(", ")
            );
        }
        None => println!(
            "{} neurons, {} cycles at {} Hz ({method}): no clustering (population covers the circle)",
            report.total,
            periods,
            csvio::fmt_num(freq)
        ),
    }
    Ok(())
}
