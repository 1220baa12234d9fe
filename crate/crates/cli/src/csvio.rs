//! CSV emission and parsing for every file the tool writes.
//!
//! Two float formats are used. Series files (`prc.csv`, `response.csv`) must
//! survive a write/read cycle bit-exactly, so they use Rust's shortest
//! round-trip representation. Plot-data files write angles with 12
//! significant digits (scientific notation); non-angle columns (frequencies,
//! times, multipliers, counts) keep the round-trip format.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use pulsemap_core::analysis::{BasinPartition, FixedPoint, SaddleNode, Stability, Tau2Scan};
use pulsemap_core::fourier::FourierSeries;
use pulsemap_core::population::{ClusterReport, PopulationTrace, SweepPoint};

use crate::config::CliError;

/// Angle (or other radian-valued quantity) with 12 significant digits.
pub fn fmt_angle(x: f64) -> String {
    format!("{x:.11e}")
}

/// Shortest representation that parses back to the identical bits.
pub fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn stability_label(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Marginal => "marginal",
    }
}

/// Create `dir` if needed and write `name` inside it, returning the path.
pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Stage {
        stage: "io",
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    let path = dir.join(name);
    fs::write(&path, content).map_err(|e| CliError::Stage {
        stage: "io",
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    Ok(path)
}

/// Serialize a Fourier series with its base frequency: header `omega=<value>`
/// then one `k, a_k, b_k` row per harmonic, `k = 0` first (with `b_0 = 0`).
/// Round-trips bit-exactly through [`parse_series_csv`].
pub fn series_csv(omega: f64, series: &FourierSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "omega={}", fmt_num(omega));
    out.push_str("k,a_k,b_k\n");
    let _ = writeln!(out, "0,{},0", fmt_num(series.a0()));
    for k in 1..=series.order() {
        let (a, b) = series.coefficient(k);
        let _ = writeln!(out, "{k},{},{}", fmt_num(a), fmt_num(b));
    }
    out
}

/// Parse the output of [`series_csv`] back into `(omega, series)`.
pub fn parse_series_csv(text: &str) -> Result<(f64, FourierSeries), String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let omega: f64 = header
        .strip_prefix("omega=")
        .ok_or_else(|| format!("expected `omega=<value>` header, got `{header}`"))?
        .trim()
        .parse()
        .map_err(|e| format!("bad omega value: {e}"))?;
    let columns = lines.next().ok_or("missing column header")?;
    if columns.trim() != "k,a_k,b_k" {
        return Err(format!("expected `k,a_k,b_k` columns, got `{columns}`"));
    }
    let mut a0 = None;
    let mut coeffs: Vec<(f64, f64)> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(k), Some(a), Some(b), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(format!("row {}: expected 3 comma-separated fields", i + 1));
        };
        let k: usize = k.trim().parse().map_err(|e| format!("row {}: {e}", i + 1))?;
        let a: f64 = a.trim().parse().map_err(|e| format!("row {}: {e}", i + 1))?;
        let b: f64 = b.trim().parse().map_err(|e| format!("row {}: {e}", i + 1))?;
        if k != i {
            return Err(format!("row {}: harmonics must be consecutive from 0", i + 1));
        }
        if k == 0 {
            if b != 0.0 {
                return Err("harmonic 0 must have b_0 = 0".to_string());
            }
            a0 = Some(a);
        } else {
            coeffs.push((a, b));
        }
    }
    let a0 = a0.ok_or("missing harmonic 0")?;
    let series = FourierSeries::from_coefficients(a0, coeffs);
    Ok((omega, series))
}

/// Two-column dense curve, e.g. `theta,z` or `theta,f`.
pub fn curve_csv(col_x: &str, col_y: &str, points: &[(f64, f64)]) -> String {
    let mut out = format!("{col_x},{col_y}\n");
    for &(x, y) in points {
        let _ = writeln!(out, "{},{}", fmt_angle(x), fmt_angle(y));
    }
    out
}

/// Graphs of the base map and its requested iterate on one grid.
pub fn map_graph_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("theta,map_theta,iterate_theta\n");
    for &(x, g, gn) in rows {
        let _ = writeln!(out, "{},{},{}", fmt_angle(x), fmt_angle(g), fmt_angle(gn));
    }
    out
}

/// `fixed_points.csv`: one row per located fixed point of the analysed
/// iterate.
pub fn fixed_points_csv(freq_hz: f64, fps: &[FixedPoint]) -> String {
    let mut out = String::from("freq_hz,iterate_n,theta_star,multiplier,stability\n");
    for fp in fps {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(freq_hz),
            fp.iterate_n,
            fmt_angle(fp.theta_star),
            fmt_num(fp.multiplier),
            stability_label(fp.stability)
        );
    }
    out
}

/// `basins.csv`: one row per basin arc; header-only when the map has no
/// attracting fixed points.
pub fn basins_csv(freq_hz: f64, partition: Option<&BasinPartition>) -> String {
    let mut out = String::from("freq_hz,lo,hi,attractor_theta\n");
    if let Some(p) = partition {
        for arc in &p.intervals {
            let attractor = arc
                .attractor
                .map(|fp| fmt_angle(fp.theta_star))
                .unwrap_or_else(|| "none".to_string());
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_num(freq_hz),
                fmt_angle(arc.lo),
                fmt_angle(arc.hi),
                attractor
            );
        }
    }
    out
}

/// `sweep.csv`: per frequency and neuron, initial and final phase.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("freq_hz,neuron_idx,theta_initial,theta_final\n");
    for p in points {
        for (i, (th0, th1)) in p.initial.iter().zip(&p.final_phases).enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_num(p.freq_hz),
                i,
                fmt_angle(*th0),
                fmt_angle(*th1)
            );
        }
    }
    out
}

/// `clusters.csv`: one row per detected cluster at each listed frequency.
pub fn clusters_csv(entries: &[(f64, &ClusterReport)]) -> String {
    let mut out = String::from("freq_hz,cluster_idx,representative_theta,size\n");
    for (freq, report) in entries {
        for (idx, cluster) in report.clusters.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_num(*freq),
                idx,
                fmt_angle(cluster.representative),
                cluster.size
            );
        }
    }
    out
}

/// `timeseries.csv`: every recorded row of a population trace.
pub fn timeseries_csv(trace: &PopulationTrace) -> String {
    let mut out = String::from("t_ms,neuron_idx,theta\n");
    for (t, row) in trace.times.iter().zip(&trace.phases) {
        for (i, th) in row.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", fmt_num(*t), i, fmt_angle(*th));
        }
    }
    out
}

/// `final_phases.csv`: the post-pulse snapshot with initial-phase provenance.
pub fn final_phases_csv(initial: &[f64], final_phases: &[f64]) -> String {
    let mut out = String::from("neuron_idx,theta_initial,theta_final\n");
    for (i, (th0, th1)) in initial.iter().zip(final_phases).enumerate() {
        let _ = writeln!(out, "{},{},{}", i, fmt_angle(*th0), fmt_angle(*th1));
    }
    out
}

/// `bifurcation.csv`: attracting-location count along the split-fraction
/// grid.
pub fn bifurcation_csv(scan: &Tau2Scan) -> String {
    let mut out = String::from("tau2_frac,tau2_ms,stable_count\n");
    for (frac, count) in scan.fractions.iter().zip(&scan.stable_counts) {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_num(*frac),
            fmt_num(frac * scan.tau),
            count
        );
    }
    out
}

/// `brackets.csv`: one row per bracketed stable-count change.
pub fn brackets_csv(tau: f64, events: &[SaddleNode]) -> String {
    let mut out = String::from(
        "tau2_lo_ms,tau2_hi_ms,tau2_star_ms,tau2_star_frac,stable_below,stable_above,\
         theta_stable,theta_unstable,multiplier_stable,multiplier_unstable\n",
    );
    for ev in events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_num(ev.tau2_lo),
            fmt_num(ev.tau2_hi),
            fmt_num(ev.tau2_star),
            fmt_num(ev.tau2_star / tau),
            ev.stable_below,
            ev.stable_above,
            fmt_angle(ev.pair_theta_stable),
            fmt_angle(ev.pair_theta_unstable),
            fmt_num(ev.pair_multiplier_stable),
            fmt_num(ev.pair_multiplier_unstable)
        );
    }
    out
}
