//! JSON run summaries.
//!
//! Each data-producing subcommand writes a `summary.json` next to its CSV
//! files so plots and assertions consume the same artifact. Serialization is
//! deterministic: struct field order is fixed and floats use the shortest
//! round-trip representation.

use serde::Serialize;
use std::path::Path;

use pulsemap_core::analysis::{SaddleNode, Tau2Scan};
use pulsemap_core::population::{ClusterReport, SweepPoint, SweepTable, TrainFamily};

use crate::config::CliError;
use crate::csvio::write_file;

/// Pulse-train description echoed into every summary.
#[derive(Serialize)]
pub struct TrainInfo {
    /// `identical` or `alternating`.
    pub kind: &'static str,
    pub u_max: f64,
    pub p_ms: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u2_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau2_frac: Option<f64>,
}

impl TrainInfo {
    pub fn of(family: &TrainFamily) -> Self {
        match family {
            TrainFamily::Identical { pulse } => TrainInfo {
                kind: "identical",
                u_max: pulse.u_max(),
                p_ms: pulse.width(),
                lambda: pulse.lambda(),
                u2_max: None,
                tau2_frac: None,
            },
            TrainFamily::Alternating {
                primary,
                secondary,
                tau2_frac,
            } => TrainInfo {
                kind: "alternating",
                u_max: primary.u_max(),
                p_ms: primary.width(),
                lambda: primary.lambda(),
                u2_max: Some(secondary.u_max()),
                tau2_frac: Some(*tau2_frac),
            },
        }
    }
}

/// Initial-distribution description echoed into every summary.
#[derive(Serialize)]
pub struct DistributionInfo {
    /// `uniform` or `von_mises`.
    pub kind: &'static str,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
}

/// Cluster outcome common to sweeps and single simulations: the headline
/// count plus the detected groups behind it (sizes and locations are emitted
/// only when clustering actually formed).
#[derive(Serialize)]
pub struct ClusterOutcome {
    /// Headline verdict: group count, or `null` for no clustering.
    pub cluster_count: Option<usize>,
    pub cluster_sizes: Vec<usize>,
    pub representatives: Vec<f64>,
}

impl ClusterOutcome {
    pub fn new(verdict: Option<usize>, report: &ClusterReport) -> Self {
        let clustered = verdict.map(|c| c > 0).unwrap_or(false);
        ClusterOutcome {
            cluster_count: verdict,
            cluster_sizes: if clustered {
                report.clusters.iter().map(|c| c.size).collect()
            } else {
                Vec::new()
            },
            representatives: if clustered {
                report.clusters.iter().map(|c| c.representative).collect()
            } else {
                Vec::new()
            },
        }
    }
}

/// One sweep frequency: simulated and predicted counts side by side with the
/// agreement flag between them.
#[derive(Serialize)]
pub struct FrequencySummary {
    pub freq_hz: f64,
    pub simulated_clusters: Option<usize>,
    pub predicted_clusters: Option<usize>,
    pub agreement: bool,
    #[serde(flatten)]
    pub outcome: ClusterOutcome,
}

impl FrequencySummary {
    pub fn of(point: &SweepPoint) -> Self {
        FrequencySummary {
            freq_hz: point.freq_hz,
            simulated_clusters: point.simulated_cluster_count,
            predicted_clusters: point.predicted_cluster_count,
            agreement: point.simulated_cluster_count == point.predicted_cluster_count,
            outcome: ClusterOutcome::new(point.cluster_count, &point.clusters),
        }
    }
}

/// A frequency whose run failed; the sweep carried on without it.
#[derive(Serialize)]
pub struct FailureSummary {
    pub freq_hz: f64,
    pub error: String,
}

#[derive(Serialize)]
pub struct SweepSummary {
    pub command: &'static str,
    pub model: String,
    pub omega: f64,
    pub train: TrainInfo,
    pub distribution: DistributionInfo,
    pub periods: usize,
    pub epsilon: f64,
    pub frequencies: Vec<FrequencySummary>,
    pub failures: Vec<FailureSummary>,
}

impl SweepSummary {
    pub fn of(
        model: String,
        omega: f64,
        family: &TrainFamily,
        distribution: DistributionInfo,
        table: &SweepTable,
    ) -> Self {
        SweepSummary {
            command: "sweep",
            model,
            omega,
            train: TrainInfo::of(family),
            distribution,
            periods: table.periods,
            epsilon: table.epsilon,
            frequencies: table.points.iter().map(FrequencySummary::of).collect(),
            failures: table
                .failures
                .iter()
                .map(|(freq, e)| FailureSummary {
                    freq_hz: *freq,
                    error: e.to_string(),
                })
                .collect(),
        }
    }
}

/// One bracketed stable-count change of the split-timing scan.
#[derive(Serialize)]
pub struct BracketSummary {
    pub tau2_lo_ms: f64,
    pub tau2_hi_ms: f64,
    pub tau2_star_ms: f64,
    pub tau2_star_frac: f64,
    pub stable_below: usize,
    pub stable_above: usize,
    pub theta_stable: f64,
    pub theta_unstable: f64,
    pub multiplier_stable: f64,
    pub multiplier_unstable: f64,
}

impl BracketSummary {
    pub fn of(tau: f64, ev: &SaddleNode) -> Self {
        BracketSummary {
            tau2_lo_ms: ev.tau2_lo,
            tau2_hi_ms: ev.tau2_hi,
            tau2_star_ms: ev.tau2_star,
            tau2_star_frac: ev.tau2_star / tau,
            stable_below: ev.stable_below,
            stable_above: ev.stable_above,
            theta_stable: ev.pair_theta_stable,
            theta_unstable: ev.pair_theta_unstable,
            multiplier_stable: ev.pair_multiplier_stable,
            multiplier_unstable: ev.pair_multiplier_unstable,
        }
    }
}

#[derive(Serialize)]
pub struct ScanRow {
    pub tau2_frac: f64,
    pub tau2_ms: f64,
    pub stable_count: usize,
}

#[derive(Serialize)]
pub struct BifurcateSummary {
    pub command: &'static str,
    pub model: String,
    pub omega: f64,
    pub freq_hz: f64,
    pub tau_ms: f64,
    pub iterate_n: u32,
    pub scan: Vec<ScanRow>,
    pub brackets: Vec<BracketSummary>,
}

impl BifurcateSummary {
    pub fn of(model: String, omega: f64, freq_hz: f64, scan: &Tau2Scan) -> Self {
        BifurcateSummary {
            command: "bifurcate",
            model,
            omega,
            freq_hz,
            tau_ms: scan.tau,
            iterate_n: scan.iterate_n,
            scan: scan
                .fractions
                .iter()
                .zip(&scan.stable_counts)
                .map(|(frac, count)| ScanRow {
                    tau2_frac: *frac,
                    tau2_ms: frac * scan.tau,
                    stable_count: *count,
                })
                .collect(),
            brackets: scan
                .events
                .iter()
                .map(|ev| BracketSummary::of(scan.tau, ev))
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct SimulateSummary {
    pub command: &'static str,
    pub model: String,
    pub omega: f64,
    pub freq_hz: f64,
    /// `ode` (explicit finite-pulse integration) or `map` (return-map
    /// iteration).
    pub method: &'static str,
    pub train: TrainInfo,
    pub distribution: DistributionInfo,
    pub periods: usize,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_ms: Option<f64>,
    pub final_time_ms: f64,
    /// True when the final snapshot chains all the way around the circle
    /// (no separating gap): no grouping formed.
    pub covers_circle: bool,
    #[serde(flatten)]
    pub outcome: ClusterOutcome,
}

/// Serialize a summary deterministically and write it as `summary.json`.
pub fn write_summary<T: Serialize>(dir: &Path, value: &T) -> Result<std::path::PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Stage {
        stage: "io",
        message: format!("cannot serialize summary: {e}"),
    })?;
    text.push('\n');
    write_file(dir, "summary.json", &text)
}
