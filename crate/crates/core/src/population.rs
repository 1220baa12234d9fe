//! Populations of identical phase oscillators under periodic pulse trains.
//!
//! A population of `N` neurons sharing one oscillator (frequency `omega`,
//! sensitivity `Z`) but starting at different phases evolves under
//! `dtheta_i/dt = omega + Z(theta_i) u(t)`. This module provides
//!
//! * deterministic initial phase distributions (evenly spaced, or quantiles
//!   of a von Mises density),
//! * an explicit finite-pulse simulation of the phase equation and a fast
//!   equivalent that iterates the per-cycle return map,
//! * cluster detection on the circle by sort-and-chain with a wrap merge,
//! * frequency sweeps that pair the simulated clusters with the map-side
//!   attractor prediction and combine the two into a per-frequency verdict
//!   (no attracting orbit means no clustering, whatever transient grouping a
//!   finite snapshot shows).
//!
//! # Pulse bookkeeping
//!
//! The circle maps treat each pulse as an instantaneous phase jump applied at
//! the pulse's onset time, while the simulation plays the full rectangular
//! pulse out over its support. The two pictures are reconciled by a fixed
//! convention: the initial phases are the state of a population whose
//! previous pulse ended exactly at `t = 0`, so the first pulse of the run
//! arrives one full period later, and the final snapshot reports each phase
//! with the rigid rotation `omega * support` accumulated while the last pulse
//! played out removed. Under this convention `n` stimulation cycles apply the
//! per-cycle return map exactly `n` times, and a silent train leaves
//! `theta_i + omega * n * tau` exactly.
//!
//! Neurons never interact: every loop over the population is a plain
//! data-parallel map assembled in neuron order, so callers may shard the
//! population (or whole sweep frequencies) across threads without changing
//! any result.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::analysis::enumerate_attractors;
use crate::analysis::predicted_cluster_count;
use crate::math::{bessel_i0, wrap_2pi, PI, TAU};
use crate::ode::rk4_step_scalar;
use crate::prc::PhaseResponseCurve;
use crate::response::{
    compute_response_function, make_alternating, make_g, CircleMap, MapError, ResponseFunction,
    DEFAULT_RESPONSE_GRID,
};
use crate::stimulus::{Pulse, PulseTrain, StimulusError};

/// Default chain tolerance for cluster detection, in radians.
pub const DEFAULT_CLUSTER_EPSILON: f64 = 0.05;

/// Default integration step for the population phase ODE, in ms (fifty steps
/// across the standard 0.5 ms pulse).
pub const DEFAULT_POPULATION_DT: f64 = 0.01;

/// Default recording stride: one trace row every this many accepted steps.
pub const DEFAULT_RECORD_STRIDE: usize = 50;

/// Largest von Mises concentration accepted; the Bessel power series is
/// validated on this domain.
pub const MAX_VON_MISES_KAPPA: f64 = 100.0;

/// Longest orbit period the sweep's map-side prediction searches for.
pub const SWEEP_MAX_PERIOD: u32 = 10;

/// Failure modes of population construction, simulation, and sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum PopulationError {
    /// The population must contain at least one neuron.
    EmptyPopulation,
    /// Von Mises concentration outside `[0, 100]`.
    KappaOutOfRange(f64),
    /// Von Mises center must be a finite angle.
    InvalidCenter(f64),
    /// The integration step does not resolve the pulse.
    DtTooCoarse {
        /// Rejected step, ms.
        dt: f64,
        /// Largest acceptable step: one tenth of the narrowest positive
        /// pulse phase in the train.
        max: f64,
    },
    /// At least one stimulation cycle is required.
    InvalidPeriods(usize),
    /// A sweep over secondary-pulse timing needs an alternating family.
    FamilyNotAlternating,
    /// Map construction failed.
    Map(MapError),
    /// Train construction failed.
    Stimulus(StimulusError),
}

impl fmt::Display for PopulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopulationError::EmptyPopulation => {
                write!(f, "the population must contain at least one neuron")
            }
            PopulationError::KappaOutOfRange(k) => write!(
                f,
                "von Mises concentration {k} outside [0, {MAX_VON_MISES_KAPPA}]"
            ),
            PopulationError::InvalidCenter(c) => {
                write!(f, "von Mises center {c} is not a finite angle")
            }
            PopulationError::DtTooCoarse { dt, max } => write!(
                f,
                "integration step {dt} ms does not resolve the pulse; \
                 use dt <= {max} ms (one tenth of the narrowest positive phase)"
            ),
            PopulationError::InvalidPeriods(p) => {
                write!(f, "at least one stimulation cycle is required, got {p}")
            }
            PopulationError::FamilyNotAlternating => {
                write!(f, "this sweep needs a two-pulse (alternating) train family")
            }
            PopulationError::Map(e) => write!(f, "map construction failed: {e}"),
            PopulationError::Stimulus(e) => write!(f, "train construction failed: {e}"),
        }
    }
}

impl From<MapError> for PopulationError {
    fn from(e: MapError) -> Self {
        PopulationError::Map(e)
    }
}

impl From<StimulusError> for PopulationError {
    fn from(e: StimulusError) -> Self {
        PopulationError::Stimulus(e)
    }
}

/// Deterministic initial phase assignments for a population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDistribution {
    /// Phases evenly spaced: `theta_i = 2 pi i / N`.
    Uniform {
        /// Number of neurons `N`.
        count: usize,
    },
    /// Quantiles of the von Mises density
    /// `rho(theta) = exp(kappa cos(theta - center)) / (2 pi I0(kappa))`
    /// at the probabilities `(i + 0.5) / N`, giving a reproducible
    /// concentration of phases around `center` without random sampling.
    VonMises {
        /// Number of neurons `N`.
        count: usize,
        /// Concentration `kappa >= 0`; zero reduces to even spacing.
        kappa: f64,
        /// Center of the density, radians.
        center: f64,
    },
}

impl InitialDistribution {
    /// Number of neurons the distribution describes.
    pub fn count(&self) -> usize {
        match *self {
            InitialDistribution::Uniform { count } => count,
            InitialDistribution::VonMises { count, .. } => count,
        }
    }

    /// Materialize the phases, each in `[0, 2 pi)`, in neuron order.
    pub fn phases(&self) -> Result<Vec<f64>, PopulationError> {
        match *self {
            InitialDistribution::Uniform { count } => {
                if count == 0 {
                    return Err(PopulationError::EmptyPopulation);
                }
                Ok((0..count)
                    .map(|i| TAU * i as f64 / count as f64)
                    .collect())
            }
            InitialDistribution::VonMises {
                count,
                kappa,
                center,
            } => {
                if count == 0 {
                    return Err(PopulationError::EmptyPopulation);
                }
                if !(kappa >= 0.0 && kappa <= MAX_VON_MISES_KAPPA) {
                    return Err(PopulationError::KappaOutOfRange(kappa));
                }
                if !center.is_finite() {
                    return Err(PopulationError::InvalidCenter(center));
                }
                Ok(von_mises_quantiles(count, kappa, center))
            }
        }
    }
}

/// Number of equal cells the cumulative von Mises integral is tabulated on.
const VON_MISES_CELLS: usize = 4096;

/// Quantiles of the von Mises density at probabilities `(i + 0.5) / count`.
///
/// The cumulative integral is tabulated over one period centered on the
/// density's peak with composite Simpson quadrature (the integrand is smooth,
/// so each 1.5e-3 rad cell is far below rounding error), then each quantile
/// is pinned inside its bracketing cell with a safeguarded Newton iteration
/// on the local integral. Targets are scaled by the tabulated total mass, so
/// the quantiles are self-consistent even at the quadrature's rounding floor.
fn von_mises_quantiles(count: usize, kappa: f64, center: f64) -> Vec<f64> {
    let i0 = bessel_i0(kappa);
    let density = move |phi: f64| (kappa * phi.cos()).exp() / (TAU * i0);

    let h = TAU / VON_MISES_CELLS as f64;
    // Density at cell endpoints and midpoints (half-step grid).
    let mut rho = Vec::with_capacity(2 * VON_MISES_CELLS + 1);
    for k in 0..=2 * VON_MISES_CELLS {
        rho.push(density(-PI + 0.5 * h * k as f64));
    }
    // Cumulative Simpson integral from -pi to each cell boundary.
    let mut cumulative = Vec::with_capacity(VON_MISES_CELLS + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for j in 0..VON_MISES_CELLS {
        acc += h / 6.0 * (rho[2 * j] + 4.0 * rho[2 * j + 1] + rho[2 * j + 2]);
        cumulative.push(acc);
    }
    let total = acc;

    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let target = (i as f64 + 0.5) / count as f64 * total;
        // Bracketing cell: cumulative[j] <= target < cumulative[j + 1].
        let mut lo = 0usize;
        let mut hi = VON_MISES_CELLS;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if cumulative[mid] <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x0 = -PI + h * lo as f64;
        let want = target - cumulative[lo];
        // Safeguarded Newton on W(d) = local integral over [x0, x0 + d] - want.
        let mut d_lo = 0.0_f64;
        let mut d_hi = h;
        let mut d = 0.5 * h;
        for _ in 0..60 {
            let w = simpson_panel(&density, x0, d) - want;
            if w > 0.0 {
                d_hi = d;
            } else {
                d_lo = d;
            }
            let slope = density(x0 + d);
            let mut next = d - w / slope;
            if !(next > d_lo && next < d_hi) {
                next = 0.5 * (d_lo + d_hi);
            }
            if (next - d).abs() < 1e-15 {
                d = next;
                break;
            }
            d = next;
        }
        out.push(wrap_2pi(x0 + d + center));
    }
    out
}

/// Composite Simpson integral of `f` over `[a, a + len]` with four panels
/// (ample for the sub-cell spans it is used on).
fn simpson_panel<F: Fn(f64) -> f64>(f: &F, a: f64, len: f64) -> f64 {
    let n = 4;
    let h = len / n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        let x0 = a + h * k as f64;
        acc += h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
    }
    acc
}

/// Knobs of the explicit population simulation.
#[derive(Debug, Clone, Copy)]
pub struct PopulationParams {
    /// Integration step ceiling, ms; segments between pulse edges are split
    /// into equal steps no longer than this.
    pub dt: f64,
    /// Record one trace row every this many accepted steps.
    pub record_stride: usize,
}

impl Default for PopulationParams {
    fn default() -> Self {
        PopulationParams {
            dt: DEFAULT_POPULATION_DT,
            record_stride: DEFAULT_RECORD_STRIDE,
        }
    }
}

/// Recorded evolution of a population.
#[derive(Debug, Clone)]
pub struct PopulationTrace {
    /// Recording times, ms, strictly increasing; `times[0] = 0`.
    pub times: Vec<f64>,
    /// One row per recording time: `phases[row][i]` is neuron `i`'s phase in
    /// `[0, 2 pi)` at `times[row]`.
    pub phases: Vec<Vec<f64>>,
    /// The train that drove the run, when one did (map-iteration traces have
    /// no explicit train).
    pub train: Option<PulseTrain>,
    /// Stride the rows were recorded at.
    pub record_stride: usize,
    /// Initial phases, `[0, 2 pi)`, in neuron order.
    pub initial: Vec<f64>,
    /// Time of the final snapshot, ms.
    pub final_time: f64,
    /// Post-pulse snapshot: each neuron's phase just after the last primary
    /// pulse, reported at the pulse time (the rigid rotation over the pulse
    /// support is removed, matching the instantaneous-kick bookkeeping of
    /// the circle maps).
    pub final_phases: Vec<f64>,
}

/// One zero-or-constant-input stretch of the stimulation schedule.
struct Segment {
    t0: f64,
    t1: f64,
    u: f64,
}

/// Chronological piecewise-constant input segments for `periods` cycles.
///
/// Cycle `n` (one-based) delivers the optional secondary pulse at
/// `(n - 1) tau + tau2` and the primary pulse at `n tau`, so the run's final
/// event is the primary pulse of the last cycle.
fn build_schedule(train: &PulseTrain, periods: usize) -> Vec<Segment> {
    let tau = train.period();
    let primary = train.primary();
    let mut events: Vec<(f64, f64, f64)> = Vec::new();
    for n in 0..periods {
        let cycle_start = n as f64 * tau;
        if let Some(sec) = train.secondary() {
            let s0 = cycle_start + sec.offset;
            events.push((s0, s0 + sec.pulse.width(), sec.pulse.u_max()));
            events.push((s0 + sec.pulse.width(), s0 + sec.pulse.support(), sec.pulse.u_min()));
        }
        let m0 = cycle_start + tau;
        events.push((m0, m0 + primary.width(), primary.u_max()));
        events.push((m0 + primary.width(), m0 + primary.support(), primary.u_min()));
    }
    let mut segments = Vec::with_capacity(2 * events.len());
    let mut t = 0.0;
    for (a, b, u) in events {
        if a > t {
            segments.push(Segment { t0: t, t1: a, u: 0.0 });
        }
        segments.push(Segment { t0: a, t1: b, u });
        t = b;
    }
    segments
}

/// Integrate every neuron's phase equation `dtheta/dt = omega + Z(theta) u(t)`
/// through `periods` cycles of the finite-pulse train.
///
/// Within each constant-input segment the equation is advanced with fixed-step
/// RK4 (steps no longer than `params.dt`, landing segment edges exactly).
/// Rows are recorded every `params.record_stride` accepted steps plus at the
/// start and the end; the final snapshot follows the post-pulse convention
/// described in the module docs.
pub fn simulate_population(
    prc: &PhaseResponseCurve,
    train: &PulseTrain,
    init: &InitialDistribution,
    periods: usize,
    params: &PopulationParams,
) -> Result<PopulationTrace, PopulationError> {
    if periods == 0 {
        return Err(PopulationError::InvalidPeriods(periods));
    }
    assert!(params.record_stride >= 1, "record stride must be positive");
    let mut max_dt = train.primary().width() / 10.0;
    if let Some(sec) = train.secondary() {
        max_dt = max_dt.min(sec.pulse.width() / 10.0);
    }
    if !(params.dt > 0.0) || !params.dt.is_finite() || params.dt > max_dt {
        return Err(PopulationError::DtTooCoarse {
            dt: params.dt,
            max: max_dt,
        });
    }
    let initial = init.phases()?;

    let omega = prc.omega();
    let schedule = build_schedule(train, periods);
    let end_time = schedule.last().map(|s| s.t1).unwrap_or(0.0);

    // Phases evolve unwrapped; rows store wrapped copies.
    let mut theta: Vec<f64> = initial.clone();
    let mut times = Vec::new();
    let mut rows = Vec::new();
    let record = |t: f64, theta: &[f64], times: &mut Vec<f64>, rows: &mut Vec<Vec<f64>>| {
        times.push(t);
        rows.push(theta.iter().map(|&x| wrap_2pi(x)).collect());
    };
    record(0.0, &theta, &mut times, &mut rows);

    let mut step_counter = 0usize;
    for seg in &schedule {
        let len = seg.t1 - seg.t0;
        let steps = ((len / params.dt).ceil() as usize).max(1);
        let h = len / steps as f64;
        let u = seg.u;
        let rhs = |th: f64| omega + prc.eval(th) * u;
        for k in 0..steps {
            for th in theta.iter_mut() {
                *th = rk4_step_scalar(&rhs, *th, h);
            }
            step_counter += 1;
            if step_counter % params.record_stride == 0 {
                record(seg.t0 + h * (k + 1) as f64, &theta, &mut times, &mut rows);
            }
        }
    }
    if *times.last().expect("at least the initial row exists") < end_time {
        record(end_time, &theta, &mut times, &mut rows);
    }

    let support = train.primary().support();
    let final_phases = theta
        .iter()
        .map(|&x| wrap_2pi(x - omega * support))
        .collect();
    Ok(PopulationTrace {
        times,
        phases: rows,
        train: Some(*train),
        record_stride: params.record_stride,
        initial,
        final_time: end_time,
        final_phases,
    })
}

/// Advance every neuron by iterating the per-cycle return map, recording one
/// row per application (`O(N * n_iters)` map evaluations).
///
/// Row `k` holds the phases after `k` applications; the final snapshot equals
/// the last row. Times advance by the map's full cycle length per row.
pub fn simulate_population_by_map(
    map: &CircleMap,
    init: &InitialDistribution,
    n_iters: usize,
) -> Result<PopulationTrace, PopulationError> {
    if n_iters == 0 {
        return Err(PopulationError::InvalidPeriods(n_iters));
    }
    let initial = init.phases()?;
    let cycle = map.tau() * map.iterate_n() as f64;
    let mut times = Vec::with_capacity(n_iters + 1);
    let mut rows = Vec::with_capacity(n_iters + 1);
    times.push(0.0);
    rows.push(initial.clone());
    let mut current = initial.clone();
    for k in 1..=n_iters {
        for th in current.iter_mut() {
            *th = map.eval(*th);
        }
        times.push(cycle * k as f64);
        rows.push(current.clone());
    }
    let final_phases = current;
    Ok(PopulationTrace {
        times,
        phases: rows,
        train: None,
        record_stride: 1,
        initial,
        final_time: cycle * n_iters as f64,
        final_phases,
    })
}

/// One detected group of phases.
#[derive(Debug, Clone)]
pub struct Cluster {
    /// Circular mean of the member phases, `[0, 2 pi)`.
    pub representative: f64,
    /// Member neuron indices, ascending.
    pub members: Vec<usize>,
    /// Member count (equals `members.len()`).
    pub size: usize,
}

/// Result of cluster detection on a phase snapshot.
#[derive(Debug, Clone)]
pub struct ClusterReport {
    /// Detected groups, ordered by representative phase. Sizes sum to the
    /// population size.
    pub clusters: Vec<Cluster>,
    /// Chain tolerance the detection ran with, radians.
    pub epsilon: f64,
    /// Population size.
    pub total: usize,
    /// True when the phases chain all the way around the circle (no gap
    /// exceeds `epsilon` anywhere), so no distinguishable groups exist.
    pub covers_circle: bool,
}

impl ClusterReport {
    /// Number of distinguishable groups: `None` when the population covers
    /// the whole circle without a separating gap (no grouping formed).
    pub fn cluster_count(&self) -> Option<usize> {
        if self.covers_circle && self.total > 1 {
            None
        } else {
            Some(self.clusters.len())
        }
    }

    /// Cluster sizes in ascending order (convenient for comparisons that
    /// ignore cluster identity).
    pub fn sizes_sorted(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.clusters.iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        sizes
    }
}

/// Group phases into clusters: sort ascending, chain neighbors closer than
/// `epsilon`, and merge the first and last chain when their gap across the
/// `0 / 2 pi` seam is within `epsilon` (groups straddling zero must not
/// split). Rotating every phase by a constant permutes nothing but the
/// representatives; neuron order never matters.
///
/// `epsilon` must be positive and finite; phases must be finite. An empty
/// slice yields an empty report.
pub fn detect_clusters(phases: &[f64], epsilon: f64) -> ClusterReport {
    assert!(
        epsilon > 0.0 && epsilon.is_finite(),
        "cluster tolerance must be positive and finite"
    );
    let n = phases.len();
    let wrapped: Vec<f64> = phases.iter().map(|&p| wrap_2pi(p)).collect();
    assert!(
        wrapped.iter().all(|p| p.is_finite()),
        "phases must be finite"
    );
    if n == 0 {
        return ClusterReport {
            clusters: Vec::new(),
            epsilon,
            total: 0,
            covers_circle: false,
        };
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        wrapped[a]
            .partial_cmp(&wrapped[b])
            .expect("phases are finite")
            .then(a.cmp(&b))
    });

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match groups.last_mut() {
            Some(group) => {
                let prev = wrapped[*group.last().expect("groups are never empty")];
                if wrapped[idx] - prev <= epsilon {
                    group.push(idx);
                } else {
                    groups.push(alloc::vec![idx]);
                }
            }
            None => groups.push(alloc::vec![idx]),
        }
    }

    let first_phase = wrapped[order[0]];
    let last_phase = wrapped[*order.last().expect("population is non-empty")];
    let wrap_gap = first_phase + TAU - last_phase;
    let mut covers_circle = false;
    if groups.len() >= 2 {
        if wrap_gap <= epsilon {
            let tail = groups.pop().expect("at least two groups");
            groups[0].extend(tail);
        }
    } else if n >= 2 && wrap_gap <= epsilon {
        covers_circle = true;
    }

    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|mut members| {
            let (mut s, mut c) = (0.0_f64, 0.0_f64);
            for &m in &members {
                let (ms, mc) = wrapped[m].sin_cos();
                s += ms;
                c += mc;
            }
            members.sort_unstable();
            let size = members.len();
            Cluster {
                representative: wrap_2pi(s.atan2(c)),
                members,
                size,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.representative
            .partial_cmp(&b.representative)
            .expect("representatives are finite")
    });
    ClusterReport {
        clusters,
        epsilon,
        total: n,
        covers_circle,
    }
}

/// A one-parameter family of pulse trains indexed by stimulation frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainFamily {
    /// The same pulse every cycle.
    Identical {
        /// The repeated pulse.
        pulse: Pulse,
    },
    /// A primary pulse at the cycle boundary and a secondary pulse at a fixed
    /// fraction of the period.
    Alternating {
        /// Primary pulse.
        primary: Pulse,
        /// Secondary pulse.
        secondary: Pulse,
        /// Secondary offset as a fraction of the period, in `(0, 1)`.
        tau2_frac: f64,
    },
}

impl TrainFamily {
    /// The standard single-pulse family (amplitude 20, width 0.5 ms, balance
    /// ratio 3).
    pub fn standard_identical() -> Self {
        TrainFamily::Identical {
            pulse: Pulse::new(20.0, 0.5, 3.0).expect("standard pulse parameters are valid"),
        }
    }

    /// The standard two-pulse family (primary amplitude 20, secondary 10,
    /// both 0.5 ms wide with balance ratio 3) at the given split fraction.
    pub fn standard_alternating(tau2_frac: f64) -> Self {
        TrainFamily::Alternating {
            primary: Pulse::new(20.0, 0.5, 3.0).expect("standard pulse parameters are valid"),
            secondary: Pulse::new(10.0, 0.5, 3.0).expect("standard pulse parameters are valid"),
            tau2_frac,
        }
    }

    /// Primary pulse of the family.
    pub fn primary(&self) -> &Pulse {
        match self {
            TrainFamily::Identical { pulse } => pulse,
            TrainFamily::Alternating { primary, .. } => primary,
        }
    }

    /// Secondary pulse, for two-pulse families.
    pub fn secondary(&self) -> Option<&Pulse> {
        match self {
            TrainFamily::Identical { .. } => None,
            TrainFamily::Alternating { secondary, .. } => Some(secondary),
        }
    }

    /// Build the family's train at `freq_hz` (period `1000 / freq_hz` ms).
    /// Frequencies outside `(0, 2000]` Hz are rejected.
    pub fn train(&self, freq_hz: f64) -> Result<PulseTrain, StimulusError> {
        if !(freq_hz > 0.0 && freq_hz <= 2000.0) {
            return Err(StimulusError::FrequencyOutOfRange(freq_hz));
        }
        let tau = 1000.0 / freq_hz;
        match *self {
            TrainFamily::Identical { pulse } => PulseTrain::identical(pulse, tau),
            TrainFamily::Alternating {
                primary,
                secondary,
                tau2_frac,
            } => PulseTrain::alternating(primary, tau, secondary, tau2_frac * tau),
        }
    }
}

/// Simulated and predicted grouping at one sweep frequency.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// Stimulation frequency, Hz.
    pub freq_hz: f64,
    /// Initial phase of each neuron (provenance for coloring final states).
    pub initial: Vec<f64>,
    /// Final post-pulse phase of each neuron, aligned with `initial`.
    pub final_phases: Vec<f64>,
    /// Cluster detection on the final snapshot.
    pub clusters: ClusterReport,
    /// Group count from the simulation (`None`: no grouping formed).
    pub simulated_cluster_count: Option<usize>,
    /// Group count predicted from the map's attracting orbits (`None`: no
    /// attracting orbit of period up to [`SWEEP_MAX_PERIOD`]).
    pub predicted_cluster_count: Option<usize>,
    /// Headline verdict: the detected group count, or `None` when no
    /// clustering forms. A map without attracting orbits (chaotic or
    /// quasiperiodic regime) cannot cluster — any gap-separated groups in its
    /// finite snapshot are transient debris that a longer run reshuffles — so
    /// the verdict requires both an attracting orbit and detected groups
    /// (`predicted.and(simulated)`).
    pub cluster_count: Option<usize>,
}

/// Outcome of sweeping a train family over a frequency grid.
#[derive(Debug, Clone)]
pub struct SweepTable {
    /// Stimulation cycles applied at every frequency.
    pub periods: usize,
    /// Cluster-detection tolerance, radians.
    pub epsilon: f64,
    /// Successful frequencies, in input order.
    pub points: Vec<SweepPoint>,
    /// Frequencies whose run failed, with the failure, in input order; the
    /// sweep continues past them.
    pub failures: Vec<(f64, PopulationError)>,
}

/// Everything a sweep shares across frequencies: the per-pulse response
/// functions (the expensive part, frequency-independent), the initial phases,
/// and the sweep knobs. [`SweepContext::point`] evaluates one frequency; the
/// context is immutable, so callers may evaluate frequencies concurrently and
/// assemble the results in input order.
#[derive(Debug, Clone)]
pub struct SweepContext {
    omega: f64,
    family: TrainFamily,
    f1: ResponseFunction,
    f2: Option<ResponseFunction>,
    initial: Vec<f64>,
    periods: usize,
    epsilon: f64,
}

impl SweepContext {
    /// Materialize the initial phases and compute the response function of
    /// each pulse in the family once.
    pub fn new(
        prc: &PhaseResponseCurve,
        family: &TrainFamily,
        init: &InitialDistribution,
        periods: usize,
        epsilon: f64,
    ) -> Result<Self, PopulationError> {
        if periods == 0 {
            return Err(PopulationError::InvalidPeriods(periods));
        }
        let initial = init.phases()?;
        let f1 = compute_response_function(prc, family.primary(), DEFAULT_RESPONSE_GRID)?;
        let f2 = match family.secondary() {
            Some(p) => Some(compute_response_function(prc, p, DEFAULT_RESPONSE_GRID)?),
            None => None,
        };
        Ok(SweepContext {
            omega: prc.omega(),
            family: *family,
            f1,
            f2,
            initial,
            periods,
            epsilon,
        })
    }

    /// Initial phases shared by every frequency.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Stimulation cycles applied per frequency.
    pub fn periods(&self) -> usize {
        self.periods
    }

    /// Cluster-detection tolerance, radians.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Evaluate one frequency: build the train and its per-cycle return map,
    /// advance the population `periods` applications, detect clusters, and
    /// pair the result with the map-side attractor prediction.
    pub fn point(&self, freq_hz: f64) -> Result<SweepPoint, PopulationError> {
        let train = self.family.train(freq_hz)?;
        let tau = train.period();
        let map = match train.secondary() {
            Some(sec) => make_alternating(
                self.omega,
                tau,
                sec.offset,
                &self.f1,
                self.f2
                    .as_ref()
                    .expect("two-pulse families carry a secondary response"),
            )?,
            None => make_g(self.omega, tau, &self.f1)?,
        };
        let mut final_phases = self.initial.clone();
        for _ in 0..self.periods {
            for th in final_phases.iter_mut() {
                *th = map.eval(*th);
            }
        }
        let clusters = detect_clusters(&final_phases, self.epsilon);
        let predicted = predicted_cluster_count(&enumerate_attractors(&map, SWEEP_MAX_PERIOD));
        let simulated = clusters.cluster_count();
        Ok(SweepPoint {
            freq_hz,
            initial: self.initial.clone(),
            final_phases,
            clusters,
            simulated_cluster_count: simulated,
            predicted_cluster_count: predicted,
            cluster_count: predicted.and(simulated),
        })
    }
}

/// Sweep a train family across `freqs`: at each frequency the population is
/// advanced `periods` cycles by the per-cycle return map, clusters are
/// detected on the final snapshot, and the map's attractor-based group count
/// is recorded next to the simulated one.
///
/// Frequencies are processed in input order; a failure at one frequency is
/// recorded and the sweep continues. The per-pulse response functions are
/// computed once and shared by every frequency.
pub fn frequency_sweep(
    prc: &PhaseResponseCurve,
    family: &TrainFamily,
    init: &InitialDistribution,
    freqs: &[f64],
    periods: usize,
    epsilon: f64,
) -> Result<SweepTable, PopulationError> {
    let ctx = SweepContext::new(prc, family, init, periods, epsilon)?;
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for &freq in freqs {
        match ctx.point(freq) {
            Ok(point) => points.push(point),
            Err(e) => failures.push((freq, e)),
        }
    }
    Ok(SweepTable {
        periods,
        epsilon,
        points,
        failures,
    })
}

/// [`frequency_sweep`] specialized to two-pulse families (rejects single-pulse
/// ones), for sweeps that study the alternating train.
pub fn alternating_sweep(
    prc: &PhaseResponseCurve,
    family: &TrainFamily,
    init: &InitialDistribution,
    freqs: &[f64],
    periods: usize,
    epsilon: f64,
) -> Result<SweepTable, PopulationError> {
    if !matches!(family, TrainFamily::Alternating { .. }) {
        return Err(PopulationError::FamilyNotAlternating);
    }
    frequency_sweep(prc, family, init, freqs, periods, epsilon)
}
