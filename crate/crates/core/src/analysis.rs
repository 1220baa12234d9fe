//! Fixed points, periodic orbits, basins of attraction, and split-timing
//! bifurcation scans for per-pulse circle maps.
//!
//! Cluster formation is read off at the map level: a stable period-n orbit
//! of the per-pulse map gathers the population into n groups, one per orbit
//! point, and the basins of the n-th-iterate fixed points give the group
//! sizes.  All searches run on a uniform phase grid followed by bisection,
//! which stays robust near tangencies where Newton steps overshoot.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::math::{circ_dist, wrap_2pi, wrap_pi, TAU};
use crate::response::{iterate, make_alternating, CircleMap, ResponseFunction};

/// Default phase-grid resolution for fixed-point scans.
pub const DEFAULT_FP_GRID: usize = 2048;

/// Displacement magnitude below which a bisected root is accepted.
pub const FP_ROOT_TOL: f64 = 1e-10;

/// Two fixed points closer than this (circular distance) are duplicates.
pub const FP_DEDUP_TOL: f64 = 1e-7;

/// Half-width of the marginal band around |multiplier| = 1.
pub const STABILITY_TOL: f64 = 1e-3;

/// Largest iterate order accepted by the attractor enumeration.
pub const MAX_ATTRACTOR_ITERATE: u32 = 16;

/// Iteration budget when labelling a basin interval by its midpoint.
pub const BASIN_ITERATION_LIMIT: usize = 10_000;

/// A basin midpoint is considered captured within this distance of a
/// stable fixed point.
pub const BASIN_CAPTURE_TOL: f64 = 1e-6;

/// Width, as a fraction of the pulse period, to which a stable-count
/// change is bracketed during a split-timing scan.
pub const SPLIT_BRACKET_FRAC: f64 = 1e-4;

/// Attracting fixed points closer together than this (circular distance)
/// count as one attractor location in split-timing scans.  Near a
/// collision the grazing crossing fractures into several roots a few
/// hundredths of a radian apart that all funnel the same neighbourhood;
/// counting locations keeps the scan profile monotone through that
/// window, matching what the population can actually resolve.
pub const ATTRACTOR_MERGE_TOL: f64 = 0.05;

/// The collision probe stops refining once the attracting member's
/// multiplier has been measured at least this close to +1.  Near the
/// collision both multipliers depart from +1 like the square root of the
/// parameter distance, so the bracket width alone would leave them
/// visibly short of 1.
const SPLIT_PROBE_TARGET: f64 = 0.97;

/// Floor, in split-fraction units, for the collision probe's bisection
/// width; guards against pairs whose multipliers creep toward +1 slower
/// than the square-root law behind the target above.
const SPLIT_PROBE_FRAC: f64 = 1e-7;

/// Number of evenly spaced split fractions sampled before bracketing.
const SPLIT_SCAN_POINTS: usize = 33;

/// Linear-stability class of a fixed point of a map iterate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    /// |multiplier| < 1 - tolerance: nearby phases are attracted.
    Stable,
    /// |multiplier| > 1 + tolerance: nearby phases are repelled.
    Unstable,
    /// |multiplier| within the tolerance band of 1; classification is not
    /// trustworthy at finite precision (e.g. near a tangency).
    Marginal,
}

/// Classify a multiplier with a guard band around |m| = 1.
fn classify(multiplier: f64) -> Stability {
    let m = multiplier.abs();
    if m < 1.0 - STABILITY_TOL {
        Stability::Stable
    } else if m > 1.0 + STABILITY_TOL {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// A fixed point of the n-th iterate of a circle map.
#[derive(Clone, Copy, Debug)]
pub struct FixedPoint {
    /// Phase of the fixed point in [0, 2pi).
    pub theta_star: f64,
    /// Which iterate of the map this is a fixed point of.
    pub iterate_n: u32,
    /// Derivative of the n-th iterate at the fixed point.
    pub multiplier: f64,
    /// Linear-stability class derived from the multiplier.
    pub stability: Stability,
}

/// A periodic orbit of the base map: `points[i]` maps to
/// `points[(i + 1) % period]`.
#[derive(Clone, Debug)]
pub struct PeriodicOrbitOfMap {
    /// Phases visited by the orbit, in the order the map visits them.
    pub points: Vec<f64>,
    /// Minimal period of the orbit (equals `points.len()`).
    pub period: u32,
    /// Derivative of the period-th iterate at any orbit point (the
    /// chain-rule product around the cycle, the same at every point).
    pub multiplier: f64,
    /// Whether the orbit attracts nearby phases.
    pub stable: bool,
}

/// One arc of a basin partition.
#[derive(Clone, Copy, Debug)]
pub struct BasinInterval {
    /// Lower endpoint (an unstable or marginal fixed point), in [0, 2pi).
    pub lo: f64,
    /// Upper endpoint; exceeds 2pi only on the arc that wraps through zero.
    pub hi: f64,
    /// The stable fixed point the arc's midpoint converges to, or `None`
    /// if the midpoint failed to settle within the iteration budget.
    pub attractor: Option<FixedPoint>,
}

impl BasinInterval {
    /// Arc length of the interval.
    pub fn measure(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Partition of the circle into basins of attraction of the stable fixed
/// points of a map iterate, cut at the unstable/marginal fixed points.
#[derive(Clone, Debug)]
pub struct BasinPartition {
    /// Which iterate of the map the partition refers to.
    pub iterate_n: u32,
    /// Arcs covering the circle; measures sum to 2pi.
    pub intervals: Vec<BasinInterval>,
}

impl BasinPartition {
    /// Total arc length attracted to the stable fixed point at
    /// `theta_star` (several arcs may share one attractor).
    pub fn basin_measure_of(&self, theta_star: f64, tol: f64) -> f64 {
        self.intervals
            .iter()
            .filter(|iv| {
                iv.attractor
                    .map(|fp| circ_dist(fp.theta_star, theta_star) < tol)
                    .unwrap_or(false)
            })
            .map(BasinInterval::measure)
            .sum()
    }
}

/// One bracketed change in the number of stable fixed points along a
/// split-timing scan, with the colliding pair observed as close to the
/// collision as the fixed-point solver can resolve it.
#[derive(Clone, Copy, Debug)]
pub struct SaddleNode {
    /// Split time at the lower bracket edge (absolute, same unit as tau).
    pub tau2_lo: f64,
    /// Split time at the upper bracket edge.
    pub tau2_hi: f64,
    /// Best estimate of the split time where the pair collides, from a
    /// finer probe inside the bracket.
    pub tau2_star: f64,
    /// Stable fixed-point count at the lower edge.
    pub stable_below: usize,
    /// Stable fixed-point count at the upper edge.
    pub stable_above: usize,
    /// Phase of the about-to-collide attracting fixed point.
    pub pair_theta_stable: f64,
    /// Phase of its repelling partner.
    pub pair_theta_unstable: f64,
    /// Multiplier of the attracting member at the probe point; approaches
    /// +1 from below as the pair merges.
    pub pair_multiplier_stable: f64,
    /// Multiplier of the repelling partner at the probe point; approaches
    /// +1 from above as the pair merges.
    pub pair_multiplier_unstable: f64,
}

/// Result of scanning the split time of an alternating train.
#[derive(Clone, Debug)]
pub struct Tau2Scan {
    /// Which iterate of the two-pulse map was analysed.
    pub iterate_n: u32,
    /// Pulse period the fractions refer to.
    pub tau: f64,
    /// Split fractions (tau2 / tau) sampled on the coarse grid.
    pub fractions: Vec<f64>,
    /// Attracting-location count at each sampled fraction: stable fixed
    /// points merged over gaps below `ATTRACTOR_MERGE_TOL`.
    pub stable_counts: Vec<usize>,
    /// Bracketed stable-count changes, in increasing split order.
    pub events: Vec<SaddleNode>,
}

/// Failure modes of the map-analysis operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalysisError {
    /// The requested iterate has no attracting fixed point, so there is
    /// nothing to partition the circle into.
    NoStableFixedPoints {
        /// Iterate that was searched.
        iterate_n: u32,
    },
    /// The requested iterate has no repelling or marginal fixed point, so
    /// there are no basin boundaries to cut at.
    NoBoundaryFixedPoints {
        /// Iterate that was searched.
        iterate_n: u32,
    },
    /// A split-fraction range was not strictly inside (0, 1).
    InvalidSplitRange {
        /// Lower end of the rejected range.
        lo: f64,
        /// Upper end of the rejected range.
        hi: f64,
    },
}

impl core::fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AnalysisError::NoStableFixedPoints { iterate_n } => {
                write!(f, "iterate {iterate_n} has no stable fixed points")
            }
            AnalysisError::NoBoundaryFixedPoints { iterate_n } => {
                write!(f, "iterate {iterate_n} has no unstable or marginal fixed points")
            }
            AnalysisError::InvalidSplitRange { lo, hi } => {
                write!(f, "split-fraction range ({lo}, {hi}) must satisfy 0 < lo < hi < 1")
            }
        }
    }
}

/// Unwrapped displacement of a map iterate: continuous in theta, with
/// fixed points exactly where it equals an integer multiple of 2pi.
fn unwrapped_displacement(map: &CircleMap, theta: f64) -> f64 {
    map.lift(theta) - theta
}

/// Finds all fixed points of the `n`-th iterate of `map`.
///
/// The unwrapped displacement `lift(theta) - theta` is sampled on `grid`
/// evenly spaced phases.  Cells whose displacement varies by more than
/// one radian are subdivided until resolved (steep iterates sweep through
/// several turns inside a single coarse cell, so a fixed sampling would
/// both miss crossings and alias wrapped jumps into fake ones); each
/// crossing of an integer multiple of 2pi is then bisected to a root.
///
/// `grid` must be at least 512.  Roots closer together than the
/// deduplication tolerance are merged.  An empty result is meaningful:
/// the iterate has no fixed points (e.g. a rotation-dominated map below
/// the locking threshold).
pub fn find_fixed_points(map: &CircleMap, n: u32, grid: usize) -> Vec<FixedPoint> {
    assert!(grid >= 512, "fixed-point grid must be at least 512");
    assert!(n >= 1, "iterate order must be positive");
    let iter_map = iterate(map, n as usize).expect("iterate budget exceeded in fixed-point search");

    let mut roots: Vec<f64> = Vec::new();
    let step = TAU / grid as f64;
    let mut prev_theta = 0.0;
    let mut prev_disp = unwrapped_displacement(&iter_map, 0.0);
    for j in 1..=grid {
        let theta = if j == grid { TAU } else { j as f64 * step };
        let disp = unwrapped_displacement(&iter_map, theta);
        scan_cell(&iter_map, prev_theta, prev_disp, theta, disp, &mut roots);
        prev_theta = theta;
        prev_disp = disp;
    }

    let mut out: Vec<FixedPoint> = Vec::new();
    for root in roots {
        let theta_star = wrap_2pi(root);
        if out
            .iter()
            .any(|fp| circ_dist(fp.theta_star, theta_star) < FP_DEDUP_TOL)
        {
            continue;
        }
        let multiplier = iter_map.derivative(theta_star);
        out.push(FixedPoint {
            theta_star,
            iterate_n: n,
            multiplier,
            stability: classify(multiplier),
        });
    }
    out.sort_by(|a, b| a.theta_star.partial_cmp(&b.theta_star).unwrap());
    out
}

/// Collect every root of `displacement = 2pi k` (any integer k) inside a
/// cell, subdividing until the displacement varies by at most one radian
/// across the cell so that at most one level can be crossed.
fn scan_cell(
    iter_map: &CircleMap,
    lo: f64,
    disp_lo: f64,
    hi: f64,
    disp_hi: f64,
    roots: &mut Vec<f64>,
) {
    if (disp_hi - disp_lo).abs() > 1.0 && hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let disp_mid = unwrapped_displacement(iter_map, mid);
        scan_cell(iter_map, lo, disp_lo, mid, disp_mid, roots);
        scan_cell(iter_map, mid, disp_mid, hi, disp_hi, roots);
        return;
    }
    let (a, b) = if disp_lo <= disp_hi {
        (disp_lo, disp_hi)
    } else {
        (disp_hi, disp_lo)
    };
    let k_min = (a / TAU).ceil() as i64;
    let k_max = (b / TAU).floor() as i64;
    for k in k_min..=k_max {
        let level = TAU * k as f64;
        let e_lo = disp_lo - level;
        let e_hi = disp_hi - level;
        if e_lo == 0.0 {
            roots.push(lo);
        } else if e_hi == 0.0 {
            roots.push(hi);
        } else if (e_lo < 0.0) != (e_hi < 0.0) {
            roots.push(bisect_level(iter_map, lo, e_lo, hi, level));
        }
    }
}

/// Bisect a bracketed crossing of `displacement = level` down to a root.
fn bisect_level(iter_map: &CircleMap, mut lo: f64, e_lo: f64, mut hi: f64, level: f64) -> f64 {
    let lo_negative = e_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let e_mid = unwrapped_displacement(iter_map, mid) - level;
        if e_mid.abs() < FP_ROOT_TOL || hi - lo < 1e-14 {
            return mid;
        }
        if (e_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Enumerates the attracting periodic orbits of `map` with period at most
/// `n_max` (at most 16).
///
/// For each n in increasing order, stable fixed points of the n-th
/// iterate that are not already part of a shorter orbit seed a new orbit;
/// the orbit is traced by applying the base map n - 1 times.  Orbits are
/// returned sorted by period, then by smallest phase.
pub fn enumerate_attractors(map: &CircleMap, n_max: u32) -> Vec<PeriodicOrbitOfMap> {
    assert!(
        (1..=MAX_ATTRACTOR_ITERATE).contains(&n_max),
        "attractor search period must be between 1 and 16"
    );
    let mut assigned: Vec<f64> = Vec::new();
    let mut orbits: Vec<PeriodicOrbitOfMap> = Vec::new();
    for n in 1..=n_max {
        let fps = find_fixed_points(map, n, DEFAULT_FP_GRID);
        for fp in fps.iter().filter(|fp| fp.stability == Stability::Stable) {
            if assigned
                .iter()
                .any(|&theta| circ_dist(theta, fp.theta_star) < 1e-6)
            {
                continue;
            }
            let mut points = Vec::with_capacity(n as usize);
            let mut theta = fp.theta_star;
            for _ in 0..n {
                points.push(theta);
                assigned.push(theta);
                theta = map.eval(theta);
            }
            orbits.push(PeriodicOrbitOfMap {
                points,
                period: n,
                multiplier: fp.multiplier,
                stable: true,
            });
        }
    }
    orbits
}

/// Number of groups the population settles into, according to the map
/// attractors sampled once per map period: the total count of distinct
/// attracting periodic points.  `None` means no attracting orbit exists
/// and no grouping is predicted.
pub fn predicted_cluster_count(attractors: &[PeriodicOrbitOfMap]) -> Option<usize> {
    if attractors.is_empty() {
        return None;
    }
    Some(attractors.iter().map(|orbit| orbit.points.len()).sum())
}

/// Partitions the circle into basins of attraction of the stable fixed
/// points of the `n`-th iterate of `map`.
///
/// The circle is cut at the unstable and marginal fixed points; each arc
/// is labelled by iterating its midpoint until it lands within the
/// capture tolerance of a stable fixed point.  An arc whose midpoint does
/// not settle within the iteration budget keeps `attractor: None` rather
/// than aborting the partition.
pub fn compute_basins(map: &CircleMap, n: u32) -> Result<BasinPartition, AnalysisError> {
    let fps = find_fixed_points(map, n, DEFAULT_FP_GRID);
    let stable: Vec<FixedPoint> = fps
        .iter()
        .copied()
        .filter(|fp| fp.stability == Stability::Stable)
        .collect();
    if stable.is_empty() {
        return Err(AnalysisError::NoStableFixedPoints { iterate_n: n });
    }
    let mut boundaries: Vec<f64> = fps
        .iter()
        .filter(|fp| fp.stability != Stability::Stable)
        .map(|fp| fp.theta_star)
        .collect();
    if boundaries.is_empty() {
        return Err(AnalysisError::NoBoundaryFixedPoints { iterate_n: n });
    }
    boundaries.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let iter_map = iterate(map, n as usize).expect("iterate budget exceeded in basin computation");
    let k = boundaries.len();
    let mut intervals = Vec::with_capacity(k);
    for i in 0..k {
        let lo = boundaries[i];
        let hi = if i + 1 < k {
            boundaries[i + 1]
        } else {
            boundaries[0] + TAU
        };
        let mut probe = wrap_2pi(0.5 * (lo + hi));
        let mut attractor = None;
        for _ in 0..BASIN_ITERATION_LIMIT {
            if let Some(fp) = stable
                .iter()
                .find(|fp| circ_dist(fp.theta_star, probe) < BASIN_CAPTURE_TOL)
            {
                attractor = Some(*fp);
                break;
            }
            probe = iter_map.eval(probe);
        }
        intervals.push(BasinInterval { lo, hi, attractor });
    }
    Ok(BasinPartition {
        iterate_n: n,
        intervals,
    })
}

/// Count of attracting fixed points of the `n`-th iterate of the
/// two-pulse map at an absolute split time `tau2`, together with the full
/// fixed-point list.
fn split_fixed_points(
    omega: f64,
    tau: f64,
    tau2: f64,
    f: &ResponseFunction,
    f2: &ResponseFunction,
    n: u32,
) -> Vec<FixedPoint> {
    let map = make_alternating(omega, tau, tau2, f, f2)
        .expect("split time validated by the scan range");
    find_fixed_points(&map, n, DEFAULT_FP_GRID)
}

/// The `n`-th iterate of the two-pulse map at split time `tau2`, for direct
/// lift and derivative evaluation.
fn split_iterate(
    omega: f64,
    tau: f64,
    tau2: f64,
    f: &ResponseFunction,
    f2: &ResponseFunction,
    n: u32,
) -> CircleMap {
    let map = make_alternating(omega, tau, tau2, f, f2)
        .expect("split time validated by the scan range");
    iterate(&map, n as usize).expect("iterate budget exceeded in the split probe")
}

#[cfg(test)]
fn stable_count(fps: &[FixedPoint]) -> usize {
    fps.iter()
        .filter(|fp| fp.stability == Stability::Stable)
        .count()
}

/// Number of distinct attracting locations: stable fixed points
/// chain-merged over circular gaps below `ATTRACTOR_MERGE_TOL`.
fn stable_location_count(fps: &[FixedPoint]) -> usize {
    let mut thetas: Vec<f64> = fps
        .iter()
        .filter(|fp| fp.stability == Stability::Stable)
        .map(|fp| fp.theta_star)
        .collect();
    if thetas.len() <= 1 {
        return thetas.len();
    }
    thetas.sort_by(|a, b| a.partial_cmp(b).expect("fixed-point phases are finite"));
    let n = thetas.len();
    let mut groups = 0;
    for i in 0..n {
        let next = if i + 1 == n {
            thetas[0] + TAU
        } else {
            thetas[i + 1]
        };
        if next - thetas[i] >= ATTRACTOR_MERGE_TOL {
            groups += 1;
        }
    }
    // All gaps small: everything is one ring-shaped group.
    groups.max(1)
}

/// Scans the split time of an alternating two-pulse train and brackets
/// every change in the number of attracting fixed points of the `n`-th
/// iterate of the two-pulse map.
///
/// `tau2_range` is given as fractions of `tau`, strictly inside (0, 1).
/// Counts are of attracting locations (stable fixed points merged over
/// gaps below `ATTRACTOR_MERGE_TOL`), which stay monotone through the
/// grazing window where a merging pair fractures into several nearby
/// roots.  Each count change between adjacent grid points yields one
/// event: the change is bisected to a bracket of width 1e-4 of the
/// period, and the disappearing attractor is followed toward its
/// collision until the colliding pair's multipliers straddle +1 closely
/// from opposite sides.  An empty event list means the count never
/// changes over the range.
pub fn scan_tau2_bifurcation(
    omega: f64,
    tau: f64,
    f: &ResponseFunction,
    f2: &ResponseFunction,
    n: u32,
    tau2_range: (f64, f64),
) -> Result<Tau2Scan, AnalysisError> {
    let (lo, hi) = tau2_range;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(AnalysisError::InvalidSplitRange { lo, hi });
    }

    let mut fractions = Vec::with_capacity(SPLIT_SCAN_POINTS);
    let mut stable_counts = Vec::with_capacity(SPLIT_SCAN_POINTS);
    for j in 0..SPLIT_SCAN_POINTS {
        let frac = lo + (hi - lo) * j as f64 / (SPLIT_SCAN_POINTS - 1) as f64;
        let fps = split_fixed_points(omega, tau, frac * tau, f, f2, n);
        fractions.push(frac);
        stable_counts.push(stable_location_count(&fps));
    }

    let mut events = Vec::new();
    for j in 0..SPLIT_SCAN_POINTS - 1 {
        if stable_counts[j] != stable_counts[j + 1] {
            events.push(probe_colliding_pair(
                omega,
                tau,
                f,
                f2,
                n,
                (fractions[j], stable_counts[j]),
                (fractions[j + 1], stable_counts[j + 1]),
            ));
        }
    }

    Ok(Tau2Scan {
        iterate_n: n,
        tau,
        fractions,
        stable_counts,
        events,
    })
}

/// Build the event record for one stable-count change between two
/// adjacent scan-grid fractions.
///
/// Counting roots on a global grid turns unreliable in a thin parameter
/// sliver around the collision: the merging pair is a shallow arch of the
/// iterated displacement whose two level crossings fall below grid
/// resolution long before they actually meet, so a count-driven bisection
/// flickers there and can report one change several times.  Instead the
/// pair is identified once on the richer side and then followed directly:
/// at each trial split the probe looks for the arch near its last known
/// place, a test limited only by arithmetic precision, not by root
/// separation.  Bisection on "the arch still crosses its level" pins the
/// collision down; the pair is reported from the closest split where it
/// was still measured, with both multipliers nearly +1.
#[allow(clippy::too_many_arguments)]
fn probe_colliding_pair(
    omega: f64,
    tau: f64,
    f: &ResponseFunction,
    f2: &ResponseFunction,
    n: u32,
    (frac_lo, count_lo): (f64, usize),
    (frac_hi, count_hi): (f64, usize),
) -> SaddleNode {
    let (frac_rich, frac_poor) = if count_lo > count_hi {
        (frac_lo, frac_hi)
    } else {
        (frac_hi, frac_lo)
    };
    let event = |bracket: (f64, f64), star: f64, pair: Option<(f64, f64, f64, f64)>| {
        let (ts, tu, ms, mu) = pair.unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN));
        SaddleNode {
            tau2_lo: bracket.0 * tau,
            tau2_hi: bracket.1 * tau,
            tau2_star: star * tau,
            stable_below: count_lo,
            stable_above: count_hi,
            pair_theta_stable: ts,
            pair_theta_unstable: tu,
            pair_multiplier_stable: ms,
            pair_multiplier_unstable: mu,
        }
    };

    let Some(mut dip) = DipTrack::locate(omega, tau, f, f2, n, frac_rich, frac_poor) else {
        // Nothing trackable (degenerate structure): bracket the count
        // change alone.
        let (blo, bhi) = bisect_count_change(omega, tau, f, f2, n, frac_lo, count_lo, frac_hi);
        return event((blo, bhi), 0.5 * (blo + bhi), None);
    };

    let mut t_rich = frac_rich;
    let mut t_poor = frac_poor;
    let mut spec_bracket: Option<(f64, f64)> = None;
    loop {
        let width = (t_poor - t_rich).abs();
        if spec_bracket.is_none() && width <= SPLIT_BRACKET_FRAC {
            spec_bracket = Some((t_rich.min(t_poor), t_rich.max(t_poor)));
        }
        if width <= SPLIT_PROBE_FRAC
            || (spec_bracket.is_some() && dip.stable_multiplier() >= SPLIT_PROBE_TARGET)
        {
            break;
        }
        let mid = 0.5 * (t_rich + t_poor);
        if dip.advance(omega, tau, f, f2, n, mid) {
            t_rich = mid;
        } else {
            t_poor = mid;
        }
    }
    let bracket = spec_bracket.unwrap_or((t_rich.min(t_poor), t_rich.max(t_poor)));
    event(bracket, 0.5 * (t_rich + t_poor), Some(dip.pair()))
}

/// Plain bisection of a stable-count change to the reporting width, used
/// when no stable/unstable pair could be identified for tracking.  Keeps
/// the lower edge's count, so it converges on the lowest change.
fn bisect_count_change(
    omega: f64,
    tau: f64,
    f: &ResponseFunction,
    f2: &ResponseFunction,
    n: u32,
    mut frac_lo: f64,
    count_lo: usize,
    mut frac_hi: f64,
) -> (f64, f64) {
    while frac_hi - frac_lo > SPLIT_BRACKET_FRAC {
        let mid = 0.5 * (frac_lo + frac_hi);
        let c = stable_location_count(&split_fixed_points(omega, tau, mid * tau, f, f2, n));
        if c == count_lo {
            frac_lo = mid;
        } else {
            frac_hi = mid;
        }
    }
    (frac_lo, frac_hi)
}

/// Distance from `theta` to the nearest attracting fixed point in `fps`,
/// or infinity if there is none.
fn nearest_stable_dist(fps: &[FixedPoint], theta: f64) -> f64 {
    fps.iter()
        .filter(|fp| fp.stability == Stability::Stable)
        .map(|fp| circ_dist(fp.theta_star, theta))
        .fold(f64::INFINITY, f64::min)
}

/// A disappearing attractor location of a map iterate, viewed through the
/// level crossings of the iterated displacement inside a fixed phase
/// window, tracked across split times.
///
/// The displacement is normalised so the arches between crossing pairs
/// run below the level.  The location exists at a given split exactly
/// while some interior sample of the window is still negative — a test
/// limited by arithmetic precision, not root separation — so the tracking
/// stays decidable both when the crossings creep together and when the
/// grazing contact fractures into several nearby arches.
struct DipTrack {
    /// Displacement level the crossings sit on: 2 pi times the integer
    /// turn count of the iterate there.
    level: f64,
    /// +1 when the displacement runs below the level just after an
    /// attracting crossing; -1 flips an overhead arch into a dip.
    sign: f64,
    /// Fixed window containing the whole merging group, with padding.
    win_lo: f64,
    win_hi: f64,
    /// Left crossing of the arch measured most recently, in unwrapped
    /// coordinates local to the window.
    theta_left: f64,
    /// Right crossing; always greater than `theta_left`.
    theta_right: f64,
    /// Map-iterate multiplier at the left crossing.
    m_left: f64,
    /// Map-iterate multiplier at the right crossing.
    m_right: f64,
}

impl DipTrack {
    /// Multiplier of the attracting member of the pair.
    fn stable_multiplier(&self) -> f64 {
        self.m_left.min(self.m_right)
    }

    /// The pair as (stable phase, unstable phase, stable multiplier,
    /// unstable multiplier), phases wrapped to [0, 2 pi).
    fn pair(&self) -> (f64, f64, f64, f64) {
        if self.m_left <= self.m_right {
            (
                wrap_2pi(self.theta_left),
                wrap_2pi(self.theta_right),
                self.m_left,
                self.m_right,
            )
        } else {
            (
                wrap_2pi(self.theta_right),
                wrap_2pi(self.theta_left),
                self.m_right,
                self.m_left,
            )
        }
    }

    /// Identify the attractor location that disappears between the richer
    /// and poorer sides of a count change: the attracting fixed point
    /// farthest from every attracting fixed point surviving on the poorer
    /// side, its nearest repelling partner on the same displacement
    /// level, and a window covering the whole group of roots merged with
    /// it.
    fn locate(
        omega: f64,
        tau: f64,
        f: &ResponseFunction,
        f2: &ResponseFunction,
        n: u32,
        frac_rich: f64,
        frac_poor: f64,
    ) -> Option<DipTrack> {
        let rich = split_fixed_points(omega, tau, frac_rich * tau, f, f2, n);
        let poor = split_fixed_points(omega, tau, frac_poor * tau, f, f2, n);
        let dying = rich
            .iter()
            .filter(|fp| fp.stability == Stability::Stable)
            .max_by(|a, b| {
                let da = nearest_stable_dist(&poor, a.theta_star);
                let db = nearest_stable_dist(&poor, b.theta_star);
                da.partial_cmp(&db).expect("fixed-point phases are finite")
            })?;

        let iter_map = split_iterate(omega, tau, frac_rich * tau, f, f2, n);
        let level_of = |theta: f64| TAU * ((iter_map.lift(theta) - theta) / TAU).round();
        let level = level_of(dying.theta_star);
        let partner = rich
            .iter()
            .filter(|fp| fp.stability != Stability::Stable)
            .filter(|fp| (level_of(fp.theta_star) - level).abs() < 0.5)
            .min_by(|a, b| {
                let da = circ_dist(a.theta_star, dying.theta_star);
                let db = circ_dist(b.theta_star, dying.theta_star);
                da.partial_cmp(&db).expect("fixed-point phases are finite")
            })?;

        // Extent of the attracting group merged with the dying point, in
        // wrap-safe offsets relative to it.
        let mut offsets: Vec<f64> = rich
            .iter()
            .filter(|fp| fp.stability == Stability::Stable)
            .map(|fp| wrap_pi(fp.theta_star - dying.theta_star))
            .collect();
        offsets.sort_by(|a, b| a.partial_cmp(b).expect("fixed-point phases are finite"));
        let zero = offsets
            .iter()
            .position(|o| o.abs() < 1e-12)
            .expect("the dying point is in its own offset list");
        let mut lo_idx = zero;
        while lo_idx > 0 && offsets[lo_idx] - offsets[lo_idx - 1] < ATTRACTOR_MERGE_TOL {
            lo_idx -= 1;
        }
        let mut hi_idx = zero;
        while hi_idx + 1 < offsets.len()
            && offsets[hi_idx + 1] - offsets[hi_idx] < ATTRACTOR_MERGE_TOL
        {
            hi_idx += 1;
        }

        // Widen the extent over the group's bounding repelling crossings,
        // then pad without swallowing unrelated structure beyond them.
        let offset_of = |fp: &FixedPoint| wrap_pi(fp.theta_star - dying.theta_star);
        let mut ext_lo = offsets[lo_idx];
        let mut ext_hi = offsets[hi_idx];
        for fp in rich.iter().filter(|fp| fp.stability != Stability::Stable) {
            let o = offset_of(fp);
            if o < ext_lo && ext_lo - o < ATTRACTOR_MERGE_TOL {
                ext_lo = o;
            }
            if o > ext_hi && o - ext_hi < ATTRACTOR_MERGE_TOL {
                ext_hi = o;
            }
        }
        let outside_gap = rich
            .iter()
            .map(offset_of)
            .filter(|o| *o < ext_lo - 1e-12 || *o > ext_hi + 1e-12)
            .map(|o| if o < ext_lo { ext_lo - o } else { o - ext_hi })
            .fold(f64::INFINITY, f64::min);
        let pad = (0.45 * outside_gap).min(0.12).max(0.02);
        let win_lo = dying.theta_star + ext_lo - pad;
        let win_hi = dying.theta_star + ext_hi + pad;

        // Normalise so the window is positive outside the group: interior
        // negative runs then exist exactly while some crossing survives.
        let sign = if iter_map.lift(win_lo) - win_lo - level >= 0.0 {
            1.0
        } else {
            -1.0
        };

        // Initial measured pair: the dying point and its partner.
        let gap = wrap_pi(partner.theta_star - dying.theta_star);
        let (theta_left, theta_right, m_left, m_right) = if gap >= 0.0 {
            (
                dying.theta_star,
                dying.theta_star + gap,
                dying.multiplier,
                partner.multiplier,
            )
        } else {
            (
                dying.theta_star + gap,
                dying.theta_star,
                partner.multiplier,
                dying.multiplier,
            )
        };
        Some(DipTrack {
            level,
            sign,
            win_lo,
            win_hi,
            theta_left,
            theta_right,
            m_left,
            m_right,
        })
    }

    /// Look for the group's arches inside the window at split fraction
    /// `frac`.  Returns false when the displacement no longer crosses the
    /// level there (the location is gone); on success the crossings and
    /// multipliers of the arch nearest the last measurement are updated
    /// in place.
    fn advance(
        &mut self,
        omega: f64,
        tau: f64,
        f: &ResponseFunction,
        f2: &ResponseFunction,
        n: u32,
        frac: f64,
    ) -> bool {
        let iter_map = split_iterate(omega, tau, frac * tau, f, f2, n);
        let e = |theta: f64| self.sign * (iter_map.lift(theta) - theta - self.level);

        let lo = self.win_lo;
        let hi = self.win_hi;
        let samples = 512usize;
        let step = (hi - lo) / samples as f64;
        let vals: Vec<f64> = (0..=samples).map(|i| e(lo + i as f64 * step)).collect();

        // Negative runs flanked by non-negative samples are candidate
        // arches; follow the one nearest the previous crossings.
        let center_prev = 0.5 * (self.theta_left + self.theta_right);
        let mut best: Option<(usize, usize, f64)> = None;
        let mut i = 1;
        while i < samples {
            if vals[i] < 0.0 {
                let start = i;
                while i <= samples && vals[i] < 0.0 {
                    i += 1;
                    if i > samples {
                        break;
                    }
                }
                let end = i;
                if vals[start - 1] >= 0.0 && end <= samples && vals[end.min(samples)] >= 0.0 {
                    let center = lo + 0.5 * (start + end - 1) as f64 * step;
                    let dist = (center - center_prev).abs();
                    if best.map(|(_, _, bd)| dist < bd).unwrap_or(true) {
                        best = Some((start, end, dist));
                    }
                }
            }
            i += 1;
        }
        let Some((start, end, _)) = best else {
            return false;
        };

        // Bisect the two sign changes bounding the run; the first
        // argument carries the non-negative side.
        let root = |pos: f64, neg: f64| {
            let (mut a, mut b) = (pos, neg);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if e(m) >= 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        let left = root(lo + (start - 1) as f64 * step, lo + start as f64 * step);
        let right = root(lo + end as f64 * step, lo + (end - 1) as f64 * step);
        self.theta_left = left;
        self.theta_right = right;
        self.m_left = iter_map.derivative(wrap_2pi(left));
        self.m_right = iter_map.derivative(wrap_2pi(right));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FourierSeries;
    use crate::math::wrap_2pi;
    use crate::response::{make_g, MapKind};
    use crate::testutil::{hh_f_secondary, hh_f_strong};
    use alloc::vec;

    /// Map with a pure rotation (zero kick) for degenerate-case tests.
    fn rotation_map(omega: f64, tau: f64) -> CircleMap {
        let zero = FourierSeries::from_coefficients(0.0, vec![(0.0, 0.0)]);
        let f = ResponseFunction::from_parts(omega, crate::stimulus::Pulse::new(0.0, 0.5, 3.0).unwrap(), zero);
        make_g(omega, tau, &f).unwrap()
    }

    /// Synthetic one-stage map theta + 2pi + a*sin(theta): one stable fixed
    /// point at 0 and one unstable at pi when -2 < a < 0.
    fn synthetic_sine_map(a: f64) -> CircleMap {
        let kick = FourierSeries::from_coefficients(0.0, vec![(0.0, a)]);
        let f = ResponseFunction::from_parts(
            1.0,
            crate::stimulus::Pulse::new(1.0, 0.5, 3.0).unwrap(),
            kick,
        );
        make_g(1.0, TAU, &f).unwrap()
    }

    #[test]
    fn rotation_with_irrational_winding_has_no_fixed_points() {
        // omega*tau = 1 radian per application: never returns to the same
        // phase after any number of applications up to 8.
        let map = rotation_map(1.0, 1.0);
        for n in 1..=8 {
            assert!(find_fixed_points(&map, n, 512).is_empty(), "iterate {n}");
        }
        assert!(enumerate_attractors(&map, 8).is_empty());
        assert_eq!(predicted_cluster_count(&[]), None);
    }

    #[test]
    fn synthetic_sine_map_has_known_fixed_points() {
        let map = synthetic_sine_map(-0.5);
        let fps = find_fixed_points(&map, 1, 512);
        assert_eq!(fps.len(), 2);
        // Stable at 0 with multiplier 1 + a = 0.5.
        assert!(fps[0].theta_star < 1e-9 || circ_dist(fps[0].theta_star, 0.0) < 1e-9);
        assert!((fps[0].multiplier - 0.5).abs() < 1e-9);
        assert_eq!(fps[0].stability, Stability::Stable);
        // Unstable at pi with multiplier 1 - a = 1.5.
        assert!(circ_dist(fps[1].theta_star, crate::math::PI) < 1e-9);
        assert!((fps[1].multiplier - 1.5).abs() < 1e-9);
        assert_eq!(fps[1].stability, Stability::Unstable);
        // Residual invariant: the iterate returns to the root.
        for fp in &fps {
            assert!(wrap_pi(map.lift(fp.theta_star) - fp.theta_star).abs() < 1e-9);
        }
        // A single attracting fixed point of the base map means full
        // synchronization: one predicted group.
        let orbits = enumerate_attractors(&map, 10);
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].period, 1);
        assert_eq!(predicted_cluster_count(&orbits), Some(1));
    }

    /// Forward-iteration confirmation of an attracting fixed point: a
    /// nearby phase must home back in.
    fn confirm_attracting(map: &CircleMap, fp: &FixedPoint) {
        if fp.multiplier.abs() >= 0.95 {
            return;
        }
        let iter_map = iterate(map, fp.iterate_n as usize).unwrap();
        let mut theta = wrap_2pi(fp.theta_star + 0.01);
        for _ in 0..200 {
            theta = iter_map.eval(theta);
        }
        assert!(
            circ_dist(theta, fp.theta_star) < 1e-4,
            "phase {theta} did not return to {}",
            fp.theta_star
        );
    }

    #[test]
    fn squid_axon_150hz_second_iterate_has_two_attracting_points() {
        let f = hh_f_strong();
        let g = make_g(f.omega(), 1000.0 / 150.0, f).unwrap();
        let fps = find_fixed_points(&g, 2, DEFAULT_FP_GRID);
        let stable: Vec<&FixedPoint> = fps.iter().filter(|fp| fp.stability == Stability::Stable).collect();
        let unstable: Vec<&FixedPoint> = fps.iter().filter(|fp| fp.stability == Stability::Unstable).collect();
        assert_eq!(stable.len(), 2, "{fps:?}");
        assert_eq!(unstable.len(), 2, "{fps:?}");
        let expect_stable = [2.86, 5.86];
        for (fp, want) in stable.iter().zip(expect_stable) {
            assert!(
                circ_dist(fp.theta_star, want) < 0.15,
                "stable point {} vs {want}",
                fp.theta_star
            );
            assert!(fp.multiplier.abs() < 1.0);
            confirm_attracting(&g, fp);
        }
        let expect_unstable = [1.305, 4.685];
        for (fp, want) in unstable.iter().zip(expect_unstable) {
            assert!(
                circ_dist(fp.theta_star, want) < 0.15,
                "unstable point {} vs {want}",
                fp.theta_star
            );
            assert!(fp.multiplier.abs() > 1.0);
        }
    }

    #[test]
    fn squid_axon_100hz_third_iterate_has_three_attracting_points() {
        let f = hh_f_strong();
        let g = make_g(f.omega(), 10.0, f).unwrap();
        let fps = find_fixed_points(&g, 3, DEFAULT_FP_GRID);
        let stable: Vec<&FixedPoint> = fps.iter().filter(|fp| fp.stability == Stability::Stable).collect();
        assert_eq!(stable.len(), 3, "{fps:?}");
        for (fp, want) in stable.iter().zip([1.43, 3.37, 5.86]) {
            assert!(
                circ_dist(fp.theta_star, want) < 0.15,
                "stable point {} vs {want}",
                fp.theta_star
            );
            confirm_attracting(&g, fp);
        }
    }

    /// Compare an orbit against an expected visiting sequence up to cyclic
    /// rotation of the starting point.
    fn assert_orbit_matches(orbit: &PeriodicOrbitOfMap, expected: &[f64], tol: f64) {
        let n = expected.len();
        assert_eq!(orbit.points.len(), n);
        let offset = (0..n)
            .min_by(|&i, &j| {
                circ_dist(orbit.points[0], expected[i])
                    .partial_cmp(&circ_dist(orbit.points[0], expected[j]))
                    .unwrap()
            })
            .unwrap();
        for k in 0..n {
            let want = expected[(offset + k) % n];
            assert!(
                circ_dist(orbit.points[k], want) < tol,
                "orbit point {} vs {want}",
                orbit.points[k]
            );
        }
    }

    #[test]
    fn squid_axon_185hz_has_a_period_five_attractor() {
        let f = hh_f_strong();
        let g = make_g(f.omega(), 1000.0 / 185.0, f).unwrap();
        let orbits = enumerate_attractors(&g, 10);
        assert_eq!(orbits.len(), 1, "{orbits:?}");
        assert_eq!(orbits[0].period, 5);
        assert!(orbits[0].stable);
        assert_orbit_matches(&orbits[0], &[1.62, 3.38, 5.85, 2.05, 5.51], 0.15);
        assert_eq!(predicted_cluster_count(&orbits), Some(5));
        // The cycle multiplier is the same chain-rule product no matter
        // which orbit point it is evaluated at.
        let g5 = iterate(&g, 5).unwrap();
        let reference = g5.derivative(orbits[0].points[0]);
        for &p in &orbits[0].points {
            assert!((g5.derivative(p) - reference).abs() < 1e-9);
        }
    }

    #[test]
    fn squid_axon_300hz_has_a_period_four_attractor() {
        let f = hh_f_strong();
        let g = make_g(f.omega(), 10.0 / 3.0, f).unwrap();
        let orbits = enumerate_attractors(&g, 10);
        assert_eq!(orbits.len(), 1, "{orbits:?}");
        assert_eq!(orbits[0].period, 4);
        assert_orbit_matches(&orbits[0], &[0.82, 2.61, 3.32, 5.69], 0.15);
        // Equivalently: the fourth iterate has exactly four attracting
        // fixed points.
        let fps = find_fixed_points(&g, 4, DEFAULT_FP_GRID);
        assert_eq!(
            fps.iter().filter(|fp| fp.stability == Stability::Stable).count(),
            4
        );
    }

    #[test]
    fn squid_axon_180hz_has_no_attractors() {
        let f = hh_f_strong();
        let g = make_g(f.omega(), 1000.0 / 180.0, f).unwrap();
        let orbits = enumerate_attractors(&g, 10);
        assert!(orbits.is_empty(), "{orbits:?}");
        assert_eq!(predicted_cluster_count(&orbits), None);
    }

    #[test]
    fn dense_seeding_reproduces_the_attractor_set() {
        // Independent check of the attractor enumeration: iterate the map
        // from 4096 seeds for 500 steps and chain the tails into groups;
        // the group representatives must match the enumerated periodic
        // points one-for-one.
        let f = hh_f_strong();
        for freq in [100.0, 150.0, 185.0, 300.0] {
            let g = make_g(f.omega(), 1000.0 / freq, f).unwrap();
            let orbits = enumerate_attractors(&g, 10);
            let mut expected: Vec<f64> = orbits.iter().flat_map(|o| o.points.iter().copied()).collect();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!(!expected.is_empty(), "{freq} Hz should have attractors");

            let seeds = 4096;
            let mut tails: Vec<f64> = (0..seeds)
                .map(|i| {
                    let mut theta = TAU * i as f64 / seeds as f64;
                    for _ in 0..500 {
                        theta = g.eval(theta);
                    }
                    theta
                })
                .collect();
            tails.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // Chain neighbouring tails (gap <= 1e-3) into groups, merging
            // across the wrap, and keep groups with at least 20 members.
            let mut groups: Vec<(usize, usize)> = Vec::new();
            let mut start = 0;
            for i in 1..tails.len() {
                if tails[i] - tails[i - 1] > 1e-3 {
                    groups.push((start, i));
                    start = i;
                }
            }
            groups.push((start, tails.len()));
            if groups.len() > 1 {
                let first = groups[0];
                let last = *groups.last().unwrap();
                if wrap_2pi(tails[first.0] + TAU - tails[last.1 - 1]) < 1e-3 {
                    groups[0] = (last.0, first.1 + tails.len());
                    groups.pop();
                }
            }
            let mut reps: Vec<f64> = groups
                .iter()
                .filter(|(a, b)| b - a >= 20)
                .map(|&(a, b)| {
                    let (mut s, mut c) = (0.0, 0.0);
                    for k in a..b {
                        let t = tails[k % tails.len()];
                        s += t.sin();
                        c += t.cos();
                    }
                    wrap_2pi(s.atan2(c))
                })
                .collect();
            reps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(
                reps.len(),
                expected.len(),
                "{freq} Hz: groups {reps:?} vs attractors {expected:?}"
            );
            for (rep, want) in reps.iter().zip(expected.iter()) {
                assert!(
                    circ_dist(*rep, *want) < 1e-3,
                    "{freq} Hz: group at {rep} vs attractor at {want}"
                );
            }
        }
    }

    #[test]
    fn basins_at_150hz_are_cut_at_the_repelling_points() {
        let f = hh_f_strong();
        let g = make_g(f.omega(), 1000.0 / 150.0, f).unwrap();
        let basins = compute_basins(&g, 2).unwrap();
        let total: f64 = basins.intervals.iter().map(BasinInterval::measure).sum();
        assert!((total - TAU).abs() < 1e-6);
        // The arc attracted to the point near 2.86 runs between the two
        // repelling points near 1.305 and 4.685.
        let iv = basins
            .intervals
            .iter()
            .find(|iv| {
                iv.attractor
                    .map(|fp| circ_dist(fp.theta_star, 2.86) < 0.15)
                    .unwrap_or(false)
            })
            .expect("basin of the 2.86 attractor");
        assert!(circ_dist(iv.lo, 1.305) < 0.15, "lower cut {}", iv.lo);
        assert!(circ_dist(wrap_2pi(iv.hi), 4.685) < 0.15, "upper cut {}", iv.hi);
    }

    #[test]
    fn basin_sizes_predict_group_populations() {
        // Basin measure divided by 2pi gives the fraction of a uniformly
        // seeded population captured by each attractor; with 500 members
        // the three groups have known sizes at 200 and 260 Hz.
        let f = hh_f_strong();
        for (freq, expect) in [
            (200.0, [144.0, 173.0, 183.0]),
            (260.0, [209.0, 133.0, 159.0]),
        ] {
            let g = make_g(f.omega(), 1000.0 / freq, f).unwrap();
            let orbits = enumerate_attractors(&g, 10);
            assert_eq!(orbits.len(), 1, "{freq} Hz");
            assert_eq!(orbits[0].period, 3, "{freq} Hz");
            let basins = compute_basins(&g, 3).unwrap();
            let total: f64 = basins.intervals.iter().map(BasinInterval::measure).sum();
            assert!((total - TAU).abs() < 1e-6);
            let mut sizes: Vec<f64> = orbits[0]
                .points
                .iter()
                .map(|&p| basins.basin_measure_of(p, 1e-6) * 500.0 / TAU)
                .collect();
            let captured: f64 = sizes.iter().sum();
            assert!((captured - 500.0).abs() < 1e-6, "{freq} Hz captured {captured}");
            sizes.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut want = expect;
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, want) in sizes.iter().zip(want) {
                assert!(
                    (got - want).abs() < 10.0,
                    "{freq} Hz: basin population {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn basin_computation_requires_both_kinds_of_fixed_points() {
        // A pure rotation has no fixed points at all.
        let map = rotation_map(1.0, 1.0);
        assert!(matches!(
            compute_basins(&map, 1),
            Err(AnalysisError::NoStableFixedPoints { iterate_n: 1 })
        ));
    }

    #[test]
    fn alternating_150hz_second_iterate_has_four_attracting_points() {
        let f = hh_f_strong();
        let f2 = hh_f_secondary();
        let tau = 1000.0 / 150.0;
        let map = make_alternating(f.omega(), tau, 0.5 * tau, f, f2).unwrap();
        assert_eq!(map.kind(), MapKind::Alternating);
        let fps = find_fixed_points(&map, 2, DEFAULT_FP_GRID);
        let stable = fps.iter().filter(|fp| fp.stability == Stability::Stable).count();
        assert_eq!(stable, 4, "{fps:?}");
        let orbits = enumerate_attractors(&map, 10);
        assert_eq!(predicted_cluster_count(&orbits), Some(4));
    }

    #[test]
    fn alternating_100hz_third_iterate_has_three_attracting_points() {
        let f = hh_f_strong();
        let f2 = hh_f_secondary();
        let tau = 10.0;
        let map = make_alternating(f.omega(), tau, 0.5 * tau, f, f2).unwrap();
        let fps = find_fixed_points(&map, 3, DEFAULT_FP_GRID);
        let stable = fps.iter().filter(|fp| fp.stability == Stability::Stable).count();
        assert_eq!(stable, 3, "{fps:?}");
        let orbits = enumerate_attractors(&map, 10);
        assert_eq!(predicted_cluster_count(&orbits), Some(3));
    }

    #[test]
    fn split_scan_brackets_the_attractor_loss() {
        let f = hh_f_strong();
        let f2 = hh_f_secondary();
        let tau = 1000.0 / 150.0;
        let scan = scan_tau2_bifurcation(f.omega(), tau, f, f2, 2, (0.4, 0.6)).unwrap();
        assert_eq!(scan.stable_counts[0], 4, "count at fraction 0.4");
        assert_eq!(*scan.stable_counts.last().unwrap(), 2, "count at fraction 0.6");
        // The half-split point still has four attracting fixed points; the
        // loss happens slightly beyond it.
        let mid_count = scan
            .fractions
            .iter()
            .zip(&scan.stable_counts)
            .find(|(frac, _)| (**frac - 0.5).abs() < 1e-9)
            .map(|(_, c)| *c)
            .unwrap();
        assert_eq!(mid_count, 4);
        assert_eq!(scan.events.len(), 1, "expected a single count change");
        for event in &scan.events {
            assert!(event.tau2_lo / tau > 0.5 && event.tau2_hi / tau < 0.6);
            assert!(event.tau2_hi - event.tau2_lo <= SPLIT_BRACKET_FRAC * tau * 1.0001);
            assert!(event.tau2_lo <= event.tau2_star && event.tau2_star <= event.tau2_hi);
            // Saddle-node signature: the disappearing attractor and its
            // repelling partner sit close together with multipliers
            // straddling +1 from opposite sides, both nearly 1.
            assert!(
                circ_dist(event.pair_theta_stable, event.pair_theta_unstable) < 0.1,
                "pair separation {} vs {}",
                event.pair_theta_stable,
                event.pair_theta_unstable
            );
            assert!(
                event.pair_multiplier_stable > 0.9 && event.pair_multiplier_stable < 1.0,
                "stable multiplier {}",
                event.pair_multiplier_stable
            );
            assert!(
                event.pair_multiplier_unstable > 1.0 && event.pair_multiplier_unstable < 1.1,
                "unstable multiplier {}",
                event.pair_multiplier_unstable
            );
        }
        assert_eq!(scan.events.first().unwrap().stable_below, 4);
        assert_eq!(scan.events.last().unwrap().stable_above, 2);
    }

    #[test]
    fn equal_amplitude_half_split_matches_double_frequency_counts() {
        // With equal pulses and tau2 = tau/2, the two-pulse map over one
        // period is the same function as two applications of the
        // single-pulse map at twice the frequency, so the attracting
        // fixed-point counts must agree.
        let f = hh_f_strong();
        let tau = 1000.0 / 150.0;
        let alt = make_alternating(f.omega(), tau, 0.5 * tau, f, f).unwrap();
        let double = make_g(f.omega(), 0.5 * tau, f).unwrap();
        let fps_alt = find_fixed_points(&alt, 1, DEFAULT_FP_GRID);
        let fps_double = find_fixed_points(&double, 2, DEFAULT_FP_GRID);
        assert_eq!(stable_count(&fps_alt), stable_count(&fps_double));
        assert_eq!(fps_alt.len(), fps_double.len());
        for (a, b) in fps_alt.iter().zip(&fps_double) {
            assert!(circ_dist(a.theta_star, b.theta_star) < 1e-8);
        }
    }

    #[test]
    fn split_scan_rejects_bad_ranges() {
        let f = hh_f_strong();
        let f2 = hh_f_secondary();
        for range in [(0.0, 0.5), (0.5, 1.0), (0.6, 0.4)] {
            assert!(matches!(
                scan_tau2_bifurcation(f.omega(), 5.0, f, f2, 1, range),
                Err(AnalysisError::InvalidSplitRange { .. })
            ));
        }
    }
}
