//! Phase-reduction analysis of pulse-driven neural oscillators.
//!
//! The crate implements a complete pipeline for predicting how a population of
//! identical, tonically firing neurons reorganizes into phase clusters under
//! periodic charge-balanced current pulses:
//!
//! 1. [`models`] — conductance-based neuron models (a squid-axon model and a
//!    reduced thalamic relay model) with analytic Jacobians.
//! 2. [`orbit`] — locating the stable periodic firing orbit of a model and
//!    assigning asymptotic phases to states near it.
//! 3. [`prc`] — the infinitesimal phase response curve `Z(theta)` computed with
//!    the adjoint method and stored as a Fourier series.
//! 4. [`stimulus`] — rectangular charge-balanced pulses and periodic pulse
//!    trains, including trains that alternate between two pulse shapes.
//! 5. [`response`] — the finite-pulse phase response `f(theta)` obtained by
//!    integrating the reduced phase equation `dtheta/dt = omega + Z(theta) u(t)`
//!    across one pulse, and the one-dimensional circle maps built from it.
//! 6. [`analysis`] — fixed points, stability, attracting periodic orbits,
//!    basins of attraction, and saddle-node scans of the circle maps.
//! 7. [`population`] — explicit population simulations (full phase ODE or map
//!    iteration), cluster detection on the circle, and frequency sweeps.
//!
//! The crate is `no_std` (it requires `alloc`) so the numerical engine can be
//! embedded anywhere; all file formats and the command-line driver live in the
//! companion `pulsemap-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod fourier;
pub mod math;
pub mod models;
pub mod ode;
pub mod orbit;
pub mod population;
pub mod prc;
pub mod response;
pub mod stimulus;

#[cfg(test)]
pub(crate) mod testutil;

pub use analysis::{
    compute_basins, enumerate_attractors, find_fixed_points, predicted_cluster_count,
    scan_tau2_bifurcation, AnalysisError, BasinInterval, BasinPartition, FixedPoint,
    PeriodicOrbitOfMap, SaddleNode, Stability, Tau2Scan,
};
pub use fourier::FourierSeries;
pub use models::{ModelError, NeuronModel};
pub use orbit::{asymptotic_phase, find_periodic_orbit, OrbitError, OrbitParams, PeriodicOrbit};
pub use population::{
    alternating_sweep, detect_clusters, frequency_sweep, simulate_population,
    simulate_population_by_map, Cluster, ClusterReport, InitialDistribution, PopulationError,
    PopulationParams, PopulationTrace, SweepContext, SweepPoint, SweepTable, TrainFamily,
    DEFAULT_CLUSTER_EPSILON,
};
pub use prc::{compute_adjoint_table, compute_prc_adjoint, AdjointTable, PhaseResponseCurve, PrcError};
pub use response::{
    compute_response_function, iterate, make_alternating, make_g, make_half_maps, CircleMap,
    MapError, MapKind, ResponseFunction,
};
pub use stimulus::{alternating_train, identical_train, Pulse, PulseTrain, StimulusError};
