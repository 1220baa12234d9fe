//! Shared fixtures for the unit-test suite. Periodic orbits and their
//! response curves are comparatively expensive to build, so each is computed
//! once per test binary and shared through `OnceLock`.

use std::sync::OnceLock;

use crate::models::NeuronModel;
use crate::orbit::{find_periodic_orbit, OrbitParams, PeriodicOrbit};
use crate::prc::{compute_prc_adjoint, PhaseResponseCurve, DEFAULT_FOURIER_ORDER};
use crate::response::{compute_response_function, ResponseFunction, DEFAULT_RESPONSE_GRID};
use crate::stimulus::Pulse;

pub(crate) fn hh_orbit() -> &'static PeriodicOrbit {
    static ORBIT: OnceLock<PeriodicOrbit> = OnceLock::new();
    ORBIT.get_or_init(|| {
        find_periodic_orbit(&NeuronModel::hodgkin_huxley(), &OrbitParams::default()).unwrap()
    })
}

pub(crate) fn thalamic_orbit() -> &'static PeriodicOrbit {
    static ORBIT: OnceLock<PeriodicOrbit> = OnceLock::new();
    ORBIT.get_or_init(|| {
        find_periodic_orbit(&NeuronModel::thalamic(), &OrbitParams::default()).unwrap()
    })
}

pub(crate) fn hh_prc() -> &'static PhaseResponseCurve {
    static PRC: OnceLock<PhaseResponseCurve> = OnceLock::new();
    PRC.get_or_init(|| compute_prc_adjoint(hh_orbit(), DEFAULT_FOURIER_ORDER).unwrap())
}

pub(crate) fn thalamic_prc() -> &'static PhaseResponseCurve {
    static PRC: OnceLock<PhaseResponseCurve> = OnceLock::new();
    PRC.get_or_init(|| compute_prc_adjoint(thalamic_orbit(), DEFAULT_FOURIER_ORDER).unwrap())
}

/// Response of the squid-axon model to the standard 20 uA/cm2 primary pulse.
pub(crate) fn hh_f_strong() -> &'static ResponseFunction {
    static F: OnceLock<ResponseFunction> = OnceLock::new();
    F.get_or_init(|| {
        let pulse = Pulse::new(20.0, 0.5, 3.0).unwrap();
        compute_response_function(hh_prc(), &pulse, DEFAULT_RESPONSE_GRID).unwrap()
    })
}

/// Response of the squid-axon model to the standard 10 uA/cm2 secondary pulse.
pub(crate) fn hh_f_secondary() -> &'static ResponseFunction {
    static F: OnceLock<ResponseFunction> = OnceLock::new();
    F.get_or_init(|| {
        let pulse = Pulse::new(10.0, 0.5, 3.0).unwrap();
        compute_response_function(hh_prc(), &pulse, DEFAULT_RESPONSE_GRID).unwrap()
    })
}
