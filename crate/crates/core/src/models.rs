//! Conductance-based neuron models.
//!
//! Two tonically firing models are provided, both driven by a constant bias
//! current plus an external input current `u(t)` injected into the voltage
//! equation as `u / c_m`:
//!
//! * [`NeuronModel::hodgkin_huxley`] — the classic squid-axon model with state
//!   `(v, m, h, n)`:
//!
//!   ```text
//!   v' = (i_b - g_na m^3 h (v - e_na) - g_k n^4 (v - e_k) - g_l (v - e_l)) / c_m + u / c_m
//!   x' = a_x(v) (1 - x) - b_x(v) x          for x in {m, h, n}
//!   ```
//!
//! * [`NeuronModel::thalamic`] — a reduced thalamic relay model with state
//!   `(v, h, r)` where sodium activation and the leak of potassium activation
//!   are slaved to voltage (`m_inf`, `0.75 (1 - h)`) and a low-threshold
//!   calcium current `g_t p_inf(v)^2 r (v - e_t)` provides rebound dynamics.
//!
//! Two of the squid-axon rate functions have removable singularities of the
//! form `x / (1 - exp(-x))`; they are evaluated through [`exp_ratio`], which
//! switches to a series expansion when the denominator is below 1e-7 so the
//! vector field and its Jacobian stay smooth through the singular voltages.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

/// Largest state dimension across all models; fixed-size buffers in the
/// integrators are sized by this.
pub const MAX_STATE_DIM: usize = 4;

/// Errors from model construction and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// State slice length does not match the model dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// Unknown parameter name in a get/set by name call.
    UnknownParameter(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DimensionMismatch { expected, got } => {
                write!(f, "state has dimension {got}, model expects {expected}")
            }
            ModelError::UnknownParameter(name) => write!(f, "unknown model parameter `{name}`"),
        }
    }
}

/// `x / (1 - exp(-x))`, continuous through `x = 0`.
///
/// The denominator is computed with `exp_m1` and the whole ratio switches to
/// its Taylor series `1 + x/2 + x^2/12` once `|1 - exp(-x)| < 1e-7`, which
/// keeps the value and the derivative finite and smooth at the singularity.
fn exp_ratio(x: f64) -> f64 {
    let denom = -(-x).exp_m1();
    if denom.abs() < 1e-7 {
        1.0 + x * 0.5 + x * x / 12.0
    } else {
        x / denom
    }
}

/// Derivative of [`exp_ratio`] with respect to its argument.
fn exp_ratio_deriv(x: f64) -> f64 {
    let denom = -(-x).exp_m1();
    if denom.abs() < 1e-7 {
        0.5 + x / 6.0
    } else {
        let e = (-x).exp();
        (denom - x * e) / (denom * denom)
    }
}

/// Logistic sigmoid `1 / (1 + exp(-x))`.
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Parameters of the squid-axon model (conductances in mS/cm^2, potentials in
/// mV, currents in uA/cm^2, capacitance in uF/cm^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidAxonParams {
    pub g_na: f64,
    pub e_na: f64,
    pub g_k: f64,
    pub e_k: f64,
    pub g_l: f64,
    pub e_l: f64,
    pub i_b: f64,
    pub c_m: f64,
}

impl Default for SquidAxonParams {
    fn default() -> Self {
        SquidAxonParams {
            g_na: 120.0,
            e_na: 50.0,
            g_k: 36.0,
            e_k: -77.0,
            g_l: 0.3,
            e_l: -54.4,
            i_b: 10.0,
            c_m: 1.0,
        }
    }
}

/// Parameters of the reduced thalamic relay model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThalamicParams {
    pub g_l: f64,
    pub e_l: f64,
    pub g_na: f64,
    pub e_na: f64,
    pub g_k: f64,
    pub e_k: f64,
    pub g_t: f64,
    pub e_t: f64,
    pub i_b: f64,
    pub c_m: f64,
}

impl Default for ThalamicParams {
    fn default() -> Self {
        ThalamicParams {
            g_l: 0.05,
            e_l: -70.0,
            g_na: 3.0,
            e_na: 50.0,
            g_k: 5.0,
            e_k: -90.0,
            g_t: 5.0,
            e_t: 0.0,
            i_b: 5.0,
            c_m: 1.0,
        }
    }
}

/// A conductance-based neuron model with its parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NeuronModel {
    SquidAxon(SquidAxonParams),
    Thalamic(ThalamicParams),
}

impl NeuronModel {
    /// The squid-axon model with its standard parameters.
    pub fn hodgkin_huxley() -> Self {
        NeuronModel::SquidAxon(SquidAxonParams::default())
    }

    /// The reduced thalamic relay model with its standard parameters.
    pub fn thalamic() -> Self {
        NeuronModel::Thalamic(ThalamicParams::default())
    }

    /// Short identifier used in file names and logs.
    pub fn name(&self) -> &'static str {
        match self {
            NeuronModel::SquidAxon(_) => "hh",
            NeuronModel::Thalamic(_) => "thalamic",
        }
    }

    /// Dimension of the state vector.
    pub fn state_dim(&self) -> usize {
        match self {
            NeuronModel::SquidAxon(_) => 4,
            NeuronModel::Thalamic(_) => 3,
        }
    }

    /// Index of the membrane potential within the state vector.
    pub fn voltage_index(&self) -> usize {
        0
    }

    /// Membrane capacitance.
    pub fn c_m(&self) -> f64 {
        match self {
            NeuronModel::SquidAxon(p) => p.c_m,
            NeuronModel::Thalamic(p) => p.c_m,
        }
    }

    /// A state near the resting branch used to seed integrations: the voltage
    /// is set to -65 mV and every gate to its steady-state value there.
    pub fn initial_state(&self) -> [f64; MAX_STATE_DIM] {
        let mut s = [0.0; MAX_STATE_DIM];
        match self {
            NeuronModel::SquidAxon(_) => {
                let v = -65.0;
                let (am, bm) = (squid_a_m(v), squid_b_m(v));
                let (ah, bh) = (squid_a_h(v), squid_b_h(v));
                let (an, bn) = (squid_a_n(v), squid_b_n(v));
                s[0] = v;
                s[1] = am / (am + bm);
                s[2] = ah / (ah + bh);
                s[3] = an / (an + bn);
            }
            NeuronModel::Thalamic(_) => {
                let v = -65.0;
                s[0] = v;
                s[1] = thal_h_inf(v);
                s[2] = thal_r_inf(v);
            }
        }
        s
    }

    /// Vector field `F(x) + (u / c_m) e_v` written into `out`.
    ///
    /// Length checks are the caller's responsibility on this fast path; use
    /// [`NeuronModel::rhs`] for the checked variant.
    pub fn rhs_into(&self, state: &[f64], input: f64, out: &mut [f64]) {
        match self {
            NeuronModel::SquidAxon(p) => {
                let (v, m, h, n) = (state[0], state[1], state[2], state[3]);
                let i_na = p.g_na * m * m * m * h * (v - p.e_na);
                let i_k = p.g_k * n * n * n * n * (v - p.e_k);
                let i_l = p.g_l * (v - p.e_l);
                out[0] = (p.i_b - i_na - i_k - i_l + input) / p.c_m;
                out[1] = squid_a_m(v) * (1.0 - m) - squid_b_m(v) * m;
                out[2] = squid_a_h(v) * (1.0 - h) - squid_b_h(v) * h;
                out[3] = squid_a_n(v) * (1.0 - n) - squid_b_n(v) * n;
            }
            NeuronModel::Thalamic(p) => {
                let (v, h, r) = (state[0], state[1], state[2]);
                let m_inf = thal_m_inf(v);
                let p_inf = thal_p_inf(v);
                let i_l = p.g_l * (v - p.e_l);
                let i_na = p.g_na * m_inf * m_inf * m_inf * h * (v - p.e_na);
                let kg = 0.75 * (1.0 - h);
                let i_k = p.g_k * kg * kg * kg * kg * (v - p.e_k);
                let i_t = p.g_t * p_inf * p_inf * r * (v - p.e_t);
                out[0] = (-i_l - i_na - i_k - i_t + p.i_b + input) / p.c_m;
                out[1] = (thal_h_inf(v) - h) / thal_tau_h(v);
                out[2] = (thal_r_inf(v) - r) / thal_tau_r(v);
            }
        }
    }

    /// Checked vector field evaluation.
    pub fn rhs(&self, state: &[f64], input: f64) -> Result<Vec<f64>, ModelError> {
        let d = self.state_dim();
        if state.len() != d {
            return Err(ModelError::DimensionMismatch {
                expected: d,
                got: state.len(),
            });
        }
        let mut out = [0.0; MAX_STATE_DIM];
        self.rhs_into(state, input, &mut out[..d]);
        Ok(out[..d].to_vec())
    }

    /// Jacobian `dF/dx` of the unforced vector field written into `out`
    /// (row-major over the first `state_dim` rows and columns).
    pub fn jacobian_into(&self, state: &[f64], out: &mut [[f64; MAX_STATE_DIM]; MAX_STATE_DIM]) {
        match self {
            NeuronModel::SquidAxon(p) => {
                let (v, m, h, n) = (state[0], state[1], state[2], state[3]);
                let m3 = m * m * m;
                let n3 = n * n * n;
                out[0][0] = -(p.g_na * m3 * h + p.g_k * n3 * n + p.g_l) / p.c_m;
                out[0][1] = -3.0 * p.g_na * m * m * h * (v - p.e_na) / p.c_m;
                out[0][2] = -p.g_na * m3 * (v - p.e_na) / p.c_m;
                out[0][3] = -4.0 * p.g_k * n3 * (v - p.e_k) / p.c_m;
                out[1][0] = squid_a_m_deriv(v) * (1.0 - m) - squid_b_m_deriv(v) * m;
                out[1][1] = -(squid_a_m(v) + squid_b_m(v));
                out[1][2] = 0.0;
                out[1][3] = 0.0;
                out[2][0] = squid_a_h_deriv(v) * (1.0 - h) - squid_b_h_deriv(v) * h;
                out[2][1] = 0.0;
                out[2][2] = -(squid_a_h(v) + squid_b_h(v));
                out[2][3] = 0.0;
                out[3][0] = squid_a_n_deriv(v) * (1.0 - n) - squid_b_n_deriv(v) * n;
                out[3][1] = 0.0;
                out[3][2] = 0.0;
                out[3][3] = -(squid_a_n(v) + squid_b_n(v));
            }
            NeuronModel::Thalamic(p) => {
                let (v, h, r) = (state[0], state[1], state[2]);
                let m_inf = thal_m_inf(v);
                let m_inf_d = m_inf * (1.0 - m_inf) / 7.0;
                let p_inf = thal_p_inf(v);
                let p_inf_d = p_inf * (1.0 - p_inf) / 6.2;
                let kg = 0.75 * (1.0 - h);
                out[0][0] = -(p.g_l
                    + p.g_na * h * (3.0 * m_inf * m_inf * m_inf_d * (v - p.e_na) + m_inf * m_inf * m_inf)
                    + p.g_k * kg * kg * kg * kg
                    + p.g_t * r * (2.0 * p_inf * p_inf_d * (v - p.e_t) + p_inf * p_inf))
                    / p.c_m;
                out[0][1] = -(p.g_na * m_inf * m_inf * m_inf * (v - p.e_na)
                    - 3.0 * p.g_k * kg * kg * kg * (v - p.e_k))
                    / p.c_m;
                out[0][2] = -p.g_t * p_inf * p_inf * (v - p.e_t) / p.c_m;

                let tau_h = thal_tau_h(v);
                let h_inf = thal_h_inf(v);
                let h_inf_d = -h_inf * (1.0 - h_inf) / 4.0;
                let alpha_h_d = -thal_alpha_h(v) / 18.0;
                let sig_b = sigmoid((v + 23.0) / 5.0);
                let beta_h_d = 4.0 * sig_b * (1.0 - sig_b) / 5.0;
                let tau_h_d = -(alpha_h_d + beta_h_d) * tau_h * tau_h;
                out[1][0] = h_inf_d / tau_h - (h_inf - h) * tau_h_d / (tau_h * tau_h);
                out[1][1] = -1.0 / tau_h;
                out[1][2] = 0.0;

                let tau_r = thal_tau_r(v);
                let r_inf = thal_r_inf(v);
                let r_inf_d = -r_inf * (1.0 - r_inf) / 4.0;
                let tau_r_d = -((-(v + 25.0) / 10.5).exp()) / 10.5;
                out[2][0] = r_inf_d / tau_r - (r_inf - r) * tau_r_d / (tau_r * tau_r);
                out[2][1] = 0.0;
                out[2][2] = -1.0 / tau_r;
            }
        }
    }

    /// Checked Jacobian evaluation, returned row-major as `dim^2` values.
    pub fn jacobian(&self, state: &[f64]) -> Result<Vec<f64>, ModelError> {
        let d = self.state_dim();
        if state.len() != d {
            return Err(ModelError::DimensionMismatch {
                expected: d,
                got: state.len(),
            });
        }
        let mut buf = [[0.0; MAX_STATE_DIM]; MAX_STATE_DIM];
        self.jacobian_into(state, &mut buf);
        let mut out = Vec::with_capacity(d * d);
        for row in buf.iter().take(d) {
            out.extend_from_slice(&row[..d]);
        }
        Ok(out)
    }

    /// Names of the tunable parameters of this model.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            NeuronModel::SquidAxon(_) => {
                &["g_na", "e_na", "g_k", "e_k", "g_l", "e_l", "i_b", "c_m"]
            }
            NeuronModel::Thalamic(_) => &[
                "g_l", "e_l", "g_na", "e_na", "g_k", "e_k", "g_t", "e_t", "i_b", "c_m",
            ],
        }
    }

    /// Read a parameter by name.
    pub fn get_param(&self, name: &str) -> Result<f64, ModelError> {
        match self {
            NeuronModel::SquidAxon(p) => match name {
                "g_na" => Ok(p.g_na),
                "e_na" => Ok(p.e_na),
                "g_k" => Ok(p.g_k),
                "e_k" => Ok(p.e_k),
                "g_l" => Ok(p.g_l),
                "e_l" => Ok(p.e_l),
                "i_b" => Ok(p.i_b),
                "c_m" => Ok(p.c_m),
                _ => Err(ModelError::UnknownParameter(String::from(name))),
            },
            NeuronModel::Thalamic(p) => match name {
                "g_l" => Ok(p.g_l),
                "e_l" => Ok(p.e_l),
                "g_na" => Ok(p.g_na),
                "e_na" => Ok(p.e_na),
                "g_k" => Ok(p.g_k),
                "e_k" => Ok(p.e_k),
                "g_t" => Ok(p.g_t),
                "e_t" => Ok(p.e_t),
                "i_b" => Ok(p.i_b),
                "c_m" => Ok(p.c_m),
                _ => Err(ModelError::UnknownParameter(String::from(name))),
            },
        }
    }

    /// Override a parameter by name.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), ModelError> {
        match self {
            NeuronModel::SquidAxon(p) => match name {
                "g_na" => p.g_na = value,
                "e_na" => p.e_na = value,
                "g_k" => p.g_k = value,
                "e_k" => p.e_k = value,
                "g_l" => p.g_l = value,
                "e_l" => p.e_l = value,
                "i_b" => p.i_b = value,
                "c_m" => p.c_m = value,
                _ => return Err(ModelError::UnknownParameter(String::from(name))),
            },
            NeuronModel::Thalamic(p) => match name {
                "g_l" => p.g_l = value,
                "e_l" => p.e_l = value,
                "g_na" => p.g_na = value,
                "e_na" => p.e_na = value,
                "g_k" => p.g_k = value,
                "e_k" => p.e_k = value,
                "g_t" => p.g_t = value,
                "e_t" => p.e_t = value,
                "i_b" => p.i_b = value,
                "c_m" => p.c_m = value,
                _ => return Err(ModelError::UnknownParameter(String::from(name))),
            },
        }
        Ok(())
    }
}

// ── Squid-axon gating rates (voltages in mV, rates in 1/ms) ────────────────

fn squid_a_m(v: f64) -> f64 {
    exp_ratio((v + 40.0) / 10.0)
}

fn squid_a_m_deriv(v: f64) -> f64 {
    exp_ratio_deriv((v + 40.0) / 10.0) / 10.0
}

fn squid_b_m(v: f64) -> f64 {
    4.0 * (-(v + 65.0) / 18.0).exp()
}

fn squid_b_m_deriv(v: f64) -> f64 {
    -squid_b_m(v) / 18.0
}

fn squid_a_h(v: f64) -> f64 {
    0.07 * (-(v + 65.0) / 20.0).exp()
}

fn squid_a_h_deriv(v: f64) -> f64 {
    -squid_a_h(v) / 20.0
}

fn squid_b_h(v: f64) -> f64 {
    sigmoid((v + 35.0) / 10.0)
}

fn squid_b_h_deriv(v: f64) -> f64 {
    let s = squid_b_h(v);
    s * (1.0 - s) / 10.0
}

fn squid_a_n(v: f64) -> f64 {
    0.1 * exp_ratio((v + 55.0) / 10.0)
}

fn squid_a_n_deriv(v: f64) -> f64 {
    0.01 * exp_ratio_deriv((v + 55.0) / 10.0)
}

fn squid_b_n(v: f64) -> f64 {
    0.125 * (-(v + 65.0) / 80.0).exp()
}

fn squid_b_n_deriv(v: f64) -> f64 {
    -squid_b_n(v) / 80.0
}

// ── Thalamic relay activation curves and time constants ────────────────────

fn thal_h_inf(v: f64) -> f64 {
    1.0 / (1.0 + ((v + 41.0) / 4.0).exp())
}

fn thal_r_inf(v: f64) -> f64 {
    1.0 / (1.0 + ((v + 84.0) / 4.0).exp())
}

fn thal_alpha_h(v: f64) -> f64 {
    0.128 * (-(v + 46.0) / 18.0).exp()
}

fn thal_beta_h(v: f64) -> f64 {
    4.0 * sigmoid((v + 23.0) / 5.0)
}

fn thal_tau_h(v: f64) -> f64 {
    1.0 / (thal_alpha_h(v) + thal_beta_h(v))
}

fn thal_tau_r(v: f64) -> f64 {
    28.0 + (-(v + 25.0) / 10.5).exp()
}

fn thal_m_inf(v: f64) -> f64 {
    sigmoid((v + 37.0) / 7.0)
}

fn thal_p_inf(v: f64) -> f64 {
    sigmoid((v + 60.0) / 6.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Deterministic quasi-random sequence in [0, 1) (fractional parts of
    /// multiples of the plastic-number reciprocals), used to probe states.
    fn quasi_random(n: usize, dims: usize) -> Vec<Vec<f64>> {
        let alphas = [
            0.754877666246693,
            0.569840290998053,
            0.430159709001947,
            0.245122333753307,
        ];
        (1..=n)
            .map(|i| {
                (0..dims)
                    .map(|d| {
                        let x = alphas[d % 4] * i as f64 + 0.5;
                        x - x.floor()
                    })
                    .collect()
            })
            .collect()
    }

    fn probe_states(model: &NeuronModel, n: usize) -> Vec<Vec<f64>> {
        let d = model.state_dim();
        quasi_random(n, d)
            .into_iter()
            .map(|u| {
                let mut s = vec![0.0; d];
                s[0] = -90.0 + 140.0 * u[0];
                for j in 1..d {
                    s[j] = 0.02 + 0.96 * u[j];
                }
                s
            })
            .collect()
    }

    #[test]
    fn exp_ratio_is_smooth_through_zero() {
        assert!((exp_ratio(0.0) - 1.0).abs() < 1e-15);
        // Branch handoff: series and direct formula agree near the switch.
        for &x in &[1e-8, -1e-8, 9.9e-8, -9.9e-8, 1.1e-7, -1.1e-7, 1e-3] {
            let direct = x / (-(-x as f64).exp_m1());
            assert!(
                (exp_ratio(x) - direct).abs() < 1e-12,
                "exp_ratio branch mismatch at x = {x}"
            );
        }
        // Derivative against central differences away from the switch region.
        for &x in &[-2.0, -0.5, 0.3, 1.7, 4.0] {
            let h = 1e-6;
            let fd = (exp_ratio(x + h) - exp_ratio(x - h)) / (2.0 * h);
            assert!((exp_ratio_deriv(x) - fd).abs() < 1e-8);
        }
        assert!((exp_ratio_deriv(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singular_rate_voltages_evaluate_finite() {
        // a_m has a removable singularity at v = -40, a_n at v = -55.
        assert!((squid_a_m(-40.0) - 1.0).abs() < 1e-12);
        assert!((squid_a_n(-55.0) - 0.1).abs() < 1e-12);
        let model = NeuronModel::hodgkin_huxley();
        for &v in &[-40.0, -55.0, -40.0 + 1e-9, -55.0 - 1e-9] {
            let out = model.rhs(&[v, 0.3, 0.4, 0.5], 0.0).unwrap();
            assert!(out.iter().all(|x| x.is_finite()), "rhs not finite at v = {v}");
        }
    }

    #[test]
    fn input_current_enters_voltage_equation_only() {
        for model in [NeuronModel::hodgkin_huxley(), NeuronModel::thalamic()] {
            let d = model.state_dim();
            for state in probe_states(&model, 10) {
                let base = model.rhs(&state, 0.0).unwrap();
                let driven = model.rhs(&state, 10.0).unwrap();
                assert!(
                    (driven[0] - base[0] - 10.0 / model.c_m()).abs() < 1e-12,
                    "voltage row must gain input / c_m"
                );
                for j in 1..d {
                    assert_eq!(driven[j], base[j], "gate row {j} must not see the input");
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let model = NeuronModel::hodgkin_huxley();
        let err = model.rhs(&[0.0; 3], 0.0).unwrap_err();
        assert_eq!(
            err,
            ModelError::DimensionMismatch {
                expected: 4,
                got: 3
            }
        );
        assert!(model.jacobian(&[0.0; 5]).is_err());
    }

    #[test]
    fn squid_axon_voltage_row_matches_leak_only_expression() {
        // With all gates at zero, dv/dv reduces to -g_l / c_m.
        let model = NeuronModel::hodgkin_huxley();
        let j = model.jacobian(&[-65.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((j[0] - (-0.3)).abs() < 1e-12, "dv'/dv = {}", j[0]);
    }

    #[test]
    fn thalamic_h_row_matches_relaxation_rate() {
        let model = NeuronModel::thalamic();
        let v = -58.0;
        let j = model.jacobian(&[v, 0.3, 0.2]).unwrap();
        // dh'/dh = -1 / tau_h(v).
        assert!((j[4] + 1.0 / thal_tau_h(v)).abs() < 1e-12);
        // dr'/dr = -1 / tau_r(v).
        assert!((j[8] + 1.0 / thal_tau_r(v)).abs() < 1e-12);
    }

    #[test]
    fn jacobians_match_central_differences() {
        // Independent oracle: central finite differences of the vector field.
        for model in [NeuronModel::hodgkin_huxley(), NeuronModel::thalamic()] {
            let d = model.state_dim();
            let eps = 1e-6;
            for state in probe_states(&model, 100) {
                let jac = model.jacobian(&state).unwrap();
                for col in 0..d {
                    let mut hi = state.clone();
                    let mut lo = state.clone();
                    hi[col] += eps;
                    lo[col] -= eps;
                    let f_hi = model.rhs(&hi, 0.0).unwrap();
                    let f_lo = model.rhs(&lo, 0.0).unwrap();
                    for row in 0..d {
                        let fd = (f_hi[row] - f_lo[row]) / (2.0 * eps);
                        let dev = (jac[row * d + col] - fd).abs();
                        assert!(
                            dev < 1e-4,
                            "{} jacobian[{row}][{col}] off by {dev} at state {state:?}",
                            model.name()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn default_parameters_are_the_published_sets() {
        let hh = NeuronModel::hodgkin_huxley();
        for (name, want) in [
            ("g_na", 120.0),
            ("e_na", 50.0),
            ("g_k", 36.0),
            ("e_k", -77.0),
            ("g_l", 0.3),
            ("e_l", -54.4),
            ("i_b", 10.0),
            ("c_m", 1.0),
        ] {
            assert_eq!(hh.get_param(name).unwrap(), want, "hh parameter {name}");
        }
        let th = NeuronModel::thalamic();
        for (name, want) in [
            ("g_l", 0.05),
            ("e_l", -70.0),
            ("g_na", 3.0),
            ("e_na", 50.0),
            ("g_k", 5.0),
            ("e_k", -90.0),
            ("g_t", 5.0),
            ("e_t", 0.0),
            ("i_b", 5.0),
            ("c_m", 1.0),
        ] {
            assert_eq!(th.get_param(name).unwrap(), want, "thalamic parameter {name}");
        }
    }

    #[test]
    fn parameter_overrides_round_trip() {
        let mut model = NeuronModel::hodgkin_huxley();
        model.set_param("i_b", 12.5).unwrap();
        assert_eq!(model.get_param("i_b").unwrap(), 12.5);
        assert!(model.set_param("does_not_exist", 1.0).is_err());
        for name in model.param_names() {
            model.get_param(name).unwrap();
        }
    }
}
