//! Phase sensitivity of a periodic orbit, computed by the adjoint method.
//!
//! For a weakly forced oscillator the phase obeys
//! `dtheta/dt = omega + Z(theta) * u(t)`, where the sensitivity `Z` is the
//! voltage component of the solution of the adjoint variational problem
//! `dZ/dt = -J(gamma(t))^T Z` along the orbit, normalized so `Z . F = omega`.
//! Integrating the adjoint equation backward in time damps every non-periodic
//! component, so sweeping whole periods converges to the unique periodic
//! solution. The voltage component, scaled to a sensitivity per unit injected
//! current, is fitted with a Fourier series for the map and population stages.

use alloc::vec::Vec;

use crate::fourier::FourierSeries;
use crate::math::TAU;
use crate::models::MAX_STATE_DIM;
use crate::ode::rk4_step_model;
use crate::orbit::PeriodicOrbit;

#[allow(unused_imports)]
use num_traits::Float;

/// Default Fourier order for fitted sensitivity curves. High enough that the
/// truncated tail of both bundled models sits far below the reconstruction
/// tolerance checked in the tests.
pub const DEFAULT_FOURIER_ORDER: usize = 30;

/// Convergence threshold for the backward iteration: sup-norm change of the
/// section vector between successive periods.
pub const ADJOINT_CONVERGENCE_TOL: f64 = 1e-8;

/// Backward-period budget. The slowest Floquet contraction of the thalamic
/// model (the T-current recovery gate relaxes over tens of milliseconds while
/// the period is only 8.4 ms) removes transients slowly, so the budget leaves
/// generous room beyond the measured need of both bundled models.
pub const ADJOINT_MAX_PERIODS: usize = 250;

/// Failure modes of the sensitivity computation.
#[derive(Debug, Clone, PartialEq)]
pub enum PrcError {
    /// The backward iteration did not settle onto a periodic solution.
    AdjointDivergence { periods: usize, last_delta: f64 },
    /// Fourier order must satisfy `1 <= order` and `2 * order < nodes`.
    InvalidOrder { order: usize, nodes: usize },
}

impl core::fmt::Display for PrcError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PrcError::AdjointDivergence {
                periods,
                last_delta,
            } => write!(
                f,
                "adjoint divergence: no periodic solution after {periods} backward \
                 periods (last per-period change {last_delta:.3e})"
            ),
            PrcError::InvalidOrder { order, nodes } => write!(
                f,
                "invalid Fourier order {order} for a {nodes}-point phase grid"
            ),
        }
    }
}

/// The adjoint solution tabulated on a uniform phase grid over one period.
#[derive(Debug, Clone)]
pub struct AdjointTable {
    thetas: Vec<f64>,
    vectors: Vec<[f64; MAX_STATE_DIM]>,
    dim: usize,
    residual_max: f64,
    periods_used: usize,
}

impl AdjointTable {
    /// Number of grid nodes over one period.
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    /// True when the table holds no nodes (never the case for a valid table).
    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Phase of node `j`.
    pub fn theta(&self, j: usize) -> f64 {
        self.thetas[j]
    }

    /// Full adjoint vector at node `j`.
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j][..self.dim]
    }

    /// Worst relative deviation of `Z . F` from `omega`, measured at the grid
    /// nodes and at the midpoints between them.
    pub fn residual_max(&self) -> f64 {
        self.residual_max
    }

    /// Backward periods the iteration needed to converge.
    pub fn periods_used(&self) -> usize {
        self.periods_used
    }
}

/// Voltage-input phase sensitivity `Z(theta)` as a Fourier series, together
/// with the natural frequency of the orbit it belongs to.
#[derive(Debug, Clone)]
pub struct PhaseResponseCurve {
    omega: f64,
    series: FourierSeries,
}

impl PhaseResponseCurve {
    /// Assemble a curve from a known frequency and coefficient set (used when
    /// loading a previously exported curve).
    pub fn from_parts(omega: f64, series: FourierSeries) -> Self {
        Self { omega, series }
    }

    /// Natural frequency of the underlying orbit, in rad/ms.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The fitted Fourier series.
    pub fn series(&self) -> &FourierSeries {
        &self.series
    }

    /// Fourier order of the fit.
    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Sensitivity at phase `theta` (rad per unit current-impulse area).
    pub fn eval(&self, theta: f64) -> f64 {
        self.series.eval(theta)
    }

    /// Derivative of the sensitivity with respect to phase.
    pub fn eval_deriv(&self, theta: f64) -> f64 {
        self.series.eval_deriv(theta)
    }
}

/// Orbit data sampled at half-node resolution: Jacobians and vector fields at
/// `2 * nodes + 1` points, giving the backward RK4 sweep its endpoint and
/// midpoint evaluations.
struct OrbitTableau {
    jacs: Vec<[[f64; MAX_STATE_DIM]; MAX_STATE_DIM]>,
    fields: Vec<[f64; MAX_STATE_DIM]>,
}

fn tabulate_orbit(orbit: &PeriodicOrbit, nodes: usize) -> OrbitTableau {
    let model = *orbit.model();
    let dim = model.state_dim();
    let half = 0.5 * orbit.period() / nodes as f64;
    // Keep the re-integration at least as fine as the orbit's own step.
    let substeps = (half / orbit.dt()).ceil().max(1.0) as usize;
    let sub_h = half / substeps as f64;

    let count = 2 * nodes + 1;
    let mut jacs = Vec::with_capacity(count);
    let mut fields = Vec::with_capacity(count);
    let mut y = [0.0; MAX_STATE_DIM];
    y[..dim].copy_from_slice(orbit.spike_state());
    for i in 0..count {
        let mut jac = [[0.0; MAX_STATE_DIM]; MAX_STATE_DIM];
        model.jacobian_into(&y[..dim], &mut jac);
        jacs.push(jac);
        let mut field = [0.0; MAX_STATE_DIM];
        model.rhs_into(&y[..dim], 0.0, &mut field[..dim]);
        fields.push(field);
        if i + 1 < count {
            for _ in 0..substeps {
                rk4_step_model(&model, &mut y, sub_h, 0.0);
            }
        }
    }
    OrbitTableau { jacs, fields }
}

/// `J^T z` over the first `dim` components.
fn jac_t_vec(
    jac: &[[f64; MAX_STATE_DIM]; MAX_STATE_DIM],
    z: &[f64; MAX_STATE_DIM],
    dim: usize,
) -> [f64; MAX_STATE_DIM] {
    let mut out = [0.0; MAX_STATE_DIM];
    for (i, slot) in out.iter_mut().enumerate().take(dim) {
        let mut acc = 0.0;
        for k in 0..dim {
            acc += jac[k][i] * z[k];
        }
        *slot = acc;
    }
    out
}

fn dot(a: &[f64; MAX_STATE_DIM], b: &[f64; MAX_STATE_DIM], dim: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..dim {
        acc += a[i] * b[i];
    }
    acc
}

/// Rescale `z` so that `z . field = omega`.
fn renormalize(z: &mut [f64; MAX_STATE_DIM], field: &[f64; MAX_STATE_DIM], omega: f64, dim: usize) {
    let scale = omega / dot(z, field, dim);
    for v in z.iter_mut().take(dim) {
        *v *= scale;
    }
}

/// One RK4 step of `dZ/dt = -J^T Z` from node `j + 1` back to node `j`.
/// In the backward time variable the right-hand side is `+J^T Z`, evaluated
/// at the stored endpoint and midpoint Jacobians.
fn backward_step(tab: &OrbitTableau, j: usize, h: f64, dim: usize, z: &mut [f64; MAX_STATE_DIM]) {
    let half = 0.5 * h;
    let k1 = jac_t_vec(&tab.jacs[2 * j + 2], z, dim);
    let mut stage = *z;
    for i in 0..dim {
        stage[i] = z[i] + half * k1[i];
    }
    let k2 = jac_t_vec(&tab.jacs[2 * j + 1], &stage, dim);
    for i in 0..dim {
        stage[i] = z[i] + half * k2[i];
    }
    let k3 = jac_t_vec(&tab.jacs[2 * j + 1], &stage, dim);
    for i in 0..dim {
        stage[i] = z[i] + h * k3[i];
    }
    let k4 = jac_t_vec(&tab.jacs[2 * j], &stage, dim);
    for i in 0..dim {
        z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Compute the periodic adjoint solution on a uniform grid of `nodes` phases.
///
/// The iteration starts from a unit vector along the voltage coordinate,
/// sweeps backward one period at a time, and renormalizes `Z . F = omega` at
/// the spike section after each sweep; it stops once the section vector
/// changes by less than [`ADJOINT_CONVERGENCE_TOL`] between sweeps. A final
/// recording sweep tabulates the solution, centers the normalization on its
/// grid-wide mean, and measures the worst `Z . F` deviation at nodes and
/// midpoints.
pub fn compute_adjoint_table(
    orbit: &PeriodicOrbit,
    nodes: usize,
) -> Result<AdjointTable, PrcError> {
    compute_adjoint_table_with_budget(orbit, nodes, ADJOINT_MAX_PERIODS)
}

fn compute_adjoint_table_with_budget(
    orbit: &PeriodicOrbit,
    nodes: usize,
    max_periods: usize,
) -> Result<AdjointTable, PrcError> {
    assert!(nodes >= 16, "adjoint grid too coarse: {nodes} nodes");
    let model = orbit.model();
    let dim = model.state_dim();
    let omega = orbit.omega();
    let h = orbit.period() / nodes as f64;
    let tab = tabulate_orbit(orbit, nodes);

    let mut z = [0.0; MAX_STATE_DIM];
    z[model.voltage_index()] = 1.0;
    renormalize(&mut z, &tab.fields[0], omega, dim);

    let mut prev = z;
    let mut periods = 0usize;
    let mut last_delta = f64::INFINITY;
    let mut converged = false;
    while periods < max_periods {
        for j in (0..nodes).rev() {
            backward_step(&tab, j, h, dim, &mut z);
        }
        renormalize(&mut z, &tab.fields[0], omega, dim);
        periods += 1;
        last_delta = (0..dim).map(|i| (z[i] - prev[i]).abs()).fold(0.0, f64::max);
        prev = z;
        if last_delta < ADJOINT_CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(PrcError::AdjointDivergence {
            periods,
            last_delta,
        });
    }

    // Recording sweep: store the node vectors and collect `Z . F` both at the
    // nodes and at midpoint estimates (one backward Heun half-step), so the
    // normalization is also checked between the fit-grid points.
    let mut vectors: Vec<[f64; MAX_STATE_DIM]> = (0..nodes).map(|_| [0.0; MAX_STATE_DIM]).collect();
    let mut dots = Vec::with_capacity(2 * nodes);
    for j in (0..nodes).rev() {
        let k1 = jac_t_vec(&tab.jacs[2 * j + 2], &z, dim);
        let mut stage = z;
        for i in 0..dim {
            stage[i] = z[i] + 0.5 * h * k1[i];
        }
        let k2 = jac_t_vec(&tab.jacs[2 * j + 1], &stage, dim);
        let mut z_mid = z;
        for i in 0..dim {
            z_mid[i] = z[i] + 0.25 * h * (k1[i] + k2[i]);
        }
        dots.push(dot(&z_mid, &tab.fields[2 * j + 1], dim));
        backward_step(&tab, j, h, dim, &mut z);
        vectors[j] = z;
        dots.push(dot(&z, &tab.fields[2 * j], dim));
    }

    let mean = dots.iter().sum::<f64>() / dots.len() as f64;
    let scale = omega / mean;
    for v in &mut vectors {
        for item in v.iter_mut().take(dim) {
            *item *= scale;
        }
    }
    let residual_max = dots
        .iter()
        .map(|&d| (d * scale - omega).abs() / omega)
        .fold(0.0, f64::max);
    let thetas = (0..nodes).map(|j| TAU * j as f64 / nodes as f64).collect();
    Ok(AdjointTable {
        thetas,
        vectors,
        dim,
        residual_max,
        periods_used: periods,
    })
}

/// Compute the voltage-input phase sensitivity of `orbit` as a Fourier series
/// of the given order, fitted on the orbit's own phase grid.
pub fn compute_prc_adjoint(
    orbit: &PeriodicOrbit,
    order: usize,
) -> Result<PhaseResponseCurve, PrcError> {
    let nodes = orbit.sample_count();
    if order == 0 || 2 * order >= nodes {
        return Err(PrcError::InvalidOrder { order, nodes });
    }
    let table = compute_adjoint_table(orbit, nodes)?;
    let model = orbit.model();
    let v_idx = model.voltage_index();
    let inv_cm = 1.0 / model.c_m();
    let samples: Vec<f64> = table.vectors.iter().map(|z| z[v_idx] * inv_cm).collect();
    let series = FourierSeries::fit(&samples, order);
    Ok(PhaseResponseCurve {
        omega: orbit.omega(),
        series,
    })
}
