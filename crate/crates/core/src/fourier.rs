//! Real trigonometric series on the circle.
//!
//! Both the infinitesimal phase response curve `Z(theta)` and the finite-pulse
//! response `f(theta)` are smooth 2*pi-periodic functions; they are stored as
//! truncated Fourier series
//!
//! ```text
//! F(theta) = a0 + sum_{k=1..K} a_k cos(k theta) + b_k sin(k theta)
//! ```
//!
//! fitted by discrete projection on a uniform phase grid. Evaluation and
//! differentiation use an exact angle-addition recurrence so that one call
//! costs a single `sin`/`cos` pair plus `K` multiply-adds.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::math::TAU;

/// Truncated real Fourier series `a0 + sum a_k cos(k t) + b_k sin(k t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    a0: f64,
    /// Harmonic coefficients `(a_k, b_k)` for `k = 1..=order`.
    coeffs: Vec<(f64, f64)>,
}

impl FourierSeries {
    /// Build a series directly from its coefficients.
    pub fn from_coefficients(a0: f64, coeffs: Vec<(f64, f64)>) -> Self {
        FourierSeries { a0, coeffs }
    }

    /// The constant term `a0`.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Number of harmonics `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient pair `(a_k, b_k)` for `1 <= k <= order`.
    pub fn coefficient(&self, k: usize) -> (f64, f64) {
        self.coeffs[k - 1]
    }

    /// All harmonic coefficients in order `k = 1..=K`.
    pub fn coefficients(&self) -> &[(f64, f64)] {
        &self.coeffs
    }

    /// Fit a series of the given order to samples on the uniform grid
    /// `theta_j = 2 pi j / M`, `j = 0..M`, by discrete projection.
    ///
    /// Requires `2 * order < samples.len()` so the projected harmonics are
    /// below the grid's Nyquist limit.
    pub fn fit(samples: &[f64], order: usize) -> Self {
        let m = samples.len();
        assert!(m > 0, "cannot fit a Fourier series to an empty sample set");
        assert!(
            2 * order < m,
            "Fourier order {order} too high for {m} samples"
        );
        // Tabulate sin/cos at the exact grid angles once; the projection then
        // only needs index arithmetic, keeping the fit fast and reproducible.
        let mut cos_tab = Vec::with_capacity(m);
        let mut sin_tab = Vec::with_capacity(m);
        for j in 0..m {
            let (s, c) = (TAU * j as f64 / m as f64).sin_cos();
            cos_tab.push(c);
            sin_tab.push(s);
        }
        let mut sum0 = 0.0;
        for &y in samples {
            sum0 += y;
        }
        let a0 = sum0 / m as f64;
        let mut coeffs = Vec::with_capacity(order);
        for k in 1..=order {
            let mut sa = 0.0;
            let mut sb = 0.0;
            // idx = (k * j) % m maintained incrementally; k < m is guaranteed
            // by the Nyquist assertion above, so one subtraction wraps it.
            let mut idx = 0usize;
            for &y in samples {
                sa += y * cos_tab[idx];
                sb += y * sin_tab[idx];
                idx += k;
                if idx >= m {
                    idx -= m;
                }
            }
            coeffs.push((2.0 * sa / m as f64, 2.0 * sb / m as f64));
        }
        FourierSeries { a0, coeffs }
    }

    /// Fit at `max_order`, then truncate to the smallest order whose dropped
    /// tail carries less than `tail_tol` of the total spectral energy
    /// (constant term included in the total).
    pub fn fit_auto(samples: &[f64], max_order: usize, tail_tol: f64) -> Self {
        let full = Self::fit(samples, max_order);
        let total: f64 = full.a0 * full.a0
            + full
                .coeffs
                .iter()
                .map(|&(a, b)| a * a + b * b)
                .sum::<f64>();
        if total == 0.0 {
            return FourierSeries {
                a0: full.a0,
                coeffs: Vec::new(),
            };
        }
        let mut tail = 0.0;
        let mut keep = max_order;
        // Walk from the highest harmonic down, dropping while the tail stays small.
        for k in (1..=max_order).rev() {
            let (a, b) = full.coeffs[k - 1];
            tail += a * a + b * b;
            if tail < tail_tol * total {
                keep = k - 1;
            } else {
                break;
            }
        }
        FourierSeries {
            a0: full.a0,
            coeffs: full.coeffs[..keep].to_vec(),
        }
    }

    /// Evaluate the series at `theta`.
    pub fn eval(&self, theta: f64) -> f64 {
        let (s1, c1) = theta.sin_cos();
        let mut ck = c1;
        let mut sk = s1;
        let mut acc = self.a0;
        for &(a, b) in &self.coeffs {
            acc += a * ck + b * sk;
            let c_next = ck * c1 - sk * s1;
            let s_next = sk * c1 + ck * s1;
            ck = c_next;
            sk = s_next;
        }
        acc
    }

    /// Evaluate the derivative `dF/dtheta` at `theta`.
    pub fn eval_deriv(&self, theta: f64) -> f64 {
        let (s1, c1) = theta.sin_cos();
        let mut ck = c1;
        let mut sk = s1;
        let mut acc = 0.0;
        for (i, &(a, b)) in self.coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc += k * (b * ck - a * sk);
            let c_next = ck * c1 - sk * s1;
            let s_next = sk * c1 + ck * s1;
            ck = c_next;
            sk = s_next;
        }
        acc
    }

    /// Spectral energy `sum_{k > order_keep} (a_k^2 + b_k^2)` above a given order.
    pub fn tail_energy(&self, order_keep: usize) -> f64 {
        self.coeffs
            .iter()
            .skip(order_keep)
            .map(|&(a, b)| a * a + b * b)
            .sum()
    }

    /// Maximum absolute value over a dense probe grid (diagnostic helper).
    pub fn max_abs(&self, probes: usize) -> f64 {
        let mut m = 0.0_f64;
        for j in 0..probes {
            let v = self.eval(TAU * j as f64 / probes as f64).abs();
            if v > m {
                m = v;
            }
        }
        m
    }
}
