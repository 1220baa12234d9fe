//! Charge-balanced rectangular pulses and periodic pulse trains.
//!
//! A pulse delivers a positive rectangle of amplitude `u_max` for `p` ms
//! followed immediately by a negative rectangle of amplitude `-u_max/lambda`
//! for `lambda * p` ms, so the net injected charge is zero:
//!
//! ```text
//! u(s) = u_max            0 <= s <= p
//!      = -u_max / lambda  p <  s <= (lambda + 1) p
//!      = 0                otherwise
//! ```
//!
//! A train repeats a primary pulse with period `tau` (one pulse starts at
//! `t = 0`), optionally interleaving a secondary pulse at offset `tau2` within
//! each period. Pulses must not overlap each other or spill into the next
//! period.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::math::fmod_pos;

/// Errors from pulse and train construction.
#[derive(Debug, Clone, PartialEq)]
pub enum StimulusError {
    /// Pulse width `p` must be positive and finite.
    InvalidWidth(f64),
    /// Balance ratio `lambda` must be positive and finite.
    InvalidBalanceRatio(f64),
    /// Amplitude must be finite.
    InvalidAmplitude(f64),
    /// Train period `tau` must be positive and finite.
    InvalidPeriod(f64),
    /// The primary pulse (support `[0, (lambda+1) p]`) does not fit before
    /// the secondary offset or the period end.
    PrimaryOverlap { support: f64, limit: f64 },
    /// The secondary pulse does not fit between its offset and the period end.
    SecondaryOverlap { end: f64, period: f64 },
    /// Train frequency outside the supported range (0, 2000] Hz.
    FrequencyOutOfRange(f64),
}

impl fmt::Display for StimulusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StimulusError::InvalidWidth(p) => write!(f, "pulse width must be positive, got {p}"),
            StimulusError::InvalidBalanceRatio(l) => {
                write!(f, "balance ratio must be positive, got {l}")
            }
            StimulusError::InvalidAmplitude(a) => write!(f, "pulse amplitude must be finite, got {a}"),
            StimulusError::InvalidPeriod(t) => write!(f, "train period must be positive, got {t}"),
            StimulusError::PrimaryOverlap { support, limit } => write!(
                f,
                "primary pulse support {support} ms does not fit in {limit} ms"
            ),
            StimulusError::SecondaryOverlap { end, period } => write!(
                f,
                "secondary pulse ends at {end} ms, beyond the period {period} ms"
            ),
            StimulusError::FrequencyOutOfRange(hz) => {
                write!(f, "train frequency {hz} Hz outside (0, 2000]")
            }
        }
    }
}

/// A single biphasic charge-balanced rectangular pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    u_max: f64,
    width: f64,
    lambda: f64,
}

impl Pulse {
    /// Create a pulse with positive amplitude `u_max`, positive-phase width
    /// `p` (ms), and balance ratio `lambda` (the negative phase lasts
    /// `lambda * p` with amplitude `-u_max / lambda`).
    pub fn new(u_max: f64, width: f64, lambda: f64) -> Result<Self, StimulusError> {
        if !u_max.is_finite() {
            return Err(StimulusError::InvalidAmplitude(u_max));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(StimulusError::InvalidWidth(width));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(StimulusError::InvalidBalanceRatio(lambda));
        }
        Ok(Pulse {
            u_max,
            width,
            lambda,
        })
    }

    /// Positive-phase amplitude.
    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    /// Negative-phase amplitude `-u_max / lambda`.
    pub fn u_min(&self) -> f64 {
        -self.u_max / self.lambda
    }

    /// Positive-phase width `p` in ms.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Balance ratio `lambda`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Total support `(lambda + 1) p` in ms.
    pub fn support(&self) -> f64 {
        (self.lambda + 1.0) * self.width
    }

    /// Amplitude at time `s` since the pulse start.
    pub fn amplitude_at(&self, s: f64) -> f64 {
        if s < 0.0 {
            0.0
        } else if s <= self.width {
            self.u_max
        } else if s <= self.support() {
            self.u_min()
        } else {
            0.0
        }
    }

    /// A pulse with the amplitude scaled by `factor` (shape unchanged).
    pub fn scaled(&self, factor: f64) -> Pulse {
        Pulse {
            u_max: self.u_max * factor,
            width: self.width,
            lambda: self.lambda,
        }
    }
}

/// A secondary pulse placed at a fixed offset within each period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryPulse {
    pub pulse: Pulse,
    /// Offset `tau2` of the secondary pulse start within the period, in ms.
    pub offset: f64,
}

/// A periodic train: a primary pulse anchored at `t = 0` repeating with
/// period `tau`, optionally with a secondary pulse at offset `tau2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain {
    primary: Pulse,
    period: f64,
    secondary: Option<SecondaryPulse>,
}

impl PulseTrain {
    /// A train of identical pulses with period `tau` ms.
    pub fn identical(primary: Pulse, period: f64) -> Result<Self, StimulusError> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(StimulusError::InvalidPeriod(period));
        }
        if primary.support() > period {
            return Err(StimulusError::PrimaryOverlap {
                support: primary.support(),
                limit: period,
            });
        }
        Ok(PulseTrain {
            primary,
            period,
            secondary: None,
        })
    }

    /// A train alternating between `primary` (at `t = 0`) and `secondary`
    /// (at `t = tau2`) within each period of `tau` ms.
    pub fn alternating(
        primary: Pulse,
        period: f64,
        secondary: Pulse,
        tau2: f64,
    ) -> Result<Self, StimulusError> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(StimulusError::InvalidPeriod(period));
        }
        if primary.support() > tau2 {
            return Err(StimulusError::PrimaryOverlap {
                support: primary.support(),
                limit: tau2,
            });
        }
        let end = tau2 + secondary.support();
        if end > period {
            return Err(StimulusError::SecondaryOverlap { end, period });
        }
        Ok(PulseTrain {
            primary,
            period,
            secondary: Some(SecondaryPulse {
                pulse: secondary,
                offset: tau2,
            }),
        })
    }

    /// The primary pulse.
    pub fn primary(&self) -> &Pulse {
        &self.primary
    }

    /// Train period `tau` in ms.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// The secondary pulse and its offset, if any.
    pub fn secondary(&self) -> Option<&SecondaryPulse> {
        self.secondary.as_ref()
    }

    /// Stimulus current at absolute time `t` (ms). Periodic for all `t`.
    pub fn eval_u(&self, t: f64) -> f64 {
        let s = fmod_pos(t, self.period);
        let u = self.primary.amplitude_at(s);
        if u != 0.0 {
            return u;
        }
        if let Some(sec) = &self.secondary {
            return sec.pulse.amplitude_at(s - sec.offset);
        }
        0.0
    }
}

/// The standard identical-pulse train used throughout the analysis:
/// `u_max = 20`, `p = 0.5` ms, `lambda = 3`, period `tau = 1000 / freq_hz`.
pub fn identical_train(freq_hz: f64) -> Result<PulseTrain, StimulusError> {
    if !(freq_hz > 0.0 && freq_hz <= 2000.0) {
        return Err(StimulusError::FrequencyOutOfRange(freq_hz));
    }
    let pulse = Pulse::new(20.0, 0.5, 3.0)?;
    PulseTrain::identical(pulse, 1000.0 / freq_hz)
}

/// The standard alternating train: primary `u_max = 20`, secondary
/// `u_max = 10` (same width and balance ratio), secondary offset
/// `tau2 = tau2_frac * tau`.
pub fn alternating_train(freq_hz: f64, tau2_frac: f64) -> Result<PulseTrain, StimulusError> {
    if !(freq_hz > 0.0 && freq_hz <= 2000.0) {
        return Err(StimulusError::FrequencyOutOfRange(freq_hz));
    }
    let tau = 1000.0 / freq_hz;
    let primary = Pulse::new(20.0, 0.5, 3.0)?;
    let secondary = Pulse::new(10.0, 0.5, 3.0)?;
    PulseTrain::alternating(primary, tau, secondary, tau2_frac * tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charge_balance_is_exact_for_the_standard_pulse() {
        let p = Pulse::new(20.0, 0.5, 3.0).unwrap();
        assert_eq!(p.u_min(), -20.0 / 3.0);
        // Net charge u_max p + u_min lambda p cancels exactly in floating point.
        let charge = p.u_max() * p.width() + p.u_min() * p.lambda() * p.width();
        assert_eq!(charge, 0.0);
        assert_eq!(p.support(), 2.0);
    }

    #[test]
    fn pulse_amplitude_piecewise_shape() {
        let p = Pulse::new(20.0, 0.5, 3.0).unwrap();
        assert_eq!(p.amplitude_at(-0.1), 0.0);
        assert_eq!(p.amplitude_at(0.0), 20.0);
        assert_eq!(p.amplitude_at(0.5), 20.0);
        assert_eq!(p.amplitude_at(0.5 + 1e-12), p.u_min());
        assert_eq!(p.amplitude_at(2.0), p.u_min());
        assert_eq!(p.amplitude_at(2.0 + 1e-12), 0.0);
    }

    #[test]
    fn invalid_pulses_are_rejected() {
        assert!(Pulse::new(20.0, 0.0, 3.0).is_err());
        assert!(Pulse::new(20.0, -1.0, 3.0).is_err());
        assert!(Pulse::new(20.0, 0.5, 0.0).is_err());
        assert!(Pulse::new(20.0, 0.5, -2.0).is_err());
        assert!(Pulse::new(f64::NAN, 0.5, 3.0).is_err());
        // Zero amplitude is a legal (silent) pulse.
        assert!(Pulse::new(0.0, 0.5, 3.0).is_ok());
    }

    #[test]
    fn train_charge_integral_vanishes_over_one_period() {
        // Midpoint quadrature of u over one period; exact cancellation is
        // limited only by the quadrature itself resolving the rectangles.
        let train = alternating_train(150.0, 0.5).unwrap();
        let tau = train.period();
        let n = 2_000_000;
        let h = tau / n as f64;
        let mut integral = 0.0;
        for i in 0..n {
            integral += train.eval_u((i as f64 + 0.5) * h) * h;
        }
        assert!(
            integral.abs() < 1e-9,
            "net charge over one period = {integral}"
        );
    }

    #[test]
    fn eval_u_is_periodic_and_anchored_at_zero() {
        let train = identical_train(150.0).unwrap();
        let tau = train.period();
        assert_eq!(train.eval_u(0.0), 20.0);
        for k in 0..5 {
            let t0 = k as f64 * tau;
            assert_eq!(train.eval_u(t0 + 0.25), 20.0);
            assert_eq!(train.eval_u(t0 + 1.0), -20.0 / 3.0);
            assert_eq!(train.eval_u(t0 + 3.0), 0.0);
        }
        // Negative times follow the same periodic extension.
        assert_eq!(train.eval_u(-tau + 0.25), 20.0);
    }

    #[test]
    fn alternating_train_places_secondary_at_offset() {
        let train = alternating_train(150.0, 0.5).unwrap();
        let tau = train.period();
        let tau2 = 0.5 * tau;
        assert_eq!(train.eval_u(tau2 + 0.1), 10.0);
        assert_eq!(train.eval_u(tau2 + 1.0), -10.0 / 3.0);
        assert_eq!(train.eval_u(tau2 - 0.05), 0.0);
        assert_eq!(train.eval_u(tau2 + 2.0 + 0.01), 0.0);
    }

    #[test]
    fn overlapping_configurations_are_rejected() {
        let p = Pulse::new(20.0, 0.5, 3.0).unwrap();
        let s = Pulse::new(10.0, 0.5, 3.0).unwrap();
        // Primary support (2 ms) longer than the period.
        assert!(matches!(
            PulseTrain::identical(p, 1.5),
            Err(StimulusError::PrimaryOverlap { .. })
        ));
        // Secondary starts before the primary ends.
        assert!(matches!(
            PulseTrain::alternating(p, 10.0, s, 1.0),
            Err(StimulusError::PrimaryOverlap { .. })
        ));
        // Secondary spills into the next period.
        assert!(matches!(
            PulseTrain::alternating(p, 10.0, s, 9.0),
            Err(StimulusError::SecondaryOverlap { .. })
        ));
        // Valid configuration.
        assert!(PulseTrain::alternating(p, 10.0, s, 5.0).is_ok());
    }

    #[test]
    fn preset_frequency_range_is_enforced() {
        assert!(identical_train(0.0).is_err());
        assert!(identical_train(-10.0).is_err());
        assert!(identical_train(2001.0).is_err());
        assert!(identical_train(100.0).is_ok());
        assert!(alternating_train(150.0, 0.5).is_ok());
        // At 600 Hz the 2 ms primary support no longer fits ahead of the
        // secondary pulse; the constructor reports the overlap.
        assert!(alternating_train(600.0, 0.5).is_err());
    }
}
