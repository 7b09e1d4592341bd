//! Natural units, the Gaussian wave packet and its exact free evolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ħ = m = ω = 1`; every length is a multiple of `l0 = √(ħ/mω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
}

impl UnitSystem {
    pub const NATURAL: UnitSystem = UnitSystem {
        hbar: 1.0,
        mass: 1.0,
        omega: 1.0,
    };

    /// Oscillator length of the preparation trap.
    pub fn l0(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::NATURAL
    }
}

/// Gaussian initial state: centre `x0` (l0), mean momentum `p0` (ħ/l0) and
/// position spread `sigma0` (l0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    x0: f64,
    p0: f64,
    sigma0: f64,
}

impl WavePacketSpec {
    pub fn new(x0: f64, p0: f64, sigma0: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::invalid("x0", "must be finite"));
        }
        if !p0.is_finite() {
            return Err(Error::invalid("p0", "must be finite"));
        }
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(Error::invalid("sigma0", format!("must be positive, got {sigma0}")));
        }
        Ok(Self { x0, p0, sigma0 })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Centre of `|ψ(x,t)|²`, riding the classical trajectory.
    pub fn center(&self, t: f64) -> f64 {
        self.x0 + self.p0 * t
    }

    /// Position spread `σ_t = σ0 √(1 + (t/2σ0²)²)`.
    pub fn sigma_t(&self, t: f64) -> f64 {
        let r = t / (2.0 * self.sigma0 * self.sigma0);
        self.sigma0 * (1.0 + r * r).sqrt()
    }

    /// Probability of finding the particle in `[a, b]` at time `t`.
    ///
    /// `|ψ(x,t)|²` is a normal density with mean [`center`](Self::center) and
    /// standard deviation [`sigma_t`](Self::sigma_t), so this is a
    /// difference of normal CDFs, evaluated on the side that avoids
    /// cancellation.
    pub fn probability_in(&self, a: f64, b: f64, t: f64) -> f64 {
        use libm::erfc;
        let mu = self.center(t);
        let s = self.sigma_t(t) * std::f64::consts::SQRT_2;
        let (za, zb) = ((a - mu) / s, (b - mu) / s);
        let p = if za >= 0.0 {
            0.5 * (erfc(za) - erfc(zb))
        } else if zb <= 0.0 {
            0.5 * (erfc(-zb) - erfc(-za))
        } else {
            1.0 - 0.5 * erfc(-za) - 0.5 * erfc(zb)
        };
        p.max(0.0)
    }
}

/// Detector at `position` (l0) covering `[D − width/2, D + width/2]`;
/// `width = 0` is a point detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    position: f64,
    width: f64,
}

impl DetectorSpec {
    pub fn new(position: f64, width: f64) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::invalid("detector", "must be finite"));
        }
        if !(width.is_finite() && width >= 0.0) {
            return Err(Error::invalid("det_width", format!("must be >= 0, got {width}")));
        }
        Ok(Self { position, width })
    }

    pub fn point(position: f64) -> Result<Self> {
        Self::new(position, 0.0)
    }

    pub fn position(&self) -> f64 {
        self.position
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn is_point(&self) -> bool {
        self.width == 0.0
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.position - 0.5 * self.width, self.position + 0.5 * self.width)
    }
}

/// Observation runs over `[0, t_stop]`; the quantum-clock density is
/// normalised over the longer `[0, normalization_stop]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationWindow {
    t_stop: f64,
    normalization_stop: f64,
}

impl ObservationWindow {
    pub fn new(t_stop: f64, normalization_stop: f64) -> Result<Self> {
        if !(t_stop.is_finite() && t_stop > 0.0) {
            return Err(Error::invalid("t_max", format!("must be positive, got {t_stop}")));
        }
        if !(normalization_stop.is_finite() && normalization_stop >= t_stop) {
            return Err(Error::invalid(
                "t_prime",
                format!("must be >= t_max ({t_stop}), got {normalization_stop}"),
            ));
        }
        Ok(Self {
            t_stop,
            normalization_stop,
        })
    }

    pub fn t_start(&self) -> f64 {
        0.0
    }

    pub fn t_stop(&self) -> f64 {
        self.t_stop
    }

    pub fn normalization_stop(&self) -> f64 {
        self.normalization_stop
    }
}

/// `ψ(x, 0)` for a validated packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    spec: WavePacketSpec,
}

impl InitialState {
    pub fn spec(&self) -> &WavePacketSpec {
        &self.spec
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        evolve(&self.spec, x, 0.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        self.amplitude(x).norm_sqr()
    }
}

pub fn make_gaussian(spec: WavePacketSpec) -> Result<InitialState> {
    // re-validate: the fields may have come through serde
    let spec = WavePacketSpec::new(spec.x0, spec.p0, spec.sigma0)?;
    Ok(InitialState { spec })
}

/// Closed-form free evolution `ψ(x, t)` for `t ≥ 0`.
pub fn psi_position(spec: &WavePacketSpec, x: f64, t: f64) -> Result<Complex64> {
    check_time(t)?;
    Ok(evolve(spec, x, t))
}

/// `∂ψ/∂x` at `(x, t)`, differentiated analytically.
pub fn dpsi_dx(spec: &WavePacketSpec, x: f64, t: f64) -> Result<Complex64> {
    check_time(t)?;
    Ok(evolve_with_derivative(spec, x, t).1)
}

/// `(ψ, ∂ψ/∂x)` at `(x, t)`.
pub fn psi_and_derivative(spec: &WavePacketSpec, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
    check_time(t)?;
    Ok(evolve_with_derivative(spec, x, t))
}

/// Momentum-space amplitude `ψ̃(p) = (2σ0²/π)^{1/4} exp(−σ0²(p−p0)² − i p x0)`.
pub fn psi_momentum(spec: &WavePacketSpec, p: f64) -> Complex64 {
    let s2 = spec.sigma0 * spec.sigma0;
    let amp = (2.0 * s2 / PI).powf(0.25) * (-s2 * (p - spec.p0).powi(2)).exp();
    Complex64::from_polar(amp, -p * spec.x0)
}

/// `|ψ̃(p)|²`, a normal density in `p` with mean `p0` and variance `1/(4σ0²)`.
pub fn momentum_density(spec: &WavePacketSpec, p: f64) -> f64 {
    let s2 = spec.sigma0 * spec.sigma0;
    (2.0 * s2 / PI).sqrt() * (-2.0 * s2 * (p - spec.p0).powi(2)).exp()
}

/// `∫_0^∞ |ψ̃(p)|² dp` in closed form.
pub fn right_mover_mass(spec: &WavePacketSpec) -> f64 {
    // p ~ N(p0, 1/(4σ0²)) so P(p > 0) = erfc(−√2 σ0 p0)/2
    0.5 * libm::erfc(-std::f64::consts::SQRT_2 * spec.sigma0 * spec.p0)
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    Ok(())
}

pub(crate) fn evolve(spec: &WavePacketSpec, x: f64, t: f64) -> Complex64 {
    let s2 = spec.sigma0 * spec.sigma0;
    let a = Complex64::new(1.0, t / (2.0 * s2));
    let xi = x - spec.x0 - spec.p0 * t;
    let exponent = -Complex64::new(xi * xi, 0.0) / (4.0 * s2 * a)
        + Complex64::i() * (spec.p0 * (x - spec.x0) - 0.5 * spec.p0 * spec.p0 * t);
    (2.0 * PI * s2).powf(-0.25) / a.sqrt() * exponent.exp()
}

pub(crate) fn evolve_with_derivative(spec: &WavePacketSpec, x: f64, t: f64) -> (Complex64, Complex64) {
    let psi = evolve(spec, x, t);
    let s2 = spec.sigma0 * spec.sigma0;
    let a = Complex64::new(1.0, t / (2.0 * s2));
    let xi = x - spec.x0 - spec.p0 * t;
    let log_slope = -Complex64::new(xi, 0.0) / (2.0 * s2 * a) + Complex64::new(0.0, spec.p0);
    (psi, psi * log_slope)
}
