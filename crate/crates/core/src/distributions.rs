//! The four time-of-arrival densities on a uniform time grid.
//!
//! Raw densities (before normalisation):
//!
//! | kind | raw density |
//! |------|-------------|
//! | QC   | `|ψ(D,t)|²`, or the probability inside `[D−Δ/2, D+Δ/2]` for a finite detector |
//! | F    | `J(D,t) = Im[ψ* ∂ₓψ](D,t)` |
//! | K    | `(1/2π) |∫₀^∞ √p ψ̃(p) e^{ipD − ip²t/2} dp|²` |
//! | SC   | classical ensemble pushed through `t = (D − x)/p` |
//!
//! QC is normalised over the long window `[0, T′]`; the other three over the
//! sampled range `[0, t_max]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::packet::{
    evolve, evolve_with_derivative, momentum_density, DetectorSpec, ObservationWindow, WavePacketSpec,
};
use crate::quadrature::{even_at_least, simpson, Cumulative};

/// Normalisation integrals at or below this value are treated as "the
/// packet never reaches the detector".
pub const DEGENERATE_NORMALIZATION: f64 = 1e-100;

/// Time step used for the QC normalisation integral over `[0, T′]`.
pub const QC_NORMALIZATION_STEP: f64 = 1.0 / 400.0;

/// Half-width of the momentum window, in units of `1/σ0`, for the Kijowski
/// integral.
pub const MOMENTUM_HALF_WIDTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistributionKind {
    #[serde(rename = "QC")]
    QuantumClock,
    #[serde(rename = "K")]
    Kijowski,
    #[serde(rename = "F")]
    Flux,
    #[serde(rename = "SC")]
    SemiClassical,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 4] = [
        DistributionKind::QuantumClock,
        DistributionKind::Kijowski,
        DistributionKind::Flux,
        DistributionKind::SemiClassical,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DistributionKind::QuantumClock => "QC",
            DistributionKind::Kijowski => "K",
            DistributionKind::Flux => "F",
            DistributionKind::SemiClassical => "SC",
        }
    }

    /// Lower-case suffix used in CSV column names (`pi_qc`, `tail_k`, …).
    pub fn column(self) -> &'static str {
        match self {
            DistributionKind::QuantumClock => "qc",
            DistributionKind::Kijowski => "k",
            DistributionKind::Flux => "f",
            DistributionKind::SemiClassical => "sc",
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "QC" => Ok(DistributionKind::QuantumClock),
            "K" => Ok(DistributionKind::Kijowski),
            "F" => Ok(DistributionKind::Flux),
            "SC" => Ok(DistributionKind::SemiClassical),
            _ => Err(Error::invalid("kinds", format!("unknown distribution `{s}`"))),
        }
    }
}

/// Nodes `t_k = k·dt`, `k = 0 … n_samples`, with `dt = t_max / n_samples`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_max: f64,
    n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_samples: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::invalid("t_max", format!("must be positive, got {t_max}")));
        }
        if n_samples < 2 {
            return Err(Error::invalid("samples", format!("need at least 2, got {n_samples}")));
        }
        Ok(Self { t_max, n_samples })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_samples as f64
    }

    /// Number of nodes, `n_samples + 1`.
    pub fn len(&self) -> usize {
        self.n_samples + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_samples {
            self.t_max
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn refined(&self) -> TimeGrid {
        TimeGrid {
            t_max: self.t_max,
            n_samples: 2 * self.n_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledDistribution {
    kind: DistributionKind,
    grid: TimeGrid,
    density: Vec<f64>,
    normalization_constant: f64,
    normalization_window: f64,
}

impl SampledDistribution {
    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn normalization_constant(&self) -> f64 {
        self.normalization_constant
    }

    /// `T′` for QC, `t_max` for the others.
    pub fn normalization_window(&self) -> f64 {
        self.normalization_window
    }

    /// `∫_0^{t_max} Π(t) dt`; equals 1 unless the normalisation window is
    /// longer than the sampled range.
    pub fn mass(&self) -> f64 {
        simpson(&self.density, self.grid.dt())
    }

    pub fn cumulative(&self) -> Cumulative {
        Cumulative::new(0.0, self.grid.dt(), &self.density)
    }

    /// Time of the largest sample.
    pub fn mode(&self) -> f64 {
        let (k, _) = self
            .density
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
        self.grid.time(k)
    }

    fn from_raw(
        kind: DistributionKind,
        grid: TimeGrid,
        raw: Vec<f64>,
        normalization_constant: f64,
        normalization_window: f64,
    ) -> Result<Self> {
        if !(normalization_constant > DEGENERATE_NORMALIZATION) {
            return Err(Error::DegenerateNormalization {
                kind,
                value: normalization_constant,
            });
        }
        let density: Vec<f64> = raw.into_iter().map(|v| v / normalization_constant).collect();
        debug_assert!(density.iter().all(|v| v.is_finite()));
        Ok(Self {
            kind,
            grid,
            density,
            normalization_constant,
            normalization_window,
        })
    }
}

/// How the semi-classical ensemble is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiClassicalModel {
    /// Classical particles with independent position `|ψ(x,0)|²` and
    /// momentum `|ψ̃(p)|²` marginals, each arriving at `t = (D − x)/p`.
    #[default]
    PhaseSpace,
    /// Every particle starts at `x0`: `Π(t) = (|d|/t²) |ψ̃(d/t)|²`, `d = D − x0`.
    /// Ignores the initial position spread.
    PointSource,
}

impl FromStr for SemiClassicalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase-space" => Ok(SemiClassicalModel::PhaseSpace),
            "point-source" => Ok(SemiClassicalModel::PointSource),
            _ => Err(Error::invalid(
                "sc_model",
                format!("expected `phase-space` or `point-source`, got `{s}`"),
            )),
        }
    }
}

/// Numerical settings shared by all samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    pub execution: Execution,
    pub semiclassical: SemiClassicalModel,
    /// Minimum Simpson intervals for the Kijowski momentum integral.
    pub kijowski_min_nodes: usize,
    /// Upper bound on the phase advance per momentum node, in radians.
    pub kijowski_max_phase_step: f64,
    pub kijowski_max_nodes: usize,
    /// Simpson intervals per piece for the semi-classical position integral.
    pub ensemble_nodes: usize,
    pub qc_normalization_step: f64,
}

impl Default for Sampler {
    fn default() -> Self {
        Self {
            execution: Execution::default(),
            semiclassical: SemiClassicalModel::default(),
            kijowski_min_nodes: 4096,
            kijowski_max_phase_step: 0.05,
            kijowski_max_nodes: 1 << 18,
            ensemble_nodes: 1024,
            qc_normalization_step: QC_NORMALIZATION_STEP,
        }
    }
}

impl Sampler {
    pub fn with_execution(execution: Execution) -> Self {
        Self {
            execution,
            ..Self::default()
        }
    }

    /// Raw QC density: position density at the detector, or the probability
    /// inside it when it has a width.
    pub fn qc_raw(&self, packet: &WavePacketSpec, det: &DetectorSpec, t: f64) -> f64 {
        if det.is_point() {
            evolve(packet, det.position(), t).norm_sqr()
        } else {
            let (a, b) = det.bounds();
            packet.probability_in(a, b, t)
        }
    }

    /// `N(T′) = ∫_0^{T′} ρ(t) dt`.
    pub fn qc_normalization_constant(
        &self,
        packet: &WavePacketSpec,
        det: &DetectorSpec,
        t_prime: f64,
    ) -> Result<f64> {
        if !(t_prime.is_finite() && t_prime > 0.0) {
            return Err(Error::invalid("t_prime", format!("must be positive, got {t_prime}")));
        }
        let intervals = (t_prime / self.qc_normalization_step).ceil() as usize;
        self.qc_normalization_constant_with_intervals(packet, det, t_prime, intervals)
    }

    pub fn qc_normalization_constant_with_intervals(
        &self,
        packet: &WavePacketSpec,
        det: &DetectorSpec,
        t_prime: f64,
        intervals: usize,
    ) -> Result<f64> {
        if !(t_prime.is_finite() && t_prime > 0.0) {
            return Err(Error::invalid("t_prime", format!("must be positive, got {t_prime}")));
        }
        let n = even_at_least(intervals.max(2));
        let h = t_prime / n as f64;
        let raw = self.execution.map(n + 1, |k| self.qc_raw(packet, det, k as f64 * h));
        Ok(simpson(&raw, h))
    }

    pub fn sample_qc(
        &self,
        packet: &WavePacketSpec,
        det: &DetectorSpec,
        window: &ObservationWindow,
        grid: &TimeGrid,
    ) -> Result<SampledDistribution> {
        let t_prime = window.normalization_stop();
        if grid.t_max() > t_prime {
            return Err(Error::invalid(
                "t_prime",
                format!("normalization window {t_prime} shorter than grid t_max {}", grid.t_max()),
            ));
        }
        let norm = self.qc_normalization_constant(packet, det, t_prime)?;
        if !(norm > DEGENERATE_NORMALIZATION) {
            return Err(Error::DegenerateNormalization {
                kind: DistributionKind::QuantumClock,
                value: norm,
            });
        }
        let raw = self.execution.map(grid.len(), |k| self.qc_raw(packet, det, grid.time(k)));
        SampledDistribution::from_raw(DistributionKind::QuantumClock, *grid, raw, norm, t_prime)
    }

    /// Probability current at the detector position.
    pub fn flux_raw(&self, packet: &WavePacketSpec, det: &DetectorSpec, t: f64) -> f64 {
        let (psi, dpsi) = evolve_with_derivative(packet, det.position(), t);
        (psi.conj() * dpsi).im
    }

    pub fn sample_flux(
        &self,
        packet: &WavePacketSpec,
        det: &DetectorSpec,
        grid: &TimeGrid,
    ) -> Result<SampledDistribution> {
        let raw = self.execution.map(grid.len(), |k| self.flux_raw(packet, det, grid.time(k)));
        self.normalize_on_grid(DistributionKind::Flux, grid, raw)
    }

    /// Raw Kijowski density at time `t`.
    ///
    /// The momentum integral runs over `p ∈ [max(0, p0 − 10/σ0), p0 + 10/σ0]`
    /// in the variable `u = √p`, which turns the `√p dp` weight into the
    /// smooth `2u² du` and removes the endpoint singularity at `p = 0`.
    pub fn kijowski_raw(&self, packet: &WavePacketSpec, det: &DetectorSpec, t: f64) -> f64 {
        let s0 = packet.sigma0();
        let p_hi = packet.p0() + MOMENTUM_HALF_WIDTH / s0;
        if p_hi <= 0.0 {
            return 0.0;
        }
        let p_lo = (packet.p0() - MOMENTUM_HALF_WIDTH / s0).max(0.0);
        let (u_lo, u_hi) = (p_lo.sqrt(), p_hi.sqrt());
        let travel = det.position() - packet.x0();

        // phase φ(u) = u²(D − x0) − u⁴t/2, |φ'(u)| ≤ 2u|D − x0| + 2u³t
        let rate = 2.0 * u_hi * travel.abs() + 2.0 * u_hi.powi(3) * t;
        let wanted = (rate * (u_hi - u_lo) / self.kijowski_max_phase_step).ceil() as usize;
        let n = even_at_least(wanted.clamp(self.kijowski_min_nodes, self.kijowski_max_nodes));
        let h = (u_hi - u_lo) / n as f64;

        let s2 = s0 * s0;
        let amp0 = (2.0 * s2 / PI).powf(0.25);
        let term = |k: usize| -> Complex64 {
            let u = if k == n { u_hi } else { u_lo + k as f64 * h };
            let p = u * u;
            let amp = 2.0 * p * amp0 * (-s2 * (p - packet.p0()).powi(2)).exp();
            Complex64::from_polar(amp, p * travel - 0.5 * p * p * t)
        };
        let mut acc = term(0) + term(n);
        for k in 1..n {
            acc += term(k) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = acc * (h / 3.0);
        integral.norm_sqr() / (2.0 * PI)
    }

    pub fn sample_kijowski(
        &self,
        packet: &WavePacketSpec,
        det: &DetectorSpec,
        grid: &TimeGrid,
    ) -> Result<SampledDistribution> {
        let raw = self.execution.map(grid.len(), |k| self.kijowski_raw(packet, det, grid.time(k)));
        self.normalize_on_grid(DistributionKind::Kijowski, grid, raw)
    }

    /// Raw semi-classical density at time `t` for the configured model.
    pub fn semiclassical_raw(&self, packet: &WavePacketSpec, det: &DetectorSpec, t: f64) -> Result<f64> {
        let target = det.position();
        if target == packet.x0() {
            return Err(Error::UndefinedMap);
        }
        if t <= 0.0 {
            return Ok(0.0);
        }
        Ok(match self.semiclassical {
            SemiClassicalModel::PointSource => {
                let d = target - packet.x0();
                d.abs() / (t * t) * momentum_density(packet, d / t)
            }
            SemiClassicalModel::PhaseSpace => self.ensemble_density(packet, target, t),
        })
    }

    /// `∫ dx |ψ(x,0)|² (|D − x|/t²) |ψ̃((D − x)/t)|²`, restricted to the
    /// positions where both factors are non-negligible and split at `D`
    /// where the integrand has a kink.
    fn ensemble_density(&self, packet: &WavePacketSpec, target: f64, t: f64) -> f64 {
        let s0 = packet.sigma0();
        let pw = MOMENTUM_HALF_WIDTH / s0;
        let lo = (packet.x0() - 10.0 * s0).max(target - t * (packet.p0() + pw));
        let hi = (packet.x0() + 10.0 * s0).min(target - t * (packet.p0() - pw));
        if lo >= hi {
            return 0.0;
        }
        let integrand = |x: f64| {
            let d = target - x;
            evolve(packet, x, 0.0).norm_sqr() * d.abs() / (t * t) * momentum_density(packet, d / t)
        };
        let piece = |a: f64, b: f64| {
            let n = even_at_least(self.ensemble_nodes);
            let h = (b - a) / n as f64;
            let v: Vec<f64> = (0..=n).map(|k| integrand(a + k as f64 * h)).collect();
            simpson(&v, h)
        };
        if lo < target && target < hi {
            piece(lo, target) + piece(target, hi)
        } else {
            piece(lo, hi)
        }
    }

    pub fn sample_semiclassical(
        &self,
        packet: &WavePacketSpec,
        det: &DetectorSpec,
        grid: &TimeGrid,
    ) -> Result<SampledDistribution> {
        if det.position() == packet.x0() {
            return Err(Error::UndefinedMap);
        }
        let raw = self.execution.map(grid.len(), |k| {
            self.semiclassical_raw(packet, det, grid.time(k)).unwrap_or(0.0)
        });
        self.normalize_on_grid(DistributionKind::SemiClassical, grid, raw)
    }

    pub fn sample(
        &self,
        kind: DistributionKind,
        packet: &WavePacketSpec,
        det: &DetectorSpec,
        window: &ObservationWindow,
        grid: &TimeGrid,
    ) -> Result<SampledDistribution> {
        match kind {
            DistributionKind::QuantumClock => self.sample_qc(packet, det, window, grid),
            DistributionKind::Kijowski => self.sample_kijowski(packet, det, grid),
            DistributionKind::Flux => self.sample_flux(packet, det, grid),
            DistributionKind::SemiClassical => self.sample_semiclassical(packet, det, grid),
        }
    }

    fn normalize_on_grid(
        &self,
        kind: DistributionKind,
        grid: &TimeGrid,
        raw: Vec<f64>,
    ) -> Result<SampledDistribution> {
        let norm = simpson(&raw, grid.dt());
        SampledDistribution::from_raw(kind, *grid, raw, norm, grid.t_max())
    }
}

pub fn sample_qc(
    packet: &WavePacketSpec,
    det: &DetectorSpec,
    window: &ObservationWindow,
    grid: &TimeGrid,
) -> Result<SampledDistribution> {
    Sampler::default().sample_qc(packet, det, window, grid)
}

pub fn qc_normalization_constant(packet: &WavePacketSpec, det: &DetectorSpec, t_prime: f64) -> Result<f64> {
    Sampler::default().qc_normalization_constant(packet, det, t_prime)
}

pub fn sample_flux(packet: &WavePacketSpec, det: &DetectorSpec, grid: &TimeGrid) -> Result<SampledDistribution> {
    Sampler::default().sample_flux(packet, det, grid)
}

pub fn sample_kijowski(
    packet: &WavePacketSpec,
    det: &DetectorSpec,
    grid: &TimeGrid,
) -> Result<SampledDistribution> {
    Sampler::default().sample_kijowski(packet, det, grid)
}

pub fn sample_semiclassical(
    packet: &WavePacketSpec,
    det: &DetectorSpec,
    grid: &TimeGrid,
) -> Result<SampledDistribution> {
    Sampler::default().sample_semiclassical(packet, det, grid)
}
