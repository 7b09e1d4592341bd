//! Spectral propagation of sampled states, used as an independent check on
//! the closed-form evolution in [`crate::packet`].
//!
//! Free evolution is diagonal in momentum, so a single multiplication by
//! `exp(−i k² Δt / 2)` between a forward and inverse FFT reaches any target
//! time without splitting error. The grid is periodic; the wrap-around guard
//! keeps the packet at least [`GUARD_SIGMAS`] standard deviations from both
//! edges over the whole step.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::packet::{self, WavePacketSpec};

/// Maximum `|ψ|` tolerated at the grid edges when sampling an initial state.
pub const EDGE_AMPLITUDE: f64 = 1e-12;
/// Minimum distance, in `σ_t`, between the packet centre and the grid edges.
pub const GUARD_SIGMAS: f64 = 6.0;

/// Default Fig. 1 grid: `[−40, 40]` with 8192 points.
pub const DEFAULT_X_MIN: f64 = -40.0;
pub const DEFAULT_X_MAX: f64 = 40.0;
pub const DEFAULT_POINTS: usize = 8192;

/// Packets × times used for the equivalence suite.
pub const ORACLE_PACKETS: [(f64, f64, f64); 3] = [(-10.0, 7.0, 1.0), (0.0, 0.0, 1.0), (-5.0, 2.0, 0.5)];
pub const ORACLE_TIMES: [f64; 5] = [0.0, 0.5, 1.0, 10.0 / 7.0, 3.0];

/// Wave function sampled on the periodic grid `x_j = x_min + j·dx`,
/// `j = 0 … n_points − 1`, `dx = (x_max − x_min)/n_points`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    x_min: f64,
    x_max: f64,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl GridState {
    pub fn new(x_min: f64, x_max: f64, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        check_grid(x_min, x_max, amplitudes.len())?;
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::invalid("time", format!("must be >= 0, got {time}")));
        }
        Ok(Self {
            x_min,
            x_max,
            amplitudes,
            time,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    /// Discrete L2 norm `Σ |ψ_j|² dx`.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx()
    }

    /// `(x_j, Re ψ_j, Im ψ_j)` rows for CSV dumps.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(j, a)| (self.x(j), a.re, a.im))
    }

    /// `⟨x⟩` and `⟨x²⟩ − ⟨x⟩²` of the sampled density.
    pub fn position_moments(&self) -> (f64, f64) {
        let norm = self.norm();
        let dx = self.dx();
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (j, a) in self.amplitudes.iter().enumerate() {
            let w = a.norm_sqr() * dx / norm;
            let x = self.x(j);
            m1 += w * x;
            m2 += w * x * x;
        }
        (m1, m2 - m1 * m1)
    }

    fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points();
        let dk = 2.0 * PI / (n as f64 * self.dx());
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                m * dk
            })
            .collect()
    }

    /// Spread of the freely evolved density `τ` time units after `self.time`,
    /// from the exact quadratic law `Var(τ) = Var_x + 2τ Cov_xp + τ² Var_p`.
    fn spread_law(&self, planner: &mut FftPlanner<f64>) -> SpreadLaw {
        let n = self.n_points();
        let k = self.wavenumbers();
        let mut spectrum = self.amplitudes.clone();
        planner.plan_fft_forward(n).process(&mut spectrum);

        let weight: f64 = spectrum.iter().map(|a| a.norm_sqr()).sum();
        let mean_p = spectrum.iter().zip(&k).map(|(a, k)| k * a.norm_sqr()).sum::<f64>() / weight;
        let mean_p2 = spectrum
            .iter()
            .zip(&k)
            .map(|(a, k)| k * k * a.norm_sqr())
            .sum::<f64>()
            / weight;

        // p̂ψ = IFFT(k ψ̂)
        let mut p_psi: Vec<Complex64> = spectrum.iter().zip(&k).map(|(a, k)| a * k).collect();
        planner.plan_fft_inverse(n).process(&mut p_psi);
        let inv_n = 1.0 / n as f64;
        let dx = self.dx();
        let norm = self.norm();
        let sym_xp = self
            .amplitudes
            .iter()
            .zip(&p_psi)
            .enumerate()
            .map(|(j, (a, pa))| (a.conj() * pa * inv_n).re * self.x(j))
            .sum::<f64>()
            * dx
            / norm;

        let (mean_x, var_x) = self.position_moments();
        SpreadLaw {
            mean_x,
            mean_p,
            var_x,
            cov: sym_xp - mean_x * mean_p,
            var_p: mean_p2 - mean_p * mean_p,
        }
    }
}

struct SpreadLaw {
    mean_x: f64,
    mean_p: f64,
    var_x: f64,
    cov: f64,
    var_p: f64,
}

impl SpreadLaw {
    fn extent(&self, tau: f64) -> (f64, f64) {
        let centre = self.mean_x + self.mean_p * tau;
        let var = (self.var_x + 2.0 * tau * self.cov + tau * tau * self.var_p).max(0.0);
        let reach = GUARD_SIGMAS * var.sqrt();
        (centre - reach, centre + reach)
    }
}

fn check_grid(x_min: f64, x_max: f64, n_points: usize) -> Result<()> {
    if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
        return Err(Error::invalid("x_max", format!("need x_max > x_min, got [{x_min}, {x_max}]")));
    }
    if n_points < 2 || !n_points.is_power_of_two() {
        return Err(Error::invalid("n_points", format!("must be a power of two, got {n_points}")));
    }
    Ok(())
}

/// Samples the Gaussian at time 0 on the grid and renormalises it there.
pub fn discretize(spec: &WavePacketSpec, x_min: f64, x_max: f64, n_points: usize) -> Result<GridState> {
    check_grid(x_min, x_max, n_points)?;
    for edge in [x_min, x_max] {
        let a = packet::evolve(spec, edge, 0.0).norm();
        if a >= EDGE_AMPLITUDE {
            return Err(Error::DomainTooSmall(format!(
                "|psi| = {a:e} at grid edge x = {edge} (limit {EDGE_AMPLITUDE:e})"
            )));
        }
    }
    let dx = (x_max - x_min) / n_points as f64;
    let mut amplitudes: Vec<Complex64> = (0..n_points)
        .map(|j| packet::evolve(spec, x_min + j as f64 * dx, 0.0))
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx;
    let scale = 1.0 / norm.sqrt();
    amplitudes.iter_mut().for_each(|a| *a *= scale);
    GridState::new(x_min, x_max, amplitudes, 0.0)
}

/// Evolves `state` freely to `t_target` in a single spectral step.
pub fn spectral_propagate(state: &GridState, t_target: f64) -> Result<GridState> {
    if !(t_target.is_finite() && t_target >= state.time) {
        return Err(Error::invalid(
            "t_target",
            format!("must be >= state time {}, got {t_target}", state.time),
        ));
    }
    let step = t_target - state.time;
    let mut planner = FftPlanner::new();
    let law = state.spread_law(&mut planner);
    for tau in [0.0, step] {
        let (lo, hi) = law.extent(tau);
        if lo < state.x_min || hi > state.x_max {
            return Err(Error::DomainTooSmall(format!(
                "packet reaches [{lo:.3}, {hi:.3}] at t = {}, grid is [{}, {}]",
                state.time + tau,
                state.x_min,
                state.x_max
            )));
        }
    }
    if step == 0.0 {
        return Ok(state.clone());
    }

    let n = state.n_points();
    let mut buf = state.amplitudes.clone();
    planner.plan_fft_forward(n).process(&mut buf);
    for (a, k) in buf.iter_mut().zip(state.wavenumbers()) {
        *a *= Complex64::from_polar(1.0 / n as f64, -0.5 * k * k * step);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    GridState::new(state.x_min, state.x_max, buf, t_target)
}

/// Outcome of comparing one spectral step against the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheck {
    pub x0: f64,
    pub p0: f64,
    pub sigma0: f64,
    pub t: f64,
    /// `max_j |ψ_spectral(x_j) − ψ(x_j, t)|`.
    pub max_deviation: f64,
    /// `|norm(t) − norm(0)|` on the grid.
    pub norm_drift: f64,
}

/// Propagates `spec` on the given grid to `t` and measures the deviation
/// from [`packet::psi_position`].
pub fn equivalence_check(
    spec: &WavePacketSpec,
    t: f64,
    x_min: f64,
    x_max: f64,
    n_points: usize,
) -> Result<OracleCheck> {
    let start = discretize(spec, x_min, x_max, n_points)?;
    let end = spectral_propagate(&start, t)?;
    let max_deviation = end
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| (a - packet::evolve(spec, end.x(j), t)).norm())
        .fold(0.0, f64::max);
    Ok(OracleCheck {
        x0: spec.x0(),
        p0: spec.p0(),
        sigma0: spec.sigma0(),
        t,
        max_deviation,
        norm_drift: (end.norm() - start.norm()).abs(),
    })
}

/// Runs [`equivalence_check`] over the packet × time matrix on the default grid.
pub fn equivalence_suite() -> Result<Vec<OracleCheck>> {
    let mut out = Vec::with_capacity(ORACLE_PACKETS.len() * ORACLE_TIMES.len());
    for (x0, p0, s0) in ORACLE_PACKETS {
        let spec = WavePacketSpec::new(x0, p0, s0)?;
        for t in ORACLE_TIMES {
            out.push(equivalence_check(&spec, t, DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_POINTS)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> WavePacketSpec {
        WavePacketSpec::new(-10.0, 7.0, 1.0).unwrap()
    }

    #[test]
    fn discretize_normalizes() {
        let g = discretize(&fig1(), -40.0, 40.0, 8192).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-9);
        assert_eq!(g.time(), 0.0);
        assert_eq!(g.n_points(), 8192);
    }

    #[test]
    fn discretize_rejects_narrow_domain() {
        assert!(matches!(
            discretize(&fig1(), -11.0, -9.0, 1024),
            Err(Error::DomainTooSmall(_))
        ));
    }

    #[test]
    fn discretize_rejects_bad_grid() {
        assert!(discretize(&fig1(), -40.0, 40.0, 1000).is_err());
        assert!(discretize(&fig1(), 40.0, -40.0, 1024).is_err());
    }

    #[test]
    fn centred_peak_sample() {
        let spec = WavePacketSpec::new(0.0, 0.0, 1.0).unwrap();
        let g = discretize(&spec, -40.0, 40.0, 8192).unwrap();
        assert_eq!(g.x(4096), 0.0);
        let peak = g.amplitudes()[4096].norm_sqr();
        assert!((peak - (2.0 * PI).powf(-0.5)).abs() < 1e-9);
    }

    #[test]
    fn zero_step_is_identity() {
        let g = discretize(&fig1(), -40.0, 40.0, 8192).unwrap();
        let h = spectral_propagate(&g, 0.0).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn backwards_rejected() {
        let g = discretize(&fig1(), -40.0, 40.0, 1024).unwrap();
        let g = spectral_propagate(&g, 1.0).unwrap();
        assert!(spectral_propagate(&g, 0.5).is_err());
    }

    #[test]
    fn matches_closed_form_at_flight_time() {
        let chk = equivalence_check(&fig1(), 10.0 / 7.0, -40.0, 40.0, 8192).unwrap();
        assert!(chk.max_deviation < 1e-8, "{chk:?}");
        assert!(chk.norm_drift < 1e-10);
    }

    #[test]
    fn detector_value_at_flight_time() {
        let spec = fig1();
        let g = spectral_propagate(&discretize(&spec, -40.0, 40.0, 8192).unwrap(), 10.0 / 7.0).unwrap();
        let j = 4096;
        assert_eq!(g.x(j), 0.0);
        let analytic = packet::psi_position(&spec, 0.0, 10.0 / 7.0).unwrap().norm_sqr();
        assert!((g.amplitudes()[j].norm_sqr() - analytic).abs() < 1e-8);
    }

    #[test]
    fn spreading_law() {
        let spec = WavePacketSpec::new(0.0, 0.0, 1.0).unwrap();
        let g = spectral_propagate(&discretize(&spec, -40.0, 40.0, 8192).unwrap(), 4.0).unwrap();
        let (mean, var) = g.position_moments();
        assert!(mean.abs() < 1e-9);
        // σ0²(1 + (t/2σ0²)²) = 1 + 4
        assert!((var - 5.0).abs() < 1e-6, "var={var}");
    }

    #[test]
    fn two_half_steps_equal_one_step() {
        let g = discretize(&fig1(), -40.0, 40.0, 8192).unwrap();
        let once = spectral_propagate(&g, 2.0).unwrap();
        let twice = spectral_propagate(&spectral_propagate(&g, 1.0).unwrap(), 2.0).unwrap();
        let dev = once
            .amplitudes()
            .iter()
            .zip(twice.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "dev={dev:e}");
    }

    #[test]
    fn wrap_around_guard() {
        // centre reaches +18 at t = 4 with σ_t = √5: 6σ_t overshoots the +25 edge
        let spec = WavePacketSpec::new(-10.0, 7.0, 1.0).unwrap();
        let g = discretize(&spec, -25.0, 25.0, 2048).unwrap();
        assert!(matches!(spectral_propagate(&g, 4.0), Err(Error::DomainTooSmall(_))));
        assert!(spectral_propagate(&g, 1.0).is_ok());
    }

    #[test]
    fn rows_cover_grid() {
        let g = discretize(&fig1(), -40.0, 40.0, 1024).unwrap();
        let rows: Vec<_> = g.rows().collect();
        assert_eq!(rows.len(), 1024);
        assert_eq!(rows[0].0, -40.0);
    }
}
