//! Tail curves `T ↦ ∫_T^{t_max} Π(t) dt`, their comparison, and the QC
//! "not found at the detector" probability.
//!
//! The tail of a QC density normalised over `T′ > t_max` is a joint
//! probability: arriving in `[T, t_max]` out of everything the clock could
//! register up to `T′`. It is a different quantity from the probability of
//! not finding the particle at the detector during `[0, T]`, which is
//! computed separately by [`qc_not_found_probability`].

use serde::Serialize;

use crate::distributions::{DistributionKind, SampledDistribution, Sampler, TimeGrid, QC_NORMALIZATION_STEP};
use crate::error::{Error, Result};
use crate::packet::{DetectorSpec, ObservationWindow, WavePacketSpec};
use crate::quadrature::simpson_fn;

/// Default agreement tolerance for tail comparisons.
pub const DEFAULT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCurve {
    pub kind: DistributionKind,
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

impl TailCurve {
    /// Largest `values[i+1] − values[i]`; non-positive for a nonincreasing curve.
    pub fn max_increase(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `n` equally spaced thresholds covering `[0, t_max]` inclusively.
pub fn uniform_thresholds(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| if i == n - 1 { t_max } else { t_max * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

pub fn tail_curve(dist: &SampledDistribution, thresholds: &[f64]) -> Result<TailCurve> {
    let t_max = dist.grid().t_max();
    if thresholds.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("thresholds", "must be sorted ascending"));
    }
    if let Some(bad) = thresholds.iter().find(|&&t| !(0.0..=t_max).contains(&t)) {
        return Err(Error::invalid(
            "thresholds",
            format!("{bad} outside [0, {t_max}]"),
        ));
    }
    let cum = dist.cumulative();
    let total = cum.total();
    let values = thresholds.iter().map(|&t| total - cum.at(t)).collect();
    Ok(TailCurve {
        kind: dist.kind(),
        thresholds: thresholds.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDeviation {
    pub pair: [DistributionKind; 2],
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// The pair attaining `global_max`.
    pub pair: [DistributionKind; 2],
    pub thresholds: Vec<f64>,
    /// Largest pairwise `|tail_A(T) − tail_B(T)|` at each threshold.
    pub per_threshold_deviation: Vec<f64>,
    pub pairwise: Vec<PairDeviation>,
    pub global_max: f64,
    pub agreement_flag: bool,
    pub tolerance: f64,
}

pub fn compare_tails(curves: &[TailCurve], tolerance: f64) -> Result<ComparisonReport> {
    if curves.len() < 2 {
        return Err(Error::invalid("curves", "need at least two tail curves"));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::invalid("tolerance", format!("must be positive, got {tolerance}")));
    }
    let thresholds = &curves[0].thresholds;
    if curves
        .iter()
        .any(|c| &c.thresholds != thresholds || c.values.len() != thresholds.len())
    {
        return Err(Error::invalid("thresholds", "curves do not share the same thresholds"));
    }

    let mut per_threshold = vec![0.0_f64; thresholds.len()];
    let mut pairwise = Vec::new();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            let mut worst = 0.0_f64;
            for (slot, (va, vb)) in per_threshold.iter_mut().zip(a.values.iter().zip(&b.values)) {
                let d = (va - vb).abs();
                *slot = slot.max(d);
                worst = worst.max(d);
            }
            pairwise.push(PairDeviation {
                pair: [a.kind, b.kind],
                max_deviation: worst,
            });
        }
    }
    let top = pairwise
        .iter()
        .fold(&pairwise[0], |best, p| if p.max_deviation > best.max_deviation { p } else { best });
    let global_max = top.max_deviation;
    Ok(ComparisonReport {
        pair: top.pair,
        thresholds: thresholds.clone(),
        per_threshold_deviation: per_threshold,
        global_max,
        agreement_flag: global_max < tolerance,
        pairwise: pairwise.clone(),
        tolerance,
    })
}

/// Probability that the particle is found inside the detector when the
/// observation instant is uniform on `[0, t_stop]`:
/// `(1/T) ∫_0^T P(x ∈ detector, t) dt`. Zero for a point detector.
///
/// This is the quantum counterpart of the classical `τ/T`.
pub fn qc_found_probability(packet: &WavePacketSpec, det: &DetectorSpec, t_stop: f64) -> Result<f64> {
    if !(t_stop.is_finite() && t_stop > 0.0) {
        return Err(Error::invalid("t_stop", format!("must be positive, got {t_stop}")));
    }
    if det.is_point() {
        return Ok(0.0);
    }
    let (a, b) = det.bounds();
    let intervals = (t_stop / QC_NORMALIZATION_STEP).ceil() as usize;
    let occupied = simpson_fn(|t| packet.probability_in(a, b, t), 0.0, t_stop, intervals);
    Ok((occupied / t_stop).clamp(0.0, 1.0))
}

/// `1 − qc_found_probability`: not finding the particle at the detector
/// during `[0, t_stop]`. Tends to 1 for large `t_stop` even though the
/// packet does cross the detector.
pub fn qc_not_found_probability(packet: &WavePacketSpec, det: &DetectorSpec, t_stop: f64) -> Result<f64> {
    Ok(1.0 - qc_found_probability(packet, det, t_stop)?)
}

/// Largest change of the QC tail curve when the normalisation window is
/// doubled from `T′` to `2T′`.
pub fn qc_window_sensitivity(
    sampler: &Sampler,
    packet: &WavePacketSpec,
    det: &DetectorSpec,
    window: &ObservationWindow,
    grid: &TimeGrid,
    thresholds: &[f64],
) -> Result<f64> {
    let doubled = ObservationWindow::new(window.t_stop(), 2.0 * window.normalization_stop())?;
    let a = tail_curve(&sampler.sample_qc(packet, det, window, grid)?, thresholds)?;
    let b = tail_curve(&sampler.sample_qc(packet, det, &doubled, grid)?, thresholds)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
