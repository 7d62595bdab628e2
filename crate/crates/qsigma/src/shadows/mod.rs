//! Classical shadows from random single-qubit Pauli measurements.
//!
//! Qubit `q` of a state is bit `q` of its basis index, so site `x` owns
//! qubits `2x` (low bit `b`) and `2x + 1` (high bit `a`) of its digit `2a + b`.

mod observable;
mod sampling;
mod sweep;

pub use observable::{charge_observable, current_observable, LocalObservable, Pauli, PauliSum, PauliString};
pub use sampling::{sample_shadows, ShadowRecord};
pub use sweep::{time_sweep, Evolution, ObservableKind, SweepConfig, TimeRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Snapshot budget of a median-of-means estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Total snapshots `N`, rounded up.
    pub n_total: usize,
    /// Group count `n`, rounded up.
    pub groups: usize,
    /// `N` before rounding.
    pub n_total_raw: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub k: u32,
    pub obs_norm: f64,
    pub volume: f64,
}

/// `n = ⌈2 ln(2V/δ)⌉` groups and `N = 2 ln(2V/δ) · 34 · 4^k ‖O‖² / ε²`.
pub fn required_samples(epsilon: f64, delta: f64, k: u32, obs_norm: f64, volume: f64) -> Result<EstimatorConfig> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(volume > 0.0) {
        return Err(Error::InvalidInput(format!("volume must be positive, got {volume}")));
    }
    let groups_raw = 2.0 * (2.0 * volume / delta).ln();
    let raw = groups_raw * 34.0 * 4f64.powi(k as i32) * obs_norm * obs_norm / (epsilon * epsilon);
    Ok(EstimatorConfig {
        n_total: raw.ceil().max(1.0) as usize,
        groups: groups_raw.ceil().max(1.0) as usize,
        n_total_raw: raw,
        epsilon,
        delta,
        k,
        obs_norm,
        volume,
    })
}

/// Median of means over `groups` contiguous groups whose sizes differ by at
/// most one.
pub fn median_of_means(values: &[f64], groups: usize) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("no records to estimate from".into()));
    }
    if groups == 0 || groups > values.len() {
        return Err(Error::InvalidInput(format!(
            "cannot split {} records into {groups} non-empty groups",
            values.len()
        )));
    }
    let (base, extra) = (values.len() / groups, values.len() % groups);
    let mut means = Vec::with_capacity(groups);
    let mut start = 0;
    for g in 0..groups {
        let len = base + usize::from(g < extra);
        let slice = &values[start..start + len];
        means.push(slice.iter().sum::<f64>() / len as f64);
        start += len;
    }
    means.sort_by(f64::total_cmp);
    let mid = groups / 2;
    Ok(if groups % 2 == 1 {
        means[mid]
    } else {
        0.5 * (means[mid - 1] + means[mid])
    })
}

/// Median-of-means estimate of `obs`.
pub fn estimate(records: &[ShadowRecord], obs: &LocalObservable, groups: usize) -> Result<f64> {
    estimate_sum(records, obs.paulis(), groups)
}

/// Median-of-means estimate of a Pauli sum.
pub fn estimate_sum(records: &[ShadowRecord], obs: &PauliSum, groups: usize) -> Result<f64> {
    let shots: Vec<f64> = records.iter().map(|r| obs.single_shot(r)).collect();
    median_of_means(&shots, groups)
}

/// Estimate with its spread.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Single-shot sample standard deviation.
    pub shot_std: f64,
    /// Standard error of the median of means, `√(π/2) · shot_std / √N`.
    pub sigma: f64,
}

pub fn estimate_with_error(records: &[ShadowRecord], obs: &PauliSum, groups: usize) -> Result<Estimate> {
    let shots: Vec<f64> = records.iter().map(|r| obs.single_shot(r)).collect();
    let value = median_of_means(&shots, groups)?;
    let n = shots.len() as f64;
    let mean = shots.iter().sum::<f64>() / n;
    let var = if shots.len() > 1 {
        shots.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let shot_std = var.sqrt();
    Ok(Estimate {
        value,
        shot_std,
        sigma: (std::f64::consts::FRAC_PI_2).sqrt() * shot_std / n.sqrt(),
    })
}
