//! Weak-coupling perturbation theory and adiabatic resource estimates.

mod resources;

pub use resources::{
    critical_budget, staircase_correction, teufel_bound, weak_coupling_budget, BoundConstants, CriticalData,
    Regime, ResourceEstimate, SpacetimeDim,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `1 − 2d J_r + 3d J_r²`.
pub fn perturbative_gap(jr: f64, d: usize) -> f64 {
    let d = d as f64;
    1.0 - 2.0 * d * jr + 3.0 * d * jr * jr
}

/// Whether the second-order gap formula is still in `(0, 1]`.
///
/// It stops decreasing at `J_r = 1/3` and exceeds 1 beyond `J_r = 2/3`;
/// outside this range it should not drive a schedule.
pub fn perturbative_gap_in_range(jr: f64, d: usize) -> bool {
    let g = perturbative_gap(jr, d);
    g > 0.0 && g <= 1.0
}

/// Second-order gap with the first-order shift taken from the lowest
/// single-triplet band of a periodic lattice of length `l`.
///
/// For even `l` this is `perturbative_gap`; for odd `l` the band minimum is
/// `2d J_r cos(2π n/l)` with `n` nearest to `l/2`.
pub fn finite_size_gap(jr: f64, d: usize, l: usize) -> f64 {
    let n = l / 2;
    let shift = 2.0 * d as f64 * jr * (2.0 * PI * n as f64 / l as f64).cos();
    // a negative coupling puts the band minimum at zero momentum
    let shift = if jr >= 0.0 { shift } else { 2.0 * d as f64 * jr };
    1.0 + shift + 3.0 * d as f64 * jr * jr
}

/// `(1 + 3 J_r² L^d / 4)^{−1/2}`.
pub fn perturbative_overlap(jr: f64, l: usize, d: usize) -> f64 {
    let vol = (l as f64).powi(d as i32);
    (1.0 + 0.75 * jr * jr * vol).powf(-0.5)
}

/// First-order energy shift `2J_r Σ_i cos(2π n_i / L)` of the single-triplet
/// state with momentum integers `n`.
pub fn first_order_energies(n: &[usize], jr: f64, d: usize, l: usize) -> Result<f64> {
    if n.len() != d {
        return Err(Error::InvalidInput(format!("momentum has {} components, expected {d}", n.len())));
    }
    if let Some(&bad) = n.iter().find(|&&ni| ni >= l) {
        return Err(Error::InvalidInput(format!("momentum integer {bad} outside [0, {l})")));
    }
    Ok(n.iter().map(|&ni| 2.0 * jr * (2.0 * PI * ni as f64 / l as f64).cos()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(perturbative_gap(0.0, 3), 1.0);
        assert!((perturbative_gap(0.05, 1) - 0.9075).abs() < 1e-15);
        assert!((perturbative_gap(0.05, 2) - 0.815).abs() < 1e-15);
        assert!((perturbative_overlap(0.1, 2, 1) - 1.015f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(perturbative_overlap(0.0, 7, 2), 1.0);
    }

    #[test]
    fn overlap_decreases_with_volume() {
        let v: Vec<f64> = (2..8).map(|l| perturbative_overlap(0.1, l, 2)).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn band_edges() {
        assert!((first_order_energies(&[3], 0.1, 1, 6).unwrap() + 0.2).abs() < 1e-15);
        assert!((first_order_energies(&[0, 0], 0.1, 2, 5).unwrap() - 0.4).abs() < 1e-15);
        assert!(first_order_energies(&[6], 0.1, 1, 6).is_err());
        assert!(first_order_energies(&[1], 0.1, 2, 6).is_err());
    }

    #[test]
    fn finite_size_gap_matches_even_lattices() {
        for l in [2, 4, 10] {
            assert!((finite_size_gap(0.07, 2, l) - perturbative_gap(0.07, 2)).abs() < 1e-15);
        }
        // cos(2π/3) = −1/2 halves the shift
        assert!((finite_size_gap(0.1, 2, 3) - (1.0 - 0.2 + 0.06)).abs() < 1e-14);
    }

    #[test]
    fn validity_range() {
        assert!(perturbative_gap_in_range(0.3, 1));
        assert!(!perturbative_gap_in_range(0.7, 1));
        assert!(!perturbative_gap_in_range(1.0 / 3.0, 4));
    }
}
