//! Cross-check of the link terms against the truncated spherical-harmonic
//! algebra on `l ≤ 1`.

use serde::Serialize;

use crate::lattice::cg::clebsch_gordan;
use crate::lattice::hamiltonian::{two_site_matrix, Terms};
use crate::linalg::{CMat, Mat};
use crate::scalar::C;

/// Site index of `|l, m⟩` in `[s, −1, 0, +1]`.
fn site_index(l: i32, m: i32) -> usize {
    if l == 0 {
        0
    } else {
        (m + 2) as usize
    }
}

/// Truncated operator `Ŷ^m_1` on one site, with
/// `⟨l'm'|Ŷ^m|l m_l⟩ = 3 √((2l+1)/(2l'+1)) ⟨l 0; 1 0|l' 0⟩ ⟨l m_l; 1 m|l' m'⟩`,
/// so that `Ŷ^m|s⟩ = √3 |1, m⟩`.
pub fn y1(m: i32) -> Mat<f64> {
    let mut y = Mat::zeros(4, 4);
    for l in 0..=1 {
        for ml in -l..=l {
            for lp in 0..=1 {
                let mp = ml + m;
                if mp.abs() > lp {
                    continue;
                }
                let amp = 3.0 * ((2 * l + 1) as f64 / (2 * lp + 1) as f64).sqrt()
                    * clebsch_gordan(l, 0, 1, 0, lp, 0)
                    * clebsch_gordan(l, ml, 1, m, lp, mp);
                y[(site_index(lp, mp), site_index(l, ml))] = amp;
            }
        }
    }
    y
}

/// `Σ_m (−1)^m Ŷ^m(first) Ŷ^{−m}(second)` on two sites.
pub fn h_phi() -> Mat<f64> {
    let mut h = Mat::zeros(16, 16);
    for m in -1..=1 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = y1(-m).kron(&y1(m)).scale(sign);
        h = h.add(&term);
    }
    h
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationReport {
    /// `H_φ = constant · (H_p + H_h)` once triplet states are rephased by `i`.
    pub constant: f64,
    /// Same constant including the `4π/3` prefactor of `φ_i·φ_j`.
    pub constant_with_sphere_prefactor: f64,
    pub residual: f64,
    /// Coefficients of `H_h` and `H_p` without rephasing.
    pub raw_hop_coefficient: f64,
    pub raw_pair_coefficient: f64,
    pub raw_residual: f64,
    /// `⟨ss|H_φ|m,−m⟩ (−1)^m` for `m = −1, 0, 1`, rephased basis.
    pub pair_amplitudes: [f64; 3],
    /// `Ŷ^0|s⟩` component along `|1, 0⟩`.
    pub y0_on_singlet: f64,
}

fn project(h: &Mat<f64>, basis: &[Mat<f64>]) -> (Vec<f64>, f64) {
    let n = basis.len();
    let gram = Mat::from_fn(n, n, |i, j| dot(&basis[i], &basis[j]));
    let rhs: Vec<f64> = basis.iter().map(|b| dot(b, h)).collect();
    // the link pieces are orthogonal, so the Gram matrix is diagonal
    let coef: Vec<f64> = (0..n).map(|i| rhs[i] / gram[(i, i)]).collect();
    let mut fit = Mat::zeros(16, 16);
    for (c, b) in coef.iter().zip(basis) {
        fit = fit.add(&b.scale(*c));
    }
    (coef, h.sub(&fit).frobenius())
}

fn dot(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

/// Builds `H_φ`, compares it with the link terms and reports the constants.
pub fn verify_truncation() -> TruncationReport {
    let raw = h_phi();
    let hop = two_site_matrix::<f64>(0.0, 0.0, 1.0, Terms::HOP);
    let pair = two_site_matrix::<f64>(0.0, 0.0, 1.0, Terms::PAIR);
    let (coef, raw_residual) = project(&raw, &[hop.clone(), pair.clone()]);

    // |m⟩ → i|m⟩ on every site
    let phase = CMat::from_fn(4, 4, |i, j| match (i == j, i) {
        (true, 0) => C::new(1.0, 0.0),
        (true, _) => C::new(0.0, 1.0),
        _ => C::new(0.0, 0.0),
    });
    let d = phase.kron(&phase);
    let rephased = d.adjoint().matmul(&raw.to_complex()).matmul(&d);
    let imag = rephased.im().frobenius();
    let link = hop.add(&pair);
    let (c, res) = project(&rephased.re(), &[link]);
    let rr = rephased.re();
    let pair_amplitudes = [-1i32, 0, 1].map(|m| {
        let t = (m + 2) as usize + 4 * (2 - m) as usize;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        rr[(0, t)] * sign
    });
    TruncationReport {
        constant: c[0],
        constant_with_sphere_prefactor: c[0] * 4.0 * std::f64::consts::PI / 3.0,
        residual: (res * res + imag * imag).sqrt(),
        raw_hop_coefficient: coef[0],
        raw_pair_coefficient: coef[1],
        raw_residual,
        pair_amplitudes,
        y0_on_singlet: y1(0)[(2, 0)],
    }
}
