//! Clebsch–Gordan coefficients and the two-site coupled basis.

use crate::lattice::encoding::SiteLabel;
use crate::linalg::Mat;
use crate::scalar::Real;

fn fact(n: i32) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// `⟨j1 m1; j2 m2 | J M⟩` for integer spins (Racah formula, Condon–Shortley
/// phases).
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    if j < (j1 - j2).abs() || j > j1 + j2 {
        return 0.0;
    }
    let pre = ((2 * j + 1) as f64 * fact(j + j1 - j2) * fact(j - j1 + j2) * fact(j1 + j2 - j)
        / fact(j1 + j2 + j + 1))
    .sqrt();
    let pre2 = (fact(j + m) * fact(j - m) * fact(j1 - m1) * fact(j1 + m1) * fact(j2 - m2) * fact(j2 + m2)).sqrt();
    let mut sum = 0.0;
    for k in 0..=(j1 + j2 + j) {
        let dens = [k, j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
        if dens.iter().any(|&x| x < 0) {
            continue;
        }
        let den: f64 = dens.iter().map(|&x| fact(x)).product();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / den;
    }
    pre * pre2 * sum
}

/// Coupling channel `l1 ⊕ l2` of a coupled two-site state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    TripletTriplet,
    TripletSinglet,
    SingletTriplet,
    SingletSinglet,
}

impl Channel {
    pub fn label(self) -> &'static str {
        match self {
            Channel::TripletTriplet => "1+1",
            Channel::TripletSinglet => "1+0",
            Channel::SingletTriplet => "0+1",
            Channel::SingletSinglet => "0+0",
        }
    }
}

/// Label `(J, M, channel)` of a coupled basis state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoupledLabel {
    pub j: i32,
    pub m: i32,
    pub channel: Channel,
}

/// Order of the coupled basis: `J = 2` (M = −2..2); then the three `J = 1`
/// channels `1⊕1, 1⊕0, 0⊕1`, each with M = −1, 0, 1; then `J = 0` as `1⊕1`
/// followed by `0⊕0`.
pub fn coupled_labels() -> Vec<CoupledLabel> {
    let mut v = Vec::with_capacity(16);
    for m in -2..=2 {
        v.push(CoupledLabel { j: 2, m, channel: Channel::TripletTriplet });
    }
    for ch in [Channel::TripletTriplet, Channel::TripletSinglet, Channel::SingletTriplet] {
        for m in -1..=1 {
            v.push(CoupledLabel { j: 1, m, channel: ch });
        }
    }
    v.push(CoupledLabel { j: 0, m: 0, channel: Channel::TripletTriplet });
    v.push(CoupledLabel { j: 0, m: 0, channel: Channel::SingletSinglet });
    v
}

fn product_index(a: SiteLabel, b: SiteLabel) -> usize {
    use crate::lattice::encoding::SiteEncoding;
    SiteEncoding::digit(a) + 4 * SiteEncoding::digit(b)
}

/// Real orthogonal `U` with `U[k][p] = ⟨k|p⟩` from product index
/// `p = d_first + 4 d_second` to the coupled basis of [`coupled_labels`].
pub fn cg_transform<T: Real>() -> Mat<T> {
    let mut u = Mat::zeros(16, 16);
    for (k, lab) in coupled_labels().iter().enumerate() {
        match lab.channel {
            Channel::TripletTriplet => {
                for m1 in -1..=1 {
                    let m2 = lab.m - m1;
                    if m2.abs() > 1 {
                        continue;
                    }
                    let c = clebsch_gordan(1, m1, 1, m2, lab.j, lab.m);
                    let p = product_index(SiteLabel::Triplet(m1 as i8), SiteLabel::Triplet(m2 as i8));
                    u[(k, p)] = T::lit(c);
                }
            }
            Channel::TripletSinglet => {
                u[(k, product_index(SiteLabel::Triplet(lab.m as i8), SiteLabel::Singlet))] = T::one();
            }
            Channel::SingletTriplet => {
                u[(k, product_index(SiteLabel::Singlet, SiteLabel::Triplet(lab.m as i8)))] = T::one();
            }
            Channel::SingletSinglet => {
                u[(k, product_index(SiteLabel::Singlet, SiteLabel::Singlet))] = T::one();
            }
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_coefficients() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((clebsch_gordan(1, 1, 1, -1, 2, 0) - (1.0f64 / 6.0).sqrt()).abs() < 1e-14);
        assert!((clebsch_gordan(1, 1, 1, -1, 1, 0) - s2).abs() < 1e-14);
        assert!((clebsch_gordan(1, 0, 1, 0, 1, 0)).abs() < 1e-14);
        assert!((clebsch_gordan(1, 1, 1, -1, 0, 0) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((clebsch_gordan(1, 0, 1, 0, 0, 0) + 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((clebsch_gordan(1, 1, 1, 1, 2, 2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn transform_is_orthogonal() {
        let u = cg_transform::<f64>();
        let p = u.matmul(&u.transpose());
        assert!(p.sub(&Mat::identity(16)).max_abs() < 1e-12);
    }
}
