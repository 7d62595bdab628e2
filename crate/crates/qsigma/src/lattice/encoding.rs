use serde::{Deserialize, Serialize};

/// Site-local state: the singlet or a triplet with `J_z = m`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiteLabel {
    Singlet,
    Triplet(i8),
}

impl SiteLabel {
    pub fn m(self) -> i8 {
        match self {
            SiteLabel::Singlet => 0,
            SiteLabel::Triplet(m) => m,
        }
    }

    pub fn is_triplet(self) -> bool {
        matches!(self, SiteLabel::Triplet(_))
    }
}

/// Fixed map between site labels and two-qubit computational states.
///
/// `|00⟩ = |s⟩, |01⟩ = |−1⟩, |10⟩ = |0⟩, |11⟩ = |+1⟩`, written `|ab⟩`. The
/// site digit is `2a + b`; qubit `2x` carries `b` and qubit `2x + 1` carries
/// `a`, and a lattice basis index is `Σ_x digit_x · 4^x`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SiteEncoding;

impl SiteEncoding {
    pub const VERSION: &'static str = "site-encoding/1";

    pub const LABELS: [SiteLabel; 4] = [
        SiteLabel::Singlet,
        SiteLabel::Triplet(-1),
        SiteLabel::Triplet(0),
        SiteLabel::Triplet(1),
    ];

    #[inline]
    pub fn digit(label: SiteLabel) -> usize {
        match label {
            SiteLabel::Singlet => 0,
            SiteLabel::Triplet(m) => {
                assert!((-1..=1).contains(&m), "triplet m out of range");
                (m + 2) as usize
            }
        }
    }

    #[inline]
    pub fn label(digit: usize) -> SiteLabel {
        Self::LABELS[digit]
    }

    /// `(a, b)` qubit values.
    #[inline]
    pub fn bits(label: SiteLabel) -> (u8, u8) {
        let d = Self::digit(label);
        ((d >> 1) as u8, (d & 1) as u8)
    }

    pub fn bitstring(label: SiteLabel) -> String {
        let (a, b) = Self::bits(label);
        format!("{a}{b}")
    }

    pub fn from_bits(a: u8, b: u8) -> SiteLabel {
        Self::label(((a as usize) << 1) | b as usize)
    }
}

/// Digit of site `x` in basis index `s`.
#[inline]
pub fn site_digit(s: usize, x: usize) -> usize {
    (s >> (2 * x)) & 3
}

/// `J_z` eigenvalue of a site digit.
#[inline]
pub fn digit_m(d: usize) -> i32 {
    if d == 0 {
        0
    } else {
        d as i32 - 2
    }
}

#[inline]
pub fn with_digit(s: usize, x: usize, d: usize) -> usize {
    (s & !(3 << (2 * x))) | (d << (2 * x))
}
