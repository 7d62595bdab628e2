use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::noether::{site_charge, two_site_current};
use crate::linalg::{herm_norm, CMat};
use crate::scalar::C;
use crate::shadows::ShadowRecord;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Entry `(r, c)` of the single-qubit matrix; index 0 is the identity.
    fn entry(p: usize, r: usize, c: usize) -> C<f64> {
        let z = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        match (p, r, c) {
            (0, r, c) if r == c => one,
            (1, r, c) if r != c => one,
            (2, 0, 1) => C::new(0.0, -1.0),
            (2, 1, 0) => C::new(0.0, 1.0),
            (3, 0, 0) => one,
            (3, 1, 1) => -one,
            _ => z,
        }
    }

    fn from_index(p: usize) -> Option<Self> {
        match p {
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Non-identity factors `(qubit, Pauli)`, sorted by qubit.
pub type PauliString = Vec<(usize, Pauli)>;

/// Real linear combination of Pauli strings on global qubit indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    pub terms: Vec<(PauliString, f64)>,
}

/// Coefficients below this (relative to the largest) are dropped.
const PRUNE: f64 = 1e-12;

impl PauliSum {
    fn from_map(map: BTreeMap<PauliString, f64>) -> Self {
        let scale = map.values().fold(0.0f64, |m, c| m.max(c.abs()));
        let terms = map.into_iter().filter(|(_, c)| c.abs() > PRUNE * scale).collect();
        Self { terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut map: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (s, c) in self.terms.iter().chain(&other.terms) {
            *map.entry(s.clone()).or_insert(0.0) += c;
        }
        Self::from_map(map)
    }

    pub fn sum<'a>(parts: impl IntoIterator<Item = &'a PauliSum>) -> Self {
        parts.into_iter().fold(Self::default(), |acc, p| acc.add(p))
    }

    /// Largest Pauli weight; the locality `k` of the shadow guarantee.
    pub fn locality(&self) -> u32 {
        self.terms.iter().map(|(s, _)| s.len() as u32).max().unwrap_or(0)
    }

    /// Unbiased single-snapshot estimate: each factor contributes
    /// `3 (−1)^b` when measured in its own basis and 0 otherwise.
    pub fn single_shot(&self, r: &ShadowRecord) -> f64 {
        let mut total = 0.0;
        for (s, c) in &self.terms {
            let mut v = *c;
            for &(q, p) in s {
                if r.bases[q] != p {
                    v = 0.0;
                    break;
                }
                v *= if r.outcomes[q] == 0 { 3.0 } else { -3.0 };
            }
            total += v;
        }
        total
    }

    /// `⟨ψ|O|ψ⟩` for an amplitude vector.
    pub fn expectation(&self, amps: &[C<f64>]) -> f64 {
        let mut total = 0.0;
        for (s, c) in &self.terms {
            let (mut flip, mut zmask, mut n_y) = (0usize, 0usize, 0u32);
            for &(q, p) in s {
                match p {
                    Pauli::X => flip |= 1 << q,
                    Pauli::Y => {
                        flip |= 1 << q;
                        zmask |= 1 << q;
                        n_y += 1;
                    }
                    Pauli::Z => zmask |= 1 << q,
                }
            }
            // Y = i X Z, so P|j⟩ = i^{n_y} (−1)^{|j ∧ zmask|} |j ⊕ flip⟩
            let phase = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][(n_y % 4) as usize];
            let mut acc = C::new(0.0, 0.0);
            for (j, a) in amps.iter().enumerate() {
                let sign = if (j & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                acc += amps[j ^ flip].conj() * a * sign;
            }
            total += c * (phase * acc).re;
        }
        total
    }
}

/// Hermitian operator on a list of qubits. Bit `j` of the matrix index is
/// qubit `support[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalObservable {
    pub label: String,
    pub support: Vec<usize>,
    pub matrix: CMat<f64>,
    norm: f64,
    paulis: PauliSum,
}

impl LocalObservable {
    pub fn new(label: impl Into<String>, support: Vec<usize>, matrix: CMat<f64>) -> Result<Self> {
        let k = support.len();
        if k > 8 {
            return Err(Error::InvalidInput(format!("support of {k} qubits is too large for a local observable")));
        }
        let dim = 1usize << k;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.rows(),
            });
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err(Error::InvalidInput("support lists a qubit twice".into()));
        }
        if matrix.anti_hermiticity() > 1e-12 * matrix.max_abs().max(1.0) {
            return Err(Error::InvalidInput(format!("observable {} is not Hermitian", label_str(&matrix))));
        }
        let norm = herm_norm(&matrix)?;
        let paulis = decompose(&support, &matrix);
        Ok(Self {
            label: label.into(),
            support,
            matrix,
            norm,
            paulis,
        })
    }

    /// `‖O‖∞`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn paulis(&self) -> &PauliSum {
        &self.paulis
    }

    pub fn locality(&self) -> u32 {
        self.paulis.locality()
    }
}

fn label_str(m: &CMat<f64>) -> String {
    format!("{}x{}", m.rows(), m.cols())
}

/// `O = Σ_P c_P P` with `c_P = Tr(P O) / 2^k`.
fn decompose(support: &[usize], m: &CMat<f64>) -> PauliSum {
    let k = support.len();
    let dim = 1usize << k;
    let mut map = BTreeMap::new();
    for code in 0..(1usize << (2 * k)) {
        let ps: Vec<usize> = (0..k).map(|j| (code >> (2 * j)) & 3).collect();
        let mut tr = C::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                let mut p = C::new(1.0, 0.0);
                for (j, &pj) in ps.iter().enumerate() {
                    p *= Pauli::entry(pj, (r >> j) & 1, (c >> j) & 1);
                    if p.norm_sqr() == 0.0 {
                        break;
                    }
                }
                if p.norm_sqr() != 0.0 {
                    tr += p * m[(c, r)];
                }
            }
        }
        let coeff = tr.re / dim as f64;
        if coeff != 0.0 {
            let mut s: PauliString = ps
                .iter()
                .enumerate()
                .filter_map(|(j, &pj)| Pauli::from_index(pj).map(|p| (support[j], p)))
                .collect();
            s.sort_unstable();
            map.insert(s, coeff);
        }
    }
    PauliSum::from_map(map)
}

/// `Q_{z,x}` on the two qubits of site `x`.
pub fn charge_observable(x: usize) -> Result<LocalObservable> {
    LocalObservable::new(format!("Q[{x}]"), vec![2 * x, 2 * x + 1], site_charge::<f64>())
}

/// `J_{z,⟨a,b⟩}` from site `a` to site `b` for a single link of coupling `jr`.
pub fn current_observable(a: usize, b: usize, jr: f64) -> Result<LocalObservable> {
    if a == b {
        return Err(Error::InvalidInput("a link needs two distinct sites".into()));
    }
    LocalObservable::new(
        format!("J[{a}->{b}]"),
        vec![2 * a, 2 * a + 1, 2 * b, 2 * b + 1],
        two_site_current::<f64>(jr),
    )
}
