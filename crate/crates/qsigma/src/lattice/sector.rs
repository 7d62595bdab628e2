//! Symmetry-restricted bases: fixed total `M` and singlet parity, with
//! translation maps for momentum projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::encoding::{digit_m, site_digit};
use crate::lattice::geometry::Lattice;
use crate::lattice::hamiltonian::{link_row, onsite_energy};
use crate::lattice::params::ModelParams;
use crate::linalg::Csr;
use crate::scalar::Real;

/// Quantum numbers selecting a sector.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorSpec {
    pub m: i32,
    /// `Some(true)` keeps an even number of singlet sites, `Some(false)` an odd
    /// number, `None` both.
    pub even_singlets: Option<bool>,
}

impl SectorSpec {
    /// Sector containing the all-singlet state of `n_sites` sites.
    pub fn ground(n_sites: usize) -> Self {
        Self {
            m: 0,
            even_singlets: Some(n_sites % 2 == 0),
        }
    }

    pub fn contains(&self, s: usize, n_sites: usize) -> bool {
        let mut m = 0;
        let mut singlets = 0;
        for x in 0..n_sites {
            let d = site_digit(s, x);
            m += digit_m(d);
            singlets += (d == 0) as usize;
        }
        m == self.m && self.even_singlets.map_or(true, |e| (singlets % 2 == 0) == e)
    }
}

/// Sorted list of full-space basis indices spanning a sector.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    pub lattice: Lattice,
    pub spec: SectorSpec,
    states: Vec<usize>,
}

impl SectorBasis {
    /// Enumerates the sector by depth-first search over site digits.
    pub fn new(lattice: Lattice, spec: SectorSpec, cap: usize) -> Result<Self> {
        let n = lattice.n_sites();
        if 2 * n >= usize::BITS as usize {
            return Err(Error::Resource {
                what: "qubit count",
                requested: 2 * n as u128,
                cap: usize::BITS as u128 - 1,
            });
        }
        let mut states = Vec::new();
        let mut stack: Vec<(usize, usize, i32, usize)> = vec![(0, 0, 0, 0)];
        while let Some((x, s, m, singlets)) = stack.pop() {
            if x == n {
                if m == spec.m && spec.even_singlets.map_or(true, |e| (singlets % 2 == 0) == e) {
                    states.push(s);
                    if states.len() > cap {
                        return Err(Error::Resource {
                            what: "sector dimension",
                            requested: states.len() as u128,
                            cap: cap as u128,
                        });
                    }
                }
                continue;
            }
            let left = (n - x - 1) as i32;
            for d in 0..4usize {
                let nm = m + digit_m(d);
                if (nm - spec.m).abs() > left {
                    continue;
                }
                stack.push((x + 1, s | (d << (2 * x)), nm, singlets + (d == 0) as usize));
            }
        }
        states.sort_unstable();
        Ok(Self { lattice, spec, states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn index_of(&self, s: usize) -> Option<usize> {
        self.states.binary_search(&s).ok()
    }

    /// Restricted on-site diagonal and unit-coupling link operator.
    pub fn hamiltonian_parts<T: Real>(&self, params: &ModelParams) -> Result<(Vec<T>, Csr<T>)> {
        if params.lattice()? != self.lattice {
            return Err(Error::InvalidInput("parameters do not match the sector lattice".into()));
        }
        let n = self.lattice.n_sites();
        let links = self.lattice.links();
        let diag = self
            .states
            .iter()
            .map(|&s| T::lit(onsite_energy(s, n, params.j, params.mu)))
            .collect();
        let off = Csr::from_row_fn(self.dim(), |i| {
            let mut row = Vec::new();
            link_row(self.states[i], &links, true, true, |t, a| {
                let j = self.index_of(t).expect("link terms conserve the sector");
                row.push((j, T::lit(a)));
            });
            row
        });
        Ok((diag, off))
    }

    /// Full Hamiltonian restricted to the sector.
    pub fn hamiltonian<T: Real>(&self, params: &ModelParams) -> Result<Csr<T>> {
        let (diag, off) = self.hamiltonian_parts::<T>(params)?;
        Ok(Csr::diagonal_matrix(&diag).combine(T::one(), &off, T::lit(params.jr)))
    }

    /// Index permutation of the translation by `shift`.
    pub fn translation_map(&self, shift: &[usize]) -> Vec<u32> {
        let perm = self.lattice.translation(shift);
        self.states
            .iter()
            .map(|&s| {
                let t = permute_sites(s, &perm);
                self.index_of(t).expect("translations conserve the sector") as u32
            })
            .collect()
    }

    /// Copies a sector vector into the full `4^n`-dimensional space.
    pub fn embed<E: Copy + num_traits::Zero>(&self, v: &[E], full_cap: usize) -> Result<Vec<E>> {
        let full = 1usize
            .checked_shl(2 * self.lattice.n_sites() as u32)
            .filter(|&f| f <= full_cap)
            .ok_or(Error::Resource {
                what: "embedding dimension",
                requested: 4u128.pow(self.lattice.n_sites() as u32),
                cap: full_cap as u128,
            })?;
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let mut out = vec![E::zero(); full];
        for (&s, &a) in self.states.iter().zip(v) {
            out[s] = a;
        }
        Ok(out)
    }
}

/// Moves the digit of site `x` to site `perm[x]`.
pub fn permute_sites(s: usize, perm: &[usize]) -> usize {
    perm.iter()
        .enumerate()
        .fold(0, |acc, (x, &y)| acc | (site_digit(s, x) << (2 * y)))
}

/// Real projector onto the momenta `{k, −k}` inside a sector.
///
/// `k` holds integers `n_i` with `k_i = 2π n_i / L`. The projector is
/// `(c/N) Σ_r cos(k·r) T_r` with `c = 1` when `k ≡ −k` and `c = 2` otherwise.
pub struct MomentumProjector<T> {
    maps: Vec<Vec<u32>>,
    weights: Vec<T>,
}

impl<T: Real> MomentumProjector<T> {
    pub fn new(basis: &SectorBasis, k: &[usize]) -> Self {
        let lat = basis.lattice;
        let n = lat.n_sites() as f64;
        let self_conj = k.iter().all(|&ki| (2 * ki) % lat.l == 0);
        let c = if self_conj { 1.0 } else { 2.0 };
        let mut maps = Vec::new();
        let mut weights = Vec::new();
        for r in lat.displacements() {
            let phase: f64 = k
                .iter()
                .zip(&r)
                .map(|(&ki, &ri)| 2.0 * std::f64::consts::PI * (ki * ri) as f64 / lat.l as f64)
                .sum();
            let w = c * phase.cos() / n;
            if w.abs() < 1e-15 {
                continue;
            }
            maps.push(basis.translation_map(&r));
            weights.push(T::lit(w));
        }
        Self { maps, weights }
    }

    pub fn apply(&self, v: &mut [T]) {
        let mut out = vec![T::zero(); v.len()];
        for (map, &w) in self.maps.iter().zip(&self.weights) {
            for (i, &vi) in v.iter().enumerate() {
                out[map[i] as usize] += w * vi;
            }
        }
        v.copy_from_slice(&out);
    }
}

/// Representatives of the classes `{k, −k}` of lattice momenta.
pub fn momentum_classes(lat: &Lattice) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for k in lat.displacements() {
        if seen.contains(&k) {
            continue;
        }
        let neg: Vec<usize> = k.iter().map(|&ki| (lat.l - ki) % lat.l).collect();
        seen.insert(k.clone());
        seen.insert(neg);
        out.push(k);
    }
    out
}
