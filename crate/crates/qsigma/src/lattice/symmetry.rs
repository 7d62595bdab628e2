//! Symmetry operators on the full lattice space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::encoding::{digit_m, site_digit, with_digit};
use crate::lattice::geometry::Lattice;
use crate::lattice::params::ModelParams;
use crate::lattice::sector::{permute_sites, SectorSpec};
use crate::linalg::Csr;
use crate::scalar::{Real, C};

/// `M`, singlet parity, spatial inversion and the total Casimir.
#[derive(Clone, Debug)]
pub struct SymmetryOps<T> {
    pub lattice: Lattice,
    pub total_jz: Vec<T>,
    pub singlet_parity: Vec<T>,
    /// Basis permutation `s → P s` of the inversion.
    pub spatial_parity: Vec<usize>,
    pub total_j2: Csr<T>,
}

impl<T: Real> SymmetryOps<T> {
    pub fn new(params: &ModelParams, cap: usize) -> Result<Self> {
        params.validate()?;
        if params.dim() > cap as u128 {
            return Err(Error::Resource {
                what: "Hilbert-space dimension",
                requested: params.dim(),
                cap: cap as u128,
            });
        }
        let lat = params.lattice()?;
        let n = lat.n_sites();
        let dim = params.dim() as usize;
        let total_jz = (0..dim)
            .map(|s| T::lit((0..n).map(|x| digit_m(site_digit(s, x))).sum::<i32>() as f64))
            .collect();
        let singlet_parity = (0..dim)
            .map(|s| {
                let k = (0..n).filter(|&x| site_digit(s, x) == 0).count();
                if k % 2 == 0 {
                    T::one()
                } else {
                    -T::one()
                }
            })
            .collect();
        let inv = lat.inversion();
        let spatial_parity = (0..dim).map(|s| permute_sites(s, &inv)).collect();
        let total_j2 = Csr::from_row_fn(dim, |s| total_j2_row(s, n));
        Ok(Self {
            lattice: lat,
            total_jz,
            singlet_parity,
            spatial_parity,
            total_j2,
        })
    }

    /// Frobenius norms of the commutators with `h`.
    pub fn commutators(&self, h: &Csr<T>) -> CommutatorNorms {
        let diag_comm = |d: &[T]| {
            h.triplets()
                .iter()
                .map(|&(i, j, v)| {
                    let c = (d[i] - d[j]) * v;
                    c * c
                })
                .sum::<T>()
                .sqrt()
                .to_f64_lossy()
        };
        let p = &self.spatial_parity;
        let conj = Csr::from_triplets(h.dim(), h.triplets().into_iter().map(|(i, j, v)| (p[i], p[j], v)).collect());
        CommutatorNorms {
            total_jz: diag_comm(&self.total_jz),
            singlet_parity: diag_comm(&self.singlet_parity),
            spatial_parity: conj.combine(T::one(), h, -T::one()).frobenius().to_f64_lossy(),
            total_j2: self.total_j2.commutator(h).frobenius().to_f64_lossy(),
        }
    }
}

/// Row of `J² = Σ_x J_x² + Σ_{x≠y} (J^z_x J^z_y + J^+_x J^-_y)`.
fn total_j2_row<T: Real>(s: usize, n: usize) -> Vec<(usize, T)> {
    let digits: Vec<usize> = (0..n).map(|x| site_digit(s, x)).collect();
    let mut diag = 0i32;
    for x in 0..n {
        if digits[x] != 0 {
            diag += 2;
        }
        for y in 0..n {
            if x != y {
                diag += digit_m(digits[x]) * digit_m(digits[y]);
            }
        }
    }
    let mut row = vec![(s, T::lit(diag as f64))];
    for x in 0..n {
        for y in 0..n {
            // J^+ raises digits 1→2→3, J^- lowers; both carry √2
            let (dx, dy) = (digits[x], digits[y]);
            if x != y && (dx == 1 || dx == 2) && (dy == 2 || dy == 3) {
                let t = with_digit(with_digit(s, x, dx + 1), y, dy - 1);
                row.push((t, T::lit(2.0)));
            }
        }
    }
    row
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutatorNorms {
    pub total_jz: f64,
    pub singlet_parity: f64,
    pub spatial_parity: f64,
    pub total_j2: f64,
}

impl CommutatorNorms {
    pub fn max(&self) -> f64 {
        self.total_jz.max(self.singlet_parity).max(self.spatial_parity).max(self.total_j2)
    }
}

/// Norm of the part of `psi` outside the sector.
pub fn sector_leakage<T: Real>(psi: &[C<T>], n_sites: usize, spec: SectorSpec) -> T {
    psi.iter()
        .enumerate()
        .filter(|(s, _)| !spec.contains(*s, n_sites))
        .map(|(_, a)| a.norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// Norm of the part of `psi` with nonzero total momentum.
pub fn momentum_leakage<T: Real>(psi: &[C<T>], lat: &Lattice) -> T {
    let n = lat.n_sites() as f64;
    let mut avg = vec![C::new(T::zero(), T::zero()); psi.len()];
    for r in lat.displacements() {
        let perm = lat.translation(&r);
        for (s, &a) in psi.iter().enumerate() {
            avg[permute_sites(s, &perm)] += a;
        }
    }
    let w = T::lit(1.0 / n);
    psi.iter()
        .zip(&avg)
        .map(|(&a, &b)| (a - b * w).norm_sqr())
        .sum::<T>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::hamiltonian::{build_hamiltonian, DEFAULT_DIM_CAP};
    use crate::linalg::sym_eigen;

    #[test]
    fn casimir_spectrum_on_two_sites() {
        let p = ModelParams::new(1, 2, 0.0);
        let ops = SymmetryOps::<f64>::new(&p, DEFAULT_DIM_CAP).unwrap();
        let e = sym_eigen(&ops.total_j2.to_dense()).unwrap();
        // J(J+1): 0 ×2, 2 ×9, 6 ×5
        let mut counts = std::collections::BTreeMap::new();
        for v in e.values {
            *counts.entry(v.round() as i64).or_insert(0) += 1;
        }
        assert_eq!(counts.into_iter().collect::<Vec<_>>(), vec![(0, 2), (2, 9), (6, 5)]);
    }

    #[test]
    fn operators_commute_with_hamiltonian() {
        for (d, l) in [(1, 2), (1, 3), (1, 4), (2, 2)] {
            let p = ModelParams::new(d, l, 0.37);
            let h = build_hamiltonian::<f64>(&p, 1 << 16).unwrap();
            let ops = SymmetryOps::new(&p, 1 << 16).unwrap();
            let c = ops.commutators(&h);
            assert!(c.max() < 1e-10, "{d} {l} {c:?}");
        }
    }

    #[test]
    fn triplet_splitting_is_a_jz_shift() {
        let p = ModelParams::new(1, 3, 0.2).with_mu(0.3);
        let h = build_hamiltonian::<f64>(&p, DEFAULT_DIM_CAP).unwrap();
        let c = SymmetryOps::new(&p, DEFAULT_DIM_CAP).unwrap().commutators(&h);
        assert!(c.max() < 1e-10);
    }

    #[test]
    fn local_field_is_detected() {
        let p = ModelParams::new(1, 3, 0.2);
        let h = build_hamiltonian::<f64>(&p, DEFAULT_DIM_CAP).unwrap();
        let field: Vec<f64> = (0..64).map(|s| (site_digit(s, 0) == 3) as u8 as f64).collect();
        let hf = h.combine(1.0, &Csr::diagonal_matrix(&field), 0.5);
        let c = SymmetryOps::new(&p, DEFAULT_DIM_CAP).unwrap().commutators(&hf);
        assert!(c.total_jz < 1e-12);
        assert!(c.total_j2 > 1e-3 && c.spatial_parity > 1e-3);
    }

    #[test]
    fn two_site_parity_is_exchange() {
        let p = ModelParams::new(1, 2, 0.0);
        let ops = SymmetryOps::<f64>::new(&p, DEFAULT_DIM_CAP).unwrap();
        for s in 0..16 {
            assert_eq!(ops.spatial_parity[s], (s >> 2) | ((s & 3) << 2));
        }
    }
}
