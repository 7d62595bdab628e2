use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::state::LatticeState;
use crate::lattice::sector::{momentum_classes, MomentumProjector};
use crate::lattice::{ModelParams, SectorBasis, SectorSpec};
use crate::linalg::{lanczos, sym_eigen, Csr, LanczosOptions, ShiftedSum};
use crate::scalar::{Real, C};

/// Eigenvalues within this distance of `e0` count as ground-state degenerate.
pub const GAP_TOLERANCE: f64 = 1e-9;

/// Default dimension up to which dense diagonalization is used.
pub const DENSE_CAP: usize = 1024;

/// Lowest levels of a Hamiltonian.
#[derive(Clone, Debug)]
pub struct SpectrumSlice<T> {
    pub e0: T,
    /// Lowest eigenvalue strictly above `e0 + GAP_TOLERANCE`.
    pub e1: T,
    pub gap: T,
    pub ground: LatticeState<T>,
    /// Computed eigenvalues within `GAP_TOLERANCE` of `e1`.
    pub e1_degeneracy: usize,
    pub method: SolverPath,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverPath {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct SolverOptions<T> {
    pub dense_cap: usize,
    pub lanczos: LanczosOptions<T>,
    /// Resolve large sectors into momentum classes in `model_spectrum`.
    /// Slower, but reports levels per momentum.
    pub momentum_resolved: bool,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            dense_cap: DENSE_CAP,
            lanczos: LanczosOptions::default(),
            momentum_resolved: false,
        }
    }
}

fn first_above<T: Real>(values: &[T], e0: T) -> Option<(T, usize)> {
    let tol = T::lit(GAP_TOLERANCE);
    let e1 = values.iter().copied().filter(|&v| v > e0 + tol).fold(None, |m: Option<T>, v| {
        Some(m.map_or(v, |m| m.min(v)))
    })?;
    let deg = values.iter().filter(|&&v| (v - e1).abs() <= tol).count();
    Some((e1, deg))
}

/// Ground vector of a degenerate eigenspace: the projection of the
/// lowest-index basis vector that overlaps the space, normalized and made
/// positive on that index.
fn pivot_ground<T: Real>(space: &[&[T]]) -> Vec<T> {
    let n = space[0].len();
    let tol = T::lit(1e-8);
    for i in 0..n {
        let mut v = vec![T::zero(); n];
        for u in space {
            let c = u[i];
            for (vk, &uk) in v.iter_mut().zip(u.iter()) {
                *vk += c * uk;
            }
        }
        let nv = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if nv > tol {
            let s = if v[i] < T::zero() { -T::one() } else { T::one() };
            return v.into_iter().map(|x| s * x / nv).collect();
        }
    }
    space[0].to_vec()
}

fn fix_sign<T: Real>(v: &mut [T]) {
    let pivot = v.iter().copied().find(|x| x.abs() > T::lit(1e-8));
    if pivot.is_some_and(|p| p < T::zero()) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn to_state<T: Real>(params: &ModelParams, v: Vec<T>) -> Result<LatticeState<T>> {
    LatticeState::new(*params, v.into_iter().map(|x| C::new(x, T::zero())).collect())
}

/// Ground state and gap of a full-space Hamiltonian.
pub fn ground_state<T: Real>(h: &Csr<T>, params: &ModelParams, opts: &SolverOptions<T>) -> Result<SpectrumSlice<T>> {
    if h.dim() as u128 != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim().min(usize::MAX as u128) as usize,
            found: h.dim(),
        });
    }
    let tol = T::lit(GAP_TOLERANCE);
    if h.dim() <= opts.dense_cap {
        let e = sym_eigen(&h.to_dense())?;
        let e0 = e.values[0];
        let space: Vec<&[T]> = (0..e.dim()).filter(|&k| e.values[k] <= e0 + tol).map(|k| e.vector(k)).collect();
        let ground = pivot_ground(&space);
        let (e1, deg) = first_above(&e.values, e0).ok_or_else(|| Error::InvalidInput("spectrum has a single level".into()))?;
        return Ok(SpectrumSlice {
            e0,
            e1,
            gap: e1 - e0,
            ground: to_state(params, ground)?,
            e1_degeneracy: deg,
            method: SolverPath::Dense,
        });
    }
    let mut lo = opts.lanczos.clone();
    lo.n_eigs = lo.n_eigs.max(2);
    let r = lanczos(h, None, &lo)?;
    let e0 = r.values[0];
    let (e1, deg) = first_above(&r.values, e0).ok_or(Error::NonConvergence {
        iterations: r.iterations,
        residual: f64::NAN,
    })?;
    let mut g = r.vectors[0].clone();
    fix_sign(&mut g);
    Ok(SpectrumSlice {
        e0,
        e1,
        gap: e1 - e0,
        ground: to_state(params, g)?,
        e1_degeneracy: deg,
        method: SolverPath::Lanczos,
    })
}

/// Spectrum of the lattice model from symmetry sectors.
#[derive(Clone, Debug)]
pub struct ModelSpectrum<T> {
    pub e0: T,
    pub e1: T,
    pub gap: T,
    /// Ground vector in the basis of its `M = 0` singlet-parity sector.
    pub ground: Vec<T>,
    pub basis: SectorBasis,
    /// `|⟨all singlets|ground⟩|`.
    pub singlet_overlap: T,
    /// `(even singlets, momentum, eigenvalue)` for every computed level;
    /// momentum entries are `usize::MAX` for densely solved sectors.
    pub levels: Vec<(bool, Vec<usize>, T)>,
}

impl<T: Real> ModelSpectrum<T> {
    /// Ground state in the full space.
    pub fn ground_state(&self, params: &ModelParams, cap: usize) -> Result<LatticeState<T>> {
        let full = self.basis.embed(&self.ground, cap)?;
        to_state(params, full)
    }
}

/// Lowest levels of the model using `M = 0` and singlet parity.
///
/// Every level of the rotation-invariant model has an `M = 0` member, so the
/// two singlet-parity sectors at `M = 0` see the whole spectrum. Sectors above
/// `dense_cap` go to Lanczos, either whole or split into momentum classes
/// `{k, −k}`. The lowest level of every piece is computed, plus the second
/// level of the piece holding the ground state.
pub fn model_spectrum<T: Real>(params: &ModelParams, opts: &SolverOptions<T>, sector_cap: usize) -> Result<ModelSpectrum<T>> {
    let lat = params.lattice()?;
    let jr = T::lit(params.jr);
    let singlet_parity = lat.n_sites() % 2 == 0;
    let mut levels = Vec::new();
    // (value, vector, sector slot, momentum class, levels found)
    let mut best: Option<(T, Vec<T>, usize, Option<Vec<usize>>, usize)> = None;
    let mut sectors = Vec::new();
    let no_k = vec![usize::MAX; lat.d];
    for even in [true, false] {
        let spec = SectorSpec { m: 0, even_singlets: Some(even) };
        let basis = SectorBasis::new(lat, spec, sector_cap)?;
        if basis.dim() == 0 {
            continue;
        }
        let (diag, off) = basis.hamiltonian_parts::<T>(params)?;
        let slot = sectors.len();
        let mut found = Vec::new();
        if basis.dim() <= opts.dense_cap {
            let h = Csr::diagonal_matrix(&diag).combine(T::one(), &off, jr);
            let e = sym_eigen(&h.to_dense())?;
            for &v in &e.values {
                levels.push((even, no_k.clone(), v));
            }
            found.push((e.values[0], e.vector(0).to_vec(), None, e.dim()));
        } else {
            let op = ShiftedSum { diag: &diag, off: &off, s: jr };
            // the sector of the all-singlet state usually holds the ground
            let n_eigs = if even == singlet_parity { 2 } else { 1 };
            if opts.momentum_resolved {
                for k in momentum_classes(&lat) {
                    let proj = MomentumProjector::<T>::new(&basis, &k);
                    let filter = |v: &mut [T]| proj.apply(v);
                    let lo = LanczosOptions { n_eigs: 1, ..opts.lanczos.clone() };
                    let r = match lanczos(&op, Some(&filter), &lo) {
                        Ok(r) => r,
                        // an empty momentum class in a small sector
                        Err(Error::InvalidInput(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    levels.push((even, k.clone(), r.values[0]));
                    found.push((r.values[0], r.vectors[0].clone(), Some(k), 1));
                }
            } else {
                let lo = LanczosOptions { n_eigs, ..opts.lanczos.clone() };
                let r = lanczos(&op, None, &lo)?;
                for &v in &r.values {
                    levels.push((even, no_k.clone(), v));
                }
                found.push((r.values[0], r.vectors[0].clone(), None, r.values.len()));
            }
        }
        for (v, vec, k, count) in found {
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, vec, slot, k, count));
            }
        }
        sectors.push((even, basis, diag, off));
    }
    let (_, mut g, slot, k, count) = best.ok_or_else(|| Error::InvalidInput("empty spectrum".into()))?;
    let (even, basis, diag, off) = sectors.swap_remove(slot);
    if count < 2 {
        let op = ShiftedSum { diag: &diag, off: &off, s: jr };
        let lo = LanczosOptions { n_eigs: 2, ..opts.lanczos.clone() };
        let r = match &k {
            Some(k) => {
                let proj = MomentumProjector::<T>::new(&basis, k);
                let filter = |v: &mut [T]| proj.apply(v);
                lanczos(&op, Some(&filter), &lo)?
            }
            None => lanczos(&op, None, &lo)?,
        };
        if r.values.len() > 1 {
            levels.push((even, k.unwrap_or(no_k), r.values[1]));
        }
    }
    fix_sign(&mut g);
    let values: Vec<T> = levels.iter().map(|l| l.2).collect();
    let e0 = values.iter().copied().fold(T::infinity(), T::min);
    let (e1, _) = first_above(&values, e0).ok_or_else(|| Error::InvalidInput("spectrum has a single level".into()))?;
    let singlet_overlap = basis.index_of(0).map_or(T::zero(), |i| g[i].abs());
    Ok(ModelSpectrum {
        e0,
        e1,
        gap: e1 - e0,
        ground: g,
        basis,
        singlet_overlap,
        levels,
    })
}
