use crate::error::{Error, Result};
use crate::exact::state::LatticeState;
use crate::linalg::{expm_krylov, sym_eigen, Csr, SymEigen};
use crate::scalar::{Real, C};

/// Dimension up to which `evolve_exact` diagonalizes instead of using Krylov.
pub const EIGEN_EVOLVE_CAP: usize = 256;

/// Krylov subspace size and accuracy target for large systems.
const KRYLOV_DIM: usize = 30;

/// `exp(−i H t)` through a cached eigendecomposition.
#[derive(Clone, Debug)]
pub struct ExactPropagator<T> {
    eig: SymEigen<T>,
}

impl<T: Real> ExactPropagator<T> {
    pub fn new(h: &Csr<T>) -> Result<Self> {
        Ok(Self { eig: sym_eigen(&h.to_dense())? })
    }

    pub fn energies(&self) -> &[T] {
        &self.eig.values
    }

    pub fn apply(&self, psi: &[C<T>], t: T) -> Result<Vec<C<T>>> {
        let n = self.eig.dim();
        if psi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: psi.len() });
        }
        let mut out = vec![C::new(T::zero(), T::zero()); n];
        for k in 0..n {
            let v = self.eig.vector(k);
            let c = v.iter().zip(psi).fold(C::new(T::zero(), T::zero()), |acc, (&vi, &p)| acc + p * vi);
            let (s, co) = (self.eig.values[k] * t).sin_cos();
            let c = c * C::new(co, -s);
            for (o, &vi) in out.iter_mut().zip(v) {
                *o += c * vi;
            }
        }
        Ok(out)
    }
}

/// `e^{−i H t}|ψ⟩`, by diagonalization for small spaces and Krylov otherwise.
pub fn evolve_exact<T: Real>(state: &LatticeState<T>, h: &Csr<T>, t: T) -> Result<LatticeState<T>> {
    if h.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: state.dim(),
        });
    }
    let out = if h.dim() <= EIGEN_EVOLVE_CAP {
        ExactPropagator::new(h)?.apply(state.amplitudes(), t)?
    } else {
        expm_krylov(h, state.amplitudes(), t, KRYLOV_DIM, T::lit(1e-13))?
    };
    LatticeState::new(state.params, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::fidelity;
    use crate::lattice::{build_hamiltonian, ModelParams, DEFAULT_DIM_CAP};

    #[test]
    fn forward_and_back() {
        for l in [2, 5] {
            let p = ModelParams::new(1, l, 0.3);
            let h = build_hamiltonian::<f64>(&p, 1 << 12).unwrap();
            let psi = LatticeState::<f64>::random(p, 11, 1 << 12).unwrap();
            let same = evolve_exact(&psi, &h, 0.0).unwrap();
            assert!((fidelity(&psi, &same).unwrap() - 1.0).abs() < 1e-14);
            let fwd = evolve_exact(&psi, &h, 0.7).unwrap();
            let back = evolve_exact(&fwd, &h, -0.7).unwrap();
            assert!(fidelity(&psi, &back).unwrap() >= 1.0 - 1e-10);
            let e0 = h.expectation(psi.amplitudes());
            let e1 = h.expectation(fwd.amplitudes());
            assert!((e0 - e1).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenstates_only_acquire_phase() {
        let p = ModelParams::new(1, 2, 0.4);
        let h = build_hamiltonian::<f64>(&p, DEFAULT_DIM_CAP).unwrap();
        let prop = ExactPropagator::new(&h).unwrap();
        let v: Vec<C<f64>> = prop.eig.vector(3).iter().map(|&x| C::new(x, 0.0)).collect();
        let psi = LatticeState::new(p, v).unwrap();
        let out = evolve_exact(&psi, &h, 2.3).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
        }
    }
}
