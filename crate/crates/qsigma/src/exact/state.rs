use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ModelParams, SiteEncoding};
use crate::rng;
use crate::scalar::{Real, C};

pub const STATE_FORMAT: &str = "lattice-state/1";

/// Normalized amplitude vector over the `4^(L^d)` site basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState<T> {
    pub params: ModelParams,
    amps: Vec<C<T>>,
}

fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

impl<T: Real> LatticeState<T> {
    /// Normalizes `amps`; fails on a length mismatch or a zero vector.
    pub fn new(params: ModelParams, mut amps: Vec<C<T>>) -> Result<Self> {
        let dim = params.dim();
        if amps.len() as u128 != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.min(usize::MAX as u128) as usize,
                found: amps.len(),
            });
        }
        let n = norm(&amps);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::InvalidInput("state has zero or non-finite norm".into()));
        }
        for a in amps.iter_mut() {
            *a = *a / n;
        }
        Ok(Self { params, amps })
    }

    fn checked_dim(params: &ModelParams, cap: usize) -> Result<usize> {
        params.validate()?;
        let dim = params.dim();
        if dim > cap as u128 {
            return Err(Error::Resource {
                what: "state dimension",
                requested: dim,
                cap: cap as u128,
            });
        }
        Ok(dim as usize)
    }

    /// Computational basis state `|s⟩`.
    pub fn basis(params: ModelParams, s: usize, cap: usize) -> Result<Self> {
        let dim = Self::checked_dim(&params, cap)?;
        if s >= dim {
            return Err(Error::InvalidInput(format!("basis index {s} out of range")));
        }
        let mut amps = vec![C::new(T::zero(), T::zero()); dim];
        amps[s] = C::new(T::one(), T::zero());
        Ok(Self { params, amps })
    }

    /// The all-singlet state, ground state at `J_r = 0`.
    pub fn all_singlet(params: ModelParams, cap: usize) -> Result<Self> {
        Self::basis(params, 0, cap)
    }

    /// Complex Gaussian amplitudes, normalized.
    pub fn random(params: ModelParams, seed: u64, cap: usize) -> Result<Self> {
        let dim = Self::checked_dim(&params, cap)?;
        let mut r = rng::stream(seed, &[0x57A7E]);
        let amps = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut r);
                let im: f64 = StandardNormal.sample(&mut r);
                C::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::new(params, amps)
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> T {
        norm(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn to_json(&self) -> String {
        let file = StateFile {
            format: STATE_FORMAT.into(),
            encoding: SiteEncoding::VERSION.into(),
            params: self.params,
            amplitudes: self.amps.iter().map(|z| (z.re.to_f64_lossy(), z.im.to_f64_lossy())).collect(),
        };
        serde_json::to_string(&file).expect("state serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: StateFile = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if f.format != STATE_FORMAT {
            return Err(Error::InvalidInput(format!("unsupported state format {:?}", f.format)));
        }
        if f.encoding != SiteEncoding::VERSION {
            return Err(Error::InvalidInput(format!("unsupported site encoding {:?}", f.encoding)));
        }
        let amps = f.amplitudes.iter().map(|&(re, im)| C::new(T::lit(re), T::lit(im))).collect();
        Self::new(f.params, amps)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    format: String,
    encoding: String,
    params: ModelParams,
    amplitudes: Vec<(f64, f64)>,
}

/// `|⟨a|b⟩|`, clamped to `[0, 1]`.
pub fn fidelity<T: Real>(a: &LatticeState<T>, b: &LatticeState<T>) -> Result<T> {
    Ok(a.inner(b)?.norm().min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_header_checks() {
        let p = ModelParams::new(1, 2, 0.1);
        let s = LatticeState::<f64>::random(p, 3, 1 << 12).unwrap();
        let back = LatticeState::<f64>::from_json(&s.to_json()).unwrap();
        assert!((fidelity(&s, &back).unwrap() - 1.0).abs() < 1e-12);
        let bad = s.to_json().replace(SiteEncoding::VERSION, "other/0");
        assert!(LatticeState::<f64>::from_json(&bad).is_err());
    }

    #[test]
    fn basis_fidelities() {
        let p = ModelParams::new(1, 2, 0.0);
        let a = LatticeState::<f64>::basis(p, 0, 16).unwrap();
        let b = LatticeState::<f64>::basis(p, 5, 16).unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let other = LatticeState::<f64>::basis(ModelParams::new(1, 3, 0.0), 0, 64).unwrap();
        assert!(fidelity(&a, &other).is_err());
    }
}
