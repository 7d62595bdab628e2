//! The lattice Hamiltonian `H = Σ_x (J + μ m_x) n_x + J_r (H_p + H_h)`.
//!
//! `H_p = −Σ_links Σ_m (−1)^m |m, −m⟩⟨s, s| + h.c.` creates and annihilates
//! triplet pairs and `H_h = Σ_links Σ_m |s, m⟩⟨m, s| + h.c.` moves a triplet
//! across a link. Both are real, so `H` is real symmetric.

use crate::error::{Error, Result};
use crate::lattice::encoding::{digit_m, site_digit, with_digit};
use crate::lattice::geometry::{Lattice, Link};
use crate::lattice::params::ModelParams;
use crate::linalg::{Csr, Mat};
use crate::scalar::Real;

/// Default cap on the full Hilbert-space dimension for explicit operators.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Selects Hamiltonian pieces.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Terms {
    pub onsite: bool,
    pub pair: bool,
    pub hop: bool,
}

impl Terms {
    pub const ALL: Terms = Terms { onsite: true, pair: true, hop: true };
    pub const ONSITE: Terms = Terms { onsite: true, pair: false, hop: false };
    pub const PAIR: Terms = Terms { onsite: false, pair: true, hop: false };
    pub const HOP: Terms = Terms { onsite: false, pair: false, hop: true };
    pub const LINK: Terms = Terms { onsite: false, pair: true, hop: true };
}

/// Sign of the pair amplitude `⟨m, −m|H_p|s, s⟩ = −(−1)^m`.
#[inline]
pub fn pair_sign(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Unit-coupling action of one link on site digits `(da, db)`:
/// calls `f(da', db', amplitude)` for every nonzero off-diagonal element.
#[inline]
pub fn link_action(da: usize, db: usize, pair: bool, hop: bool, mut f: impl FnMut(usize, usize, f64)) {
    if pair {
        if da == 0 && db == 0 {
            for m in -1..=1i32 {
                f((m + 2) as usize, (2 - m) as usize, pair_sign(m));
            }
        } else if da != 0 && db != 0 {
            let (ma, mb) = (digit_m(da), digit_m(db));
            if ma == -mb {
                f(0, 0, pair_sign(ma));
            }
        }
    }
    if hop {
        if da != 0 && db == 0 {
            f(0, da, 1.0);
        } else if da == 0 && db != 0 {
            f(db, 0, 1.0);
        }
    }
}

/// On-site energy of basis state `s`.
#[inline]
pub fn onsite_energy(s: usize, n_sites: usize, j: f64, mu: f64) -> f64 {
    let mut e = 0.0;
    for x in 0..n_sites {
        let d = site_digit(s, x);
        if d != 0 {
            e += j + mu * digit_m(d) as f64;
        }
    }
    e
}

/// Off-diagonal elements of row `s` of the unit-coupling link operator,
/// summed over `links`.
pub fn link_row(s: usize, links: &[Link], pair: bool, hop: bool, mut f: impl FnMut(usize, f64)) {
    for k in links {
        let (da, db) = (site_digit(s, k.a), site_digit(s, k.b));
        link_action(da, db, pair, hop, |na, nb, amp| {
            let t = with_digit(with_digit(s, k.a, na), k.b, nb);
            f(t, amp);
        });
    }
}

fn check_cap(params: &ModelParams, cap: usize) -> Result<usize> {
    params.validate()?;
    let dim = params.dim();
    if dim > cap as u128 {
        return Err(Error::Resource {
            what: "Hilbert-space dimension",
            requested: dim,
            cap: cap as u128,
        });
    }
    Ok(dim as usize)
}

/// Selected terms with their physical couplings (`J`, `μ`, `J_r`).
pub fn build_terms<T: Real>(params: &ModelParams, terms: Terms, cap: usize) -> Result<Csr<T>> {
    let dim = check_cap(params, cap)?;
    let lat: Lattice = params.lattice()?;
    let links = lat.links();
    let n = lat.n_sites();
    let (j, mu, jr) = (params.j, params.mu, params.jr);
    Ok(Csr::from_row_fn(dim, |s| {
        let mut row = Vec::new();
        if terms.onsite {
            row.push((s, T::lit(onsite_energy(s, n, j, mu))));
        }
        if jr != 0.0 && (terms.pair || terms.hop) {
            link_row(s, &links, terms.pair, terms.hop, |t, a| row.push((t, T::lit(jr * a))));
        }
        row
    }))
}

/// Full Hamiltonian of the model.
pub fn build_hamiltonian<T: Real>(params: &ModelParams, cap: usize) -> Result<Csr<T>> {
    build_terms(params, Terms::ALL, cap)
}

/// `H(J_r) = diag(onsite) + J_r · links`, with the link part at unit coupling.
#[derive(Clone, Debug)]
pub struct SplitHamiltonian<T> {
    pub onsite: Vec<T>,
    pub links: Csr<T>,
}

impl<T: Real> SplitHamiltonian<T> {
    pub fn build(params: &ModelParams, cap: usize) -> Result<Self> {
        let unit = params.with_jr(1.0);
        let dim = check_cap(&unit, cap)?;
        let lat = unit.lattice()?;
        let n = lat.n_sites();
        let onsite = (0..dim).map(|s| T::lit(onsite_energy(s, n, unit.j, unit.mu))).collect();
        let links = build_terms(&unit, Terms::LINK, cap)?;
        Ok(Self { onsite, links })
    }

    pub fn at(&self, jr: T) -> Csr<T> {
        Csr::diagonal_matrix(&self.onsite).combine(T::one(), &self.links, jr)
    }
}

/// Two-site matrix (16×16, index `d_first + 4 d_second`) of the chosen terms
/// for one link, with on-site energies of both sites.
pub fn two_site_matrix<T: Real>(j: f64, mu: f64, jr: f64, terms: Terms) -> Mat<T> {
    let link = [Link { a: 0, b: 1, dir: 0 }];
    let mut m = Mat::zeros(16, 16);
    for s in 0..16 {
        if terms.onsite {
            m[(s, s)] += T::lit(onsite_energy(s, 2, j, mu));
        }
        link_row(s, &link, terms.pair, terms.hop, |t, a| m[(t, s)] += T::lit(jr * a));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::params::ModelParams;
    use crate::linalg::sym_eigen;

    #[test]
    fn jr_zero_counts_triplets() {
        let h = build_hamiltonian::<f64>(&ModelParams::new(1, 2, 0.0), DEFAULT_DIM_CAP).unwrap();
        let e = sym_eigen(&h.to_dense()).unwrap();
        let mut counts = [0usize; 3];
        for v in &e.values {
            counts[v.round() as usize] += 1;
        }
        assert_eq!(counts, [1, 6, 9]);
        assert_eq!(h.get(0, 0), 0.0);
    }

    #[test]
    fn triplet_splitting() {
        let p = ModelParams::new(1, 2, 0.0).with_mu(0.3);
        let h = build_hamiltonian::<f64>(&p, DEFAULT_DIM_CAP).unwrap();
        // site 0 triplet, site 1 singlet: index = digit
        assert!((h.get(1, 1) - 0.7).abs() < 1e-15);
        assert!((h.get(2, 2) - 1.0).abs() < 1e-15);
        assert!((h.get(3, 3) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn symmetric_and_sign_convention() {
        let p = ModelParams::new(1, 4, 0.37);
        let h = build_hamiltonian::<f64>(&p, DEFAULT_DIM_CAP).unwrap();
        assert!(h.asymmetry() < 1e-12);
        // ⟨+1, −1, s, s|H|s s s s⟩ = −(−1)^1 Jr = +Jr
        let t = 3 | (1 << 2);
        assert!((h.get(t, 0) - 0.37).abs() < 1e-15);
        // ⟨0, 0, s, s|H|ssss⟩ = −Jr
        let t0 = 2 | (2 << 2);
        assert!((h.get(t0, 0) + 0.37).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let err = build_hamiltonian::<f64>(&ModelParams::new(1, 7, 0.1), DEFAULT_DIM_CAP).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn split_matches_direct() {
        let p = ModelParams::new(1, 4, 0.21).with_mu(0.1);
        let s = SplitHamiltonian::<f64>::build(&p, DEFAULT_DIM_CAP).unwrap();
        let direct = build_hamiltonian::<f64>(&p, DEFAULT_DIM_CAP).unwrap();
        assert!(s.at(0.21).combine(1.0, &direct, -1.0).frobenius() < 1e-13);
    }
}
