//! Noether charge `Q_{z,x}` and link current `J_{z,⟨x,x'⟩}`.
//!
//! The current on the link from `x` to `x'` is `J = i [Q_{z,x}, J_r h_{xx'}]`,
//! which gives `[Q_{z,x}, H] = −i Σ_{x'} J_{z,⟨x,x'⟩}`. It is purely imaginary;
//! the code stores the real antisymmetric matrix `C` with `J = i C`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::encoding::{digit_m, site_digit};
use crate::lattice::geometry::Link;
use crate::lattice::hamiltonian::{build_hamiltonian, link_row};
use crate::lattice::params::ModelParams;
use crate::linalg::{herm_norm, CMat, Csr};
use crate::scalar::{Real, C};

/// Diagonal of `Q_{z,x}` on the full space.
pub fn charge_diagonal<T: Real>(n_sites: usize, x: usize) -> Vec<T> {
    let dim = 1usize << (2 * n_sites);
    (0..dim).map(|s| T::lit(digit_m(site_digit(s, x)) as f64)).collect()
}

/// `Q_z` on one site, `diag(0, −1, 0, 1)`.
pub fn site_charge<T: Real>() -> CMat<T> {
    CMat::from_fn(4, 4, |i, j| {
        if i == j {
            C::new(T::lit(digit_m(i) as f64), T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}

/// Closed form of the two-site current from the first site to the second:
/// `J = −i J_r Σ_m m (|s m⟩⟨m s| − |m s⟩⟨s m| + |s s⟩⟨m, −m| − |m, −m⟩⟨s s|)`.
pub fn two_site_current<T: Real>(jr: f64) -> CMat<T> {
    let mut j = CMat::zeros(16, 16);
    let idx = |a: usize, b: usize| a + 4 * b;
    for m in [-1i32, 1] {
        let d = (m + 2) as usize;
        let dn = (2 - m) as usize;
        let amp = C::new(T::zero(), T::lit(-jr * m as f64));
        j[(idx(0, d), idx(d, 0))] += amp;
        j[(idx(d, 0), idx(0, d))] -= amp;
        j[(idx(0, 0), idx(d, dn))] += amp;
        j[(idx(d, dn), idx(0, 0))] -= amp;
    }
    j
}

/// Current `C` (with `J = i C`) on an oriented link `a → b` of the full space.
pub fn link_current<T: Real>(params: &ModelParams, a: usize, b: usize) -> Result<Csr<T>> {
    let lat = params.lattice()?;
    let links: Vec<Link> = lat
        .links()
        .into_iter()
        .filter(|k| (k.a == a && k.b == b) || (k.a == b && k.b == a))
        .collect();
    if links.is_empty() {
        return Err(Error::InvalidInput(format!("sites {a} and {b} are not nearest neighbours")));
    }
    let dim = params.dim() as usize;
    let jr = params.jr;
    Ok(Csr::from_row_fn(dim, |s| {
        let mut row = Vec::new();
        let qs = digit_m(site_digit(s, a)) as f64;
        // C_{st} = (q_s − q_t) J_r h_{st}
        link_row(s, &links, true, true, |t, amp| {
            let qt = digit_m(site_digit(t, a)) as f64;
            row.push((t, T::lit(jr * (qs - qt) * amp)));
        });
        row
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct NoetherReport {
    /// `‖[Σ_x Q_{z,x}, H]‖_F`.
    pub total_charge_commutator: f64,
    /// Largest `‖[Q_{z,x}, H] + i Σ_{x'} J_{z,⟨x,x'⟩}‖_F` over sites.
    pub identity_residual: f64,
    /// `‖J_link‖∞ / |J_r|`, measured on the closed form.
    pub current_norm_constant: f64,
    /// Largest difference between the closed form and the commutator.
    pub closed_form_residual: f64,
}

/// Checks charge conservation and the local continuity identity.
pub fn verify_noether(params: &ModelParams, cap: usize) -> Result<NoetherReport> {
    let h = build_hamiltonian::<f64>(params, cap)?;
    let lat = params.lattice()?;
    let n = lat.n_sites();
    let mut q_total = vec![0.0; h.dim()];
    let mut identity_residual: f64 = 0.0;
    for x in 0..n {
        let q = charge_diagonal::<f64>(n, x);
        for (t, v) in q_total.iter_mut().zip(&q) {
            *t += v;
        }
        let qh = Csr::from_triplets(h.dim(), h.triplets().into_iter().map(|(i, j, v)| (i, j, (q[i] - q[j]) * v)).collect());
        let mut neighbours: Vec<usize> = lat
            .links()
            .iter()
            .filter_map(|k| match (k.a == x, k.b == x) {
                (true, false) => Some(k.b),
                (false, true) => Some(k.a),
                _ => None,
            })
            .collect();
        neighbours.sort_unstable();
        neighbours.dedup();
        let mut sum = Csr::zeros(h.dim());
        for y in neighbours {
            sum = sum.combine(1.0, &link_current(params, x, y)?, 1.0);
        }
        // [Q, H] = −i Σ J = −i · i Σ C = Σ C
        identity_residual = identity_residual.max(qh.combine(1.0, &sum, -1.0).frobenius());
    }
    let total = h
        .triplets()
        .iter()
        .map(|&(i, j, v)| ((q_total[i] - q_total[j]) * v).powi(2))
        .sum::<f64>()
        .sqrt();

    let jr = if params.jr == 0.0 { 1.0 } else { params.jr };
    let closed = two_site_current::<f64>(jr);
    let pair = ModelParams::new(1, 2, jr).with_boundary(crate::lattice::Boundary::Open);
    let c = link_current::<f64>(&pair, 0, 1)?;
    let mut closed_form_residual: f64 = 0.0;
    for s in 0..16 {
        for t in 0..16 {
            let from_comm = C::new(0.0, c.get(s, t));
            closed_form_residual = closed_form_residual.max((from_comm - closed[(s, t)]).norm());
        }
    }
    Ok(NoetherReport {
        total_charge_commutator: total,
        identity_residual,
        current_norm_constant: herm_norm(&closed)? / jr.abs(),
        closed_form_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::hamiltonian::DEFAULT_DIM_CAP;

    #[test]
    fn continuity_and_conservation() {
        for (d, l) in [(1, 2), (1, 4), (2, 2)] {
            let p = ModelParams::new(d, l, 0.3);
            let r = verify_noether(&p, 1 << 16).unwrap();
            assert!(r.total_charge_commutator < 1e-10);
            assert!(r.identity_residual < 1e-10);
            assert!(r.closed_form_residual < 1e-12);
            assert!((r.current_norm_constant - 2f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn current_vanishes_without_coupling() {
        let p = ModelParams::new(1, 4, 0.0);
        assert_eq!(link_current::<f64>(&p, 0, 1).unwrap().nnz(), 0);
        assert!(two_site_current::<f64>(0.0).frobenius() == 0.0);
    }

    #[test]
    fn currents_are_antisymmetric_in_orientation() {
        let p = ModelParams::new(1, 4, 0.2);
        let a = link_current::<f64>(&p, 1, 2).unwrap();
        let b = link_current::<f64>(&p, 2, 1).unwrap();
        assert!(a.combine(1.0, &b, 1.0).frobenius() < 1e-14);
        assert!(a.combine(1.0, &a.transpose(), 1.0).frobenius() < 1e-14);
    }

    #[test]
    fn non_adjacent_sites_are_rejected() {
        let p = ModelParams::new(1, 6, 0.2);
        assert!(link_current::<f64>(&p, 0, 3).is_err());
        assert!(verify_noether(&ModelParams::new(1, 2, 0.1), DEFAULT_DIM_CAP).is_ok());
    }
}
