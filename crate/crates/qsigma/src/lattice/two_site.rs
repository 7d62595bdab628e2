//! Two-site operators: coupled-basis block structure, the general symmetric
//! family and its symmetry classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::cg::cg_transform;
use crate::lattice::encoding::digit_m;
use crate::lattice::hamiltonian::{two_site_matrix, Terms};
use crate::linalg::{expm_hermitian, herm_eigen, sym_eigen, CMat, Mat};
use crate::scalar::{Real, C};

/// Single-site spin-1 operators `(J_x, J_y, J_z)` on `[s, −1, 0, +1]`.
pub fn site_spin<T: Real>() -> [CMat<T>; 3] {
    let r2 = T::lit(2f64.sqrt());
    let mut jp = CMat::<T>::zeros(4, 4);
    jp[(2, 1)] = C::new(r2, T::zero());
    jp[(3, 2)] = C::new(r2, T::zero());
    let jm = jp.adjoint();
    let half = C::new(T::lit(0.5), T::zero());
    let jx = jp.add(&jm).scale(half);
    let jy = jp.sub(&jm).scale(C::new(T::zero(), T::lit(-0.5)));
    let mut jz = CMat::zeros(4, 4);
    for d in 0..4 {
        jz[(d, d)] = C::new(T::lit(digit_m(d) as f64), T::zero());
    }
    [jx, jy, jz]
}

/// Operator `a` on the first site of the product basis `d_first + 4 d_second`.
pub fn on_first<T: Real>(a: &CMat<T>) -> CMat<T> {
    CMat::identity(4).kron(a)
}

/// Operator `a` on the second site.
pub fn on_second<T: Real>(a: &CMat<T>) -> CMat<T> {
    a.kron(&CMat::identity(4))
}

/// Total two-site angular momentum generators.
pub fn two_site_generators<T: Real>() -> [CMat<T>; 3] {
    site_spin::<T>().map(|g| on_first(&g).add(&on_second(&g)))
}

/// Site exchange on two sites.
pub fn two_site_parity<T: Real>() -> CMat<T> {
    Mat::from_fn(16, 16, |i, j| {
        let swapped = (j / 4) + 4 * (j % 4);
        if i == swapped {
            C::new(T::one(), T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}

/// Unitary part of time reversal, `T|s⟩ = |s⟩`, `T|m⟩ = (−1)^m |−m⟩`,
/// followed by complex conjugation.
pub fn site_time_reversal<T: Real>() -> CMat<T> {
    let mut u = CMat::zeros(4, 4);
    u[(0, 0)] = C::new(T::one(), T::zero());
    u[(3, 1)] = C::new(-T::one(), T::zero());
    u[(2, 2)] = C::new(T::one(), T::zero());
    u[(1, 3)] = C::new(-T::one(), T::zero());
    u
}

pub fn two_site_time_reversal<T: Real>() -> CMat<T> {
    let u = site_time_reversal::<T>();
    u.kron(&u)
}

/// `(−1)^(number of singlet sites)` on two sites.
pub fn two_site_singlet_parity<T: Real>() -> CMat<T> {
    Mat::from_fn(16, 16, |i, j| {
        if i != j {
            return C::new(T::zero(), T::zero());
        }
        let n = [i % 4, i / 4].iter().filter(|&&d| d == 0).count();
        C::new(if n % 2 == 0 { T::one() } else { -T::one() }, T::zero())
    })
}

/// Couplings of the general SO(3)-, parity- and time-reversal-symmetric
/// two-site Hamiltonian.
///
/// In the coupled basis the matrix is diagonal in `J` with entries
/// `J=2: 2Jt + JX`, `J=1 (1⊕1): 2Jt − JX`, `J=1 (1⊕0, 0⊕1): [[Jt + Jsm, Jh],
/// [Jh, Jt + Jsm]]` and `J=0: [[2Jt + Jeq + JX, Jp], [Jp, 0]]`. `Jt` multiplies
/// the two-site triplet count, so `Jt = J` alone is the on-site term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralCouplings {
    #[serde(default)]
    pub jt: f64,
    #[serde(default)]
    pub jx: f64,
    #[serde(default)]
    pub jsm: f64,
    #[serde(default)]
    pub jeq: f64,
    #[serde(default)]
    pub jh: f64,
    #[serde(default)]
    pub jp: f64,
}

impl GeneralCouplings {
    /// Couplings reproducing one link of the lattice model with both sites'
    /// on-site terms; the pair amplitude in the normalized `J = 0` basis is
    /// `√3 J_r`.
    pub fn from_model(j: f64, jr: f64) -> Self {
        Self {
            jt: j,
            jh: jr,
            jp: 3f64.sqrt() * jr,
            ..Default::default()
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.jt, self.jx, self.jsm, self.jeq, self.jh, self.jp]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            jt: a[0],
            jx: a[1],
            jsm: a[2],
            jeq: a[3],
            jh: a[4],
            jp: a[5],
        }
    }
}

/// Number of independent real couplings in [`GeneralCouplings`].
pub const GENERAL_FAMILY_PARAMS: usize = 6;

/// The general family in the coupled basis.
pub fn general_coupled<T: Real>(c: &GeneralCouplings) -> Mat<T> {
    let mut h = Mat::zeros(16, 16);
    for k in 0..5 {
        h[(k, k)] = T::lit(2.0 * c.jt + c.jx);
    }
    for mi in 0..3 {
        let (a, b, e) = (5 + mi, 8 + mi, 11 + mi);
        h[(a, a)] = T::lit(2.0 * c.jt - c.jx);
        h[(b, b)] = T::lit(c.jt + c.jsm);
        h[(e, e)] = T::lit(c.jt + c.jsm);
        h[(b, e)] = T::lit(c.jh);
        h[(e, b)] = T::lit(c.jh);
    }
    h[(14, 14)] = T::lit(2.0 * c.jt + c.jeq + c.jx);
    h[(14, 15)] = T::lit(c.jp);
    h[(15, 14)] = T::lit(c.jp);
    h
}

/// General two-site Hamiltonian in the product basis `d_first + 4 d_second`.
pub fn build_general_two_site<T: Real>(c: &GeneralCouplings) -> Result<CMat<T>> {
    if c.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("couplings must be finite".into()));
    }
    let u = cg_transform::<T>();
    Ok(u.transpose().matmul(&general_coupled(c)).matmul(&u).to_complex())
}

/// Sector of a coupled-basis block.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BlockLabel {
    /// `J = 2`, all five `M` states.
    J2,
    /// `J = 1` at fixed `M`: channels `1⊕1, 1⊕0, 0⊕1`.
    J1 { m: i32 },
    /// `J = 0`: channels `1⊕1, 0⊕0`.
    J0,
}

impl BlockLabel {
    pub fn indices(self) -> Vec<usize> {
        match self {
            BlockLabel::J2 => (0..5).collect(),
            BlockLabel::J1 { m } => {
                let o = (m + 1) as usize;
                vec![5 + o, 8 + o, 11 + o]
            }
            BlockLabel::J0 => vec![14, 15],
        }
    }

    pub fn all() -> [BlockLabel; 5] {
        [
            BlockLabel::J2,
            BlockLabel::J1 { m: -1 },
            BlockLabel::J1 { m: 0 },
            BlockLabel::J1 { m: 1 },
            BlockLabel::J0,
        ]
    }
}

/// Block decomposition of an SO(3)-symmetric two-site operator.
#[derive(Clone, Debug)]
pub struct TwoSiteBlocks<T: Real> {
    pub cg_transform: Mat<T>,
    pub blocks: Vec<(BlockLabel, CMat<T>)>,
    /// Largest coupled-basis entry outside the blocks.
    pub off_block: T,
}

impl<T: Real> TwoSiteBlocks<T> {
    fn embed(&self, mut f: impl FnMut(&CMat<T>) -> CMat<T>) -> CMat<T> {
        let mut full = CMat::zeros(16, 16);
        for (label, b) in &self.blocks {
            let fb = f(b);
            let idx = label.indices();
            for (i, &p) in idx.iter().enumerate() {
                for (j, &q) in idx.iter().enumerate() {
                    full[(p, q)] = fb[(i, j)];
                }
            }
        }
        let u = self.cg_transform.to_complex();
        u.adjoint().matmul(&full).matmul(&u)
    }

    /// Sum of embedded blocks in the product basis.
    pub fn reconstruct(&self) -> CMat<T> {
        self.embed(|b| b.clone())
    }

    /// `exp(−i θ h)` assembled from block exponentials.
    pub fn exp_minus_i(&self, theta: T) -> Result<CMat<T>> {
        let mut err = None;
        let u = self.embed(|b| match expm_hermitian(b, theta) {
            Ok(x) => x,
            Err(e) => {
                err.get_or_insert(e);
                CMat::identity(b.rows())
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(u),
        }
    }

    pub fn block(&self, label: BlockLabel) -> &CMat<T> {
        &self.blocks.iter().find(|(l, _)| *l == label).expect("all labels present").1
    }
}

fn max_commutator<T: Real>(h: &CMat<T>, gens: &[CMat<T>]) -> T {
    gens.iter().fold(T::zero(), |m, g| m.max(g.commutator(h).frobenius()))
}

/// Block-diagonalizes `h2`; fails when `h2` does not commute with the
/// two-site SO(3) action.
pub fn two_site_blocks<T: Real>(h2: &CMat<T>) -> Result<TwoSiteBlocks<T>> {
    if h2.rows() != 16 || h2.cols() != 16 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: h2.rows(),
        });
    }
    let norm = max_commutator(h2, &two_site_generators::<T>());
    let scale = T::one().max(h2.frobenius());
    if norm > T::lit(1e-9) * scale {
        return Err(Error::SymmetryViolation {
            what: "two-site operator does not commute with total angular momentum".into(),
            norm: norm.to_f64_lossy(),
        });
    }
    let u = cg_transform::<T>();
    let uc = u.to_complex();
    let hc = uc.matmul(h2).matmul(&uc.adjoint());
    let mut inside = [[false; 16]; 16];
    let blocks = BlockLabel::all()
        .iter()
        .map(|&label| {
            let idx = label.indices();
            for &p in &idx {
                for &q in &idx {
                    inside[p][q] = true;
                }
            }
            (label, hc.select(&idx, &idx))
        })
        .collect();
    let mut off = T::zero();
    for (p, row) in inside.iter().enumerate() {
        for (q, &ins) in row.iter().enumerate() {
            if !ins {
                off = off.max(hc[(p, q)].norm());
            }
        }
    }
    Ok(TwoSiteBlocks {
        cg_transform: u,
        blocks,
        off_block: off,
    })
}

/// Unit-coupling link operator `H_p + H_h` on two sites.
pub fn link_operator<T: Real>() -> CMat<T> {
    two_site_matrix::<T>(0.0, 0.0, 1.0, Terms::LINK).to_complex()
}

/// Symmetry defects of a two-site operator (Frobenius norms).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSiteSymmetryReport {
    pub so3: f64,
    pub parity: f64,
    pub time_reversal: f64,
    pub singlet_parity: f64,
}

impl TwoSiteSymmetryReport {
    pub fn max(&self) -> f64 {
        self.so3.max(self.parity).max(self.time_reversal).max(self.singlet_parity)
    }

    /// Member of the six-parameter family within `tol`.
    pub fn in_family(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

pub fn classify_two_site<T: Real>(h: &CMat<T>) -> TwoSiteSymmetryReport {
    let p = two_site_parity::<T>();
    let ut = two_site_time_reversal::<T>();
    let tr = ut.matmul(&h.conj()).matmul(&ut.adjoint()).sub(h);
    TwoSiteSymmetryReport {
        so3: max_commutator(h, &two_site_generators::<T>()).to_f64_lossy(),
        parity: p.matmul(h).matmul(&p).sub(h).frobenius().to_f64_lossy(),
        time_reversal: tr.frobenius().to_f64_lossy(),
        singlet_parity: two_site_singlet_parity::<T>().commutator(h).frobenius().to_f64_lossy(),
    }
}

/// Symmetry constraint on two-site Hermitian operators.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    So3,
    Parity,
    TimeReversal,
    SingletParity,
}

fn hermitian_basis(n: usize) -> Vec<CMat<f64>> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..=i {
            let mut a = CMat::zeros(n, n);
            if i == j {
                a[(i, i)] = C::new(1.0, 0.0);
                out.push(a);
            } else {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                a[(i, j)] = C::new(s, 0.0);
                a[(j, i)] = C::new(s, 0.0);
                out.push(a);
                let mut b = CMat::zeros(n, n);
                b[(i, j)] = C::new(0.0, s);
                b[(j, i)] = C::new(0.0, -s);
                out.push(b);
            }
        }
    }
    out
}

/// Real dimension of the space of two-site Hermitian operators obeying all
/// `constraints`, computed as the nullity of the stacked constraint maps.
pub fn family_dimension(constraints: &[Constraint]) -> usize {
    let basis = hermitian_basis(16);
    let gens = two_site_generators::<f64>();
    let p = two_site_parity::<f64>();
    let ut = two_site_time_reversal::<f64>();
    let sp = two_site_singlet_parity::<f64>();
    let images: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| {
            let mut v = Vec::new();
            let mut push = |m: &CMat<f64>| {
                for z in m.data() {
                    v.push(z.re);
                    v.push(z.im);
                }
            };
            for c in constraints {
                match c {
                    Constraint::So3 => gens.iter().for_each(|g| push(&g.commutator(b))),
                    Constraint::Parity => push(&p.matmul(b).matmul(&p).sub(b)),
                    Constraint::TimeReversal => push(&ut.matmul(&b.conj()).matmul(&ut.adjoint()).sub(b)),
                    Constraint::SingletParity => push(&sp.commutator(b)),
                }
            }
            v
        })
        .collect();
    let n = basis.len();
    let gram = Mat::from_fn(n, n, |i, j| images[i].iter().zip(&images[j]).map(|(a, b)| a * b).sum::<f64>());
    let e = sym_eigen(&gram).expect("gram eigen");
    let top = e.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let rank = e.values.iter().filter(|&&x| x > 1e-9 * top.max(1.0)).count();
    n - rank
}

/// Spectral norm helper for two-site Hermitian operators.
pub fn two_site_norm<T: Real>(h: &CMat<T>) -> Result<T> {
    let e = herm_eigen(h)?;
    Ok(e.values.iter().fold(T::zero(), |m, x| m.max(x.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn onsite_only_counts_triplets() {
        let h = build_general_two_site::<f64>(&GeneralCouplings { jt: 1.0, ..Default::default() }).unwrap();
        let h1 = two_site_matrix::<f64>(1.0, 0.0, 0.0, Terms::ONSITE).to_complex();
        assert!(h.sub(&h1).frobenius() < 1e-12);
    }

    #[test]
    fn hopping_and_pair_blocks() {
        let hh = two_site_matrix::<f64>(0.0, 0.0, 1.0, Terms::HOP).to_complex();
        let b = two_site_blocks(&hh).unwrap();
        assert!(b.off_block < 1e-12);
        assert!(b.block(BlockLabel::J2).frobenius() < 1e-12);
        assert!(b.block(BlockLabel::J0).frobenius() < 1e-12);
        let j1 = b.block(BlockLabel::J1 { m: 0 });
        assert!((j1[(1, 2)].re - 1.0).abs() < 1e-12);
        assert!(j1[(0, 0)].norm() < 1e-12);

        let hp = two_site_matrix::<f64>(0.0, 0.0, 1.0, Terms::PAIR).to_complex();
        let b = two_site_blocks(&hp).unwrap();
        for (label, m) in &b.blocks {
            if *label != BlockLabel::J0 {
                assert!(m.frobenius() < 1e-12, "{label:?}");
            }
        }
        let j0 = b.block(BlockLabel::J0);
        assert!((j0[(0, 1)].re - 3f64.sqrt()).abs() < 1e-12);
        assert!(j0[(0, 0)].norm() < 1e-12 && j0[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn zero_matrix_blocks_are_zero() {
        let b = two_site_blocks(&CMat::<f64>::zeros(16, 16)).unwrap();
        assert!(b.blocks.iter().all(|(_, m)| m.frobenius() == 0.0));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut h = CMat::<f64>::zeros(16, 16);
        h[(1, 1)] = C::new(1.0, 0.0);
        match two_site_blocks(&h) {
            Err(Error::SymmetryViolation { norm, .. }) => assert!(norm > 0.1),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn parity_matches_coupled_form() {
        let u = cg_transform::<f64>().to_complex();
        let pc = u.matmul(&two_site_parity()).matmul(&u.adjoint());
        let mut expect = CMat::<f64>::zeros(16, 16);
        for k in 0..5 {
            expect[(k, k)] = C::new(1.0, 0.0);
        }
        for i in 0..3 {
            expect[(5 + i, 5 + i)] = C::new(-1.0, 0.0);
            expect[(8 + i, 11 + i)] = C::new(1.0, 0.0);
            expect[(11 + i, 8 + i)] = C::new(1.0, 0.0);
        }
        expect[(14, 14)] = C::new(1.0, 0.0);
        expect[(15, 15)] = C::new(1.0, 0.0);
        assert!(pc.sub(&expect).frobenius() < 1e-12);
    }

    #[test]
    fn model_link_is_a_family_member() {
        let h = two_site_matrix::<f64>(1.0, 0.0, 0.3, Terms::ALL).to_complex();
        let g = build_general_two_site::<f64>(&GeneralCouplings::from_model(1.0, 0.3)).unwrap();
        assert!(h.sub(&g).frobenius() < 1e-12);
        assert!(classify_two_site(&h).in_family(1e-12));
    }

    #[test]
    fn parameter_counting() {
        use Constraint::*;
        assert_eq!(family_dimension(&[So3]), 14);
        assert_eq!(family_dimension(&[So3, Parity]), 10);
        assert_eq!(family_dimension(&[So3, Parity, TimeReversal]), 8);
        // with singlet parity as well, and the identity removed, six remain
        assert_eq!(family_dimension(&[So3, Parity, TimeReversal, SingletParity]) - 1, GENERAL_FAMILY_PARAMS);
    }
}
