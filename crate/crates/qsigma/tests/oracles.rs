//! Cross-checks against independent numerics (nalgebra dense routines, brute
//! force searches and sample means).

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use qsigma::adiabatic::{trotter_step, TrotterOptions};
use qsigma::compile::{diamond_distance, unitary_diamond_distance, ChannelSpec, DiamondOptions};
use qsigma::exact::{model_spectrum, LatticeState, SolverOptions};
use qsigma::lattice::noether::charge_diagonal;
use qsigma::lattice::two_site::link_operator;
use qsigma::lattice::{build_hamiltonian, ModelParams, DEFAULT_DIM_CAP};
use qsigma::linalg::{expm_hermitian, CMat};
use qsigma::shadows::{charge_observable, sample_shadows};
use qsigma::C;

fn dense_hamiltonian(p: &ModelParams) -> DMatrix<f64> {
    let h = build_hamiltonian::<f64>(p, DEFAULT_DIM_CAP).unwrap();
    let mut m = DMatrix::zeros(h.dim(), h.dim());
    for (i, j, v) in h.triplets() {
        m[(i, j)] += v;
    }
    m
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

fn to_na(m: &CMat<f64>) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.row(i)[j])
}

#[test]
fn spectrum_gap_matches_dense_diagonalization() {
    for (l, jr) in [(3, 0.07), (4, 0.2), (4, 0.6), (5, 0.3)] {
        let p = ModelParams::new(1, l, jr);
        let e = sorted_eigenvalues(dense_hamiltonian(&p));
        let s = model_spectrum::<f64>(&p, &SolverOptions::default(), DEFAULT_DIM_CAP).unwrap();
        let gap = e[1] - e[0];
        assert!((s.gap - gap).abs() < 1e-9, "L={l} Jr={jr}: {} vs {gap}", s.gap);
    }
}

#[test]
fn hamiltonian_is_symmetric_with_known_trace() {
    // every site contributes J per triplet state: Tr H = 3 · 4^{n−1} · n · J
    let p = ModelParams::new(1, 4, 0.35);
    let h = dense_hamiltonian(&p);
    assert!((&h - h.transpose()).amax() < 1e-14);
    let n = 4.0;
    let expect = 3.0 * 4f64.powf(n - 1.0) * n;
    assert!((h.trace() - expect).abs() < 1e-9, "{}", h.trace());
}

#[test]
fn link_exponential_matches_pade() {
    let l = link_operator::<f64>();
    for t in [0.01, 0.3, 2.0] {
        let ours = to_na(&expm_hermitian(&l, t).unwrap());
        let reference = (to_na(&l) * Complex::new(0.0, -t)).exp();
        assert!((ours - reference).camax() < 1e-11, "t={t}");
    }
}

#[test]
fn trotter_step_error_is_quadratic_against_dense_exponential() {
    let p = ModelParams::new(1, 4, 0.1);
    let psi = LatticeState::<f64>::random(p, 21, DEFAULT_DIM_CAP).unwrap();
    let h = dense_hamiltonian(&p).map(|x| Complex::new(x, 0.0));
    let v = DVector::from_column_slice(psi.amplitudes());
    let err = |dt: f64| {
        let exact = (&h * Complex::new(0.0, -dt)).exp() * &v;
        let t = trotter_step(&psi, p.jr, dt, &p, TrotterOptions::default()).unwrap();
        (exact - DVector::from_column_slice(t.amplitudes())).norm()
    };
    let (e1, e2) = (err(0.04), err(0.02));
    assert!(((e1 / e2).log2() - 2.0).abs() < 0.1, "{e1} {e2}");
}

#[test]
fn shadow_single_shots_average_to_the_charge() {
    let p = ModelParams::new(1, 2, 0.1);
    let psi = LatticeState::<f64>::random(p, 8, DEFAULT_DIM_CAP).unwrap();
    let q = charge_diagonal::<f64>(2, 0);
    let exact: f64 = psi.amplitudes().iter().zip(&q).map(|(a, w)| a.norm_sqr() * w).sum();
    let recs = sample_shadows(psi.amplitudes(), 60_000, 3).unwrap();
    let obs = charge_observable(0).unwrap();
    let shots: Vec<f64> = recs.iter().map(|r| obs.paulis().single_shot(r)).collect();
    let n = shots.len() as f64;
    let mean = shots.iter().sum::<f64>() / n;
    let var = shots.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!((mean - exact).abs() < 5.0 * se, "{mean} vs {exact} (se {se})");
}

/// `max_ψ 2 sqrt(1 − |⟨ψ|U†V|ψ⟩|²)` over a grid on the Bloch sphere.
fn brute_force_qubit_distance(u: &CMat<f64>, v: &CMat<f64>) -> f64 {
    let w = to_na(u).adjoint() * to_na(v);
    let mut best = 0.0f64;
    let (na, nb) = (400, 400);
    for i in 0..=na {
        let a = std::f64::consts::FRAC_PI_2 * i as f64 / na as f64;
        for j in 0..nb {
            let b = std::f64::consts::TAU * j as f64 / nb as f64;
            let psi = DVector::from_vec(vec![Complex::new(a.cos(), 0.0), Complex::from_polar(a.sin(), b)]);
            let ov = (psi.adjoint() * &w * &psi)[(0, 0)].norm();
            best = best.max(2.0 * (1.0 - ov * ov).max(0.0).sqrt());
        }
    }
    best
}

fn qubit_unitary(a: f64, b: f64, c: f64) -> CMat<f64> {
    let h = CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => C::new(a, 0.0),
        (1, 1) => C::new(-a, 0.0),
        (0, 1) => C::new(b, -c),
        _ => C::new(b, c),
    });
    expm_hermitian(&h, 1.0).unwrap()
}

#[test]
fn qubit_unitary_distance_matches_brute_force() {
    for (x, y) in [((0.1, 0.2, 0.0), (0.0, 0.0, 0.0)), ((0.4, -0.3, 0.2), (0.1, 0.5, -0.2)), ((1.2, 0.3, 0.7), (-0.9, 0.1, 0.4))] {
        let u = qubit_unitary(x.0, x.1, x.2);
        let v = qubit_unitary(y.0, y.1, y.2);
        let brute = brute_force_qubit_distance(&u, &v);
        let closed = unitary_diamond_distance(&u, &v).unwrap();
        assert!((brute - closed).abs() < 1e-3, "{brute} vs {closed}");
        let r = diamond_distance(
            &ChannelSpec::unitary(u.clone()).unwrap(),
            &ChannelSpec::unitary(v.clone()).unwrap(),
            &DiamondOptions::default(),
        )
        .unwrap();
        assert!((r.value - closed).abs() < 1e-6, "{} vs {closed}", r.value);
    }
}
