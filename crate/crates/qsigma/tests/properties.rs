use proptest::prelude::*;

use qsigma::compile::{
    apply_channel, compose, diamond_distance, randomized_channel, BranchOp, Circuit, ChannelSpec, DiamondOptions, Gate,
};
use qsigma::exact::LatticeState;
use qsigma::lattice::{ModelParams, DEFAULT_DIM_CAP};
use qsigma::linalg::{expm_hermitian, herm_eigenvalues, CMat};
use qsigma::shadows::median_of_means;
use qsigma::C;

fn gate() -> impl Strategy<Value = Gate> {
    prop_oneof![
        (0usize..3, prop::array::uniform4(-3.2f64..3.2)).prop_map(|(qubit, params)| Gate::U { qubit, params }),
        (0usize..3, 1usize..3).prop_map(|(c, s)| Gate::Cnot {
            control: c,
            target: (c + s) % 3
        }),
    ]
}

fn circuit() -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate(), 0..8).prop_map(|g| Circuit::new(3, g).unwrap())
}

fn hermitian(d: usize) -> impl Strategy<Value = CMat<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |v| {
        let a = CMat::from_fn(d, d, |i, j| C::new(v[2 * (i * d + j)], v[2 * (i * d + j) + 1]));
        a.add(&a.adjoint()).scale(C::new(0.5, 0.0))
    })
}

fn unitary(d: usize) -> impl Strategy<Value = CMat<f64>> {
    hermitian(d).prop_map(|h| expm_hermitian(&h, 1.0).unwrap())
}

fn pure_density(d: usize) -> impl Strategy<Value = CMat<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * d).prop_filter_map("zero vector", move |v| {
        let psi: Vec<C<f64>> = (0..d).map(|i| C::new(v[2 * i], v[2 * i + 1])).collect();
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        (n > 1e-3).then(|| CMat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_is_a_homomorphism(a in circuit(), b in circuit()) {
        let joined = compose(&a.then(&b).unwrap()).unwrap();
        let product = compose(&b).unwrap().matmul(&compose(&a).unwrap());
        prop_assert!(joined.sub(&product).frobenius() < 1e-10);
        prop_assert!(joined.unitarity_defect() < 1e-10);
    }

    #[test]
    fn conjugate_circuit_composes_to_the_conjugate(a in circuit()) {
        let c = compose(&a.conjugate()).unwrap();
        prop_assert!(c.sub(&compose(&a).unwrap().conj()).frobenius() < 1e-10);
    }

    #[test]
    fn randomized_channel_output_is_a_state(p in 0.0f64..=1.0, u in unitary(4), rho in pure_density(4)) {
        let spec = randomized_channel(p, BranchOp::Unitary(CMat::identity(4)), BranchOp::Unitary(u)).unwrap();
        let out = apply_channel(&spec, &rho).unwrap();
        prop_assert!(out.anti_hermiticity() < 1e-12);
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        let ev = herm_eigenvalues(&out).unwrap();
        prop_assert!(ev.iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn median_of_means_lies_within_the_sample_range(v in prop::collection::vec(-10.0f64..10.0, 1..60), g in 1usize..8) {
        let g = g.min(v.len());
        let m = median_of_means(&v, g).unwrap();
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        prop_assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
    }

    #[test]
    fn state_json_round_trips(seed in any::<u64>(), l in 2usize..4) {
        let s = LatticeState::<f64>::random(ModelParams::new(1, l, 0.2), seed, DEFAULT_DIM_CAP).unwrap();
        let back = LatticeState::<f64>::from_json(&s.to_json()).unwrap();
        // loading renormalizes, which may move the last bit
        let diff = s.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn diamond_bounds_bracket(p in 0.05f64..0.95, q in 0.05f64..0.95, u in unitary(3), v in unitary(3), w in unitary(3)) {
        let a = randomized_channel(p, BranchOp::Unitary(CMat::identity(3)), BranchOp::Unitary(u.clone())).unwrap();
        let b = randomized_channel(q, BranchOp::Unitary(v), BranchOp::Unitary(w)).unwrap();
        let opts = DiamondOptions { restarts: 2, ..Default::default() };
        let r = diamond_distance(&a, &b, &opts).unwrap();
        prop_assert!(r.value >= 0.0 && r.value <= r.upper && r.upper <= 2.0 + 1e-12);
        let rev = diamond_distance(&b, &a, &opts).unwrap();
        // the bracket [value, upper] of each order must overlap the other
        prop_assert!(rev.value <= r.upper + 1e-8 && r.value <= rev.upper + 1e-8);
        let plain = diamond_distance(&a, &ChannelSpec::unitary(u).unwrap(), &opts).unwrap();
        prop_assert!(plain.value <= 2.0 * (1.0 - p) + 1e-8);
    }
}
