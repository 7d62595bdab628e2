use rand::Rng;
use rayon::prelude::*;

use crate::adiabatic::{apply_two_site, Schedule};
use crate::compile::circuit::{compose, Circuit};
use crate::error::{Error, Result};
use crate::exact::{fidelity, LatticeState};
use crate::lattice::hamiltonian::onsite_energy;
use crate::lattice::two_site::link_operator;
use crate::lattice::ModelParams;
use crate::linalg::{expm_hermitian, herm_eigenvalues, CMat};
use crate::rng;
use crate::scalar::C;

const PROB_TOL: f64 = 1e-12;

/// What a branch applies.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchOp {
    Circuit(Circuit),
    Unitary(CMat<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub op: BranchOp,
    matrix: CMat<f64>,
}

impl Branch {
    pub fn new(probability: f64, op: BranchOp) -> Result<Self> {
        if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&probability) {
            return Err(Error::InvalidInput(format!("branch probability {probability} is outside [0, 1]")));
        }
        let matrix = match &op {
            BranchOp::Circuit(c) => compose(c)?,
            BranchOp::Unitary(u) => {
                if !u.is_square() {
                    return Err(Error::DimensionMismatch { expected: u.rows(), found: u.cols() });
                }
                let defect = u.unitarity_defect();
                if defect > 1e-10 {
                    return Err(Error::InvalidInput(format!("branch operator is not unitary (defect {defect:.2e})")));
                }
                u.clone()
            }
        };
        Ok(Self {
            probability: probability.clamp(0.0, 1.0),
            op,
            matrix,
        })
    }

    pub fn unitary(&self) -> &CMat<f64> {
        &self.matrix
    }
}

/// Probabilistic mixture of unitaries `ρ ↦ Σ_b p_b U_b ρ U_b†`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    branches: Vec<Branch>,
}

impl ChannelSpec {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let first = branches.first().ok_or_else(|| Error::InvalidInput("channel needs at least one branch".into()))?;
        let dim = first.matrix.rows();
        for b in &branches {
            if b.matrix.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.matrix.rows(),
                });
            }
        }
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("branch probabilities sum to {total}, not 1")));
        }
        Ok(Self { branches })
    }

    pub fn unitary(u: CMat<f64>) -> Result<Self> {
        Self::new(vec![Branch::new(1.0, BranchOp::Unitary(u))?])
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(CMat::identity(dim)).expect("identity is unitary")
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn dim(&self) -> usize {
        self.branches[0].matrix.rows()
    }

    /// Branch index for a uniform draw `u ∈ [0, 1)`.
    fn pick(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, b) in self.branches.iter().enumerate() {
            if b.probability <= 0.0 {
                continue;
            }
            acc += b.probability;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }
}

/// `(1 − p) U_id · U_id† + p U_approx · U_approx†`.
pub fn randomized_channel(p: f64, u_identity: BranchOp, u_approx: BranchOp) -> Result<ChannelSpec> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("p = {p} is outside [0, 1]")));
    }
    ChannelSpec::new(vec![Branch::new(1.0 - p, u_identity)?, Branch::new(p, u_approx)?])
}

/// `p_i = θ_i / max_j θ_j` for `θ_i = J_{r,i} Δt_i`; all zero when every
/// `θ_i` vanishes.
pub fn interpolation_probabilities(steps: &[(f64, f64)]) -> Result<Vec<f64>> {
    let theta: Vec<f64> = steps.iter().map(|&(jr, dt)| jr * dt).collect();
    if theta.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput("J_r Δt must be finite and non-negative".into()));
    }
    let max = theta.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(vec![0.0; theta.len()]);
    }
    Ok(theta.iter().map(|t| t / max).collect())
}

fn check_density(rho: &CMat<f64>, dim: usize) -> Result<()> {
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: rho.rows() });
    }
    if rho.anti_hermiticity() > 1e-10 {
        return Err(Error::InvalidInput("density matrix is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("density matrix has trace {tr}")));
    }
    let min = herm_eigenvalues(rho)?.first().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(Error::InvalidInput(format!("density matrix has eigenvalue {min:.3e}")));
    }
    Ok(())
}

fn conjugate_by(u: &CMat<f64>, rho: &CMat<f64>) -> CMat<f64> {
    u.matmul(rho).matmul(&u.adjoint())
}

/// `Σ_b p_b U_b ρ U_b†` for a valid density matrix `ρ`.
pub fn apply_channel(spec: &ChannelSpec, rho: &CMat<f64>) -> Result<CMat<f64>> {
    check_density(rho, spec.dim())?;
    Ok(mix(spec, rho))
}

fn mix(spec: &ChannelSpec, rho: &CMat<f64>) -> CMat<f64> {
    let mut out = CMat::zeros(rho.rows(), rho.cols());
    for b in &spec.branches {
        if b.probability > 0.0 {
            out = out.add(&conjugate_by(&b.matrix, rho).scale(C::new(b.probability, 0.0)));
        }
    }
    out
}

/// One step of a channel sequence on a lattice register.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelStep {
    /// Channel on the whole register.
    Global(ChannelSpec),
    /// Independent draws of a two-site channel on each listed site pair, in order.
    Links { spec: ChannelSpec, links: Vec<(usize, usize)> },
    /// Diagonal phase `e^{−iφ_s}` on basis state `s`.
    Phase(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub state: LatticeState<f64>,
    /// Branch index of every channel draw, in application order.
    pub branches: Vec<usize>,
}

fn check_steps(steps: &[ChannelStep], dim: usize) -> Result<()> {
    for s in steps {
        match s {
            ChannelStep::Global(spec) if spec.dim() != dim => {
                return Err(Error::DimensionMismatch { expected: dim, found: spec.dim() })
            }
            ChannelStep::Links { spec, .. } if spec.dim() != 16 => {
                return Err(Error::DimensionMismatch { expected: 16, found: spec.dim() })
            }
            ChannelStep::Phase(p) if p.len() != dim => return Err(Error::DimensionMismatch { expected: dim, found: p.len() }),
            _ => {}
        }
    }
    Ok(())
}

/// Monte-Carlo unraveling of a channel sequence with draws from stream `(seed, [])`.
pub fn sample_channel_trajectory(steps: &[ChannelStep], initial: &LatticeState<f64>, seed: u64) -> Result<Trajectory> {
    let dim = initial.dim();
    check_steps(steps, dim)?;
    let mut g = rng::stream(seed, &[]);
    let mut psi = initial.amplitudes().to_vec();
    let mut branches = Vec::new();
    for s in steps {
        match s {
            ChannelStep::Global(spec) => {
                let b = spec.pick(g.random());
                branches.push(b);
                psi = spec.branches[b].matrix.matvec(&psi);
            }
            ChannelStep::Links { spec, links } => {
                for &(a, bsite) in links {
                    let b = spec.pick(g.random());
                    branches.push(b);
                    apply_two_site(&spec.branches[b].matrix, a, bsite, &mut psi);
                }
            }
            ChannelStep::Phase(phi) => {
                for (a, &f) in psi.iter_mut().zip(phi) {
                    *a *= C::from_polar(1.0, -f);
                }
            }
        }
    }
    Ok(Trajectory {
        state: LatticeState::new(initial.params, psi)?,
        branches,
    })
}

/// Exact density-matrix composition of a channel sequence.
pub fn evolve_density(steps: &[ChannelStep], rho: &CMat<f64>, n_sites: usize) -> Result<CMat<f64>> {
    let dim = rho.rows();
    if dim != 1usize << (2 * n_sites) {
        return Err(Error::DimensionMismatch {
            expected: 1 << (2 * n_sites),
            found: dim,
        });
    }
    check_density(rho, dim)?;
    check_steps(steps, dim)?;
    let mut rho = rho.clone();
    for s in steps {
        match s {
            ChannelStep::Global(spec) => rho = mix(spec, &rho),
            ChannelStep::Links { spec, links } => {
                for &(a, b) in links {
                    let mut out = CMat::zeros(dim, dim);
                    for br in &spec.branches {
                        if br.probability > 0.0 {
                            let m = conjugate_two_site(&br.matrix, a, b, &rho);
                            out = out.add(&m.scale(C::new(br.probability, 0.0)));
                        }
                    }
                    rho = out;
                }
            }
            ChannelStep::Phase(phi) => {
                rho = CMat::from_fn(dim, dim, |i, j| rho[(i, j)] * C::from_polar(1.0, phi[j] - phi[i]));
            }
        }
    }
    Ok(rho)
}

/// `U ρ U†` for a two-site `U` acting on sites `a`, `b`.
fn conjugate_two_site(u: &CMat<f64>, a: usize, b: usize, rho: &CMat<f64>) -> CMat<f64> {
    let dim = rho.rows();
    // columns of U ρ, then U (U ρ)† = U ρ U†
    let left = |m: &CMat<f64>| {
        let mut out = CMat::zeros(dim, dim);
        let mut col = vec![C::new(0.0, 0.0); dim];
        for j in 0..dim {
            for i in 0..dim {
                col[i] = m[(i, j)];
            }
            apply_two_site(u, a, b, &mut col);
            for i in 0..dim {
                out[(i, j)] = col[i];
            }
        }
        out
    };
    left(&left(rho).adjoint())
}

/// Average density matrix of `n` trajectories; trajectory `r` uses seed
/// `derive_seed(seed, [r])`.
pub fn trajectory_average(steps: &[ChannelStep], initial: &LatticeState<f64>, n: usize, seed: u64) -> Result<CMat<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one trajectory".into()));
    }
    let dim = initial.dim();
    let states: Vec<Vec<C<f64>>> = (0..n)
        .into_par_iter()
        .map(|r| sample_channel_trajectory(steps, initial, rng::derive_seed(seed, &[r as u64])).map(|t| t.state.into_amplitudes()))
        .collect::<Result<_>>()?;
    let w = 1.0 / n as f64;
    Ok(CMat::from_fn(dim, dim, |i, j| {
        states.iter().map(|s| s[i] * s[j].conj()).sum::<C<f64>>() * w
    }))
}

/// Mean and standard error of `|⟨ψ_r|target⟩|` over `n` trajectories.
pub fn trajectory_fidelity(
    steps: &[ChannelStep],
    initial: &LatticeState<f64>,
    target: &LatticeState<f64>,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one trajectory".into()));
    }
    let f: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|r| {
            let t = sample_channel_trajectory(steps, initial, rng::derive_seed(seed, &[r as u64]))?;
            fidelity(&t.state, target)
        })
        .collect::<Result<_>>()?;
    let mean = f.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Ok((mean, (var / n as f64).sqrt()))
}

/// How every link factor of a Trotter step is realized.
#[derive(Clone, Debug, PartialEq)]
pub enum LinkRealization {
    /// `e^{−iJ_{r,i}Δt_i (H_h + H_p)}` each step.
    Exact,
    /// Identity with probability `1 − p_i`, `approx` with probability `p_i`.
    Randomized { approx: CMat<f64> },
    /// `approx` every step.
    Deterministic { approx: CMat<f64> },
}

/// Channel sequence of a first-order adiabatic ramp: odd links, even links,
/// then the on-site phase per step.
pub fn adiabatic_channel_steps(params: &ModelParams, schedule: &Schedule, link: &LinkRealization) -> Result<Vec<ChannelStep>> {
    params.require_split()?;
    let lat = params.lattice()?;
    let n = lat.n_sites();
    let dim = params.dim() as usize;
    let p = interpolation_probabilities(&schedule.steps)?;
    let (mut odd, mut even) = (Vec::new(), Vec::new());
    for k in lat.links() {
        if lat.link_class(&k).odd {
            odd.push((k.a, k.b));
        } else {
            even.push((k.a, k.b));
        }
    }
    let lop = link_operator::<f64>();
    let mut out = Vec::with_capacity(3 * schedule.len());
    for (i, &(jr, dt)) in schedule.steps.iter().enumerate() {
        let spec = match link {
            LinkRealization::Exact => ChannelSpec::unitary(expm_hermitian(&lop, jr * dt)?)?,
            LinkRealization::Randomized { approx } => {
                randomized_channel(p[i], BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(approx.clone()))?
            }
            LinkRealization::Deterministic { approx } => ChannelSpec::unitary(approx.clone())?,
        };
        for links in [&odd, &even] {
            if !links.is_empty() {
                out.push(ChannelStep::Links {
                    spec: spec.clone(),
                    links: links.clone(),
                });
            }
        }
        out.push(ChannelStep::Phase((0..dim).map(|s| onsite_energy(s, n, params.j, params.mu) * dt).collect()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::{evolve_trotter, make_schedule, SchedulePolicy, TrotterOptions};
    use crate::lattice::DEFAULT_DIM_CAP;
    use crate::linalg::herm_trace_norm;

    fn random_density(dim: usize, rank: usize, seed: u64) -> CMat<f64> {
        let mut g = rng::stream(seed, &[]);
        let a = CMat::from_fn(dim, rank, |_, _| C::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5));
        let r = a.matmul(&a.adjoint());
        let tr = r.trace().re;
        r.scale(C::new(1.0 / tr, 0.0))
    }

    fn random_unitary(seed: u64) -> CMat<f64> {
        let h = random_density(16, 16, seed);
        expm_hermitian(&h, 7.0).unwrap()
    }

    #[test]
    fn endpoints_and_validation() {
        let v = random_unitary(1);
        let rho = random_density(16, 3, 2);
        let c0 = randomized_channel(0.0, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(v.clone())).unwrap();
        assert!(apply_channel(&c0, &rho).unwrap().sub(&rho).max_abs() < 1e-14);
        let c1 = randomized_channel(1.0, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(v.clone())).unwrap();
        assert!(apply_channel(&c1, &rho).unwrap().sub(&conjugate_by(&v, &rho)).max_abs() < 1e-14);
        assert!(randomized_channel(1.2, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(v)).is_err());
        let bad = rho.scale(C::new(2.0, 0.0));
        assert!(apply_channel(&c0, &bad).is_err());
    }

    #[test]
    fn unital_and_rank_bounded() {
        let c = randomized_channel(0.3, BranchOp::Unitary(random_unitary(3)), BranchOp::Unitary(random_unitary(4))).unwrap();
        let mixed = CMat::identity(16).scale(C::new(1.0 / 16.0, 0.0));
        assert!(apply_channel(&c, &mixed).unwrap().sub(&mixed).max_abs() < 1e-14);
        let pure = random_density(16, 1, 5);
        let out = apply_channel(&c, &pure).unwrap();
        let rank = herm_eigenvalues(&out).unwrap().iter().filter(|x| x.abs() > 1e-10).count();
        assert!(rank <= 2);
    }

    #[test]
    fn interpolation_rule() {
        let p = interpolation_probabilities(&[(0.1, 0.5), (0.2, 0.5), (0.4, 0.25)]).unwrap();
        assert_eq!(p, vec![0.5, 1.0, 1.0]);
        assert_eq!(interpolation_probabilities(&[(0.0, 1.0)]).unwrap(), vec![0.0]);
    }

    #[test]
    fn zero_probability_trajectory_is_identity() {
        let params = ModelParams::new(1, 2, 0.0);
        let v = random_unitary(6);
        let spec = randomized_channel(0.0, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(v)).unwrap();
        let steps = vec![ChannelStep::Links { spec, links: vec![(0, 1), (1, 0)] }; 5];
        let psi = LatticeState::<f64>::random(params, 3, DEFAULT_DIM_CAP).unwrap();
        let t = sample_channel_trajectory(&steps, &psi, 1).unwrap();
        assert!(t.branches.iter().all(|&b| b == 0));
        assert!((fidelity(&t.state, &psi).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn exact_realization_matches_trotter_evolution() {
        let params = ModelParams::new(1, 2, 0.3);
        let sched = make_schedule(0.3, 6, SchedulePolicy::perturbative(0.1, 1)).unwrap();
        let steps = adiabatic_channel_steps(&params, &sched, &LinkRealization::Exact).unwrap();
        let psi = LatticeState::<f64>::all_singlet(params, DEFAULT_DIM_CAP).unwrap();
        let t = sample_channel_trajectory(&steps, &psi, 0).unwrap();
        let reference = evolve_trotter(&psi, &sched, &params, TrotterOptions::default()).unwrap();
        assert!((fidelity(&t.state, &reference).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trajectory_average_matches_channel() {
        let params = ModelParams::new(1, 2, 0.0);
        let spec = randomized_channel(0.4, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(random_unitary(8))).unwrap();
        let steps = vec![ChannelStep::Links { spec, links: vec![(0, 1)] }; 3];
        let psi = LatticeState::<f64>::random(params, 4, DEFAULT_DIM_CAP).unwrap();
        let rho0 = CMat::from_fn(16, 16, |i, j| psi.amplitudes()[i] * psi.amplitudes()[j].conj());
        let exact = evolve_density(&steps, &rho0, 2).unwrap();
        let avg = trajectory_average(&steps, &psi, 1000, 11).unwrap();
        let d = herm_trace_norm(&avg.sub(&exact)).unwrap();
        // 8 distinct branch histories, so the error is a sum of 8 binomial terms
        assert!(d < 5.0 * (8.0f64).sqrt() / (1000.0f64).sqrt(), "trace distance {d}");
    }
}
