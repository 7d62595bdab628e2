//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::time::Instant;

use statrs::distribution::{Binomial, DiscreteCDF};

use qsigma::adiabatic::{
    adiabatic_sweep, make_schedule, prepare_ground, trotter_step, GapKind, SchedulePolicy, SweepSpec, TrotterOptions,
};
use qsigma::compile::{
    compile, compose, diamond_distance, extend_params, link_target, randomized_channel, unitary_diamond_distance,
    BranchOp, ChannelSpec, CompileProblem, DiamondOptions, OptimizerConfig, PhaseMode, Template,
};
use qsigma::exact::{evolve_exact, model_spectrum, LatticeState, SolverOptions};
use qsigma::lattice::noether::verify_noether;
use qsigma::lattice::sector::SectorSpec;
use qsigma::lattice::symmetry::sector_leakage;
use qsigma::lattice::two_site::{build_general_two_site, classify_two_site, family_dimension, Constraint, GeneralCouplings};
use qsigma::lattice::two_site::link_operator;
use qsigma::lattice::{build_hamiltonian, ModelParams, DEFAULT_DIM_CAP};
use qsigma::linalg::{expm_hermitian, herm_trace_norm, CMat};
use qsigma::perturbation::{finite_size_gap, perturbative_gap, perturbative_overlap};
use qsigma::rng::stream;
use qsigma::shadows::{required_samples, sample_shadows, time_sweep, Evolution, LocalObservable, ObservableKind, SweepConfig};
use qsigma::C;
use rand::Rng;
use rand_distr::StandardNormal;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} [{id}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    grid(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn random_hermitian(d: usize, seed: u64) -> CMat<f64> {
    let mut rng = stream(seed, &[]);
    let a = CMat::from_fn(d, d, |_, _| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    a.add(&a.adjoint()).scale(C::new(0.5, 0.0))
}

fn random_pure(d: usize, seed: u64) -> CMat<f64> {
    let mut rng = stream(seed, &[]);
    let psi: Vec<C<f64>> = (0..d).map(|_| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    CMat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / n)
}

fn criterion_1(r: &mut Report) {
    let jrs: Vec<f64> = (1..=10).map(|i| i as f64 / 100.0).collect();
    let t0 = Instant::now();
    let mut worst: (f64, f64) = (0.0, 0.0);
    let mut ok = true;
    for &jr in &jrs {
        let p = ModelParams::new(1, 10, jr);
        let s = model_spectrum::<f64>(&p, &SolverOptions::default(), 1 << 22).unwrap();
        let ratio = (s.gap - perturbative_gap(jr, 1)).abs() / jr.powi(3);
        ok &= ratio <= 10.0;
        if ratio > worst.0 {
            worst = (ratio, jr);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    r.line(
        1,
        "gap vs second-order formula, d=1 L=10",
        ok && secs < 60.0,
        format!("max |ΔE_ED − ΔE_pert|/Jr³ = {:.3} at Jr = {} (limit 10), runtime {secs:.1} s (limit 60)", worst.0, worst.1),
    );

    let jrs = [0.01, 0.02, 0.04, 0.06, 0.08, 0.1];
    let gaps: Vec<f64> = jrs
        .iter()
        .map(|&jr| model_spectrum::<f64>(&ModelParams::new(2, 3, jr), &SolverOptions::default(), 1 << 22).unwrap().gap)
        .collect();
    let diffs: Vec<f64> = jrs.iter().zip(&gaps).map(|(&jr, g)| g - perturbative_gap(jr, 2)).collect();
    // same comparison with the first-order band minimum of the L=3 lattice
    let finite = jrs
        .iter()
        .zip(&gaps)
        .map(|(&jr, g)| (g - finite_size_gap(jr, 2, 3)).abs() / jr.powi(2))
        .fold(0.0, f64::max);
    let num: f64 = jrs.iter().zip(&diffs).map(|(j, d)| d * j.powi(3)).sum();
    let den: f64 = jrs.iter().map(|j| j.powi(6)).sum();
    let c = num / den;
    let worst = jrs
        .iter()
        .zip(&diffs)
        .map(|(j, d)| (d - c * j.powi(3)).abs() / j.powi(3))
        .fold(0.0, f64::max);
    r.line(
        1,
        "gap vs second-order formula, d=2 L=3",
        worst <= 10.0,
        format!(
            "fitted cubic constant {c:.4}; max residual/Jr³ = {worst:.3} (limit 10); ΔE_ED − ΔE_pert at Jr = 0.01 is {:.3e}; with the L=3 band minimum max |diff|/Jr² = {finite:.3}",
            diffs[0]
        ),
    );
}

fn criterion_2(r: &mut Report) {
    for l in [2, 4] {
        let mut worst: (f64, f64) = (0.0, 0.0);
        for i in 1..=10 {
            let jr = i as f64 / 100.0;
            let p = ModelParams::new(1, l, jr);
            let s = model_spectrum::<f64>(&p, &SolverOptions::default(), DEFAULT_DIM_CAP).unwrap();
            let ratio = (s.singlet_overlap - perturbative_overlap(jr, l, 1)).abs() / jr.powi(3);
            if ratio > worst.0 {
                worst = (ratio, jr);
            }
        }
        r.line(
            2,
            &format!("singlet overlap closed form, d=1 L={l}"),
            worst.0 <= 10.0,
            format!("max |diff|/Jr³ = {:.3} at Jr = {} (limit 10)", worst.0, worst.1),
        );
    }
}

fn criterion_3(r: &mut Report) {
    let jrs: Vec<f64> = (1..=20).map(|i| i as f64 / 10.0).collect();
    let steps = vec![5, 10, 20, 40, 80];
    let run = |l: usize| {
        adiabatic_sweep(&SweepSpec {
            params: ModelParams::new(1, l, 0.0),
            jr_max: jrs.clone(),
            steps: steps.clone(),
            c: 0.1,
            gap: GapKind::Perturbative,
            trotter: TrotterOptions::default(),
        })
        .unwrap()
    };
    let t0 = Instant::now();
    let (small, large) = (run(2), run(6));
    let ns = steps.len();
    let min80 = small
        .iter()
        .filter(|p| p.n == 80 && p.jr_max <= 0.5 + 1e-12)
        .map(|p| p.fidelity)
        .fold(f64::INFINITY, f64::min);
    let mut drop: (f64, f64, usize) = (0.0, 0.0, 0);
    for row in small.chunks(ns) {
        for w in row.windows(2) {
            let d = w[0].fidelity - w[1].fidelity;
            if d > drop.0 {
                drop = (d, w[1].jr_max, w[1].n);
            }
        }
    }
    let violations: Vec<String> = small
        .iter()
        .zip(&large)
        .filter(|(a, b)| b.fidelity >= a.fidelity)
        .map(|(a, b)| format!("(Jr_max {}, N {}: {:.5} vs {:.5})", a.jr_max, a.n, b.fidelity, a.fidelity))
        .collect();
    r.line(
        3,
        "adiabatic fidelity at L=2, N=80, Jr_max ≤ 0.5",
        min80 >= 0.99,
        format!("min fidelity {min80:.5} (limit 0.99)"),
    );
    r.line(
        3,
        "fidelity non-decreasing in N at L=2",
        drop.0 <= 1e-3,
        format!("largest decrease {:.3e} at Jr_max = {}, N = {} (tolerance 1e-3)", drop.0, drop.1, drop.2),
    );
    r.line(
        3,
        "L=6 fidelity below L=2",
        violations.is_empty(),
        format!(
            "{} of {} grid points lower; exceptions {}; {:.1} s",
            small.len() - violations.len(),
            small.len(),
            if violations.is_empty() { "none".into() } else { violations.join(", ") },
            t0.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_4(r: &mut Report) {
    let p = ModelParams::new(1, 4, 0.1);
    let psi = LatticeState::<f64>::random(p, 41, DEFAULT_DIM_CAP).unwrap();
    let h = build_hamiltonian::<f64>(&p, DEFAULT_DIM_CAP).unwrap();
    let dts = log_grid(1e-3, 1e-1, 9);
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let exact = evolve_exact(&psi, &h, dt).unwrap();
            let t = trotter_step(&psi, p.jr, dt, &p, TrotterOptions::default()).unwrap();
            exact.amplitudes().iter().zip(t.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
        })
        .collect();
    let slope = loglog_slope(&dts, &errs);
    r.line(
        4,
        "one-step Trotter error order",
        (slope - 2.0).abs() <= 0.1,
        format!("log-log slope {slope:.4} over dt ∈ [1e-3, 1e-1] (target 2.0 ± 0.1)"),
    );
}

fn criterion_5(r: &mut Report) {
    let z = LocalObservable::new("Z", vec![0], CMat::from_fn(2, 2, |i, j| {
        C::new(if i != j { 0.0 } else if i == 0 { 1.0 } else { -1.0 }, 0.0)
    }))
    .unwrap();
    let cfg = required_samples(0.1, 0.1, z.locality(), z.norm(), 1.0).unwrap();
    let one = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
    let reps = 200u64;
    let t0 = Instant::now();
    let failures = (0..reps)
        .filter(|&k| {
            let recs = sample_shadows(&one, cfg.n_total, 0x5EED_0000 + k).unwrap();
            let est = qsigma::shadows::estimate(&recs, &z, cfg.groups).unwrap();
            (est - (-1.0)).abs() > 0.1
        })
        .count() as u64;
    // one-sided test of H0: failure rate ≤ δ
    let b = Binomial::new(0.1, reps).unwrap();
    let p_value = if failures == 0 { 1.0 } else { 1.0 - b.cdf(failures - 1) };
    r.line(
        5,
        "shadow guarantee for Z on |1⟩",
        p_value >= 0.05,
        format!(
            "N = {}, n = {}, {failures}/{reps} failures, binomial p-value {p_value:.3} for rate ≤ 0.1 ({:.1} s)",
            cfg.n_total,
            cfg.groups,
            t0.elapsed().as_secs_f64()
        ),
    );

    let p = ModelParams::new(1, 2, 0.1);
    let psi = LatticeState::<f64>::random(p, 0xF164, DEFAULT_DIM_CAP).unwrap();
    let t0 = Instant::now();
    let rows = time_sweep(
        &psi,
        &p,
        &grid(0.0, 10.0, 10),
        &SweepConfig {
            snapshots: 100_000,
            groups: 10,
            seed: 0xF164,
            evolution: Evolution::Exact,
            observables: ObservableKind::Both,
        },
    )
    .unwrap();
    let q0 = rows.iter().find(|r| r.label == "Q_total").unwrap().exact;
    let mut worst_q: f64 = 0.0;
    let mut worst_j: f64 = 0.0;
    for row in &rows {
        let k = if row.sigma > 0.0 { row.sigma } else { f64::MIN_POSITIVE };
        match row.label.as_str() {
            "Q_total" => worst_q = worst_q.max((row.estimate - q0).abs() / k),
            "J_total" => worst_j = worst_j.max(row.estimate.abs() / k),
            _ => {}
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    r.line(
        5,
        "charge and current estimates over time, L=2",
        worst_q <= 3.0 && worst_j <= 3.0 && secs < 600.0,
        format!("max |Q − Q(0)|/σ = {worst_q:.2}, max |J|/σ = {worst_j:.2} (limit 3), {secs:.1} s (limit 600)"),
    );
}

fn criterion_6(r: &mut Report) {
    let l = link_operator::<f64>();
    let rho = random_pure(16, 61);
    let (jr, p) = (1.0, 0.5);
    let dts = log_grid(0.01, 0.1, 7);
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let full = expm_hermitian(&l, jr * dt).unwrap();
            let spec = randomized_channel(p, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(full)).unwrap();
            let mixed = qsigma::compile::apply_channel(&spec, &rho).unwrap();
            let u = expm_hermitian(&l, p * jr * dt).unwrap();
            let exact = u.matmul(&rho).matmul(&u.adjoint());
            0.5 * herm_trace_norm(&mixed.sub(&exact)).unwrap()
        })
        .collect();
    let slope = loglog_slope(&dts, &errs);
    r.line(
        6,
        "randomized interpolation error order",
        (slope - 2.0).abs() <= 0.1,
        format!("log-log slope {slope:.4} of the trace distance over Δt ∈ [0.01, 0.1] at p = 0.5 (target 2.0 ± 0.1)"),
    );
}

fn criterion_7(r: &mut Report) {
    let theta = 0.1;
    let prob = CompileProblem::new(link_target(theta).unwrap(), Template::link(10).unwrap(), PhaseMode::Insensitive).unwrap();
    let c = compile(&prob, &OptimizerConfig::default(), 0x7, None).unwrap();
    let v = compose(&c.circuit).unwrap();
    let opts = DiamondOptions::default();
    let mut ordering = Vec::new();
    let mut endpoint: f64 = 0.0;
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let target = link_target(p * theta).unwrap();
        let exact = ChannelSpec::unitary(target.clone()).unwrap();
        let det = diamond_distance(&exact, &ChannelSpec::unitary(v.clone()).unwrap(), &opts).unwrap();
        let mix = randomized_channel(p, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(v.clone())).unwrap();
        let ran = diamond_distance(&exact, &mix, &opts).unwrap();
        if i == 0 || i == 10 {
            endpoint = endpoint.max((det.value - unitary_diamond_distance(&target, &v).unwrap()).abs());
            let mixed_closed = if i == 0 { 0.0 } else { unitary_diamond_distance(&target, &v).unwrap() };
            endpoint = endpoint.max((ran.value - mixed_closed).abs());
        } else {
            ordering.push((p, ran.value, det.value));
        }
    }
    let bad: Vec<String> = ordering
        .iter()
        .filter(|(_, ran, det)| ran > det)
        .map(|(p, ran, det)| format!("p={p:.1}: {ran:.4} > {det:.4}"))
        .collect();
    r.line(
        7,
        "randomized ≤ deterministic diamond distance",
        bad.is_empty(),
        format!(
            "compiled cost {:.4}; {} of {} points ordered; exceptions {}",
            c.cost,
            ordering.len() - bad.len(),
            ordering.len(),
            if bad.is_empty() { "none".into() } else { bad.join(", ") }
        ),
    );
    r.line(
        7,
        "endpoints match the unitary closed form",
        endpoint <= 1e-4,
        format!("max deviation {endpoint:.2e} (limit 1e-4)"),
    );
}

fn criterion_8(r: &mut Report) {
    let theta = 0.04 * 0.2;
    let target = link_target(theta).unwrap();
    let cfg = OptimizerConfig { restarts: 10, ..Default::default() };
    let t0 = Instant::now();
    let base = compile(
        &CompileProblem::new(target.clone(), Template::product(4), PhaseMode::Insensitive).unwrap(),
        &cfg,
        0x80,
        None,
    )
    .unwrap();
    let mut costs = Vec::new();
    let mut prev: Option<(Template, Vec<f64>)> = None;
    for depth in [10, 20, 30] {
        let tpl = Template::link(depth).unwrap();
        let warm = prev.as_ref().map(|(t, x)| extend_params(x, t, &tpl).unwrap());
        let prob = CompileProblem::new(target.clone(), tpl.clone(), PhaseMode::Insensitive).unwrap();
        let res = compile(&prob, &cfg, 0x80 + depth as u64, warm.as_deref()).unwrap();
        costs.push(res.cost);
        prev = Some((tpl, res.params));
    }
    let secs = t0.elapsed().as_secs_f64();
    r.line(
        8,
        "10-gate cost at least 2× below the 0-CNOT baseline",
        costs[0] * 2.0 <= base.cost,
        format!("baseline {:.5e}, 10-gate {:.5e}, ratio {:.4} (limit 0.5)", base.cost, costs[0], costs[0] / base.cost),
    );
    r.line(
        8,
        "cost non-increasing 10 → 20 → 30 gates",
        costs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)) && secs < 1800.0,
        format!("costs {:.6e}, {:.6e}, {:.6e}; {secs:.1} s (limit 1800)", costs[0], costs[1], costs[2]),
    );
}

fn criterion_9(r: &mut Report) {
    let cases = [(1, 2, 0.4), (1, 4, 0.3), (1, 6, 0.2), (2, 2, 0.2)];
    let (mut leak, mut charge, mut noether): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (d, l, jr) in cases {
        let p = ModelParams::new(d, l, jr);
        let s = make_schedule(jr, 20, SchedulePolicy::perturbative(0.1, d)).unwrap();
        let prep = prepare_ground::<f64>(&p, &s, TrotterOptions::default()).unwrap();
        let n = p.n_sites();
        leak = leak
            .max(sector_leakage(prep.state.amplitudes(), n, SectorSpec::ground(n)))
            .max(sector_leakage(prep.target.amplitudes(), n, SectorSpec::ground(n)));
        let rep = verify_noether(&p, DEFAULT_DIM_CAP).unwrap();
        charge = charge.max(rep.total_charge_commutator);
        noether = noether.max(rep.identity_residual);
    }
    r.line(
        9,
        "sector, charge conservation and continuity identity",
        leak <= 1e-10 && charge <= 1e-10 && noether <= 1e-10,
        format!(
            "over (d, L) ∈ {{(1,2), (1,4), (1,6), (2,2)}}: sector leakage {leak:.1e}, ‖[Q, H]‖ {charge:.1e}, continuity residual {:.1e} (limit 1e-10)",
            noether.abs()
        ),
    );
}

fn criterion_10(r: &mut Report) {
    let all = [Constraint::So3, Constraint::Parity, Constraint::TimeReversal, Constraint::SingletParity];
    let dim = family_dimension(&all);
    let mut rng = stream(0x10, &[]);
    let mut worst_member: f64 = 0.0;
    let mut weakest_reject = f64::INFINITY;
    for k in 0..50 {
        let c: [f64; 6] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
        let h = build_general_two_site::<f64>(&GeneralCouplings::from_array(c)).unwrap();
        worst_member = worst_member.max(classify_two_site(&h).max());
        let noise = random_hermitian(16, 0x1000 + k);
        let off = h.add(&noise.scale(C::new(1e-4 / noise.frobenius(), 0.0)));
        weakest_reject = weakest_reject.min(classify_two_site(&off).max());
    }
    r.line(
        10,
        "two-site symmetry classifier",
        dim == 7 && worst_member <= 1e-10 && weakest_reject > 1e-6,
        format!(
            "invariant operators span {dim} dimensions (6 couplings plus the identity); 50 members max defect {worst_member:.1e}; 50 perturbed (‖δH‖ = 1e-4) min defect {weakest_reject:.2e} (threshold 1e-6)"
        ),
    );
}

fn main() {
    let mut r = Report { failed: 0 };
    let t0 = Instant::now();
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);
    println!("{} failing line(s), {:.1} s total", r.failed, t0.elapsed().as_secs_f64());
    if r.failed > 0 {
        std::process::exit(1);
    }
}
