use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compile::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::linalg::{herm_eigen, CMat};
use crate::rng;
use crate::scalar::C;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiamondOptions {
    /// Random starts in addition to the maximally entangled one and the
    /// eigenvector-pair start.
    pub restarts: usize,
    pub max_iters: u64,
    pub seed: u64,
}

impl Default for DiamondOptions {
    fn default() -> Self {
        Self {
            restarts: 4,
            max_iters: 5000,
            seed: 0xD1A,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondResult {
    /// Certified lower bound: the output trace distance reached by `witness`.
    pub value: f64,
    /// Upper bound from the Choi-matrix relaxation.
    pub upper: f64,
    /// Input state on system ⊗ ancilla as a `d × d` matrix, row = system index.
    pub witness: Vec<Vec<[f64; 2]>>,
    pub method: String,
}

fn zero() -> C<f64> {
    C::new(0.0, 0.0)
}

/// Signed mixture `Σ_b w_b U_b · U_b†` of two channels' branches.
fn signed_branches(a: &ChannelSpec, b: &ChannelSpec) -> Result<Vec<(f64, CMat<f64>)>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut out: Vec<(f64, CMat<f64>)> = Vec::new();
    let push = |out: &mut Vec<(f64, CMat<f64>)>, w: f64, u: &CMat<f64>| {
        if w == 0.0 {
            return;
        }
        // merge identical unitaries so that a = b cancels exactly
        for (wo, uo) in out.iter_mut() {
            if uo.sub(u).max_abs() == 0.0 {
                *wo += w;
                return;
            }
        }
        out.push((w, u.clone()));
    };
    for br in a.branches() {
        push(&mut out, br.probability, br.unitary());
    }
    for br in b.branches() {
        push(&mut out, -br.probability, br.unitary());
    }
    out.retain(|(w, _)| *w != 0.0);
    Ok(out)
}

/// Orthonormal basis of the span of `vs` (modified Gram–Schmidt, two passes)
/// and the coefficients `R` with `v_b = Σ_k R[k][b] q_k`.
fn thin_qr(vs: &[Vec<C<f64>>]) -> (Vec<Vec<C<f64>>>, Vec<Vec<C<f64>>>) {
    let scale = vs.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut q: Vec<Vec<C<f64>>> = Vec::new();
    let mut r: Vec<Vec<C<f64>>> = Vec::new();
    for (b, v) in vs.iter().enumerate() {
        let mut w = v.clone();
        let mut coef = vec![zero(); q.len()];
        for _ in 0..2 {
            for (k, qk) in q.iter().enumerate() {
                let c = dot(qk, &w);
                coef[k] += c;
                for (wi, qi) in w.iter_mut().zip(qk) {
                    *wi -= c * qi;
                }
            }
        }
        for (k, c) in coef.into_iter().enumerate() {
            r[k][b] = c;
        }
        let n = norm(&w);
        if n > 1e-13 * scale.max(1e-300) {
            for wi in w.iter_mut() {
                *wi /= n;
            }
            q.push(w);
            let mut row = vec![zero(); vs.len()];
            row[b] = C::new(n, 0.0);
            r.push(row);
        }
    }
    (q, r)
}

fn dot(a: &[C<f64>], b: &[C<f64>]) -> C<f64> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C<f64>]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral data of `Σ_b w_b v_b v_b†`: orthonormal frame, eigenvalues and
/// eigenvectors of the small compressed matrix.
struct LowRank {
    q: Vec<Vec<C<f64>>>,
    values: Vec<f64>,
    vectors: Vec<Vec<C<f64>>>,
}

fn low_rank(weights: &[f64], vs: &[Vec<C<f64>>]) -> Result<LowRank> {
    let (q, r) = thin_qr(vs);
    let k = q.len();
    if k == 0 {
        return Ok(LowRank {
            q,
            values: vec![],
            vectors: vec![],
        });
    }
    let small = CMat::from_fn(k, k, |i, j| {
        weights
            .iter()
            .enumerate()
            .map(|(b, &w)| r[i][b] * r[j][b].conj() * w)
            .sum::<C<f64>>()
    });
    let small = small.add(&small.adjoint()).scale(C::new(0.5, 0.0));
    let e = herm_eigen(&small)?;
    Ok(LowRank { q, values: e.values, vectors: e.vectors })
}

fn trace_norm_value(weights: &[f64], vs: &[Vec<C<f64>>]) -> Result<f64> {
    Ok(low_rank(weights, vs)?.values.iter().map(|x| x.abs()).sum())
}

/// `vec(U X)` in row-major order.
fn vec_ux(u: &CMat<f64>, x: &CMat<f64>) -> Vec<C<f64>> {
    u.matmul(x).data().to_vec()
}

struct Problem {
    weights: Vec<f64>,
    unitaries: Vec<CMat<f64>>,
    d: usize,
}

impl Problem {
    /// `‖(Φ ⊗ I)(|x⟩⟨x|)‖₁` for unit `x`, and `(M_S + c) x` where
    /// `M_S = Σ_b w_b (U_b ⊗ I)† S (U_b ⊗ I)`, `S` the sign of the output
    /// and `c = Σ_b |w_b|` keeps the shifted operator positive.
    fn value_and_step(&self, x: &CMat<f64>) -> Result<(f64, CMat<f64>)> {
        let vs: Vec<Vec<C<f64>>> = self.unitaries.iter().map(|u| vec_ux(u, x)).collect();
        let lr = low_rank(&self.weights, &vs)?;
        let f: f64 = lr.values.iter().map(|x| x.abs()).sum();
        let dd = self.d * self.d;
        let frame: Vec<(f64, Vec<C<f64>>)> = lr
            .values
            .iter()
            .zip(&lr.vectors)
            .map(|(&lam, ev)| {
                let mut full = vec![zero(); dd];
                for (k, qk) in lr.q.iter().enumerate() {
                    for (fi, qi) in full.iter_mut().zip(qk) {
                        *fi += ev[k] * qi;
                    }
                }
                (lam.signum(), full)
            })
            .collect();
        let shift: f64 = self.weights.iter().map(|w| w.abs()).sum();
        let mut y = x.scale(C::new(shift, 0.0));
        for ((&w, u), v) in self.weights.iter().zip(&self.unitaries).zip(&vs) {
            let mut s = vec![zero(); dd];
            for (sg, e) in &frame {
                let c = dot(e, v) * *sg;
                for (si, ei) in s.iter_mut().zip(e) {
                    *si += c * ei;
                }
            }
            let sm = CMat::from_vec(self.d, self.d, s);
            y = y.add(&u.adjoint().matmul(&sm).scale(C::new(w, 0.0)));
        }
        Ok((f, y))
    }
}

/// Minorize–maximize ascent: with the output sign `S` frozen the objective is
/// the quadratic form of `M_S`, and one shifted power step cannot lower it.
fn ascend(problem: &Problem, mut x: CMat<f64>, max_iters: u64) -> Result<(f64, CMat<f64>)> {
    let n = x.frobenius();
    if n == 0.0 {
        return Err(Error::InvalidInput("zero start vector".into()));
    }
    x = x.scale(C::new(1.0 / n, 0.0));
    let (mut f, mut y) = problem.value_and_step(&x)?;
    let mut stall = 0;
    for _ in 0..max_iters {
        let ny = y.frobenius();
        let xn = y.scale(C::new(1.0 / ny, 0.0));
        let (fn_, yn) = problem.value_and_step(&xn)?;
        if fn_ < f {
            break;
        }
        stall = if fn_ - f <= 1e-15 * f.max(1e-300) { stall + 1 } else { 0 };
        x = xn;
        f = fn_;
        y = yn;
        if stall >= 20 {
            break;
        }
    }
    Ok((f, x))
}

/// Eigenphases and eigenvectors of a unitary, via a generic Hermitian
/// combination of its real and imaginary parts.
fn unitary_eigen(w: &CMat<f64>) -> Result<Vec<(f64, Vec<C<f64>>)>> {
    let h1 = w.add(&w.adjoint()).scale(C::new(0.5, 0.0));
    let h2 = w.sub(&w.adjoint()).scale(C::new(0.0, -0.5));
    for c in [0.618_033_988_749_895, 0.414_213_562_373_095, 1.732_050_807_568_877, 0.267_949_192_431_123] {
        let e = herm_eigen(&h1.add(&h2.scale(C::new(c, 0.0))))?;
        let mut ok = true;
        let mut out = Vec::with_capacity(e.values.len());
        for v in &e.vectors {
            let wv = w.matvec(v);
            let lam = dot(v, &wv);
            let res: f64 = wv.iter().zip(v).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt();
            if res > 1e-9 {
                ok = false;
                break;
            }
            out.push((lam.arg(), v.clone()));
        }
        if ok {
            return Ok(out);
        }
    }
    Err(Error::NonConvergence {
        iterations: 4,
        residual: f64::NAN,
    })
}

/// Smallest arc containing the phases and its two endpoints (indices).
fn minimal_arc(phases: &[f64]) -> (f64, usize, usize) {
    let tau = std::f64::consts::TAU;
    let mut idx: Vec<usize> = (0..phases.len()).collect();
    let norm = |p: f64| p.rem_euclid(tau);
    idx.sort_by(|&a, &b| norm(phases[a]).total_cmp(&norm(phases[b])));
    let n = idx.len();
    let (mut gap, mut at) = (-1.0, 0);
    for k in 0..n {
        let a = norm(phases[idx[k]]);
        let b = if k + 1 < n { norm(phases[idx[k + 1]]) } else { norm(phases[idx[0]]) + tau };
        if b - a > gap {
            gap = b - a;
            at = k;
        }
    }
    // arc runs from idx[at + 1] forward to idx[at]
    (tau - gap, idx[(at + 1) % n], idx[at])
}

/// Closed-form diamond distance of `U · U†` and `V · V†`: `2 sin(Θ/2)` for the
/// smallest arc `Θ` holding the eigenphases of `U†V`, and 2 once `Θ ≥ π`.
pub fn unitary_diamond_distance(u: &CMat<f64>, v: &CMat<f64>) -> Result<f64> {
    if u.rows() != v.rows() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: v.rows(),
        });
    }
    let eig = unitary_eigen(&u.adjoint().matmul(v))?;
    let phases: Vec<f64> = eig.iter().map(|e| e.0).collect();
    let (arc, _, _) = minimal_arc(&phases);
    Ok(if arc >= std::f64::consts::PI { 2.0 } else { 2.0 * (0.5 * arc).sin() })
}

/// `‖Tr_out M_A‖∞` with `M_A = (I ⊗ √A) |J_A| (I ⊗ √A)` and
/// `J_A = (I ⊗ A^{−1/2}) J (I ⊗ A^{−1/2})`, `J` the Choi matrix of the signed
/// mixture. Any positive definite `A` gives an upper bound.
fn choi_bound(problem: &Problem, a: &CMat<f64>) -> Result<f64> {
    let d = problem.d;
    let e = herm_eigen(a)?;
    if e.values[0] <= 0.0 {
        return Err(Error::InvalidInput("weight matrix must be positive definite".into()));
    }
    let inv_sqrt = e.apply_fn(|l| C::new(1.0 / l.sqrt(), 0.0));
    let sqrt = e.apply_fn(|l| C::new(l.sqrt(), 0.0));
    // (I ⊗ M) vec(U) = vec(U Mᵀ)
    let mt = inv_sqrt.transpose();
    let vs: Vec<Vec<C<f64>>> = problem.unitaries.iter().map(|u| u.matmul(&mt).data().to_vec()).collect();
    let lr = low_rank(&problem.weights, &vs)?;
    // Tr_out Q|K|Q† = Σ_kl |K|_kl Q_kᵀ conj(Q_l)
    let k = lr.q.len();
    let mut absk = CMat::zeros(k, k);
    for (lam, ev) in lr.values.iter().zip(&lr.vectors) {
        for i in 0..k {
            for j in 0..k {
                absk[(i, j)] += ev[i] * ev[j].conj() * lam.abs();
            }
        }
    }
    let qs: Vec<CMat<f64>> = lr.q.iter().map(|q| CMat::from_vec(d, d, q.clone())).collect();
    let mut y = CMat::zeros(d, d);
    for i in 0..k {
        for j in 0..k {
            if absk[(i, j)].norm() == 0.0 {
                continue;
            }
            y = y.add(&qs[i].transpose().matmul(&qs[j].conj()).scale(absk[(i, j)]));
        }
    }
    let t = sqrt.matmul(&y).matmul(&sqrt);
    let t = t.add(&t.adjoint()).scale(C::new(0.5, 0.0));
    let vals = herm_eigen(&t)?.values;
    Ok(vals.iter().fold(0.0, |m: f64, x| m.max(x.abs())))
}

/// Diamond distance `‖Φ_a − Φ_b‖⋄` of two mixed-unitary channels.
///
/// The lower bound maximizes the output trace norm over pure inputs on
/// system ⊗ ancilla (ancilla dimension = system dimension) by monotone
/// ascent from the maximally entangled state, an eigenvector-pair state of
/// the first branches, and random Gaussian starts. The upper bound is the
/// weighted Choi relaxation minimized over a few weights built from the
/// witness; for two single-unitary channels the closed form is used.
pub fn diamond_distance(a: &ChannelSpec, b: &ChannelSpec, opts: &DiamondOptions) -> Result<DiamondResult> {
    let d = a.dim();
    let signed = signed_branches(a, b)?;
    if signed.is_empty() {
        return Ok(DiamondResult {
            value: 0.0,
            upper: 0.0,
            witness: witness_rows(&CMat::identity(d).scale(C::new(1.0 / (d as f64).sqrt(), 0.0))),
            method: "identical-branches".into(),
        });
    }
    let problem = Problem {
        weights: signed.iter().map(|s| s.0).collect(),
        unitaries: signed.into_iter().map(|s| s.1).collect(),
        d,
    };
    let mut starts = vec![CMat::identity(d).scale(C::new(1.0 / (d as f64).sqrt(), 0.0))];
    // (|e_1⟩ + |e_2⟩)/√2 on the system for the arc endpoints of U_a†U_b
    let (ua, ub) = (a.branches()[0].unitary(), b.branches()[0].unitary());
    if let Ok(eig) = unitary_eigen(&ua.adjoint().matmul(ub)) {
        let phases: Vec<f64> = eig.iter().map(|e| e.0).collect();
        let (_, i, j) = minimal_arc(&phases);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        if i != j {
            starts.push(CMat::from_fn(d, d, |r, c| if c == 0 { (eig[i].1[r] + eig[j].1[r]) * s } else { zero() }));
        }
    }
    for r in 0..opts.restarts {
        let mut g = rng::stream(opts.seed, &[r as u64]);
        starts.push(CMat::from_fn(d, d, |_, _| C::new(StandardNormal.sample(&mut g), StandardNormal.sample(&mut g))));
    }
    let finals: Vec<(f64, CMat<f64>)> = starts
        .into_par_iter()
        .map(|x0| ascend(&problem, x0, opts.max_iters))
        .collect::<Result<_>>()?;
    let best = (0..finals.len())
        .max_by(|&i, &j| finals[i].0.total_cmp(&finals[j].0).then(j.cmp(&i)))
        .unwrap();
    let x = finals[best].1.clone();
    let vs: Vec<Vec<C<f64>>> = problem.unitaries.iter().map(|u| vec_ux(u, &x)).collect();
    let value = trace_norm_value(&problem.weights, &vs)?.min(2.0);

    // input reduced state of the witness, ρ = Xᵀ conj(X)
    let rho = x.transpose().matmul(&x.conj());
    let rho = rho.add(&rho.adjoint()).scale(C::new(0.5, 0.0));
    let mut upper = choi_bound(&problem, &CMat::identity(d).scale(C::new(1.0 / d as f64, 0.0)))?;
    for cand in [rho.clone(), rho.transpose()] {
        for eta in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
            let a = cand.add(&CMat::identity(d).scale(C::new(eta, 0.0)));
            if let Ok(u) = choi_bound(&problem, &a) {
                upper = upper.min(u);
            }
        }
    }
    let mut method = "ascent-lower/choi-upper";
    if a.branches().len() == 1 && b.branches().len() == 1 {
        upper = upper.min(unitary_diamond_distance(ua, ub)?);
        method = "ascent-lower/closed-form-upper";
    }
    Ok(DiamondResult {
        value,
        // both bounds carry round-off of order 1e-15
        upper: upper.min(2.0).max(value),
        witness: witness_rows(&x),
        method: method.into(),
    })
}

fn witness_rows(x: &CMat<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..x.rows()).map(|i| x.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}
