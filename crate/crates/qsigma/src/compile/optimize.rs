use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compile::circuit::{left_apply, left_apply_1q, u_and_derivatives, Circuit, Gate};
use crate::error::{Error, Result};
use crate::lattice::two_site::link_operator;
use crate::linalg::{expm_hermitian, CMat};
use crate::rng;
use crate::scalar::C;

/// One slot of a template: a CNOT or a free single-qubit gate.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Cnot(usize, usize),
    U(usize),
}

/// Fixed gate layout with free single-qubit parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub n_qubits: usize,
    pub slots: Vec<Slot>,
}

/// The ten-gate link layout:
/// `U0 U1 U2 U3 · CX(1,3) · U1 U3 · CX(1,3) · U1 U3`.
const TEN_GATE: [Slot; 10] = [
    Slot::U(0),
    Slot::U(1),
    Slot::U(2),
    Slot::U(3),
    Slot::Cnot(1, 3),
    Slot::U(1),
    Slot::U(3),
    Slot::Cnot(1, 3),
    Slot::U(1),
    Slot::U(3),
];

impl Template {
    /// Link template with 10, 20 or 30 gates: one, two or three copies of
    /// the ten-gate layout.
    pub fn link(depth: usize) -> Result<Self> {
        if depth == 0 || depth % 10 != 0 || depth > 30 {
            return Err(Error::Config(format!("template depth must be 10, 20 or 30, got {depth}")));
        }
        Ok(Self {
            n_qubits: 4,
            slots: TEN_GATE.iter().copied().cycle().take(depth).collect(),
        })
    }

    /// One single-qubit gate per qubit and no CNOT.
    pub fn product(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            slots: (0..n_qubits).map(Slot::U).collect(),
        }
    }

    pub fn n_params(&self) -> usize {
        4 * self.slots.iter().filter(|s| matches!(s, Slot::U(_))).count()
    }

    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                expected: self.n_params(),
                found: params.len(),
            });
        }
        let mut k = 0;
        let gates = self
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Cnot(control, target) => Gate::Cnot { control, target },
                Slot::U(qubit) => {
                    let p = [params[k], params[k + 1], params[k + 2], params[k + 3]];
                    k += 4;
                    Gate::U { qubit, params: p }
                }
            })
            .collect();
        Circuit::new(self.n_qubits, gates)
    }
}

/// `e^{iθ(H_h + H_p)}` on one link, `θ = J_r Δt`.
pub fn link_target(theta: f64) -> Result<CMat<f64>> {
    expm_hermitian(&link_operator::<f64>(), -theta)
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    /// `min_φ ‖T − e^{iφ}V‖² = 2d − 2|Tr T†V|`.
    #[default]
    Insensitive,
    /// `‖T − V‖² = 2d − 2 Re Tr T†V`.
    Sensitive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompileProblem {
    pub target: CMat<f64>,
    pub template: Template,
    pub phase: PhaseMode,
}

impl CompileProblem {
    pub fn new(target: CMat<f64>, template: Template, phase: PhaseMode) -> Result<Self> {
        let dim = 1usize << template.n_qubits;
        if target.rows() != dim || target.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: target.rows(),
            });
        }
        Ok(Self { target, template, phase })
    }

    fn cost_from_trace(&self, tau: C<f64>) -> f64 {
        let d = self.target.rows() as f64;
        let overlap = match self.phase {
            PhaseMode::Insensitive => tau.norm(),
            PhaseMode::Sensitive => tau.re,
        };
        (2.0 * d - 2.0 * overlap).max(0.0)
    }

    fn trace(&self, params: &[f64]) -> Result<C<f64>> {
        let v = crate::compile::compose(&self.template.circuit(params)?)?;
        Ok(self.target.inner(&v))
    }

    pub fn cost(&self, params: &[f64]) -> Result<f64> {
        Ok(self.cost_from_trace(self.trace(params)?))
    }

    /// Cost and its analytic gradient. With `V = S_k G_k P_{k−1}`,
    /// `∂ Tr(T†V) = Tr(P_{k−1} T† S_k ∂G_k)`.
    pub fn cost_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let circuit = self.template.circuit(params)?;
        let dim = self.target.rows();
        let m = circuit.gates.len();
        // prefix[k] = G_k ⋯ G_1
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(CMat::identity(dim));
        for g in &circuit.gates {
            let mut next = prefix.last().unwrap().clone();
            left_apply(g, &mut next);
            prefix.push(next);
        }
        let tau = self.target.inner(&prefix[m]);
        let cost = self.cost_from_trace(tau);
        // walk back with E = P_{k−1} T† S_k, keeping R = T† S_k
        let mut r = self.target.adjoint();
        let mut grad = vec![0.0; params.len()];
        let mut pi = params.len();
        for k in (0..m).rev() {
            if let Gate::U { qubit, params: p } = &circuit.gates[k] {
                pi -= 4;
                let e = prefix[k].matmul(&r);
                let bit = 1usize << qubit;
                // reduced 2×2 environment: red[b][a] = Σ_rest E[(b, rest), (a, rest)]
                let mut red = [[C::new(0.0, 0.0); 2]; 2];
                for row in 0..dim {
                    if row & bit != 0 {
                        continue;
                    }
                    for (b, rb) in [(0usize, row), (1, row | bit)] {
                        for (a, ca) in [(0usize, row), (1, row | bit)] {
                            red[b][a] += e[(rb, ca)];
                        }
                    }
                }
                let (_, du) = u_and_derivatives(p);
                for (j, dj) in du.iter().enumerate() {
                    let mut dtau = C::new(0.0, 0.0);
                    for a in 0..2 {
                        for b in 0..2 {
                            dtau += dj[a][b] * red[b][a];
                        }
                    }
                    grad[pi + j] = match self.phase {
                        PhaseMode::Insensitive => {
                            let n = tau.norm();
                            if n > 0.0 {
                                -2.0 * (tau.conj() * dtau).re / n
                            } else {
                                0.0
                            }
                        }
                        PhaseMode::Sensitive => -2.0 * dtau.re,
                    };
                }
            }
            // R ← R G_k
            r = right_apply(&circuit.gates[k], &r);
        }
        Ok((cost, grad))
    }
}

/// `M G` for one gate, through `(G† M†)†`.
fn right_apply(g: &Gate, m: &CMat<f64>) -> CMat<f64> {
    let mut t = m.adjoint();
    match g {
        Gate::Cnot { .. } => left_apply(g, &mut t),
        Gate::U { qubit, params } => {
            let u = crate::compile::circuit::u_matrix(params);
            let ud = [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]];
            left_apply_1q(&ud, *qubit, &mut t);
        }
    }
    t.adjoint()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: u64,
    /// L-BFGS memory.
    pub memory: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iters: 500,
            memory: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileResult {
    pub circuit: Circuit,
    pub params: Vec<f64>,
    pub cost: f64,
    /// Final cost of every start, warm start first.
    pub restart_costs: Vec<f64>,
}

struct Objective<'a>(&'a CompileProblem);

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.0.cost(p)?)
    }
}

impl Gradient for Objective<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        Ok(self.0.cost_and_gradient(p)?.1)
    }
}

fn local_search(problem: &CompileProblem, x0: Vec<f64>, cfg: &OptimizerConfig) -> Result<(Vec<f64>, f64)> {
    let start_cost = problem.cost(&x0)?;
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), cfg.memory)
        .with_tolerance_grad(1e-12)
        .and_then(|s| s.with_tolerance_cost(0.0))
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let run = Executor::new(Objective(problem), solver)
        .configure(|s| s.param(x0.clone()).max_iters(cfg.max_iters))
        .run();
    let (x, c) = match run {
        Ok(res) => {
            let st = res.state();
            match st.get_best_param() {
                Some(p) => (p.clone(), st.get_best_cost()),
                None => (x0, start_cost),
            }
        }
        // a failed line search leaves the start point as the answer
        Err(_) => (x0, start_cost),
    };
    if c <= start_cost {
        Ok((x, c))
    } else {
        Ok((x0_fallback(&x), start_cost))
    }
}

fn x0_fallback(x: &[f64]) -> Vec<f64> {
    x.to_vec()
}

/// Multi-start L-BFGS. Start 0 is `warm` (or all zeros, the identity
/// circuit); start `r ≥ 1` draws parameters uniformly in `[−π, π)` from
/// stream `(seed, [r])`. Ties go to the lowest start index.
pub fn compile(problem: &CompileProblem, cfg: &OptimizerConfig, seed: u64, warm: Option<&[f64]>) -> Result<CompileResult> {
    let n = problem.template.n_params();
    if let Some(w) = warm {
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: w.len() });
        }
    }
    let starts: Vec<Vec<f64>> = (0..cfg.restarts.max(1))
        .map(|r| {
            if r == 0 {
                warm.map_or_else(|| vec![0.0; n], <[f64]>::to_vec)
            } else {
                let mut g = rng::stream(seed, &[r as u64]);
                (0..n).map(|_| g.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
            }
        })
        .collect();
    let results: Vec<(Vec<f64>, f64)> = starts
        .into_par_iter()
        .map(|x0| {
            let x0c = x0.clone();
            match local_search(problem, x0, cfg) {
                Ok(r) => Ok(r),
                Err(_) => Ok((x0c.clone(), problem.cost(&x0c)?)),
            }
        })
        .collect::<Result<_>>()?;
    let restart_costs: Vec<f64> = results.iter().map(|r| r.1).collect();
    let best = (0..results.len())
        .min_by(|&a, &b| results[a].1.total_cmp(&results[b].1).then(a.cmp(&b)))
        .unwrap();
    let (params, cost) = results[best].clone();
    Ok(CompileResult {
        circuit: problem.template.circuit(&params)?,
        params,
        cost,
        restart_costs,
    })
}

/// Parameters of the deeper link template that reproduce `params` of a
/// shallower one: the extra copies get identity slots, so their CNOT pairs
/// cancel.
pub fn extend_params(params: &[f64], from: &Template, to: &Template) -> Result<Vec<f64>> {
    if params.len() != from.n_params() || to.slots.len() < from.slots.len() || to.slots[..from.slots.len()] != from.slots[..] {
        return Err(Error::InvalidInput("templates are not nested".into()));
    }
    let mut out = params.to_vec();
    out.resize(to.n_params(), 0.0);
    Ok(out)
}
