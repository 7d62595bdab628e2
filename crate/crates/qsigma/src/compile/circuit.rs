use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::C;

/// Gate of the CNOT + arbitrary single-qubit gate set. Qubit `q` is bit `q`
/// of the basis index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase", deny_unknown_fields)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    /// `e^{iα} R_z(β) R_y(γ) R_z(δ)` with `params = [α, β, γ, δ]`.
    U { qubit: usize, params: [f64; 4] },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot { control, target } => vec![control, target],
            Gate::U { qubit, .. } => vec![qubit],
        }
    }
}

fn c(re: f64, im: f64) -> C<f64> {
    C::new(re, im)
}

/// 2×2 matrix of `U(α, β, γ, δ)` as `[[u00, u01], [u10, u11]]`.
pub fn u_matrix(p: &[f64; 4]) -> [[C<f64>; 2]; 2] {
    u_and_derivatives(p).0
}

/// `U` and its four partial derivatives.
pub fn u_and_derivatives(p: &[f64; 4]) -> ([[C<f64>; 2]; 2], [[[C<f64>; 2]; 2]; 4]) {
    let [a, b, g, d] = *p;
    let (sg, cg) = (0.5 * g).sin_cos();
    let ph = C::from_polar(1.0, a);
    // entries e^{iα} e^{∓iβ/2} e^{∓iδ/2} times the R_y entries
    let e = |sb: f64, sd: f64| C::from_polar(1.0, 0.5 * (sb * b + sd * d));
    let u = [
        [ph * e(-1.0, -1.0) * cg, -ph * e(-1.0, 1.0) * sg],
        [ph * e(1.0, -1.0) * sg, ph * e(1.0, 1.0) * cg],
    ];
    let i = c(0.0, 1.0);
    let signs = [[(-1.0, -1.0), (-1.0, 1.0)], [(1.0, -1.0), (1.0, 1.0)]];
    let mut du = [[[c(0.0, 0.0); 2]; 2]; 4];
    for r in 0..2 {
        for k in 0..2 {
            let (sb, sd) = signs[r][k];
            du[0][r][k] = i * u[r][k];
            du[1][r][k] = i * 0.5 * sb * u[r][k];
            du[3][r][k] = i * 0.5 * sd * u[r][k];
        }
    }
    let dg = [
        [ph * e(-1.0, -1.0) * (-0.5 * sg), -ph * e(-1.0, 1.0) * (0.5 * cg)],
        [ph * e(1.0, -1.0) * (0.5 * cg), ph * e(1.0, 1.0) * (-0.5 * sg)],
    ];
    du[2] = dg;
    (u, du)
}

/// Applies `g` (2×2) on qubit `q` from the left: `M ← G M`.
pub fn left_apply_1q(g: &[[C<f64>; 2]; 2], q: usize, m: &mut CMat<f64>) {
    let bit = 1usize << q;
    let cols = m.cols();
    for r in 0..m.rows() {
        if r & bit != 0 {
            continue;
        }
        for col in 0..cols {
            let (x0, x1) = (m[(r, col)], m[(r | bit, col)]);
            m[(r, col)] = g[0][0] * x0 + g[0][1] * x1;
            m[(r | bit, col)] = g[1][0] * x0 + g[1][1] * x1;
        }
    }
}

/// `M ← CNOT M`.
pub fn left_apply_cnot(control: usize, target: usize, m: &mut CMat<f64>) {
    let (cb, tb) = (1usize << control, 1usize << target);
    for r in 0..m.rows() {
        if r & cb != 0 && r & tb == 0 {
            for col in 0..m.cols() {
                let (x, y) = (m[(r, col)], m[(r | tb, col)]);
                m[(r, col)] = y;
                m[(r | tb, col)] = x;
            }
        }
    }
}

pub fn left_apply(g: &Gate, m: &mut CMat<f64>) {
    match g {
        Gate::Cnot { control, target } => left_apply_cnot(*control, *target, m),
        Gate::U { qubit, params } => left_apply_1q(&u_matrix(params), *qubit, m),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Self { n_qubits, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > 12 {
            return Err(Error::InvalidInput(format!("{} qubits is outside 1..=12", self.n_qubits)));
        }
        for (k, g) in self.gates.iter().enumerate() {
            let q = g.qubits();
            if let Some(bad) = q.iter().find(|&&x| x >= self.n_qubits) {
                return Err(Error::InvalidInput(format!("gate {k} acts on qubit {bad} of {}", self.n_qubits)));
            }
            if q.len() == 2 && q[0] == q[1] {
                return Err(Error::InvalidInput(format!("gate {k}: CNOT control equals target")));
            }
            if let Gate::U { params, .. } = g {
                if params.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidInput(format!("gate {k} has non-finite parameters")));
                }
            }
        }
        Ok(())
    }

    /// Circuit whose matrix is the complex conjugate of this one.
    pub fn conjugate(&self) -> Circuit {
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::U { qubit, params: [a, b, g, d] } => Gate::U {
                    qubit,
                    params: [-a, -b, g, -d],
                },
                ref cx => cx.clone(),
            })
            .collect();
        Circuit {
            n_qubits: self.n_qubits,
            gates,
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    /// Gates of `self` followed by those of `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
        })
    }
}

/// Unitary of the circuit; the first gate acts first.
pub fn compose(circuit: &Circuit) -> Result<CMat<f64>> {
    circuit.validate()?;
    let mut m = CMat::identity(1 << circuit.n_qubits);
    for g in &circuit.gates {
        left_apply(g, &mut m);
    }
    Ok(m)
}
