use serde::{Deserialize, Serialize};

use crate::adiabatic::{TrotterOptions, TrotterStepPlan};
use crate::error::{Error, Result};
use crate::exact::{evolve_exact, LatticeState};
use crate::lattice::{build_hamiltonian, ModelParams, DEFAULT_DIM_CAP};
use crate::shadows::{charge_observable, current_observable, estimate_with_error, sample_shadows, PauliSum};

/// How the state is carried to each time of the grid.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Evolution {
    Exact,
    /// First-order Trotter steps of at most `dt`.
    Trotter { dt: f64, options: TrotterOptions },
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    Charge,
    Current,
    #[default]
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub snapshots: usize,
    pub groups: usize,
    pub seed: u64,
    pub evolution: Evolution,
    pub observables: ObservableKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeRow {
    pub t: f64,
    /// `Q[x]`, `J[a->b]`, `Q_total` or `J_total`.
    pub label: String,
    pub exact: f64,
    pub estimate: f64,
    pub sigma: f64,
    pub n: usize,
    pub groups: usize,
}

/// Named Pauli sums measured by a sweep: per-site charges and their total,
/// per-link currents and their total over the oriented links of the lattice.
pub fn sweep_observables(params: &ModelParams, kind: ObservableKind) -> Result<Vec<(String, PauliSum)>> {
    let lat = params.lattice()?;
    let mut out = Vec::new();
    if kind != ObservableKind::Current {
        let q: Vec<_> = (0..lat.n_sites()).map(charge_observable).collect::<Result<_>>()?;
        for o in &q {
            out.push((o.label.clone(), o.paulis().clone()));
        }
        out.push(("Q_total".into(), PauliSum::sum(q.iter().map(|o| o.paulis()))));
    }
    if kind != ObservableKind::Charge {
        let j: Vec<_> = lat
            .links()
            .iter()
            .map(|k| current_observable(k.a, k.b, params.jr))
            .collect::<Result<_>>()?;
        for o in &j {
            out.push((o.label.clone(), o.paulis().clone()));
        }
        out.push(("J_total".into(), PauliSum::sum(j.iter().map(|o| o.paulis()))));
    }
    Ok(out)
}

/// Evolves `initial` to each `t` of `t_grid`, draws fresh shadows there and
/// estimates every sweep observable next to its exact value.
pub fn time_sweep(initial: &LatticeState<f64>, params: &ModelParams, t_grid: &[f64], config: &SweepConfig) -> Result<Vec<TimeRow>> {
    if initial.params.lattice()? != params.lattice()? {
        return Err(Error::InvalidInput("state and parameters describe different lattices".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidInput(format!("time {t} is not finite")));
    }
    let obs = sweep_observables(params, config.observables)?;
    let h = match config.evolution {
        Evolution::Exact => Some(build_hamiltonian::<f64>(params, DEFAULT_DIM_CAP)?),
        Evolution::Trotter { .. } => None,
    };
    let mut rows = Vec::new();
    for (ti, &t) in t_grid.iter().enumerate() {
        let psi = match (&h, config.evolution) {
            (Some(h), _) => evolve_exact(initial, h, t)?,
            (None, Evolution::Trotter { dt, options }) => {
                if !(dt > 0.0) {
                    return Err(Error::Config(format!("Trotter dt must be positive, got {dt}")));
                }
                let steps = (t.abs() / dt).ceil() as usize;
                let mut amps = initial.amplitudes().to_vec();
                if steps > 0 {
                    let plan = TrotterStepPlan::<f64>::new(params, params.jr, t / steps as f64, options)?;
                    for _ in 0..steps {
                        plan.apply(&mut amps);
                    }
                }
                LatticeState::new(*params, amps)?
            }
            (None, Evolution::Exact) => unreachable!(),
        };
        let records = sample_shadows(psi.amplitudes(), config.snapshots, crate::rng::derive_seed(config.seed, &[ti as u64]))?;
        for (label, o) in &obs {
            let e = estimate_with_error(&records, o, config.groups)?;
            rows.push(TimeRow {
                t,
                label: label.clone(),
                exact: o.expectation(psi.amplitudes()),
                estimate: e.value,
                sigma: e.sigma,
                n: config.snapshots,
                groups: config.groups,
            });
        }
    }
    Ok(rows)
}
