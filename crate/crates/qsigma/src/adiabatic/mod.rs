//! Trotterized adiabatic preparation of the ground state.

mod schedule;
mod trotter;

pub use schedule::{exact_gap, make_schedule, GapSource, Schedule, SchedulePolicy};
pub use trotter::{apply_two_site, trotter_step, FactorOrder, SplitMode, TrotterOptions, TrotterStepPlan};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{evolve_exact, fidelity, model_spectrum, LatticeState, SolverOptions};
use crate::lattice::{ModelParams, SplitHamiltonian, DEFAULT_DIM_CAP};
use crate::scalar::Real;

/// Outcome of one adiabatic preparation.
#[derive(Clone, Debug)]
pub struct Prepared<T> {
    pub state: LatticeState<T>,
    /// Exact ground state at the final coupling.
    pub target: LatticeState<T>,
    /// `|⟨ψ|Ω⟩|`.
    pub fidelity: T,
    pub total_time: f64,
}

fn check_lattice(state: &LatticeState<impl Real>, params: &ModelParams) -> Result<()> {
    if state.params.lattice()? != params.lattice()? {
        return Err(Error::InvalidInput("state and parameters describe different lattices".into()));
    }
    Ok(())
}

/// Applies one Trotter step per scheduled `(J_r,i, Δt_i)`.
pub fn evolve_trotter<T: Real>(
    state: &LatticeState<T>,
    schedule: &Schedule,
    params: &ModelParams,
    options: TrotterOptions,
) -> Result<LatticeState<T>> {
    check_lattice(state, params)?;
    let mut psi = state.amplitudes().to_vec();
    for &(jr, dt) in &schedule.steps {
        TrotterStepPlan::<T>::new(params, jr, dt, options)?.apply(&mut psi);
    }
    LatticeState::new(state.params, psi)
}

/// Exact evolution under the piecewise-constant `H(J_r,i)` of the schedule.
pub fn evolve_scheduled_exact<T: Real>(
    state: &LatticeState<T>,
    schedule: &Schedule,
    params: &ModelParams,
    cap: usize,
) -> Result<LatticeState<T>> {
    check_lattice(state, params)?;
    let split = SplitHamiltonian::<T>::build(params, cap)?;
    let mut psi = state.clone();
    for &(jr, dt) in &schedule.steps {
        psi = evolve_exact(&psi, &split.at(T::lit(jr)), T::lit(dt))?;
    }
    Ok(psi)
}

/// Ramps from the all-singlet state to `params.jr` along `schedule` and
/// compares with the exact ground state at `params.jr`.
pub fn prepare_ground<T: Real>(params: &ModelParams, schedule: &Schedule, options: TrotterOptions) -> Result<Prepared<T>> {
    params.validate()?;
    if let Some(&(last, _)) = schedule.steps.last() {
        if (last - params.jr).abs() > 1e-12 * params.jr.abs().max(1.0) {
            return Err(Error::Config(format!(
                "schedule ends at J_r = {last} but the target coupling is {}",
                params.jr
            )));
        }
    }
    let start = LatticeState::<T>::all_singlet(*params, DEFAULT_DIM_CAP)?;
    let state = evolve_trotter(&start, schedule, params, options)?;
    let spec = model_spectrum::<T>(params, &SolverOptions::default(), DEFAULT_DIM_CAP)?;
    let target = spec.ground_state(params, DEFAULT_DIM_CAP)?;
    let fidelity = fidelity(&state, &target)?;
    Ok(Prepared {
        state,
        target,
        fidelity,
        total_time: schedule.total_time,
    })
}

/// Where a sweep takes the gap for its `Δt_i = c/ΔE_i` schedule.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapKind {
    #[default]
    Perturbative,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Lattice and on-site couplings; `jr` is ignored.
    pub params: ModelParams,
    pub jr_max: Vec<f64>,
    pub steps: Vec<usize>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub gap: GapKind,
    #[serde(default)]
    pub trotter: TrotterOptions,
}

fn default_c() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub jr_max: f64,
    pub n: usize,
    pub l: usize,
    pub d: usize,
    pub fidelity: f64,
    pub total_t: f64,
}

impl SweepSpec {
    pub fn policy(&self) -> SchedulePolicy {
        match self.gap {
            GapKind::Perturbative => SchedulePolicy::perturbative(self.c, self.params.d),
            GapKind::Exact => SchedulePolicy::exact(self.c, self.params),
        }
    }
}

/// Fidelity over the grid `jr_max × steps`, in row-major order.
pub fn adiabatic_sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    let grid: Vec<(f64, usize)> = spec
        .jr_max
        .iter()
        .flat_map(|&j| spec.steps.iter().map(move |&n| (j, n)))
        .collect();
    grid.par_iter()
        .map(|&(jr_max, n)| {
            let params = spec.params.with_jr(jr_max);
            let schedule = make_schedule(jr_max, n, spec.policy())?;
            let p = prepare_ground::<f64>(&params, &schedule, spec.trotter)?;
            Ok(SweepPoint {
                jr_max,
                n,
                l: params.l,
                d: params.d,
                fidelity: p.fidelity,
                total_t: p.total_time,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_is_already_prepared() {
        let p = ModelParams::new(1, 2, 0.0);
        let s = make_schedule(0.0, 5, SchedulePolicy::perturbative(0.1, 1)).unwrap();
        let out = prepare_ground::<f64>(&p, &s, TrotterOptions::default()).unwrap();
        assert!((out.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_schedule_end_is_rejected() {
        let p = ModelParams::new(1, 2, 0.3);
        let s = make_schedule(0.2, 5, SchedulePolicy::perturbative(0.1, 1)).unwrap();
        assert!(prepare_ground::<f64>(&p, &s, TrotterOptions::default()).is_err());
    }

    #[test]
    fn more_steps_help_at_weak_coupling() {
        let spec = SweepSpec {
            params: ModelParams::new(1, 2, 0.0),
            jr_max: vec![0.4],
            steps: vec![5, 40],
            c: 0.1,
            gap: GapKind::Perturbative,
            trotter: TrotterOptions::default(),
        };
        let pts = adiabatic_sweep(&spec).unwrap();
        assert!(pts[1].fidelity > pts[0].fidelity);
        assert!(pts[1].fidelity > 0.99);
    }
}
