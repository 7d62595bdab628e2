use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{model_spectrum, SolverOptions};
use crate::lattice::ModelParams;
use crate::perturbation::perturbative_gap;

/// Where the gap `ΔE_i` of a gap-adapted schedule comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GapSource {
    /// `1 − 2d J_r + 3d J_r²`.
    Perturbative { d: usize },
    /// Exact gap of the given lattice at each scheduled coupling.
    Exact { params: ModelParams },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchedulePolicy {
    /// `dt_i = c / ΔE_i`.
    GapAdapted { c: f64, source: GapSource },
    /// Constant `dt`.
    Uniform { dt: f64 },
}

impl SchedulePolicy {
    pub fn perturbative(c: f64, d: usize) -> Self {
        Self::GapAdapted {
            c,
            source: GapSource::Perturbative { d },
        }
    }

    pub fn exact(c: f64, params: ModelParams) -> Self {
        Self::GapAdapted {
            c,
            source: GapSource::Exact { params },
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::GapAdapted { source: GapSource::Perturbative { .. }, .. } => "gap-adapted-perturbative",
            Self::GapAdapted { source: GapSource::Exact { .. }, .. } => "gap-adapted-exact",
            Self::Uniform { .. } => "uniform",
        }
    }
}

/// Linear ramp `J_{r,i} = i J_{r,max} / N`, `i = 1..N`, with its time steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<(f64, f64)>,
    pub total_time: f64,
    pub policy: SchedulePolicy,
}

impl Schedule {
    pub fn couplings(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.0)
    }

    pub fn sum_dt_squared(&self) -> f64 {
        self.steps.iter().map(|s| s.1 * s.1).sum()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Exact gap of `params` at coupling `jr`.
pub fn exact_gap(params: &ModelParams, jr: f64) -> Result<f64> {
    let s = model_spectrum::<f64>(&params.with_jr(jr), &SolverOptions::default(), 1 << 22)?;
    Ok(s.gap)
}

pub fn make_schedule(jr_max: f64, n: usize, policy: SchedulePolicy) -> Result<Schedule> {
    if !(jr_max >= 0.0) || !jr_max.is_finite() {
        return Err(Error::Config(format!("jr_max must be finite and non-negative, got {jr_max}")));
    }
    if n == 0 {
        return Err(Error::Config("step count must be at least 1".into()));
    }
    let mut steps = Vec::with_capacity(n);
    for i in 1..=n {
        let jr = i as f64 * jr_max / n as f64;
        let dt = match &policy {
            SchedulePolicy::Uniform { dt } => {
                if !(*dt >= 0.0) {
                    return Err(Error::Config("dt must be non-negative".into()));
                }
                *dt
            }
            SchedulePolicy::GapAdapted { c, source } => {
                let gap = match source {
                    GapSource::Perturbative { d } => {
                        let g = perturbative_gap(jr, *d);
                        if g <= 0.0 {
                            return Err(Error::Config(format!(
                                "perturbative gap {g} is not positive at J_r = {jr}; use the exact-gap policy"
                            )));
                        }
                        g
                    }
                    GapSource::Exact { params } => exact_gap(params, jr)?,
                };
                if !(gap > 0.0) {
                    return Err(Error::Config(format!("gap {gap} is not positive at J_r = {jr}")));
                }
                c / gap
            }
        };
        steps.push((jr, dt));
    }
    let total_time = steps.iter().map(|s| s.1).sum();
    Ok(Schedule { steps, total_time, policy })
}
