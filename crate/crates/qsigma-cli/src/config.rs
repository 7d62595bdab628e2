use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qsigma::adiabatic::{GapKind, SplitMode, TrotterOptions};
use qsigma::compile::PhaseMode;
use qsigma::lattice::{Boundary, ModelParams, DEFAULT_DIM_CAP};
use qsigma::shadows::ObservableKind;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    AdiabaticSweep,
    ShadowSweep,
    Compile,
    DiamondSweep,
    GapScan,
    ChannelFidelity,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::AdiabaticSweep => "adiabatic-sweep",
            Self::ShadowSweep => "shadow-sweep",
            Self::Compile => "compile",
            Self::DiamondSweep => "diamond-sweep",
            Self::GapScan => "gap-scan",
            Self::ChannelFidelity => "channel-fidelity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub jr_max: Vec<f64>,
    pub steps: Vec<usize>,
    /// `dt_i = c / ΔE_i`.
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

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            jr_max: (1..=20).map(|i| i as f64 / 10.0).collect(),
            steps: vec![5, 10, 20, 40, 80],
            c: default_c(),
            gap: GapKind::Perturbative,
            trotter: TrotterOptions::default(),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Normalized complex Gaussian amplitudes.
    #[default]
    Random,
    AllSinglet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSettings {
    pub t_max: f64,
    /// Number of time points, `t_k = k t_max / (points − 1)`.
    pub time_points: usize,
    pub snapshots: usize,
    pub groups: usize,
    /// When set together with `delta`, `snapshots` and `groups` come from the
    /// sample bound of the single-qubit charge.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub observable: ObservableKind,
    #[serde(default)]
    pub initial: InitialState,
    /// Trotter step for the evolution; exact evolution when absent.
    #[serde(default)]
    pub trotter_dt: Option<f64>,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            time_points: 10,
            snapshots: 100_000,
            groups: 10,
            epsilon: None,
            delta: None,
            observable: ObservableKind::Both,
            initial: InitialState::Random,
            trotter_dt: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileSettings {
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_jr")]
    pub jr: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iters")]
    pub max_iters: u64,
    #[serde(default)]
    pub phase: PhaseMode,
}

fn default_depth() -> usize {
    10
}
fn default_jr() -> f64 {
    0.04
}
fn default_dt() -> f64 {
    0.2
}
fn default_restarts() -> usize {
    10
}
fn default_iters() -> u64 {
    500
}

impl Default for CompileSettings {
    fn default() -> Self {
        Self {
            depth: default_depth(),
            jr: default_jr(),
            dt: default_dt(),
            restarts: default_restarts(),
            max_iters: default_iters(),
            phase: PhaseMode::Insensitive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSettings {
    /// Largest `J_r Δt` of interest; the compiled circuit targets it.
    #[serde(default = "default_theta")]
    pub theta_max: f64,
    /// Number of points on `p ∈ [0, 1]` for the diamond sweep.
    #[serde(default = "default_points")]
    pub p_points: usize,
    #[serde(default = "default_depths")]
    pub depths: Vec<usize>,
    /// Random starts of the diamond-distance ascent.
    #[serde(default = "default_diamond_restarts")]
    pub diamond_restarts: usize,
    /// Adiabatic ramp of the fidelity experiment.
    #[serde(default = "default_ramp_jr")]
    pub jr_max: f64,
    #[serde(default = "default_ramp_steps")]
    pub steps: usize,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
}

fn default_theta() -> f64 {
    0.1
}
fn default_points() -> usize {
    11
}
fn default_depths() -> Vec<usize> {
    vec![10, 20, 30]
}
fn default_diamond_restarts() -> usize {
    4
}
fn default_ramp_jr() -> f64 {
    0.5
}
fn default_ramp_steps() -> usize {
    10
}
fn default_reps() -> usize {
    100
}

impl Default for ChannelSettings {
    fn default() -> Self {
        Self {
            theta_max: default_theta(),
            p_points: default_points(),
            depths: default_depths(),
            diamond_restarts: default_diamond_restarts(),
            jr_max: default_ramp_jr(),
            steps: default_ramp_steps(),
            repetitions: default_reps(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapScanSettings {
    pub jr: Vec<f64>,
    /// Lattice lengths; `model.l` when empty.
    #[serde(default)]
    pub l: Vec<usize>,
}

impl Default for GapScanSettings {
    fn default() -> Self {
        Self {
            jr: (1..=10).map(|i| i as f64 / 100.0).collect(),
            l: vec![],
        }
    }
}

/// One experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub format_version: u32,
    pub experiment: Experiment,
    pub model: ModelParams,
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub estimator: EstimatorSettings,
    #[serde(default)]
    pub compile: CompileSettings,
    #[serde(default)]
    pub channel: ChannelSettings,
    #[serde(default)]
    pub gap_scan: GapScanSettings,
}

impl RunConfig {
    pub fn new(experiment: Experiment, model: ModelParams) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            experiment,
            model,
            seed: 0,
            out: PathBuf::from("out"),
            schedule: ScheduleConfig::default(),
            estimator: EstimatorSettings::default(),
            compile: CompileSettings::default(),
            channel: ChannelSettings::default(),
            gap_scan: GapScanSettings::default(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn gap_scan_lengths(&self) -> Vec<usize> {
        if self.gap_scan.l.is_empty() {
            vec![self.model.l]
        } else {
            self.gap_scan.l.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

struct Errors(Vec<FieldError>);

impl Errors {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            field: field.into(),
            message: message.into(),
        });
    }

    fn check(&mut self, ok: bool, field: &str, message: impl FnOnce() -> String) {
        if !ok {
            self.push(field, message());
        }
    }
}

fn finite_nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

fn check_lattice(e: &mut Errors, field: &str, m: &ModelParams, split: bool, dim_cap: usize) {
    if let Err(err) = m.lattice() {
        e.push(field, err.to_string());
        return;
    }
    for (name, v) in [("j", m.j), ("mu", m.mu), ("jr", m.jr)] {
        e.check(v.is_finite(), &format!("{field}.{name}"), || format!("must be finite, got {v}"));
    }
    if split {
        if let Err(err) = m.require_split() {
            e.push(format!("{field}.l"), err.to_string());
        }
    }
    if m.dim() > dim_cap as u128 {
        e.push(
            format!("{field}.l"),
            format!("state dimension 4^{} exceeds the cap {dim_cap}", m.n_sites()),
        );
    }
}

/// Every structural and semantic problem with `cfg`, in field order.
pub fn validate(cfg: &RunConfig) -> Vec<FieldError> {
    let mut e = Errors(Vec::new());
    e.check(cfg.format_version == FORMAT_VERSION, "format_version", || {
        format!("unsupported version {}, expected {FORMAT_VERSION}", cfg.format_version)
    });
    e.check(!cfg.out.as_os_str().is_empty(), "out", || "output directory is empty".into());
    let m = &cfg.model;
    match cfg.experiment {
        Experiment::AdiabaticSweep => {
            let split = cfg.schedule.trotter.split == SplitMode::EvenOdd;
            check_lattice(&mut e, "model", m, split, DEFAULT_DIM_CAP);
            let s = &cfg.schedule;
            if split && m.boundary == Boundary::Periodic && m.l % 2 == 1 {
                e.push("schedule.trotter.split", "even-odd split requires even L; use the sequential split");
            }
            e.check(!s.jr_max.is_empty(), "schedule.jr_max", || "needs at least one value".into());
            for (i, &j) in s.jr_max.iter().enumerate() {
                e.check(finite_nonneg(j), &format!("schedule.jr_max[{i}]"), || format!("must be finite and ≥ 0, got {j}"));
            }
            e.check(!s.steps.is_empty(), "schedule.steps", || "needs at least one value".into());
            for (i, &n) in s.steps.iter().enumerate() {
                e.check(n > 0, &format!("schedule.steps[{i}]"), || "must be at least 1".into());
            }
            e.check(s.c.is_finite() && s.c > 0.0, "schedule.c", || format!("must be positive, got {}", s.c));
            if s.gap == GapKind::Perturbative {
                for (i, &j) in s.jr_max.iter().enumerate() {
                    let ramp_bad = (1..=1000).any(|k| qsigma::perturbation::perturbative_gap(j * k as f64 / 1000.0, m.d) <= 0.0);
                    e.check(!ramp_bad, &format!("schedule.jr_max[{i}]"), || {
                        format!("perturbative gap is not positive on the ramp to {j}; use gap = \"exact\"")
                    });
                }
            }
        }
        Experiment::ShadowSweep => {
            check_lattice(&mut e, "model", m, cfg.estimator.trotter_dt.is_some(), DEFAULT_DIM_CAP);
            let s = &cfg.estimator;
            e.check(finite_nonneg(s.t_max), "estimator.t_max", || format!("must be finite and ≥ 0, got {}", s.t_max));
            e.check(s.time_points >= 1, "estimator.time_points", || "must be at least 1".into());
            e.check(s.snapshots >= 1, "estimator.snapshots", || "must be at least 1".into());
            e.check(s.groups >= 1, "estimator.groups", || "must be at least 1".into());
            e.check(s.groups <= s.snapshots.max(1), "estimator.groups", || "cannot exceed snapshots".into());
            if let Some(eps) = s.epsilon {
                e.check(eps.is_finite() && eps > 0.0, "estimator.epsilon", || format!("must be positive, got {eps}"));
            }
            if let Some(d) = s.delta {
                e.check(d > 0.0 && d < 1.0, "estimator.delta", || format!("must lie in (0, 1), got {d}"));
            }
            e.check(s.epsilon.is_some() == s.delta.is_some(), "estimator.delta", || {
                "epsilon and delta must be given together".into()
            });
            if let Some(dt) = s.trotter_dt {
                e.check(dt.is_finite() && dt > 0.0, "estimator.trotter_dt", || format!("must be positive, got {dt}"));
            }
        }
        Experiment::Compile => check_compile(&mut e, &cfg.compile),
        Experiment::DiamondSweep => {
            check_compile(&mut e, &cfg.compile);
            check_channel(&mut e, &cfg.channel);
        }
        Experiment::ChannelFidelity => {
            check_lattice(&mut e, "model", m, true, 1 << 8);
            check_compile(&mut e, &cfg.compile);
            check_channel(&mut e, &cfg.channel);
            let c = &cfg.channel;
            e.check(finite_nonneg(c.jr_max), "channel.jr_max", || format!("must be finite and ≥ 0, got {}", c.jr_max));
            e.check(c.steps >= 1, "channel.steps", || "must be at least 1".into());
            e.check(c.repetitions >= 1, "channel.repetitions", || "must be at least 1".into());
        }
        Experiment::GapScan => {
            let g = &cfg.gap_scan;
            e.check(!g.jr.is_empty(), "gap_scan.jr", || "needs at least one value".into());
            for (i, &j) in g.jr.iter().enumerate() {
                e.check(j.is_finite(), &format!("gap_scan.jr[{i}]"), || format!("must be finite, got {j}"));
            }
            for (i, &l) in cfg.gap_scan_lengths().iter().enumerate() {
                let p = ModelParams { l, ..*m };
                check_lattice(&mut e, &format!("gap_scan.l[{i}]"), &p, false, 1 << 20);
            }
        }
    }
    e.0
}

fn check_compile(e: &mut Errors, c: &CompileSettings) {
    e.check([10, 20, 30].contains(&c.depth), "compile.depth", || format!("must be 10, 20 or 30, got {}", c.depth));
    e.check(c.jr.is_finite(), "compile.jr", || format!("must be finite, got {}", c.jr));
    e.check(c.dt.is_finite() && c.dt > 0.0, "compile.dt", || format!("must be positive, got {}", c.dt));
    e.check(c.restarts >= 1, "compile.restarts", || "must be at least 1".into());
    e.check(c.max_iters >= 1, "compile.max_iters", || "must be at least 1".into());
}

fn check_channel(e: &mut Errors, c: &ChannelSettings) {
    e.check(c.theta_max.is_finite() && c.theta_max > 0.0, "channel.theta_max", || {
        format!("must be positive, got {}", c.theta_max)
    });
    e.check(c.p_points >= 2, "channel.p_points", || "must be at least 2".into());
    e.check(!c.depths.is_empty(), "channel.depths", || "needs at least one depth".into());
    for (i, d) in c.depths.iter().enumerate() {
        e.check([10, 20, 30].contains(d), &format!("channel.depths[{i}]"), || format!("must be 10, 20 or 30, got {d}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shadow() -> RunConfig {
        RunConfig::new(Experiment::ShadowSweep, ModelParams::new(1, 2, 0.1))
    }

    #[test]
    fn defaults_validate_and_round_trip() {
        for exp in [
            Experiment::AdiabaticSweep,
            Experiment::ShadowSweep,
            Experiment::Compile,
            Experiment::DiamondSweep,
            Experiment::GapScan,
            Experiment::ChannelFidelity,
        ] {
            let c = RunConfig::new(exp, ModelParams::new(1, 2, 0.1));
            assert!(validate(&c).is_empty(), "{exp:?}: {:?}", validate(&c));
            assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn zero_epsilon_names_the_field() {
        let mut c = shadow();
        c.estimator.epsilon = Some(0.0);
        c.estimator.delta = Some(0.1);
        let errs = validate(&c);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].field, "estimator.epsilon");
    }

    #[test]
    fn odd_length_split_and_aggregation() {
        let mut c = RunConfig::new(Experiment::AdiabaticSweep, ModelParams::new(1, 3, 0.0));
        c.schedule.c = -1.0;
        c.schedule.steps = vec![0];
        let errs = validate(&c);
        let fields: Vec<&str> = errs.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"model.l"));
        assert!(fields.contains(&"schedule.trotter.split"));
        assert!(fields.contains(&"schedule.c"));
        assert!(fields.contains(&"schedule.steps[0]"));
        assert!(errs.iter().any(|e| e.message.contains("split")));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&shadow().to_json()).unwrap();
        v["estimator"]["bogus"] = 1.into();
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }
}
