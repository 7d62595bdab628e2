//! Experiment drivers. Each returns its output files in memory so that a
//! failing run leaves nothing behind.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use qsigma::adiabatic::{adiabatic_sweep, make_schedule, SchedulePolicy, SweepSpec, TrotterOptions};
use qsigma::compile::{
    adiabatic_channel_steps, compile, compose, diamond_distance, extend_params, link_target, randomized_channel,
    trajectory_fidelity, BranchOp, ChannelSpec, CompileProblem, CompileResult, DiamondOptions, LinkRealization,
    OptimizerConfig, Template,
};
use qsigma::exact::{model_spectrum, LatticeState, SolverOptions};
use qsigma::lattice::{ModelParams, DEFAULT_DIM_CAP};
use qsigma::linalg::CMat;
use qsigma::perturbation::{perturbative_gap, perturbative_overlap};
use qsigma::rng::derive_seed;
use qsigma::shadows::{charge_observable, required_samples, time_sweep, Evolution, SweepConfig};

use crate::config::{CompileSettings, Experiment, InitialState, RunConfig};

/// One output file of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
    pub rows: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DriverOutput {
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
    /// `(task, seed)` for every seeded task.
    pub task_seeds: Vec<(String, u64)>,
}

/// CSV text with a header row; floats use the shortest round-trip form.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn into_artifact(self, name: &str) -> Result<Artifact> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let rows = self.rows.len();
        Ok(Artifact {
            name: name.into(),
            bytes: w.into_inner().context("flushing CSV")?,
            rows,
        })
    }
}

/// Shortest decimal that parses back to `x`, in exponent form outside
/// `[1e-4, 1e16)`.
pub fn f(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn run_experiment(cfg: &RunConfig) -> Result<DriverOutput> {
    match cfg.experiment {
        Experiment::AdiabaticSweep => adiabatic(cfg),
        Experiment::ShadowSweep => shadow(cfg),
        Experiment::Compile => compile_link(cfg),
        Experiment::DiamondSweep => diamond_sweep(cfg),
        Experiment::GapScan => gap_scan(cfg),
        Experiment::ChannelFidelity => channel_fidelity(cfg),
    }
}

fn adiabatic(cfg: &RunConfig) -> Result<DriverOutput> {
    let s = &cfg.schedule;
    let spec = SweepSpec {
        params: cfg.model,
        jr_max: s.jr_max.clone(),
        steps: s.steps.clone(),
        c: s.c,
        gap: s.gap,
        trotter: s.trotter,
    };
    let points = adiabatic_sweep(&spec)?;
    let mut t = Table::new(&["Jr_max", "N", "L", "d", "fidelity", "total_T"]);
    for p in points {
        t.push(vec![f(p.jr_max), p.n.to_string(), p.l.to_string(), p.d.to_string(), f(p.fidelity), f(p.total_t)]);
    }
    Ok(DriverOutput {
        artifacts: vec![t.into_artifact("adiabatic_sweep.csv")?],
        task_seeds: vec![],
    })
}

fn shadow(cfg: &RunConfig) -> Result<DriverOutput> {
    let e = &cfg.estimator;
    let (snapshots, groups) = match (e.epsilon, e.delta) {
        (Some(eps), Some(delta)) => {
            let q = charge_observable(0)?;
            let r = required_samples(eps, delta, q.locality(), q.norm(), cfg.model.n_sites() as f64)?;
            (r.n_total, r.groups)
        }
        _ => (e.snapshots, e.groups),
    };
    let state_seed = derive_seed(cfg.seed, &[1]);
    let shot_seed = derive_seed(cfg.seed, &[2]);
    let initial = match e.initial {
        InitialState::Random => LatticeState::<f64>::random(cfg.model, state_seed, DEFAULT_DIM_CAP)?,
        InitialState::AllSinglet => LatticeState::<f64>::all_singlet(cfg.model, DEFAULT_DIM_CAP)?,
    };
    let grid: Vec<f64> = if e.time_points == 1 {
        vec![0.0]
    } else {
        (0..e.time_points).map(|k| e.t_max * k as f64 / (e.time_points - 1) as f64).collect()
    };
    let sweep = SweepConfig {
        snapshots,
        groups,
        seed: shot_seed,
        evolution: match e.trotter_dt {
            Some(dt) => Evolution::Trotter {
                dt,
                options: TrotterOptions::default(),
            },
            None => Evolution::Exact,
        },
        observables: e.observable,
    };
    let rows = time_sweep(&initial, &cfg.model, &grid, &sweep)?;
    let mut t = Table::new(&["t", "label", "exact", "estimate", "sigma", "N", "n"]);
    for r in rows {
        t.push(vec![f(r.t), r.label, f(r.exact), f(r.estimate), f(r.sigma), r.n.to_string(), r.groups.to_string()]);
    }
    let mut task_seeds = vec![("shadow.snapshots".to_string(), shot_seed)];
    if e.initial == InitialState::Random {
        task_seeds.insert(0, ("initial_state".into(), state_seed));
    }
    Ok(DriverOutput {
        artifacts: vec![t.into_artifact("shadow_sweep.csv")?],
        task_seeds,
    })
}

fn optimizer(c: &CompileSettings) -> OptimizerConfig {
    OptimizerConfig {
        restarts: c.restarts,
        max_iters: c.max_iters,
        memory: 10,
    }
}

/// Compiles the link target at `theta` for every depth up to `depth`, each
/// deeper template warm-started from the previous one.
fn compile_ladder(c: &CompileSettings, theta: f64, depth: usize, seed: u64) -> Result<Vec<(usize, CompileResult)>> {
    let target = link_target(theta)?;
    let mut out: Vec<(usize, CompileResult)> = Vec::new();
    for dd in (10..=depth).step_by(10) {
        let tpl = Template::link(dd)?;
        let warm = match out.last() {
            Some((pd, prev)) => Some(extend_params(&prev.params, &Template::link(*pd)?, &tpl)?),
            None => None,
        };
        let prob = CompileProblem::new(target.clone(), tpl, c.phase)?;
        let r = compile(&prob, &optimizer(c), derive_seed(seed, &[dd as u64]), warm.as_deref())?;
        out.push((dd, r));
    }
    Ok(out)
}

#[derive(Serialize)]
struct CompileReport<'a> {
    depth: usize,
    jr: f64,
    dt: f64,
    theta: f64,
    cost: f64,
    baseline_cost: f64,
    cnot_count: usize,
    restart_costs: &'a [f64],
    circuit: &'a qsigma::compile::Circuit,
}

fn compile_link(cfg: &RunConfig) -> Result<DriverOutput> {
    let c = &cfg.compile;
    let theta = c.jr * c.dt;
    let seed = derive_seed(cfg.seed, &[0xC0]);
    let ladder = compile_ladder(c, theta, c.depth, seed)?;
    let (_, best) = ladder.last().context("empty compile ladder")?;
    let base_seed = derive_seed(cfg.seed, &[0xBA5E]);
    let base = compile(
        &CompileProblem::new(link_target(theta)?, Template::product(4), c.phase)?,
        &optimizer(c),
        base_seed,
        None,
    )?;
    let report = CompileReport {
        depth: c.depth,
        jr: c.jr,
        dt: c.dt,
        theta,
        cost: best.cost,
        baseline_cost: base.cost,
        cnot_count: best.circuit.cnot_count(),
        restart_costs: &best.restart_costs,
        circuit: &best.circuit,
    };
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    let mut task_seeds: Vec<(String, u64)> =
        ladder.iter().map(|(d, _)| (format!("compile.depth{d}"), derive_seed(seed, &[*d as u64]))).collect();
    task_seeds.push(("compile.baseline".into(), base_seed));
    Ok(DriverOutput {
        artifacts: vec![Artifact {
            name: "compile.json".into(),
            bytes,
            rows: 1,
        }],
        task_seeds,
    })
}

fn diamond_sweep(cfg: &RunConfig) -> Result<DriverOutput> {
    let ch = &cfg.channel;
    let seed = derive_seed(cfg.seed, &[0xC0]);
    let max_depth = *ch.depths.iter().max().context("no depths")?;
    let ladder = compile_ladder(&cfg.compile, ch.theta_max, max_depth, seed)?;
    let mut t = Table::new(&[
        "p",
        "depth",
        "deterministic_distance",
        "randomized_distance",
        "identity_distance",
        "deterministic_upper",
        "randomized_upper",
    ]);
    let mut task_seeds: Vec<(String, u64)> = Vec::new();
    let mut depths = ch.depths.clone();
    depths.sort_unstable();
    depths.dedup();
    for depth in depths {
        let (_, r) = ladder.iter().find(|(d, _)| *d == depth).context("depth missing from ladder")?;
        task_seeds.push((format!("compile.depth{depth}"), derive_seed(seed, &[depth as u64])));
        let v = compose(&r.circuit)?;
        let rows: Vec<Vec<String>> = (0..ch.p_points)
            .into_par_iter()
            .map(|i| -> Result<Vec<String>> {
                let p = i as f64 / (ch.p_points - 1) as f64;
                let opts = DiamondOptions {
                    restarts: ch.diamond_restarts,
                    seed: derive_seed(cfg.seed, &[0xD1, depth as u64, i as u64]),
                    ..Default::default()
                };
                let exact = ChannelSpec::unitary(link_target(p * ch.theta_max)?)?;
                let det = diamond_distance(&exact, &ChannelSpec::unitary(v.clone())?, &opts)?;
                let mix = randomized_channel(p, BranchOp::Unitary(CMat::identity(16)), BranchOp::Unitary(v.clone()))?;
                let ran = diamond_distance(&exact, &mix, &opts)?;
                let id = diamond_distance(&exact, &ChannelSpec::identity(16), &opts)?;
                Ok(vec![f(p), depth.to_string(), f(det.value), f(ran.value), f(id.value), f(det.upper), f(ran.upper)])
            })
            .collect::<Result<_>>()?;
        for (i, row) in rows.into_iter().enumerate() {
            task_seeds.push((format!("diamond.depth{depth}.p{i}"), derive_seed(cfg.seed, &[0xD1, depth as u64, i as u64])));
            t.push(row);
        }
    }
    Ok(DriverOutput {
        artifacts: vec![t.into_artifact("diamond_sweep.csv")?],
        task_seeds,
    })
}

fn gap_scan(cfg: &RunConfig) -> Result<DriverOutput> {
    let d = cfg.model.d;
    let grid: Vec<(usize, f64)> = cfg
        .gap_scan_lengths()
        .into_iter()
        .flat_map(|l| cfg.gap_scan.jr.iter().map(move |&j| (l, j)))
        .collect();
    let rows: Vec<Vec<String>> = grid
        .par_iter()
        .map(|&(l, jr)| -> Result<Vec<String>> {
            let p = ModelParams { l, jr, ..cfg.model };
            let s = model_spectrum::<f64>(&p, &SolverOptions::default(), 1 << 22)?;
            Ok(vec![
                f(jr),
                l.to_string(),
                d.to_string(),
                f(s.gap),
                f(perturbative_gap(jr, d)),
                f(s.singlet_overlap),
                f(perturbative_overlap(jr, l, d)),
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["Jr", "L", "d", "gap_exact", "gap_pert", "overlap_exact", "overlap_pert"]);
    for r in rows {
        t.push(r);
    }
    Ok(DriverOutput {
        artifacts: vec![t.into_artifact("gap_scan.csv")?],
        task_seeds: vec![],
    })
}

fn channel_fidelity(cfg: &RunConfig) -> Result<DriverOutput> {
    let ch = &cfg.channel;
    let params = cfg.model.with_jr(ch.jr_max);
    let sched = make_schedule(ch.jr_max, ch.steps, SchedulePolicy::perturbative(cfg.schedule.c, params.d))?;
    let theta_max = sched.steps.iter().map(|&(j, dt)| j * dt).fold(0.0, f64::max);
    let seed = derive_seed(cfg.seed, &[0xC0]);
    let max_depth = *ch.depths.iter().max().context("no depths")?;
    let ladder = compile_ladder(&cfg.compile, theta_max, max_depth, seed)?;
    let initial = LatticeState::<f64>::all_singlet(params, DEFAULT_DIM_CAP)?;
    let target = model_spectrum::<f64>(&params, &SolverOptions::default(), DEFAULT_DIM_CAP)?.ground_state(&params, DEFAULT_DIM_CAP)?;
    let mut t = Table::new(&["realization", "depth", "steps", "jr_max", "theta_max", "fidelity_mean", "fidelity_stderr", "repetitions"]);
    let mut task_seeds = Vec::new();
    let exact_steps = adiabatic_channel_steps(&params, &sched, &LinkRealization::Exact)?;
    let (fe, _) = trajectory_fidelity(&exact_steps, &initial, &target, 1, 0)?;
    t.push(vec!["exact".into(), "0".into(), ch.steps.to_string(), f(ch.jr_max), f(theta_max), f(fe), f(0.0), "1".into()]);
    let mut depths = ch.depths.clone();
    depths.sort_unstable();
    depths.dedup();
    for depth in depths {
        let (_, r) = ladder.iter().find(|(d, _)| *d == depth).context("depth missing from ladder")?;
        // the compiled target is e^{+iθH}; the ramp needs its conjugate e^{−iθH}
        let approx = compose(&r.circuit.conjugate())?;
        let steps = adiabatic_channel_steps(&params, &sched, &LinkRealization::Randomized { approx })?;
        let s = derive_seed(cfg.seed, &[0xF1, depth as u64]);
        task_seeds.push((format!("compile.depth{depth}"), derive_seed(seed, &[depth as u64])));
        task_seeds.push((format!("trajectories.depth{depth}"), s));
        let (m, se) = trajectory_fidelity(&steps, &initial, &target, ch.repetitions, s)?;
        t.push(vec![
            "randomized".into(),
            depth.to_string(),
            ch.steps.to_string(),
            f(ch.jr_max),
            f(theta_max),
            f(m),
            f(se),
            ch.repetitions.to_string(),
        ]);
    }
    Ok(DriverOutput {
        artifacts: vec![t.into_artifact("channel_fidelity.csv")?],
        task_seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 8.881784197001252e-16, 6.02e23, -2.5e-5, 1e-4, f64::MIN_POSITIVE] {
            let s = f(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(f(0.3), "0.3");
        assert_eq!(f(1e-5), "1e-5");
    }

    #[test]
    fn table_counts_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), f(0.5)]);
        let a = t.into_artifact("x.csv").unwrap();
        assert_eq!(a.rows, 1);
        assert_eq!(String::from_utf8(a.bytes).unwrap(), "a,b\n1,0.5\n");
    }
}
