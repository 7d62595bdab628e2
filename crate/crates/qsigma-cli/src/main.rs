use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsigma::lattice::ModelParams;
use qsigma::shadows::ObservableKind;
use qsigma_cli::config::{validate, Experiment, RunConfig};
use qsigma_cli::run::{load_config, run, RunError};

#[derive(Parser, Debug)]
#[command(name = "qsigma", version, about = "Lattice sigma-model state preparation experiments")]
struct Cli {
    /// JSON config, or a manifest from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct ModelArgs {
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "Jr")]
    jr: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment named in --config.
    Run,
    /// Check --config and list every problem.
    Validate,
    AdiabaticSweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "jr-max", value_delimiter = ',')]
        jr_max: Option<Vec<f64>>,
        #[arg(long = "N", value_delimiter = ',')]
        steps: Option<Vec<usize>>,
    },
    ShadowSweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        tmax: Option<f64>,
        /// Number of time points.
        #[arg(long)]
        steps: Option<usize>,
        /// Total snapshots.
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        groups: Option<usize>,
        #[arg(long, value_parser = parse_observable)]
        observable: Option<ObservableKind>,
    },
    Compile {
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        jr: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    DiamondSweep {
        #[arg(long = "theta-max")]
        theta_max: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        #[arg(long = "p-points")]
        p_points: Option<usize>,
    },
    GapScan {
        #[command(flatten)]
        model: ModelArgs,
        /// Lattice lengths; overrides --L.
        #[arg(long = "lengths", value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        #[arg(long = "jr-grid", value_delimiter = ',')]
        jr_grid: Option<Vec<f64>>,
    },
    ChannelFidelity {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "jr-max")]
        jr_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
}

fn parse_observable(s: &str) -> Result<ObservableKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_lowercase()))
        .map_err(|_| format!("expected charge, current or both, got {s}"))
}

fn apply_model(m: &mut ModelParams, a: &ModelArgs) {
    if let Some(l) = a.l {
        m.l = l;
    }
    if let Some(d) = a.d {
        m.d = d;
    }
    if let Some(j) = a.jr {
        m.jr = j;
    }
}

fn base_config(cli: &Cli, experiment: Experiment) -> anyhow::Result<RunConfig> {
    let cfg = match &cli.config {
        Some(p) => {
            let c = load_config(p)?;
            if c.experiment != experiment {
                anyhow::bail!("{} holds a {} config, not {}", p.display(), c.experiment.name(), experiment.name());
            }
            c
        }
        None => RunConfig::new(experiment, ModelParams::new(1, 2, 0.1)),
    };
    Ok(cfg)
}

fn build_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.command {
        Command::Run | Command::Validate => match &cli.config {
            Some(p) => load_config(p)?,
            None => anyhow::bail!("--config is required"),
        },
        Command::AdiabaticSweep { model, jr_max, steps } => {
            let mut c = base_config(cli, Experiment::AdiabaticSweep)?;
            apply_model(&mut c.model, model);
            if let Some(v) = jr_max {
                c.schedule.jr_max = v.clone();
            }
            if let Some(v) = steps {
                c.schedule.steps = v.clone();
            }
            c
        }
        Command::ShadowSweep {
            model,
            tmax,
            steps,
            n,
            groups,
            observable,
        } => {
            let mut c = base_config(cli, Experiment::ShadowSweep)?;
            apply_model(&mut c.model, model);
            let e = &mut c.estimator;
            e.t_max = tmax.unwrap_or(e.t_max);
            e.time_points = steps.unwrap_or(e.time_points);
            e.snapshots = n.unwrap_or(e.snapshots);
            e.groups = groups.unwrap_or(e.groups);
            e.observable = observable.unwrap_or(e.observable);
            c
        }
        Command::Compile { depth, jr, dt, restarts } => {
            let mut c = base_config(cli, Experiment::Compile)?;
            let s = &mut c.compile;
            s.depth = depth.unwrap_or(s.depth);
            s.jr = jr.unwrap_or(s.jr);
            s.dt = dt.unwrap_or(s.dt);
            s.restarts = restarts.unwrap_or(s.restarts);
            c
        }
        Command::DiamondSweep {
            theta_max,
            depths,
            p_points,
        } => {
            let mut c = base_config(cli, Experiment::DiamondSweep)?;
            let s = &mut c.channel;
            s.theta_max = theta_max.unwrap_or(s.theta_max);
            s.p_points = p_points.unwrap_or(s.p_points);
            if let Some(v) = depths {
                s.depths = v.clone();
            }
            c
        }
        Command::GapScan { model, lengths, jr_grid } => {
            let mut c = base_config(cli, Experiment::GapScan)?;
            apply_model(&mut c.model, model);
            if let Some(v) = lengths {
                c.gap_scan.l = v.clone();
            }
            if let Some(v) = jr_grid {
                c.gap_scan.jr = v.clone();
            }
            c
        }
        Command::ChannelFidelity {
            model,
            jr_max,
            steps,
            repetitions,
        } => {
            let mut c = base_config(cli, Experiment::ChannelFidelity)?;
            apply_model(&mut c.model, model);
            let s = &mut c.channel;
            s.jr_max = jr_max.unwrap_or(s.jr_max);
            s.steps = steps.unwrap_or(s.steps);
            s.repetitions = repetitions.unwrap_or(s.repetitions);
            c
        }
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if let Command::Validate = cli.command {
        let errs = validate(&cfg);
        if errs.is_empty() {
            println!("ok");
            return ExitCode::SUCCESS;
        }
        for e in &errs {
            eprintln!("{e}");
        }
        return ExitCode::from(1);
    }
    match run(&cfg) {
        Ok(m) => {
            for o in &m.outputs {
                println!("{}  {}  ({} rows)", o.sha256, cfg.out.join(&o.file).display(), o.rows);
            }
            ExitCode::SUCCESS
        }
        Err(e @ RunError::Invalid(_)) => {
            eprint!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
