use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use emac::executor::{PolicyCheckpoint, PolicyParams};
use emac::harness::{
    ablate_replanning, ablation_table, default_suite, errors_table, evaluate, load_config, make_backend, success_table,
    sweep, sweep_table, trial_table, write_file, HarnessError, SuiteKind, SuiteSpec, Table, SWEEP_RATES,
};
use emac::trainer::{
    pretrain_reference, BackendKind, Channel, EpisodeOptions, LossMode, NoiseSpec, RunState, TaskInstance, Trainer,
    TrainerConfig, TrialReport,
};
use emac::Result;

#[derive(Parser)]
#[command(name = "emac", about = "Planner/executor co-training in a simulated household")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a task suite and write it as JSON.
    Gen(Common),
    /// Train the executor; resumes if the output directory holds a run.
    Train(Common),
    /// Greedy evaluation of a checkpoint.
    Eval(Common),
    /// Success against noise rate.
    Sweep(Common),
    /// Replanning on against off.
    Ablate(Common),
    /// Planner errors per trial of a finished run.
    Errors(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dpo,
    Ce,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Visual,
    Textual,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Oracle,
    Wire,
}

#[derive(Args)]
struct Common {
    /// TOML trainer configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suite name (seen, ood, stuck) or a JSON file written by `gen`.
    #[arg(long, default_value = "seen")]
    suite: String,
    /// Master seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Noise rate: training noise for `train`, evaluation noise otherwise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, value_enum, default_value = "visual")]
    channel: ChannelArg,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Output file (gen) or directory (everything else).
    #[arg(long, default_value = "runs/default")]
    out: PathBuf,
    /// Policy checkpoint; the reference policy is used when absent.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Held-out suite evaluated after every training trial.
    #[arg(long)]
    heldout: Option<String>,
    /// Disable replanning.
    #[arg(long)]
    no_replan: bool,
}

impl Common {
    fn config(&self) -> Result<TrainerConfig> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => TrainerConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(m) = self.mode {
            cfg.loss_mode = match m {
                ModeArg::Dpo => LossMode::Dpo,
                ModeArg::Ce => LossMode::Ce,
            };
        }
        if let Some(b) = self.backend {
            cfg.backend = match b {
                BackendArg::Oracle => BackendKind::Oracle,
                BackendArg::Wire => BackendKind::Wire,
            };
        }
        if self.no_replan {
            cfg.replanning = false;
        }
        Ok(cfg)
    }

    fn channel(&self) -> Channel {
        match self.channel {
            ChannelArg::Visual => Channel::Visual,
            ChannelArg::Textual => Channel::Textual,
            ChannelArg::Both => Channel::Both,
        }
    }

    fn policy(&self, cfg: &TrainerConfig) -> Result<PolicyParams> {
        Ok(match &self.checkpoint {
            Some(p) => PolicyCheckpoint::load(p)?.params,
            None => pretrain_reference(cfg),
        })
    }
}

fn load_suite(arg: &str) -> Result<Vec<TaskInstance>> {
    let spec = match SuiteKind::from_name(arg) {
        Some(kind) => default_suite(kind)?,
        None => serde_json::from_str::<SuiteSpec>(&read(Path::new(arg))?)?,
    };
    Ok(spec.instantiate()?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|source| HarnessError::Io { path: path.display().to_string(), source }.into())
}

fn emit(dir: &Path, stem: &str, table: &Table, json: &impl serde::Serialize) -> Result<()> {
    print!("{}", table.to_text());
    write_file(&dir.join(format!("{stem}.csv")), &table.to_csv())?;
    write_file(&dir.join(format!("{stem}.json")), &serde_json::to_string_pretty(json)?)?;
    Ok(())
}

fn train(args: &Common) -> Result<()> {
    let mut cfg = args.config()?;
    cfg.train_noise = args.noise;
    cfg.validate().map_err(HarnessError::Config)?;
    let tasks = load_suite(&args.suite)?;
    let heldout = match &args.heldout {
        Some(h) => load_suite(h)?,
        None => Vec::new(),
    };
    let backend = make_backend(&cfg)?;
    let out = &args.out;
    let state_path = out.join("state.json");
    let mut trainer = if state_path.exists() {
        let mut state: RunState = serde_json::from_str(&read(&state_path)?)?;
        if (TrainerConfig { max_trials: cfg.max_trials, ..state.config.clone() }) != cfg {
            return Err(HarnessError::Config("existing run in output directory has a different config".into()).into());
        }
        state.config.max_trials = cfg.max_trials;
        state.finished = state.next_trial >= cfg.max_trials;
        tracing::info!(trial = state.next_trial, "resuming");
        Trainer::resume(state, &tasks, backend)
    } else {
        let manifest = serde_json::json!({ "config": cfg, "config_digest": cfg.digest(), "suite": args.suite, "tasks": tasks.len() });
        write_file(&out.join("manifest.json"), &serde_json::to_string_pretty(&manifest)?)?;
        write_file(&out.join("trajectories.jsonl"), "")?;
        Trainer::new(cfg, &tasks, backend)
    }
    .with_heldout(&heldout);
    while !trainer.finished() {
        let lines = trainer.step_trial();
        let trial = trainer.state.next_trial - 1;
        let mut log = String::new();
        for l in &lines {
            log.push_str(&serde_json::to_string(l)?);
            log.push('\n');
        }
        append(&out.join("trajectories.jsonl"), &log)?;
        PolicyCheckpoint::new(trainer.state.theta.clone()).save(&out.join(format!("checkpoints/trial-{trial:02}.json")))?;
        write_file(&state_path, &serde_json::to_string(&trainer.state)?)?;
    }
    let state = trainer.state;
    PolicyCheckpoint::new(state.theta.clone()).save(&out.join("policy.json"))?;
    emit(out, "trials", &trial_table(&state.reports), &state.reports)
}

fn append(path: &Path, text: &str) -> Result<()> {
    use std::io::Write;
    let mut f = std::fs::OpenOptions::new().append(true).create(true).open(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => {
            let kind = SuiteKind::from_name(&args.suite)
                .ok_or_else(|| HarnessError::Suite(format!("unknown suite {}", args.suite)))?;
            let spec = default_suite(kind)?;
            write_file(&args.out, &serde_json::to_string_pretty(&spec)?)?;
            println!("wrote {} tasks to {}", spec.len(), args.out.display());
        }
        Command::Train(args) => train(&args)?,
        Command::Eval(args) => {
            let cfg = args.config()?;
            let tasks = load_suite(&args.suite)?;
            let theta = args.policy(&cfg)?;
            let noise = NoiseSpec { rate: args.noise, channel: args.channel(), seed: cfg.master_seed };
            let opts = EpisodeOptions { horizon: cfg.horizon, replanning: cfg.replanning, noise };
            let report = evaluate(&args.suite, &tasks, &theta, &make_backend(&cfg)?, None, &opts);
            emit(&args.out, "eval", &success_table("Evaluation", std::slice::from_ref(&report)), &report)?;
        }
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let tasks = load_suite(&args.suite)?;
            let theta = args.policy(&cfg)?;
            let opts = EpisodeOptions { horizon: cfg.horizon, replanning: cfg.replanning, noise: NoiseSpec::none() };
            let seeds: Vec<u64> = (0..10).map(|i| cfg.master_seed * 10 + i).collect();
            let points = sweep(&tasks, &theta, &make_backend(&cfg)?, &opts, args.channel(), &SWEEP_RATES, &seeds);
            emit(&args.out, "sweep", &sweep_table(args.channel(), &points), &points)?;
        }
        Command::Ablate(args) => {
            let cfg = args.config()?;
            let tasks = load_suite(if args.suite == "seen" { "stuck" } else { &args.suite })?;
            let theta = args.policy(&cfg)?;
            let (on, off) = ablate_replanning(&tasks, &theta, &make_backend(&cfg)?, cfg.horizon);
            emit(&args.out, "ablation", &ablation_table(&on, &off), &[on, off])?;
        }
        Command::Errors(args) => {
            let path = args.out.join("trials.json");
            if !args.out.is_dir() {
                return Err(HarnessError::Config(format!("run directory {} does not exist", args.out.display())).into());
            }
            let reports: Vec<TrialReport> = serde_json::from_str(&read(&path)?)?;
            emit(&args.out, "errors", &errors_table(&reports), &reports)?;
        }
    }
    Ok(())
}

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
