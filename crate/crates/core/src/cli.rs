//! `coding-sim` command line: simulate, sweep, synth and replay.
//!
//! Every command writes a `manifest.json` next to its outputs holding the
//! fully resolved configuration; `replay --manifest` re-executes it.
//! Settings resolve as flags, then `--config` TOML, then built-in defaults.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::data::{parse_events, parse_surveys, transform_answers, write_events, write_surveys, AnswerMapping, Dataset, TimeFormat};
use crate::engine::{run_repeated, trajectory_rows, write_trajectories_csv, ModelKind, SimConfig, DEFAULT_REPETITIONS};
use crate::eval::{default_gamma_grid, sweep_questions, EvaluationReport, ExportFormat, GammaScope, SweepConfig};
use crate::synth::{generate_events, generate_planted_surveys, SynthSpec, Topology};
use crate::types::{AgentRegistry, Gamma, MemoryParams, TimeStamp};
use crate::{Error, Result};

pub const MANIFEST: &str = "manifest.json";
pub const OUT_ENV: &str = "CODING_SIM_OUT";
const DEFAULT_OUT: &str = "coding-sim-out";

#[derive(Debug, Parser)]
#[command(name = "coding-sim", version, about = "Opinion dynamics on temporal contact networks")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one model and write per-run snapshots at the wave times.
    Simulate(SimulateArgs),
    /// Score CoDiNG over a gamma grid (plus the Naming Game baseline).
    Sweep(SweepArgs),
    /// Generate a synthetic contact log with planted survey answers.
    Synth(SynthArgs),
    /// Re-execute the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Contacts CSV: sender,receiver,timestamp.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Surveys CSV: agent,wave,question,raw_answer.
    #[arg(long)]
    pub surveys: Option<PathBuf>,
    /// Answer mapping TOML (default: answers already 0/1/2).
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub time_format: Option<TimeFormat>,
    /// Survey question; repeatable for sweep (default: all questions).
    #[arg(long)]
    pub question: Vec<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Forgetting intensity per hour.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<u32>,
    /// Wave collection times in hours since the first contact; wave 1 first.
    #[arg(long, value_delimiter = ',')]
    pub waves: Vec<f64>,
    /// Reuse one initial state across repetitions.
    #[arg(long)]
    pub fixed_init: bool,
    #[arg(long, value_enum)]
    pub format: Option<ExportFormat>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated gammas (default 0.1,...,0.9).
    #[arg(long, value_delimiter = ',')]
    pub gamma_grid: Vec<f64>,
    /// Skip the Naming Game baseline.
    #[arg(long)]
    pub no_baseline: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Complete,
    ErdosRenyi,
    BarabasiAlbert,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub agents: Option<u32>,
    #[arg(long, value_enum)]
    pub topology: Option<TopologyKind>,
    /// Edge probability for erdos-renyi.
    #[arg(long)]
    pub p: Option<f64>,
    /// Attachments per node for barabasi-albert.
    #[arg(long)]
    pub m: Option<u32>,
    /// Contacts per ordered pair per day.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Days simulated.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Model that plants the survey answers.
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub waves: Vec<f64>,
    #[arg(long)]
    pub question: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Values a `--config` file may supply. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub events: Option<PathBuf>,
    pub surveys: Option<PathBuf>,
    pub mapping: Option<PathBuf>,
    pub time_format: Option<TimeFormat>,
    pub questions: Option<Vec<String>>,
    pub question: Option<String>,
    pub model: Option<ModelKind>,
    pub gamma: Option<f64>,
    pub gamma_grid: Option<Vec<f64>>,
    pub baseline: Option<bool>,
    pub mu: Option<f64>,
    pub theta: Option<f64>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub reps: Option<u32>,
    pub waves: Option<Vec<f64>>,
    pub fixed_init: Option<bool>,
    pub format: Option<ExportFormat>,
    pub agents: Option<u32>,
    pub topology: Option<TopologyKind>,
    pub p: Option<f64>,
    pub m: Option<u32>,
    pub rate: Option<f64>,
    pub horizon: Option<f64>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Relative paths in a config file are relative to the file itself.
    fn rebase(mut self, path: Option<&Path>) -> FileConfig {
        let base = path.and_then(Path::parent).map(Path::to_path_buf).unwrap_or_default();
        for p in [&mut self.events, &mut self.surveys, &mut self.mapping].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        self
    }
}

/// An input file pinned by content hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

impl InputFile {
    fn open(path: &Path) -> Result<(InputFile, Vec<u8>)> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let abs = fs::canonicalize(path).map_err(|e| Error::io(path, e))?;
        Ok((InputFile { path: abs, sha256: hex::encode(Sha256::digest(&bytes)) }, bytes))
    }

    fn read_verified(&self) -> Result<Vec<u8>> {
        let bytes = fs::read(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        if digest != self.sha256 {
            return Err(Error::InvalidInput(format!(
                "{} changed since the manifest was written (sha256 {digest}, expected {})",
                self.path.display(),
                self.sha256
            )));
        }
        Ok(bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub events: InputFile,
    pub surveys: InputFile,
    pub mapping: Option<InputFile>,
    pub time_format: TimeFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatePlan {
    pub inputs: Inputs,
    pub question: String,
    pub model: ModelKind,
    pub gamma: Gamma,
    pub params: MemoryParams,
    pub seed: u64,
    pub repetitions: u32,
    pub waves: Vec<TimeStamp>,
    pub fixed_init: bool,
    pub format: ExportFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub inputs: Inputs,
    pub questions: Vec<String>,
    pub sweep: SweepConfig,
    pub format: ExportFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPlan {
    pub spec: SynthSpec,
    pub model: ModelKind,
    pub gamma: Gamma,
    pub params: MemoryParams,
    pub waves: Vec<TimeStamp>,
    pub question: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Plan {
    Simulate(SimulatePlan),
    Sweep(SweepPlan),
    Synth(SynthPlan),
}

/// Written as `manifest.json` in every output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub plan: Plan,
    pub outputs: Vec<String>,
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Usage(format!("missing required --{flag}")))
}

fn params(mu: Option<f64>, theta: Option<f64>, lambda: Option<f64>, file: &FileConfig) -> Result<MemoryParams> {
    let d = MemoryParams::default();
    Ok(MemoryParams::new(
        mu.or(file.mu).unwrap_or(d.mu),
        theta.or(file.theta).unwrap_or(d.theta),
        lambda.or(file.lambda).unwrap_or(d.lambda),
    )?)
}

fn wave_times(flag: &[f64], file: &FileConfig) -> Result<Vec<TimeStamp>> {
    let raw = if flag.is_empty() { file.waves.clone().unwrap_or_default() } else { flag.to_vec() };
    if raw.is_empty() {
        return Err(Error::Usage("missing required --waves".into()));
    }
    let times = raw.into_iter().map(TimeStamp::new).collect::<std::result::Result<Vec<_>, _>>()?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("wave times must be non-decreasing".into()));
    }
    Ok(times)
}

fn resolve_inputs(c: &CommonArgs, file: &FileConfig) -> Result<Inputs> {
    let events = required(c.events.clone().or(file.events.clone()), "events")?;
    let surveys = required(c.surveys.clone().or(file.surveys.clone()), "surveys")?;
    let mapping = c.mapping.clone().or(file.mapping.clone());
    Ok(Inputs {
        events: InputFile::open(&events)?.0,
        surveys: InputFile::open(&surveys)?.0,
        mapping: mapping.as_deref().map(InputFile::open).transpose()?.map(|(f, _)| f),
        time_format: c.time_format.or(file.time_format).unwrap_or(TimeFormat::Auto),
    })
}

fn file_questions(file: &FileConfig) -> Vec<String> {
    file.questions.clone().or_else(|| file.question.clone().map(|q| vec![q])).unwrap_or_default()
}

pub fn resolve_simulate(args: &SimulateArgs) -> Result<SimulatePlan> {
    let c = &args.common;
    let file = FileConfig::load(c.config.as_deref())?.rebase(c.config.as_deref());
    let inputs = resolve_inputs(c, &file)?;
    let model = required(args.model.or(file.model), "model")?;
    let questions = if c.question.is_empty() { file_questions(&file) } else { c.question.clone() };
    let question = match questions.as_slice() {
        [q] => q.clone(),
        [] => return Err(Error::Usage("missing required --question".into())),
        _ => return Err(Error::Usage("simulate takes exactly one --question".into())),
    };
    let gamma = match (model, args.gamma.or(file.gamma)) {
        (_, Some(g)) => Gamma::new(g)?,
        (ModelKind::NamingGame, None) => Gamma::new(0.0)?,
        (ModelKind::Coding, None) => return Err(Error::Usage("missing required --gamma for the coding model".into())),
    };
    let plan = SimulatePlan {
        inputs,
        question,
        model,
        gamma,
        params: params(c.mu, c.theta, c.lambda, &file)?,
        seed: c.seed.or(file.seed).unwrap_or(0),
        repetitions: c.reps.or(file.reps).unwrap_or(DEFAULT_REPETITIONS),
        waves: wave_times(&c.waves, &file)?,
        fixed_init: c.fixed_init || file.fixed_init.unwrap_or(false),
        format: c.format.or(file.format).unwrap_or(ExportFormat::Csv),
    };
    if plan.repetitions == 0 {
        return Err(Error::Config("--reps must be >= 1".into()));
    }
    Ok(plan)
}

pub fn resolve_sweep(args: &SweepArgs) -> Result<SweepPlan> {
    let c = &args.common;
    let file = FileConfig::load(c.config.as_deref())?.rebase(c.config.as_deref());
    let inputs = resolve_inputs(c, &file)?;
    let gammas = if !args.gamma_grid.is_empty() {
        args.gamma_grid.clone()
    } else {
        file.gamma_grid.clone().unwrap_or_else(default_gamma_grid)
    };
    for &g in &gammas {
        Gamma::new(g)?;
    }
    if gammas.is_empty() {
        return Err(Error::Config("gamma grid is empty".into()));
    }
    let sweep = SweepConfig {
        gammas,
        params: params(c.mu, c.theta, c.lambda, &file)?,
        seed: c.seed.or(file.seed).unwrap_or(0),
        repetitions: c.reps.or(file.reps).unwrap_or(DEFAULT_REPETITIONS),
        wave_times: wave_times(&c.waves, &file)?,
        fixed_init: c.fixed_init || file.fixed_init.unwrap_or(false),
        include_baseline: !args.no_baseline && file.baseline.unwrap_or(true),
    };
    if sweep.repetitions == 0 {
        return Err(Error::Config("--reps must be >= 1".into()));
    }
    Ok(SweepPlan {
        inputs,
        questions: if c.question.is_empty() { file_questions(&file) } else { c.question.clone() },
        sweep,
        format: c.format.or(file.format).unwrap_or(ExportFormat::Csv),
    })
}

pub fn resolve_synth(args: &SynthArgs) -> Result<SynthPlan> {
    let file = FileConfig::load(args.config.as_deref())?;
    let topology = match args.topology.or(file.topology).unwrap_or(TopologyKind::Complete) {
        TopologyKind::Complete => Topology::Complete,
        TopologyKind::ErdosRenyi => Topology::ErdosRenyi { p: required(args.p.or(file.p), "p")? },
        TopologyKind::BarabasiAlbert => Topology::BarabasiAlbert { m: required(args.m.or(file.m), "m")? },
    };
    let spec = SynthSpec {
        n_agents: required(args.agents.or(file.agents), "agents")?,
        topology,
        rate_per_day: required(args.rate.or(file.rate), "rate")?,
        horizon_days: required(args.horizon.or(file.horizon), "horizon")?,
        seed: args.seed.or(file.seed).unwrap_or(0),
    };
    spec.validate()?;
    let model = args.model.or(file.model).unwrap_or(ModelKind::Coding);
    let gamma = match (model, args.gamma.or(file.gamma)) {
        (_, Some(g)) => Gamma::new(g)?,
        (ModelKind::NamingGame, None) => Gamma::new(0.0)?,
        (ModelKind::Coding, None) => return Err(Error::Usage("missing required --gamma for the coding model".into())),
    };
    Ok(SynthPlan {
        spec,
        model,
        gamma,
        params: params(args.mu, args.theta, args.lambda, &file)?,
        waves: wave_times(&args.waves, &file)?,
        question: args.question.clone().or(file.question.clone()).unwrap_or_else(|| "synthetic".into()),
    })
}

/// Emits one JSON progress line on stdout.
fn progress(value: serde_json::Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{value}");
}

/// Writes via a temporary file and rename so readers never see partial output.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

struct Outputs {
    dir: PathBuf,
    names: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Outputs> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Outputs { dir: dir.to_path_buf(), names: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        progress(json!({ "event": "wrote", "path": path.display().to_string(), "bytes": bytes.len() }));
        self.names.push(name.to_string());
        Ok(())
    }

    fn finish(mut self, plan: Plan) -> Result<()> {
        self.names.push(MANIFEST.to_string());
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            plan,
            outputs: self.names.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        bytes.push(b'\n');
        let path = self.dir.join(MANIFEST);
        write_atomic(&path, &bytes)?;
        progress(json!({ "event": "done", "manifest": path.display().to_string() }));
        Ok(())
    }
}

fn load_dataset(inputs: &Inputs) -> Result<Dataset> {
    let events_bytes = inputs.events.read_verified()?;
    let log = parse_events(events_bytes.as_slice(), inputs.time_format)
        .map_err(|source| Error::Input { context: inputs.events.path.display().to_string(), source })?;
    for w in &log.warnings {
        eprintln!("warning: {}:{}: {}", inputs.events.path.display(), w.line, w.message);
    }
    let mapping = match &inputs.mapping {
        Some(f) => {
            let text = String::from_utf8(f.read_verified()?)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", f.path.display())))?;
            AnswerMapping::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", f.path.display())))?
        }
        None => AnswerMapping::ternary(),
    };
    let survey_ctx = || inputs.surveys.path.display().to_string();
    let rows = parse_surveys(inputs.surveys.read_verified()?.as_slice())
        .map_err(|source| Error::Input { context: survey_ctx(), source })?;
    let records = transform_answers(&rows, &mapping).map_err(|source| Error::Input { context: survey_ctx(), source })?;
    let dataset = Dataset::assemble(&log, &records);
    progress(json!({
        "event": "loaded",
        "agents": dataset.agents.len(),
        "contacts": dataset.events.len(),
        "questions": dataset.questions.len(),
        "warnings": log.warnings.len(),
    }));
    Ok(dataset)
}

pub fn execute_simulate(plan: &SimulatePlan, out: &Path) -> Result<()> {
    let dataset = load_dataset(&plan.inputs)?;
    let answers = dataset
        .question(&plan.question)
        .ok_or_else(|| Error::InvalidInput(format!("question {:?} not in the survey file", plan.question)))?;
    let seed_wave = answers
        .wave(1)
        .ok_or_else(|| Error::InvalidInput(format!("question {:?} has no wave-1 answers", plan.question)))?;
    let config = SimConfig {
        model: plan.model,
        params: plan.params,
        gamma: plan.gamma,
        seed: plan.seed,
        repetitions: plan.repetitions,
        start_time: plan.waves[0],
        snapshot_times: plan.waves.clone(),
        fixed_init: plan.fixed_init,
    };
    let sampler = crate::data::SurveyInit { answers: seed_wave.to_vec() };
    let runs = run_repeated(&dataset.events, &sampler, &config)?;
    let rows = trajectory_rows(&runs, &dataset.agents);

    let mut outputs = Outputs::new(out)?;
    match plan.format {
        ExportFormat::Csv => {
            let mut buf = Vec::new();
            write_trajectories_csv(&mut buf, &rows).map_err(|e| Error::Eval(e.into()))?;
            outputs.write("trajectories.csv", &buf)?;
        }
        ExportFormat::Json => {
            let mut buf = serde_json::to_vec_pretty(&rows).expect("rows serialize");
            buf.push(b'\n');
            outputs.write("trajectories.json", &buf)?;
        }
    }
    eprintln!(
        "simulated {} run(s) of {} over {} agents and {} contacts; {} snapshot(s) each",
        runs.len(),
        plan.model,
        dataset.agents.len(),
        dataset.events.len(),
        plan.waves.len()
    );
    outputs.finish(Plan::Simulate(plan.clone()))
}

pub fn execute_sweep(plan: &SweepPlan, out: &Path) -> Result<()> {
    let dataset = load_dataset(&plan.inputs)?;
    let questions: Vec<String> =
        if plan.questions.is_empty() { dataset.questions.keys().cloned().collect() } else { plan.questions.clone() };
    let mut report = EvaluationReport::default();
    for q in &questions {
        let part = sweep_questions(&dataset, std::slice::from_ref(q), &plan.sweep)?;
        progress(json!({ "event": "question", "question": q, "rows": part.rows.len() }));
        report.extend(part);
    }

    let ext = match plan.format {
        ExportFormat::Csv => "csv",
        ExportFormat::Json => "json",
    };
    let mut outputs = Outputs::new(out)?;
    let mut buf = Vec::new();
    report.write(&mut buf, plan.format)?;
    outputs.write(&format!("report.{ext}"), &buf)?;

    let mut best = report.best_gamma(GammaScope::Aggregate);
    best.extend(report.best_gamma(GammaScope::PerWave));
    let mut buf = Vec::new();
    match plan.format {
        ExportFormat::Csv => {
            let csv_err = |e: csv::Error| Error::Eval(e.into());
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["question", "wave", "gamma", "mean_f1", "baseline_f1"]).map_err(csv_err)?;
            for b in &best {
                w.serialize((&b.question, b.wave, b.gamma, b.mean_f1, b.baseline_f1)).map_err(csv_err)?;
            }
            w.flush().map_err(|e| Error::Eval(e.into()))?;
            drop(w);
        }
        ExportFormat::Json => {
            buf = serde_json::to_vec_pretty(&best).expect("best gamma serializes");
            buf.push(b'\n');
        }
    }
    outputs.write(&format!("best_gamma.{ext}"), &buf)?;

    for b in best.iter().filter(|b| b.wave == crate::eval::Scope::Aggregate) {
        let baseline = b.baseline_f1.map_or("n/a".to_string(), |f| format!("{f:.4}"));
        eprintln!("{}: best gamma {} (macro F1 {:.4}, naming game {baseline})", b.question, b.gamma, b.mean_f1);
    }
    outputs.finish(Plan::Sweep(plan.clone()))
}

pub fn execute_synth(plan: &SynthPlan, out: &Path) -> Result<()> {
    let events = generate_events(&plan.spec)?;
    let agents = AgentRegistry::numbered(plan.spec.n_agents as usize);
    let mut config = SimConfig::new(plan.model, plan.gamma, plan.spec.seed);
    config.params = plan.params;
    let records = generate_planted_surveys(&events, &agents, &config, &plan.waves, &plan.question)?;

    let mut outputs = Outputs::new(out)?;
    let mut buf = Vec::new();
    write_events(&mut buf, &events, &agents).map_err(|source| Error::Input { context: "events".into(), source })?;
    outputs.write("events.csv", &buf)?;
    let mut buf = Vec::new();
    write_surveys(&mut buf, &records).map_err(|source| Error::Input { context: "surveys".into(), source })?;
    outputs.write("surveys.csv", &buf)?;
    eprintln!(
        "generated {} contacts among {} agents and {} planted answers",
        events.len(),
        plan.spec.n_agents,
        records.len()
    );
    outputs.finish(Plan::Synth(plan.clone()))
}

pub fn execute(plan: &Plan, out: &Path) -> Result<()> {
    progress(json!({ "event": "start", "command": match plan {
        Plan::Simulate(_) => "simulate",
        Plan::Sweep(_) => "sweep",
        Plan::Synth(_) => "synth",
    }}));
    match plan {
        Plan::Simulate(p) => execute_simulate(p, out),
        Plan::Sweep(p) => execute_sweep(p, out),
        Plan::Synth(p) => execute_synth(p, out),
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let plan = match &cli.command {
        Command::Simulate(a) => Plan::Simulate(resolve_simulate(a)?),
        Command::Sweep(a) => Plan::Sweep(resolve_sweep(a)?),
        Command::Synth(a) => Plan::Synth(resolve_synth(a)?),
        Command::Replay(a) => read_manifest(&a.manifest)?.plan,
    };
    execute(&plan, &out)
}
