use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use covertraj::classifier::TrainConfig;
use covertraj::coverset::CoverConfig;
use covertraj::dynamics::{ControlGrid, ControlProfile, IntegrationConfig, VehicleParams};
use covertraj::experiments::{
    baseline_table, build_set_file, coverage_curve, curve_to_csv, distance_ablation, evaluate_label_space, residual_histogram,
    selfcheck, set_coverage, train_on, AblationMode, BuildOptions, Scorer,
};
use covertraj::io::{write_atomic, CorpusFile, LabelSpace, ModelFile, SetFile};
use covertraj::metrics::{tables_to_csv, MetricsSpec, MetricsTable};
use covertraj::synth::{gen_corpus, GenConfig};
use covertraj::{DistanceKind, Provenance, Result};

#[derive(Parser)]
#[command(name = "covertraj", version, about = "Trajectory sets by epsilon coverage, and the tools to evaluate them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic corpus as JSONL.
    GenCorpus(GenArgs),
    /// Build a fixed, dynamic or hybrid trajectory set from a corpus.
    BuildSet(BuildArgs),
    /// Measure how well a set covers a corpus.
    CoverReport(ReportArgs),
    /// Set sizes across a ladder of epsilons, as CSV.
    CoverageCurve(CurveArgs),
    /// Metrics for the physics baselines and their oracle.
    Baselines(BaselineArgs),
    /// Train the softmax classifier over a set.
    Train(TrainArgs),
    /// Evaluate a model or the oracle predictor over a set.
    Evaluate(EvalArgs),
    /// Run the built-in oracle checks.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Drop records whose end point lies closer than this to the start.
    #[arg(long)]
    min_displacement: Option<f64>,
}

impl CorpusArgs {
    fn load(&self) -> Result<CorpusFile> {
        let mut file = CorpusFile::read(&self.corpus)?;
        if let Some(t) = self.min_displacement {
            file.retain_moving(t);
        }
        Ok(file)
    }
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long, default_value_t = 3.0)]
    wheelbase: f64,
    #[arg(long, default_value_t = 10)]
    substeps: usize,
}

impl DynamicsArgs {
    fn params(&self) -> Result<VehicleParams> {
        VehicleParams::new(self.wheelbase)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    count: usize,
    #[arg(long, default_value_t = 6.0)]
    horizon_s: f64,
    #[arg(long, default_value_t = 0.5)]
    dt: f64,
    #[arg(long, default_value_t = 0.0)]
    speed_min: f64,
    #[arg(long, default_value_t = 15.0)]
    speed_max: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_std: f64,
    #[arg(long, default_value_t = 0.2)]
    switch_prob: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Drive every record with one `a_lat,a_lon` profile.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    profile: Option<Vec<f64>>,
    #[command(flatten)]
    dynamics: DynamicsArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fixed,
    Dynamic,
    Hybrid,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "fixed")]
    mode: Mode,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value = "max")]
    distance: DistanceKind,
    #[arg(long)]
    random_trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, default_value_t = 8.0)]
    ref_speed: f64,
    #[command(flatten)]
    dynamics: DynamicsArgs,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    epsilon: f64,
    /// Defaults to the distance the set was built with.
    #[arg(long)]
    distance: Option<DistanceKind>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    bin_width: f64,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_delimiter = ',', default_value = "8,5,4,3,2")]
    epsilons: Vec<f64>,
    #[arg(long, default_value = "max")]
    distance: DistanceKind,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    dynamics: DynamicsArgs,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value_t = 2.0)]
    hit_d: f64,
    #[arg(long, default_value_t = 10)]
    substeps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainOpts {
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-2)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl TrainOpts {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            lr: self.lr,
            batch_size: self.batch_size,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "avg")]
    label_distance: DistanceKind,
    #[command(flatten)]
    train: TrainOpts,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    set: PathBuf,
    #[arg(long, conflicts_with = "oracle_probs")]
    model: Option<PathBuf>,
    /// Probability one on the mode nearest the ground truth.
    #[arg(long)]
    oracle_probs: bool,
    /// One row per label-matching distance. Trains a model per row unless
    /// `--oracle-probs` is given.
    #[arg(long, conflicts_with = "model")]
    ablation: bool,
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,15")]
    ks: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    hit_k: usize,
    #[arg(long, default_value_t = 2.0)]
    hit_d: f64,
    #[arg(long, default_value = "avg")]
    label_distance: DistanceKind,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    train: TrainOpts,
}

enum Failure {
    Data(covertraj::Error),
    Usage(String),
    Check,
}

impl From<covertraj::Error> for Failure {
    fn from(e: covertraj::Error) -> Self {
        Failure::Data(e)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let forced_profile = match args.profile.as_deref() {
        Some(&[a_lat, a_lon]) => Some(ControlProfile::new(a_lat, a_lon)?),
        Some(_) => return Err(Failure::Usage("--profile takes a_lat,a_lon".into())),
        None => None,
    };
    let cfg = GenConfig {
        count: args.count,
        horizon_s: args.horizon_s,
        dt: args.dt,
        speed_range: (args.speed_min, args.speed_max),
        noise_std: args.noise_std,
        seed: args.seed,
        switch_prob: args.switch_prob,
        forced_profile,
        params: args.dynamics.params()?,
        substeps: args.dynamics.substeps,
        ..GenConfig::default()
    };
    let file = gen_corpus(&cfg)?;
    file.write(&args.out)?;
    eprintln!("wrote {} records to {}", file.records.len(), args.out.display());
    Ok(())
}

fn build(args: BuildArgs) -> Result<(), Failure> {
    let corpus = args.corpus.load()?.corpus()?;
    let mut cover = CoverConfig::new(args.epsilon)?.with_kind(args.distance);
    if let Some(cap) = args.max_size {
        cover = cover.with_max_set_size(cap);
    }
    let provenance = match args.mode {
        Mode::Fixed => Provenance::Fixed,
        Mode::Dynamic => Provenance::Dynamic,
        Mode::Hybrid => Provenance::Hybrid,
    };
    if args.random_trials.is_some() && provenance != Provenance::Fixed {
        return Err(Failure::Usage("--random-trials applies to fixed sets only".into()));
    }
    let opts = BuildOptions {
        provenance,
        cover,
        random_trials: args.random_trials,
        seed: args.seed,
        reference_speed: args.ref_speed,
        params: args.dynamics.params()?,
        substeps: args.dynamics.substeps,
        grid: ControlGrid::default(),
    };
    let (file, complete) = build_set_file(&corpus, &opts)?;
    file.write(&args.out)?;
    let profiles = file.profiles.as_ref().map_or(0, Vec::len);
    eprintln!(
        "{} set: {} modes ({} from profiles), complete: {complete}",
        file.provenance,
        file.modes.len(),
        profiles
    );
    Ok(())
}

#[derive(Serialize)]
struct ReportJson {
    epsilon: f64,
    distance_kind: DistanceKind,
    set_size: usize,
    instances: usize,
    fraction_covered: f64,
    max_residual: f64,
    uncovered: Vec<usize>,
    residuals: Vec<f64>,
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let corpus = args.corpus.load()?.corpus()?;
    let set = SetFile::read(&args.set)?;
    let kind = args.distance.unwrap_or(set.distance_kind);
    let config = CoverConfig::new(args.epsilon)?.with_kind(kind);
    let r = set_coverage(&set, &corpus, &config)?;
    if let Some(path) = &args.histogram {
        write_atomic(path, residual_histogram(&r.residuals, args.bin_width)?.as_bytes())?;
    }
    eprintln!("covered {:.4} of {} samples, max residual {:.4}", r.fraction_covered, corpus.len(), r.max_residual);
    write_json(
        &args.out,
        &ReportJson {
            epsilon: r.epsilon,
            distance_kind: kind,
            set_size: set.modes.len(),
            instances: corpus.len(),
            fraction_covered: r.fraction_covered,
            max_residual: r.max_residual,
            uncovered: r.uncovered(),
            residuals: r.residuals,
        },
    )?;
    Ok(())
}

fn curve(args: CurveArgs) -> Result<(), Failure> {
    let file = args.corpus.load()?;
    let corpus = file.corpus()?;
    let cfg = IntegrationConfig::new(file.header.dt, args.dynamics.substeps, file.header.horizon_steps)?;
    let rows = coverage_curve(
        &corpus,
        &args.epsilons,
        &ControlGrid::default(),
        &args.dynamics.params()?,
        &cfg,
        args.distance,
    )?;
    emit(args.out.as_deref(), &curve_to_csv(&rows))?;
    Ok(())
}

fn baselines(args: BaselineArgs) -> Result<(), Failure> {
    let file = args.corpus.load()?;
    let cfg = IntegrationConfig::new(file.header.dt, args.substeps, file.header.horizon_steps)?;
    let rows = baseline_table(&file.eval_instances()?, &cfg, args.hit_d)?;
    emit(args.out.as_deref(), &tables_to_csv("model", &rows))?;
    Ok(())
}

fn load_space(file: &CorpusFile, set: &Path) -> Result<(SetFile, LabelSpace, Arc<covertraj::TrajectorySet>)> {
    let set_file = SetFile::read(set)?;
    let space = LabelSpace::from_file(&set_file, file.header.horizon_steps)?;
    let reference = Arc::new(set_file.to_set()?);
    Ok((set_file, space, reference))
}

fn train(args: TrainArgs) -> Result<(), Failure> {
    let file = args.corpus.load()?;
    let (_, space, reference) = load_space(&file, &args.set)?;
    let outcome = train_on(&file.eval_instances()?, &space, reference, args.label_distance, &args.train.config())?;
    if let (Some(first), Some(last)) = (outcome.loss_curve.first(), outcome.loss_curve.last()) {
        eprintln!("loss {first:.6} -> {last:.6}");
    }
    ModelFile::from_model(&outcome.model, args.label_distance, outcome.loss_curve).write(&args.out)?;
    Ok(())
}

fn evaluate(args: EvalArgs) -> Result<(), Failure> {
    let file = args.corpus.load()?;
    let (_, space, reference) = load_space(&file, &args.set)?;
    let instances = file.eval_instances()?;
    let spec = MetricsSpec {
        ks: args.ks.clone(),
        hits: vec![(args.hit_k, args.hit_d)],
    };
    let rows: Vec<(String, MetricsTable)> = if args.ablation {
        let mode = if args.oracle_probs {
            AblationMode::Oracle
        } else {
            AblationMode::Trained(args.train.config())
        };
        distance_ablation(&instances, &space, reference, mode, &spec)?
    } else if args.oracle_probs {
        let scorer = Scorer::Oracle {
            label_kind: args.label_distance,
        };
        vec![("oracle".into(), evaluate_label_space(&instances, &space, scorer, &spec)?)]
    } else if let Some(path) = &args.model {
        let model = ModelFile::read(path)?.to_model(reference)?;
        vec![("model".into(), evaluate_label_space(&instances, &space, Scorer::Model(&model), &spec)?)]
    } else {
        return Err(Failure::Usage("evaluate needs --model, --oracle-probs or --ablation".into()));
    };
    if let Some(path) = &args.json {
        write_json(path, &rows)?;
    }
    let label = if args.ablation { "label_distance" } else { "model" };
    emit(args.out.as_deref(), &tables_to_csv(label, &rows))?;
    Ok(())
}

fn check(seed: u64) -> Result<(), Failure> {
    let mut ok = true;
    for c in selfcheck(seed)? {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::GenCorpus(a) => gen(a),
        Command::BuildSet(a) => build(a),
        Command::CoverReport(a) => report(a),
        Command::CoverageCurve(a) => curve(a),
        Command::Baselines(a) => baselines(a),
        Command::Train(a) => train(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Selfcheck { seed } => check(seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Check) => ExitCode::from(3),
    }
}
