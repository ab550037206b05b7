//! Command-line front end. The `corset` binary only calls [`main`].
//!
//! Usage errors exit with status 2 (clap's convention), every other error
//! with status 1. Randomized commands write their seed into any JSON they
//! produce.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{dataset_from_dense, parse_label_lines, read_dense_csv, Dataset, LabelId};
use crate::error::{Error, Result};
use crate::eval::{avg_pairwise_overlap, evaluate, micro_f1};
use crate::head_sampler::{discriminativity, HeadSampler, HeadSpace};
use crate::label_space::{build_feature_space, build_label_space, ContainmentIndex, Side};
use crate::learner::{fit, LearnerConfig, RuleSetModel, SamplerVariant};
use crate::objective::{tail_uncovered_area, RuleSet};
use crate::synth::{generate, CoverageMode, GeneratorConfig};
use crate::tail_sampler::TailSampler;

#[derive(Debug, Parser)]
#[command(name = "corset", version, about = "Learn small, diverse multi-label rule sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a planted-rule dataset and its ground truth.
    Generate(GenerateArgs),
    /// Partition a dataset into train, validation and test files.
    Split(SplitArgs),
    /// Turn a dense CSV plus a label file into the sparse format.
    Binarize(BinarizeArgs),
    /// Print dataset statistics.
    Stats(StatsArgs),
    /// Learn a rule set and save it as JSON.
    Train(TrainArgs),
    /// Predict label sets, one line per record.
    Predict(PredictArgs),
    /// Score a model on a labelled dataset.
    Evaluate(EvaluateArgs),
    /// Draw tails with their uncovered area (tab-separated).
    SampleTails(SampleTailsArgs),
    /// Draw heads for a tail with discriminativity and supports (tab-separated).
    SampleHeads(SampleHeadsArgs),
    /// Train over a geometric grid of diversity weights.
    SweepLambda(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Coverage {
    Uniform,
    Skewed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Variant {
    Surs,
    Gh,
}

impl From<Variant> for SamplerVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Surs => SamplerVariant::Surs,
            Variant::Gh => SamplerVariant::Gh,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth JSON, defaults to `<out>.truth.json`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub n_records: usize,
    #[arg(long, default_value_t = 100)]
    pub n_features: usize,
    #[arg(long, default_value_t = 100)]
    pub n_labels: usize,
    /// Defaults to a third of min(n_features, n_labels).
    #[arg(long)]
    pub n_rules: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub features_per_rule: usize,
    #[arg(long, default_value_t = 3)]
    pub labels_per_rule: usize,
    #[arg(long, value_enum, default_value_t = Coverage::Uniform)]
    pub coverage: Coverage,
    #[arg(long, default_value_t = 0.05)]
    pub min_support: f64,
    #[arg(long, default_value_t = 0.15)]
    pub max_support: f64,
    #[arg(long, default_value_t = 2.0)]
    pub skew_exponent: f64,
    /// Per-cell flip probability.
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Train, validation and test shares, e.g. `0.6,0.2,0.2`.
    #[arg(long, value_parser = parse_fractions)]
    pub fractions: [f64; 3],
    /// Files are written as `<prefix>.{train,valid,test}.txt`.
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    /// Headerless CSV of numeric features.
    #[arg(long)]
    pub csv: PathBuf,
    /// One line of label ids per CSV row.
    #[arg(long)]
    pub labels: PathBuf,
    /// Values at or above this column percentile become 1.
    #[arg(long, default_value_t = 50.0)]
    pub percentile: f64,
    /// Fit thresholds on the first N rows only (the training part).
    #[arg(long)]
    pub fit_rows: Option<usize>,
    #[arg(long)]
    pub n_labels: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct LearnerArgs {
    /// Diversity weight.
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Stop once a new rule predicts at most this share of label occurrences.
    #[arg(long, conflicts_with = "max_rules")]
    pub tau: Option<f64>,
    /// Number of rules to learn (a safety cap of 150 applies with --tau).
    #[arg(long)]
    pub max_rules: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub pool_size: usize,
    #[arg(long, value_enum, default_value_t = Variant::Surs)]
    pub variant: Variant,
    /// Rerun plain greedy over every candidate seen and keep the better set.
    #[arg(long)]
    pub two_pass: bool,
    /// Clique probability threshold of the label space.
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.3)]
    pub feature_theta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

impl LearnerArgs {
    pub fn config(&self) -> LearnerConfig {
        let base = LearnerConfig::default();
        LearnerConfig {
            lambda: self.lambda,
            tau: self.tau,
            max_rules: self.max_rules.unwrap_or(base.max_rules),
            pool_size: self.pool_size,
            variant: self.variant.into(),
            two_pass: self.two_pass,
            theta: self.theta,
            feature_theta: self.feature_theta,
            gamma: self.gamma,
            epsilon: self.epsilon,
            seed: self.seed,
            threads: self.threads,
            ..base
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Leave labels absent from gold and predictions out of macro-F1.
    #[arg(long)]
    pub ignore_absent_labels: bool,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleTailsArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Rules whose coverage counts as already explained.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Sample from the whole label powerset instead of the probable cliques.
    #[arg(long)]
    pub full_space: bool,
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SampleHeadsArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated label ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tail: Vec<LabelId>,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// `surs` samples exactly over probable feature cliques, `gh` builds
    /// heads greedily.
    #[arg(long, value_enum, default_value_t = Variant::Surs)]
    pub variant: Variant,
    /// With `surs`, sample over all feature sets instead.
    #[arg(long)]
    pub full_space: bool,
    #[arg(long, default_value_t = 0.3)]
    pub feature_theta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Scored for micro-F1; the training data is used when absent.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1,10,100")]
    pub lambdas: Vec<f64>,
    /// Runs per grid point, seeded `seed, seed+1, ...`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

fn parse_fractions(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|v| format!("expected 3 comma-separated shares, got {}", v.len()))
}

fn load(path: &Path) -> Result<Dataset> {
    Dataset::load_sparse(path).map_err(|e| match e {
        Error::Io(io) => Error::InvalidArgument(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn load_model(path: &Path) -> Result<RuleSetModel> {
    RuleSetModel::load(path).map_err(|e| match e {
        Error::Io(io) => Error::InvalidArgument(format!("{}: {io}", path.display())),
        other => other,
    })
}

/// Parses the process arguments, runs the command and exits.
pub fn main() -> ! {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // help and version exit 0, usage errors 2
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => std::process::exit(0),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Split(a) => cmd_split(&a),
        Command::Binarize(a) => cmd_binarize(&a),
        Command::Stats(a) => cmd_stats(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::SampleTails(a) => cmd_sample_tails(&a),
        Command::SampleHeads(a) => cmd_sample_heads(&a),
        Command::SweepLambda(a) => cmd_sweep_lambda(&a),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn join(ids: &[u32]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let cfg = GeneratorConfig {
        n_records: a.n_records,
        n_features: a.n_features,
        n_labels: a.n_labels,
        n_rules: a.n_rules,
        features_per_rule: a.features_per_rule,
        labels_per_rule: a.labels_per_rule,
        coverage: match a.coverage {
            Coverage::Uniform => CoverageMode::Uniform,
            Coverage::Skewed => CoverageMode::Skewed,
        },
        min_support: a.min_support,
        max_support: a.max_support,
        skew_exponent: a.skew_exponent,
        noise: a.noise,
        seed: a.seed,
    };
    let (data, truth) = generate(&cfg)?;
    data.write_sparse(&a.out)?;
    let truth_path = a.truth.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".truth.json");
        p.into()
    });
    // the seed travels inside the config
    write_json(&truth_path, &truth)?;
    println!(
        "wrote {} records and {} planted rules to {} and {}",
        data.len(),
        truth.rules.len(),
        a.out.display(),
        truth_path.display()
    );
    Ok(())
}

pub fn cmd_split(a: &SplitArgs) -> Result<()> {
    let data = load(&a.data)?;
    let (train, valid, test) = data.split(a.fractions, a.seed)?;
    for (part, name) in [(&train, "train"), (&valid, "valid"), (&test, "test")] {
        let mut p = a.out_prefix.clone().into_os_string();
        p.push(format!(".{name}.txt"));
        part.write_sparse(PathBuf::from(&p))?;
        println!("{name}\t{}\t{}", part.len(), PathBuf::from(p).display());
    }
    Ok(())
}

pub fn cmd_binarize(a: &BinarizeArgs) -> Result<()> {
    let rows = read_dense_csv(&a.csv)?;
    let labels = parse_label_lines(&fs::read_to_string(&a.labels)?)?;
    let (data, _) = dataset_from_dense(&rows, labels, a.n_labels, a.percentile, a.fit_rows)?;
    data.write_sparse(&a.out)?;
    println!("wrote {} records with {} features", data.len(), data.n_features());
    Ok(())
}

pub fn cmd_stats(a: &StatsArgs) -> Result<()> {
    let s = load(&a.data)?.stats();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&s).map_err(|e| Error::InvalidArgument(e.to_string()))?);
    } else {
        println!("records              {:>10}", s.records);
        println!("features             {:>10}", s.features);
        println!("labels               {:>10}", s.labels);
        println!("cardinality          {:>10.3}", s.cardinality);
        println!("distinct label sets  {:>10}", s.distinct_label_sets);
    }
    Ok(())
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let data = load(&a.data)?;
    let model = fit(&data, &a.learner.config())?;
    model.save(&a.model)?;
    println!(
        "learned {} rules, objective {:.4}, seed {}, saved to {}",
        model.rules.len(),
        model.objective,
        model.seed,
        a.model.display()
    );
    Ok(())
}

fn check_model_fits(model: &RuleSetModel, data: &Dataset) -> Result<()> {
    if model.n_features > data.n_features() || model.n_labels > data.n_labels() {
        return Err(Error::InvalidArgument(format!(
            "model expects {} features and {} labels, data declares {} and {}",
            model.n_features,
            model.n_labels,
            data.n_features(),
            data.n_labels()
        )));
    }
    Ok(())
}

pub fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let data = load(&a.data)?;
    check_model_fits(&model, &data)?;
    let mut out = String::new();
    for labels in model.predict_dataset(&data) {
        out.push_str(&join(&labels));
        out.push('\n');
    }
    match &a.out {
        Some(p) => fs::write(p, out)?,
        None => print!("{out}"),
    }
    Ok(())
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let data = load(&a.data)?;
    check_model_fits(&model, &data)?;
    let report = evaluate(&model, &data, a.ignore_absent_labels)?;
    print!("{}", report.to_table());
    if let Some(p) = &a.json {
        #[derive(Serialize)]
        struct Out<'a> {
            seed: u64,
            #[serde(flatten)]
            report: &'a crate::eval::MetricReport,
        }
        write_json(p, &Out { seed: model.seed, report: &report })?;
    }
    Ok(())
}

pub fn cmd_sample_tails(a: &SampleTailsArgs) -> Result<()> {
    let data = load(&a.data)?;
    let ruleset = match &a.model {
        Some(p) => {
            let model = load_model(p)?;
            check_model_fits(&model, &data)?;
            RuleSet::with_rules(&data, model.bind(&data)?)
        }
        None => RuleSet::new(&data),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut out = String::new();
    let space;
    let index;
    let sampler = if a.full_space {
        TailSampler::full(&data, &ruleset)
    } else {
        space = build_label_space(&data, a.theta, crate::label_space::DEFAULT_MAX_SIZE)?;
        index = ContainmentIndex::build(&data, &space, Side::Labels);
        TailSampler::reduced(&data, &space, &index, &ruleset)
    };
    for _ in 0..a.n {
        let tail = sampler.sample(&mut rng)?;
        let _ = writeln!(out, "{}\t{}", join(&tail), tail_uncovered_area(&data, &tail, &ruleset));
    }
    print!("{out}");
    Ok(())
}

pub fn cmd_sample_heads(a: &SampleHeadsArgs) -> Result<()> {
    let data = load(&a.data)?;
    let mut tail = a.tail.clone();
    tail.sort_unstable();
    tail.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let space;
    let index;
    let head_space = if a.full_space || matches!(a.variant, Variant::Gh) {
        HeadSpace::Full
    } else {
        space = build_feature_space(&data, a.feature_theta, crate::label_space::DEFAULT_MAX_SIZE, crate::label_space::DEFAULT_NODE_BUDGET)?;
        index = ContainmentIndex::build(&data, &space, Side::Features);
        HeadSpace::Reduced { space: &space, index: &index }
    };
    let sampler = HeadSampler::new(&data, &tail, head_space)?;
    let params = crate::head_sampler::GreedyParams { gamma: a.gamma, epsilon: a.epsilon };
    params.validate()?;
    let mut out = String::new();
    for _ in 0..a.n {
        let head = match a.variant {
            Variant::Gh => sampler.greedy(&params, &mut rng)?,
            Variant::Surs => sampler.sample(&mut rng)?,
        };
        let support = data.support_of_features(&head);
        let (pos, neg) = sampler.bipartition().count_in(&support);
        let _ = writeln!(out, "{}\t{}\t{pos}\t{neg}", join(&head), discriminativity(&data, &head, &tail));
    }
    print!("{out}");
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub seed: u64,
    pub avg_pairwise_overlap: f64,
    pub micro_f1: f64,
    pub rules: usize,
}

pub fn cmd_sweep_lambda(a: &SweepArgs) -> Result<()> {
    let train = load(&a.data)?;
    let test = match &a.test {
        Some(p) => Some(load(p)?),
        None => None,
    };
    let eval_on = test.as_ref().unwrap_or(&train);
    if a.lambdas.is_empty() || a.seeds == 0 {
        return Err(Error::InvalidArgument("need at least one lambda and one seed".into()));
    }
    let base = a.learner.config();
    let mut rows = Vec::new();
    println!("lambda\tseed\tavg_pairwise_overlap\tmicro_f1\trules");
    for &lambda in &a.lambdas {
        for s in 0..a.seeds {
            let cfg = LearnerConfig { lambda, seed: base.seed + s, ..base.clone() };
            let model = fit(&train, &cfg)?;
            let rules = model.bind(&train)?;
            let row = SweepRow {
                lambda,
                seed: cfg.seed,
                avg_pairwise_overlap: avg_pairwise_overlap(&rules),
                micro_f1: micro_f1(&eval_on.label_sets(), &model.predict_dataset(eval_on))?,
                rules: rules.len(),
            };
            println!(
                "{}\t{}\t{:.4}\t{:.4}\t{}",
                row.lambda, row.seed, row.avg_pairwise_overlap, row.micro_f1, row.rules
            );
            rows.push(row);
        }
    }
    if let Some(p) = &a.json {
        #[derive(Serialize)]
        struct Out {
            seed: u64,
            rows: Vec<SweepRow>,
        }
        write_json(p, &Out { seed: base.seed, rows })?;
    }
    Ok(())
}
