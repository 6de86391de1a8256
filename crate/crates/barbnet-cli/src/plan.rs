//! Invocation parsing: argv and config file merge into a resolved plan.
//!
//! Precedence is flags over config-file values over built-in defaults, and
//! the resolved plan records every effective value so the run manifest alone
//! reproduces the invocation. Input paths must exist and the output
//! directory must be creatable at validation time.

use crate::CliError;
use barbnet_core::classifiers::Task;
use barbnet_core::netgraph::GraphFormat;
use barbnet_core::pipeline::Quadrant;
use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "barbnet",
    version,
    about = "Keyword-gated sarcasm/cyberbullying classification and coordination graphs"
)]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed recorded in the resolved plan (default 42).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Cap on worker threads for data-parallel stages.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Abort on the first malformed input record instead of skipping it.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    strict: bool,
    /// Directory for artifacts and the run manifest (default "artifacts").
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Subcommand)]
enum CommandArgs {
    /// Collect posts and comment threads from the live endpoint.
    Harvest(HarvestArgs),
    /// Turn raw post/comment files into keyword-tagged documents.
    Ingest(IngestArgs),
    /// Train one classifier and save the model file.
    Train(TrainArgs),
    /// Compare classifiers on a shared train/test split.
    Evaluate(EvaluateArgs),
    /// Score documents through both stages and write verdicts.
    Pipeline(PipelineArgs),
    /// Export the author-subreddit graph for one quadrant.
    Graph(GraphArgs),
    /// Compute coordination signals, scores, and the cluster report.
    Report(ReportArgs),
}

#[derive(Args)]
struct HarvestArgs {
    /// Comma-separated search keywords (default: every lexicon entry).
    #[arg(long, value_name = "LIST")]
    keywords: Option<String>,
    /// Keyword lexicon file, one entry per line.
    #[arg(long, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    max_posts: Option<u64>,
    /// Keep posts with strictly more comments than this.
    #[arg(long, value_name = "N")]
    min_comments: Option<u64>,
    #[arg(long, value_name = "F")]
    requests_per_second: Option<f64>,
    #[arg(long, value_name = "N")]
    max_retries: Option<u32>,
    #[arg(long, value_name = "S")]
    user_agent: Option<String>,
    #[arg(long, value_name = "N")]
    page_size: Option<u64>,
    /// Checkpoint file for resumable runs (default: <out>/harvest_checkpoint.json).
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long, value_name = "PATH")]
    posts: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    comments: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    /// Keep posts with strictly more comments than this.
    #[arg(long, value_name = "N")]
    min_comments: Option<u64>,
}

#[derive(Args)]
struct TrainArgs {
    /// "sarcasm" or "cyberbullying".
    #[arg(long, value_name = "TASK")]
    task: Option<String>,
    /// "nb", "logreg", or "svm".
    #[arg(long, value_name = "MODEL")]
    model: Option<String>,
    /// Labeled dataset, .csv or .jsonl by extension.
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
    #[arg(long, value_name = "F")]
    alpha: Option<f64>,
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,
    #[arg(long, value_name = "F")]
    learning_rate: Option<f64>,
    #[arg(long, value_name = "F")]
    l2: Option<f64>,
    #[arg(long, value_name = "N")]
    batch_size: Option<usize>,
    #[arg(long, value_name = "N")]
    min_df: Option<u64>,
    /// Vocabulary cap; 0 disables the cap.
    #[arg(long, value_name = "N")]
    max_features: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, value_name = "TASK")]
    task: Option<String>,
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
    /// Comma-separated subset of nb,logreg,svm (default: all three).
    #[arg(long, value_name = "LIST")]
    models: Option<String>,
    #[arg(long, value_name = "F")]
    test_fraction: Option<f64>,
    #[arg(long, value_name = "F")]
    alpha: Option<f64>,
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,
    #[arg(long, value_name = "F")]
    learning_rate: Option<f64>,
    #[arg(long, value_name = "F")]
    l2: Option<f64>,
    #[arg(long, value_name = "N")]
    batch_size: Option<usize>,
    #[arg(long, value_name = "N")]
    min_df: Option<u64>,
    /// Vocabulary cap; 0 disables the cap.
    #[arg(long, value_name = "N")]
    max_features: Option<usize>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Documents file produced by ingest.
    #[arg(long, value_name = "PATH")]
    documents: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    sarcasm_model: Option<PathBuf>,
    /// External sarcasm scores (JSONL {doc_id, score}); alternative to a model.
    #[arg(long, value_name = "PATH")]
    sarcasm_scores: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    bully_model: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    bully_scores: Option<PathBuf>,
    /// Class label treated as "sarcastic" (default: the model's second class).
    #[arg(long, value_name = "LABEL")]
    sarcasm_positive: Option<String>,
    /// Class label treated as "bullying" (default: the model's second class).
    #[arg(long, value_name = "LABEL")]
    bully_positive: Option<String>,
    #[arg(long, value_name = "F")]
    threshold_s: Option<f64>,
    #[arg(long, value_name = "F")]
    threshold_b: Option<f64>,
    /// Score only documents with at least one lexicon match (default true).
    #[arg(long, value_name = "BOOL")]
    keyword_gate: Option<bool>,
    /// Rows per quadrant in the subreddit rankings.
    #[arg(long, value_name = "N")]
    top_k: Option<usize>,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_name = "PATH")]
    verdicts: Option<PathBuf>,
    /// "both", "sarcasm_only", "bully_only", or "neither" (default "both").
    #[arg(long, value_name = "QUAD")]
    quadrant: Option<String>,
    /// Comma-separated subset of dot,graphml,json (default: all three).
    #[arg(long, value_name = "LIST")]
    formats: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, value_name = "PATH")]
    verdicts: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    documents: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    comments: Option<PathBuf>,
    /// Cluster admission threshold on the blended score.
    #[arg(long, value_name = "F")]
    tau: Option<f64>,
    /// Co-engagement window in seconds.
    #[arg(long, value_name = "N")]
    window_secs: Option<i64>,
    #[arg(long, value_name = "F")]
    w_engagement: Option<f64>,
    #[arg(long, value_name = "F")]
    w_language: Option<f64>,
    #[arg(long, value_name = "F")]
    w_target: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    strict: Option<bool>,
    out: Option<PathBuf>,
    #[serde(default)]
    harvest: HarvestSection,
    #[serde(default)]
    ingest: IngestSection,
    #[serde(default)]
    train: TrainSection,
    #[serde(default)]
    evaluate: EvaluateSection,
    #[serde(default)]
    pipeline: PipelineSection,
    #[serde(default)]
    graph: GraphSection,
    #[serde(default)]
    report: ReportSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HarvestSection {
    keywords: Option<Vec<String>>,
    lexicon: Option<PathBuf>,
    max_posts: Option<u64>,
    min_comments: Option<u64>,
    requests_per_second: Option<f64>,
    max_retries: Option<u32>,
    user_agent: Option<String>,
    page_size: Option<u64>,
    checkpoint: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IngestSection {
    posts: Option<PathBuf>,
    comments: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    min_comments: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainSection {
    task: Option<String>,
    model: Option<String>,
    data: Option<PathBuf>,
    alpha: Option<f64>,
    epochs: Option<usize>,
    learning_rate: Option<f64>,
    l2: Option<f64>,
    batch_size: Option<usize>,
    min_df: Option<u64>,
    max_features: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateSection {
    task: Option<String>,
    data: Option<PathBuf>,
    models: Option<Vec<String>>,
    test_fraction: Option<f64>,
    alpha: Option<f64>,
    epochs: Option<usize>,
    learning_rate: Option<f64>,
    l2: Option<f64>,
    batch_size: Option<usize>,
    min_df: Option<u64>,
    max_features: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineSection {
    documents: Option<PathBuf>,
    sarcasm_model: Option<PathBuf>,
    sarcasm_scores: Option<PathBuf>,
    bully_model: Option<PathBuf>,
    bully_scores: Option<PathBuf>,
    sarcasm_positive: Option<String>,
    bully_positive: Option<String>,
    threshold_s: Option<f64>,
    threshold_b: Option<f64>,
    keyword_gate: Option<bool>,
    top_k: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    verdicts: Option<PathBuf>,
    quadrant: Option<String>,
    formats: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportSection {
    verdicts: Option<PathBuf>,
    documents: Option<PathBuf>,
    comments: Option<PathBuf>,
    tau: Option<f64>,
    window_secs: Option<i64>,
    w_engagement: Option<f64>,
    w_language: Option<f64>,
    w_target: Option<f64>,
}

/// Classifier family selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    Nb,
    Logreg,
    Svm,
}

impl ModelChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelChoice::Nb => "nb",
            ModelChoice::Logreg => "logreg",
            ModelChoice::Svm => "svm",
        }
    }
}

impl FromStr for ModelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nb" | "naive_bayes" => Ok(ModelChoice::Nb),
            "logreg" | "logistic_regression" => Ok(ModelChoice::Logreg),
            "svm" => Ok(ModelChoice::Svm),
            other => Err(format!("unknown model '{other}' (expected nb, logreg, or svm)")),
        }
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn parse_task(s: &str) -> Result<Task, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "sarcasm" => Ok(Task::Sarcasm),
        "cyberbullying" => Ok(Task::Cyberbullying),
        other => Err(CliError::Validation(format!(
            "unknown task '{other}' (expected sarcasm or cyberbullying)"
        ))),
    }
}

fn parse_quadrant(s: &str) -> Result<Quadrant, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "both" => Ok(Quadrant::Both),
        "sarcasm_only" => Ok(Quadrant::SarcasmOnly),
        "bully_only" => Ok(Quadrant::BullyOnly),
        "neither" => Ok(Quadrant::Neither),
        other => Err(CliError::Validation(format!(
            "unknown quadrant '{other}' (expected both, sarcasm_only, bully_only, or neither)"
        ))),
    }
}

/// A fully resolved invocation: shared settings plus one command's config.
#[derive(Debug, Clone, Serialize)]
pub struct RunPlan {
    pub seed: u64,
    pub threads: Option<usize>,
    pub strict: bool,
    pub out_dir: PathBuf,
    #[serde(flatten)]
    pub command: CommandPlan,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum CommandPlan {
    Harvest(HarvestPlan),
    Ingest(IngestPlan),
    Train(TrainPlan),
    Evaluate(EvaluatePlan),
    Pipeline(PipelinePlan),
    Graph(GraphPlan),
    Report(ReportPlan),
}

impl RunPlan {
    pub fn command_name(&self) -> &'static str {
        match &self.command {
            CommandPlan::Harvest(_) => "harvest",
            CommandPlan::Ingest(_) => "ingest",
            CommandPlan::Train(_) => "train",
            CommandPlan::Evaluate(_) => "evaluate",
            CommandPlan::Pipeline(_) => "pipeline",
            CommandPlan::Graph(_) => "graph",
            CommandPlan::Report(_) => "report",
        }
    }

    /// Input files whose checksums go into the run manifest.
    pub fn input_paths(&self) -> Vec<&Path> {
        match &self.command {
            CommandPlan::Harvest(p) => p.lexicon.iter().map(PathBuf::as_path).collect(),
            CommandPlan::Ingest(p) => {
                vec![p.posts.as_path(), p.comments.as_path(), p.lexicon.as_path()]
            }
            CommandPlan::Train(p) => vec![p.data.as_path()],
            CommandPlan::Evaluate(p) => vec![p.data.as_path()],
            CommandPlan::Pipeline(p) => {
                let mut paths = vec![p.documents.as_path()];
                let optional = [&p.sarcasm_model, &p.sarcasm_scores, &p.bully_model, &p.bully_scores];
                paths.extend(optional.into_iter().flatten().map(PathBuf::as_path));
                paths
            }
            CommandPlan::Graph(p) => vec![p.verdicts.as_path()],
            CommandPlan::Report(p) => {
                vec![p.verdicts.as_path(), p.documents.as_path(), p.comments.as_path()]
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HarvestPlan {
    pub keywords: Vec<String>,
    pub lexicon: Option<PathBuf>,
    pub max_posts: u64,
    pub min_comments: u64,
    pub requests_per_second: f64,
    pub max_retries: u32,
    pub user_agent: String,
    pub page_size: u64,
    pub checkpoint: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestPlan {
    pub posts: PathBuf,
    pub comments: PathBuf,
    pub lexicon: PathBuf,
    pub min_comments: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainPlan {
    pub task: Task,
    pub model: ModelChoice,
    pub data: PathBuf,
    pub alpha: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub min_df: u64,
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluatePlan {
    pub task: Task,
    pub data: PathBuf,
    pub models: Vec<ModelChoice>,
    pub test_fraction: f64,
    pub alpha: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub min_df: u64,
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelinePlan {
    pub documents: PathBuf,
    pub sarcasm_model: Option<PathBuf>,
    pub sarcasm_scores: Option<PathBuf>,
    pub bully_model: Option<PathBuf>,
    pub bully_scores: Option<PathBuf>,
    pub sarcasm_positive: Option<String>,
    pub bully_positive: Option<String>,
    pub threshold_s: f64,
    pub threshold_b: f64,
    pub keyword_gate: bool,
    pub top_k: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphPlan {
    pub verdicts: PathBuf,
    pub quadrant: Quadrant,
    /// Validated format names; each parses as a [`GraphFormat`].
    pub formats: Vec<String>,
}

impl GraphPlan {
    pub fn parsed_formats(&self) -> Vec<GraphFormat> {
        self.formats.iter().map(|f| f.parse().expect("formats validated at parse time")).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportPlan {
    pub verdicts: PathBuf,
    pub documents: PathBuf,
    pub comments: PathBuf,
    pub tau: f64,
    pub window_secs: i64,
    pub w_engagement: f64,
    pub w_language: f64,
    pub w_target: f64,
}

/// Parse argv (without the program name) into a resolved, validated plan.
/// `config_file` is a fallback used when no `--config` flag is present.
pub fn parse_invocation<S: AsRef<str>>(
    argv: &[S],
    config_file: Option<&Path>,
) -> Result<RunPlan, CliError> {
    let mut full: Vec<String> = Vec::with_capacity(argv.len() + 1);
    full.push("barbnet".to_string());
    full.extend(argv.iter().map(|s| s.as_ref().to_string()));
    let cli = Cli::try_parse_from(&full).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;

    let config_path = cli.config.clone().or_else(|| config_file.map(Path::to_path_buf));
    let config = match &config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let seed = cli.seed.or(config.seed).unwrap_or(42);
    let threads = cli.threads.or(config.threads);
    let strict = cli.strict || config.strict.unwrap_or(false);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("artifacts"));

    let command = match &cli.command {
        CommandArgs::Harvest(args) => resolve_harvest(args, &config.harvest, &out_dir)?,
        CommandArgs::Ingest(args) => resolve_ingest(args, &config.ingest)?,
        CommandArgs::Train(args) => resolve_train(args, &config.train)?,
        CommandArgs::Evaluate(args) => resolve_evaluate(args, &config.evaluate)?,
        CommandArgs::Pipeline(args) => resolve_pipeline(args, &config.pipeline)?,
        CommandArgs::Graph(args) => resolve_graph(args, &config.graph)?,
        CommandArgs::Report(args) => resolve_report(args, &config.report)?,
    };

    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Validation(format!("cannot create output directory {}: {e}", out_dir.display()))
    })?;
    Ok(RunPlan { seed, threads, strict, out_dir, command })
}

fn require<T>(flag: Option<T>, cfg: Option<T>, command: &str, field: &str) -> Result<T, CliError> {
    flag.or(cfg).ok_or_else(|| {
        CliError::Validation(format!(
            "{command}: --{field} is required (flag or [{command}] {} in the config)",
            field.replace('-', "_")
        ))
    })
}

fn must_exist(path: &Path, command: &str, field: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{command}: --{field} path does not exist: {}",
            path.display()
        )))
    }
}

fn unit_interval(value: f64, command: &str, field: &str) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(CliError::Validation(format!("{command}: --{field} must lie in [0, 1], got {value}")))
    }
}

fn split_csv_list(raw: &str) -> Vec<String> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

/// 0 means "no cap"; otherwise the cap itself.
fn max_features_opt(value: usize) -> Option<usize> {
    (value != 0).then_some(value)
}

fn resolve_harvest(
    args: &HarvestArgs,
    cfg: &HarvestSection,
    out_dir: &Path,
) -> Result<CommandPlan, CliError> {
    let keywords = args
        .keywords
        .as_deref()
        .map(split_csv_list)
        .or_else(|| cfg.keywords.clone())
        .unwrap_or_default();
    let lexicon = args.lexicon.clone().or_else(|| cfg.lexicon.clone());
    if keywords.is_empty() && lexicon.is_none() {
        return Err(CliError::Validation(
            "harvest: provide --keywords or --lexicon (keywords default to the lexicon)".into(),
        ));
    }
    if let Some(path) = &lexicon {
        must_exist(path, "harvest", "lexicon")?;
    }
    let plan = HarvestPlan {
        keywords,
        lexicon,
        max_posts: args.max_posts.or(cfg.max_posts).unwrap_or(100),
        min_comments: args.min_comments.or(cfg.min_comments).unwrap_or(20),
        requests_per_second: args.requests_per_second.or(cfg.requests_per_second).unwrap_or(1.0),
        max_retries: args.max_retries.or(cfg.max_retries).unwrap_or(3),
        user_agent: args
            .user_agent
            .clone()
            .or_else(|| cfg.user_agent.clone())
            .unwrap_or_else(|| "barbnet/0.1 (research collector)".to_string()),
        page_size: args.page_size.or(cfg.page_size).unwrap_or(25),
        checkpoint: args
            .checkpoint
            .clone()
            .or_else(|| cfg.checkpoint.clone())
            .unwrap_or_else(|| out_dir.join("harvest_checkpoint.json")),
    };
    if plan.max_posts == 0 {
        return Err(CliError::Validation("harvest: --max-posts must be positive".into()));
    }
    if !(1..=100).contains(&plan.page_size) {
        return Err(CliError::Validation(format!(
            "harvest: --page-size must lie in 1..=100, got {}",
            plan.page_size
        )));
    }
    if !(plan.requests_per_second > 0.0 && plan.requests_per_second.is_finite()) {
        return Err(CliError::Validation(format!(
            "harvest: --requests-per-second must be positive, got {}",
            plan.requests_per_second
        )));
    }
    if plan.user_agent.trim().is_empty() {
        return Err(CliError::Validation("harvest: --user-agent must be non-empty".into()));
    }
    Ok(CommandPlan::Harvest(plan))
}

fn resolve_ingest(args: &IngestArgs, cfg: &IngestSection) -> Result<CommandPlan, CliError> {
    let plan = IngestPlan {
        posts: require(args.posts.clone(), cfg.posts.clone(), "ingest", "posts")?,
        comments: require(args.comments.clone(), cfg.comments.clone(), "ingest", "comments")?,
        lexicon: require(args.lexicon.clone(), cfg.lexicon.clone(), "ingest", "lexicon")?,
        min_comments: args.min_comments.or(cfg.min_comments).unwrap_or(20),
    };
    must_exist(&plan.posts, "ingest", "posts")?;
    must_exist(&plan.comments, "ingest", "comments")?;
    must_exist(&plan.lexicon, "ingest", "lexicon")?;
    Ok(CommandPlan::Ingest(plan))
}

struct TrainKnobs {
    alpha: f64,
    epochs: usize,
    learning_rate: f64,
    l2: f64,
    batch_size: usize,
    min_df: u64,
    max_features: Option<usize>,
}

#[allow(clippy::too_many_arguments)]
fn train_knobs(
    command: &str,
    alpha: Option<f64>,
    epochs: Option<usize>,
    learning_rate: Option<f64>,
    l2: Option<f64>,
    batch_size: Option<usize>,
    min_df: Option<u64>,
    max_features: Option<usize>,
) -> Result<TrainKnobs, CliError> {
    let knobs = TrainKnobs {
        alpha: alpha.unwrap_or(1.0),
        epochs: epochs.unwrap_or(5),
        learning_rate: learning_rate.unwrap_or(1e-3),
        l2: l2.unwrap_or(1e-4),
        batch_size: batch_size.unwrap_or(32),
        min_df: min_df.unwrap_or(2),
        max_features: max_features.map_or(Some(50_000), max_features_opt),
    };
    if !(knobs.alpha > 0.0 && knobs.alpha.is_finite()) {
        return Err(CliError::Validation(format!("{command}: --alpha must be positive")));
    }
    if knobs.epochs == 0 {
        return Err(CliError::Validation(format!("{command}: --epochs must be at least 1")));
    }
    if !(knobs.learning_rate > 0.0 && knobs.learning_rate.is_finite()) {
        return Err(CliError::Validation(format!("{command}: --learning-rate must be positive")));
    }
    if !(knobs.l2 >= 0.0 && knobs.l2.is_finite()) {
        return Err(CliError::Validation(format!("{command}: --l2 must be non-negative")));
    }
    if knobs.batch_size == 0 {
        return Err(CliError::Validation(format!("{command}: --batch-size must be at least 1")));
    }
    Ok(knobs)
}

fn resolve_train(args: &TrainArgs, cfg: &TrainSection) -> Result<CommandPlan, CliError> {
    let task = parse_task(&require(args.task.clone(), cfg.task.clone(), "train", "task")?)?;
    let model = require(args.model.clone(), cfg.model.clone(), "train", "model")?
        .parse::<ModelChoice>()
        .map_err(|e| CliError::Validation(format!("train: {e}")))?;
    let data = require(args.data.clone(), cfg.data.clone(), "train", "data")?;
    must_exist(&data, "train", "data")?;
    let knobs = train_knobs(
        "train",
        args.alpha.or(cfg.alpha),
        args.epochs.or(cfg.epochs),
        args.learning_rate.or(cfg.learning_rate),
        args.l2.or(cfg.l2),
        args.batch_size.or(cfg.batch_size),
        args.min_df.or(cfg.min_df),
        args.max_features.or(cfg.max_features),
    )?;
    Ok(CommandPlan::Train(TrainPlan {
        task,
        model,
        data,
        alpha: knobs.alpha,
        epochs: knobs.epochs,
        learning_rate: knobs.learning_rate,
        l2: knobs.l2,
        batch_size: knobs.batch_size,
        min_df: knobs.min_df,
        max_features: knobs.max_features,
    }))
}

fn resolve_evaluate(args: &EvaluateArgs, cfg: &EvaluateSection) -> Result<CommandPlan, CliError> {
    let task = parse_task(&require(args.task.clone(), cfg.task.clone(), "evaluate", "task")?)?;
    let data = require(args.data.clone(), cfg.data.clone(), "evaluate", "data")?;
    must_exist(&data, "evaluate", "data")?;
    let model_names = args
        .models
        .as_deref()
        .map(split_csv_list)
        .or_else(|| cfg.models.clone())
        .unwrap_or_else(|| vec!["nb".into(), "logreg".into(), "svm".into()]);
    let mut models = Vec::with_capacity(model_names.len());
    for name in &model_names {
        models.push(
            name.parse::<ModelChoice>()
                .map_err(|e| CliError::Validation(format!("evaluate: {e}")))?,
        );
    }
    if models.is_empty() {
        return Err(CliError::Validation("evaluate: --models must name at least one model".into()));
    }
    let test_fraction = args.test_fraction.or(cfg.test_fraction).unwrap_or(0.2);
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CliError::Validation(format!(
            "evaluate: --test-fraction must lie strictly between 0 and 1, got {test_fraction}"
        )));
    }
    let knobs = train_knobs(
        "evaluate",
        args.alpha.or(cfg.alpha),
        args.epochs.or(cfg.epochs),
        args.learning_rate.or(cfg.learning_rate),
        args.l2.or(cfg.l2),
        args.batch_size.or(cfg.batch_size),
        args.min_df.or(cfg.min_df),
        args.max_features.or(cfg.max_features),
    )?;
    Ok(CommandPlan::Evaluate(EvaluatePlan {
        task,
        data,
        models,
        test_fraction,
        alpha: knobs.alpha,
        epochs: knobs.epochs,
        learning_rate: knobs.learning_rate,
        l2: knobs.l2,
        batch_size: knobs.batch_size,
        min_df: knobs.min_df,
        max_features: knobs.max_features,
    }))
}

fn resolve_pipeline(args: &PipelineArgs, cfg: &PipelineSection) -> Result<CommandPlan, CliError> {
    let documents =
        require(args.documents.clone(), cfg.documents.clone(), "pipeline", "documents")?;
    must_exist(&documents, "pipeline", "documents")?;
    let plan = PipelinePlan {
        documents,
        sarcasm_model: args.sarcasm_model.clone().or_else(|| cfg.sarcasm_model.clone()),
        sarcasm_scores: args.sarcasm_scores.clone().or_else(|| cfg.sarcasm_scores.clone()),
        bully_model: args.bully_model.clone().or_else(|| cfg.bully_model.clone()),
        bully_scores: args.bully_scores.clone().or_else(|| cfg.bully_scores.clone()),
        sarcasm_positive: args.sarcasm_positive.clone().or_else(|| cfg.sarcasm_positive.clone()),
        bully_positive: args.bully_positive.clone().or_else(|| cfg.bully_positive.clone()),
        threshold_s: unit_interval(
            args.threshold_s.or(cfg.threshold_s).unwrap_or(0.5),
            "pipeline",
            "threshold-s",
        )?,
        threshold_b: unit_interval(
            args.threshold_b.or(cfg.threshold_b).unwrap_or(0.5),
            "pipeline",
            "threshold-b",
        )?,
        keyword_gate: args.keyword_gate.or(cfg.keyword_gate).unwrap_or(true),
        top_k: args.top_k.or(cfg.top_k).unwrap_or(5),
    };
    for (stage, model, scores) in [
        ("sarcasm", &plan.sarcasm_model, &plan.sarcasm_scores),
        ("bully", &plan.bully_model, &plan.bully_scores),
    ] {
        match (model, scores) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(format!(
                    "pipeline: give --{stage}-model or --{stage}-scores, not both"
                )))
            }
            (None, None) => {
                return Err(CliError::Validation(format!(
                    "pipeline: the {stage} stage needs --{stage}-model or --{stage}-scores"
                )))
            }
            (Some(path), None) => must_exist(path, "pipeline", &format!("{stage}-model"))?,
            (None, Some(path)) => must_exist(path, "pipeline", &format!("{stage}-scores"))?,
        }
    }
    Ok(CommandPlan::Pipeline(plan))
}

fn resolve_graph(args: &GraphArgs, cfg: &GraphSection) -> Result<CommandPlan, CliError> {
    let verdicts = require(args.verdicts.clone(), cfg.verdicts.clone(), "graph", "verdicts")?;
    must_exist(&verdicts, "graph", "verdicts")?;
    let quadrant = parse_quadrant(
        &args
            .quadrant
            .clone()
            .or_else(|| cfg.quadrant.clone())
            .unwrap_or_else(|| "both".to_string()),
    )?;
    let mut formats = args
        .formats
        .as_deref()
        .map(split_csv_list)
        .or_else(|| cfg.formats.clone())
        .unwrap_or_else(|| vec!["dot".into(), "graphml".into(), "json".into()]);
    for format in &mut formats {
        *format = format.to_ascii_lowercase();
        format.parse::<GraphFormat>().map_err(|e| CliError::Validation(format!("graph: {e}")))?;
    }
    formats.dedup();
    if formats.is_empty() {
        return Err(CliError::Validation("graph: --formats must name at least one format".into()));
    }
    Ok(CommandPlan::Graph(GraphPlan { verdicts, quadrant, formats }))
}

fn resolve_report(args: &ReportArgs, cfg: &ReportSection) -> Result<CommandPlan, CliError> {
    let plan = ReportPlan {
        verdicts: require(args.verdicts.clone(), cfg.verdicts.clone(), "report", "verdicts")?,
        documents: require(args.documents.clone(), cfg.documents.clone(), "report", "documents")?,
        comments: require(args.comments.clone(), cfg.comments.clone(), "report", "comments")?,
        tau: unit_interval(args.tau.or(cfg.tau).unwrap_or(0.5), "report", "tau")?,
        window_secs: args.window_secs.or(cfg.window_secs).unwrap_or(3600),
        w_engagement: args.w_engagement.or(cfg.w_engagement).unwrap_or(1.0 / 3.0),
        w_language: args.w_language.or(cfg.w_language).unwrap_or(1.0 / 3.0),
        w_target: args.w_target.or(cfg.w_target).unwrap_or(1.0 / 3.0),
    };
    must_exist(&plan.verdicts, "report", "verdicts")?;
    must_exist(&plan.documents, "report", "documents")?;
    must_exist(&plan.comments, "report", "comments")?;
    if plan.window_secs <= 0 {
        return Err(CliError::Validation(format!(
            "report: --window-secs must be positive, got {}",
            plan.window_secs
        )));
    }
    let weights = [plan.w_engagement, plan.w_language, plan.w_target];
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(CliError::Validation(
            "report: signal weights must be non-negative finite numbers".into(),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CliError::Validation(format!(
            "report: signal weights must sum to 1, got {sum}"
        )));
    }
    Ok(CommandPlan::Report(plan))
}
