//! Plan execution: each command reads its inputs, writes its artifacts into
//! the output directory, and records a run manifest with input checksums so
//! the invocation is reproducible from the manifest alone.

use crate::plan::{
    CommandPlan, EvaluatePlan, GraphPlan, HarvestPlan, IngestPlan, ModelChoice, PipelinePlan,
    ReportPlan, RunPlan, TrainPlan,
};
use crate::CliError;
use barbnet_collector::{
    harvest, HarvestConfig, JsonlSink, RedditClient, SystemClock, UreqTransport,
};
use barbnet_core::classifiers::{
    load_external_scores, load_model, save_model, train_logreg, train_nb, train_svm, LinearModel,
    ModelMeta, Task, TrainConfig,
};
use barbnet_core::corpus::{
    filter_posts, load_lexicon, parse_comments, parse_documents, parse_posts, to_documents,
    write_documents, Document, Lexicon, RawComment,
};
use barbnet_core::eval::{compare_models, CompareConfig, LabeledDataset, ModelSpec};
use barbnet_core::features::{
    build_vocabulary, count_vectorize, tokenize, vectorize, TokenizerConfig,
};
use barbnet_core::netgraph::{
    build_bipartite, co_engagement, coordination_scores, detect_clusters, export_graph,
    language_similarity, render_cluster_report, target_overlap, LanguageConfig, ScoreWeights,
};
use barbnet_core::pipeline::{
    aggregate, read_verdicts, run as run_pipeline, write_verdicts, PipelineConfig, PositiveRule,
    ScoreSource, Verdict,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// A successful run: the artifacts written and a human-readable summary.
#[derive(Debug)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    pub summary: String,
}

#[derive(Serialize)]
struct RunManifest {
    command: &'static str,
    resolved_config: serde_json::Value,
    input_checksums: BTreeMap<String, String>,
    artifacts: Vec<String>,
    started_at: i64,
    finished_at: i64,
}

/// Execute a validated plan. On success every declared artifact exists on
/// disk and the run manifest is written beside them.
pub fn execute(plan: &RunPlan) -> Result<RunOutcome, CliError> {
    let started_at = now_unix();
    apply_thread_cap(plan.threads);
    let input_checksums = checksum_inputs(plan)?;

    let (artifacts, summary) = match &plan.command {
        CommandPlan::Harvest(p) => exec_harvest(plan, p)?,
        CommandPlan::Ingest(p) => exec_ingest(plan, p)?,
        CommandPlan::Train(p) => exec_train(plan, p)?,
        CommandPlan::Evaluate(p) => exec_evaluate(plan, p)?,
        CommandPlan::Pipeline(p) => exec_pipeline(plan, p)?,
        CommandPlan::Graph(p) => exec_graph(plan, p)?,
        CommandPlan::Report(p) => exec_report(plan, p)?,
    };

    let manifest = RunManifest {
        command: plan.command_name(),
        resolved_config: serde_json::to_value(plan)
            .map_err(|e| CliError::runtime("cli", format!("manifest serialization: {e}")))?,
        input_checksums,
        artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
        started_at,
        finished_at: now_unix(),
    };
    let manifest_path = plan.out_dir.join("run_manifest.json");
    let mut body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::runtime("cli", format!("manifest serialization: {e}")))?;
    body.push('\n');
    write_bytes(&manifest_path, body.as_bytes())?;

    Ok(RunOutcome { artifacts, manifest_path, summary })
}

fn now_unix() -> i64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs() as i64).unwrap_or(0)
}

fn apply_thread_cap(threads: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        // Best effort: the global pool can only be configured once per
        // process; later calls keep the first cap.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

fn checksum_inputs(plan: &RunPlan) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for path in plan.input_paths() {
        let mut file = File::open(path).map_err(|e| io_err(path, e))?;
        let mut hasher = Sha256::new();
        let mut buf = [0u8; 64 * 1024];
        loop {
            let n = file.read(&mut buf).map_err(|e| io_err(path, e))?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
        }
        out.insert(path.display().to_string(), hex(&hasher.finalize()));
    }
    Ok(out)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::runtime("io", format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    Ok(BufReader::new(File::open(path).map_err(|e| io_err(path, e))?))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn load_lexicon_file(path: &Path) -> Result<Lexicon, CliError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    load_lexicon(file).map_err(|e| CliError::runtime("corpus", e))
}

fn exec_harvest(plan: &RunPlan, p: &HarvestPlan) -> Result<(Vec<PathBuf>, String), CliError> {
    let lexicon = match &p.lexicon {
        Some(path) => load_lexicon_file(path)?,
        // Validation guarantees keywords are non-empty in this branch.
        None => Lexicon::new(p.keywords.iter().map(String::as_str))
            .map_err(|e| CliError::runtime("corpus", e))?,
    };
    let config = HarvestConfig {
        keywords: p.keywords.clone(),
        max_posts_per_keyword: p.max_posts,
        min_comments: p.min_comments,
        requests_per_second: p.requests_per_second,
        max_retries: p.max_retries,
        user_agent: p.user_agent.clone(),
        checkpoint_path: Some(p.checkpoint.clone()),
        page_size: p.page_size,
    };
    let mut client = RedditClient::new(
        UreqTransport::new(),
        SystemClock::new(),
        &config.user_agent,
        config.requests_per_second,
        config.max_retries,
    )
    .map_err(|e| CliError::runtime("collector", e))?
    .with_page_size(config.page_size);

    let posts_path = plan.out_dir.join("posts.jsonl");
    let comments_path = plan.out_dir.join("comments.jsonl");
    let mut sink = JsonlSink::new(&posts_path, &comments_path);
    let manifest = harvest(&mut client, &lexicon, &config, &mut sink)
        .map_err(|e| CliError::runtime("collector", e))?;

    let stats_path = plan.out_dir.join("harvest_stats.json");
    write_bytes(&stats_path, manifest.to_json().as_bytes())?;

    let kept: u64 = manifest.per_keyword.values().map(|s| s.kept).sum();
    let fetched: u64 = manifest.per_keyword.values().map(|s| s.fetched).sum();
    let comments: u64 = manifest.per_keyword.values().map(|s| s.comments).sum();
    let summary = format!(
        "harvested {kept} of {fetched} posts ({comments} comments) across {} keywords -> {}",
        manifest.per_keyword.len(),
        plan.out_dir.display()
    );
    Ok((vec![posts_path, comments_path, stats_path], summary))
}

fn exec_ingest(plan: &RunPlan, p: &IngestPlan) -> Result<(Vec<PathBuf>, String), CliError> {
    let posts =
        parse_posts(open(&p.posts)?, plan.strict).map_err(|e| CliError::runtime("corpus", e))?;
    let comments = parse_comments(open(&p.comments)?, plan.strict)
        .map_err(|e| CliError::runtime("corpus", e))?;
    let lexicon = load_lexicon_file(&p.lexicon)?;

    let total_posts = posts.records.len();
    let parse_errors = posts.errors.len() + comments.errors.len();
    let kept = filter_posts(posts.records, p.min_comments);
    let kept_posts = kept.len();
    let result = to_documents(&kept, &comments.records, &lexicon);

    let documents_path = plan.out_dir.join("documents.jsonl");
    let mut buf = Vec::new();
    write_documents(&mut buf, &result.documents).map_err(|e| CliError::runtime("corpus", e))?;
    write_bytes(&documents_path, &buf)?;

    let summary = format!(
        "{} documents from {kept_posts} of {total_posts} posts \
         (engagement filter > {}); {} comments outside kept posts; {parse_errors} \
         records skipped as malformed -> {}",
        result.documents.len(),
        p.min_comments,
        result.skipped_comments,
        documents_path.display()
    );
    Ok((vec![documents_path], summary))
}

fn load_dataset(path: &Path) -> Result<LabeledDataset, CliError> {
    let eval_err = |e| CliError::runtime("eval", e);
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => LabeledDataset::load_csv(path).map_err(eval_err),
        _ => LabeledDataset::load_jsonl(path).map_err(eval_err),
    }
}

fn train_config(p: &TrainPlan, seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: p.epochs,
        learning_rate: p.learning_rate,
        l2: p.l2,
        batch_size: p.batch_size,
        seed,
        ..TrainConfig::default()
    }
}

fn model_file_name(task: Task, model: ModelChoice) -> String {
    let task = match task {
        Task::Sarcasm => "sarcasm",
        Task::Cyberbullying => "cyberbullying",
    };
    format!("{task}-{}.model.json", model.as_str())
}

fn exec_train(plan: &RunPlan, p: &TrainPlan) -> Result<(Vec<PathBuf>, String), CliError> {
    let dataset = load_dataset(&p.data)?;
    let tokenizer = TokenizerConfig::default();
    let tokens: Vec<Vec<String>> =
        dataset.records().iter().map(|r| tokenize(&r.text, &tokenizer)).collect();
    let vocab = build_vocabulary(&tokens, p.min_df, p.max_features)
        .map_err(|e| CliError::runtime("features", e))?;
    let y: Vec<String> = dataset.records().iter().map(|r| r.label.clone()).collect();

    let classifier_err = |e| CliError::runtime("classifiers", e);
    let model: LinearModel = match p.model {
        ModelChoice::Nb => {
            let x: Vec<_> = tokens.iter().map(|t| count_vectorize(t, &vocab)).collect();
            let meta = ModelMeta::with_vocabulary(p.task, vocab);
            train_nb(&x, &y, p.alpha, meta).map_err(classifier_err)?
        }
        ModelChoice::Logreg => {
            let x: Vec<_> = tokens.iter().map(|t| vectorize(t, &vocab)).collect();
            let meta = ModelMeta::with_vocabulary(p.task, vocab);
            train_logreg(&x, &y, &train_config(p, plan.seed), meta).map_err(classifier_err)?
        }
        ModelChoice::Svm => {
            let x: Vec<_> = tokens.iter().map(|t| vectorize(t, &vocab)).collect();
            let meta = ModelMeta::with_vocabulary(p.task, vocab);
            train_svm(&x, &y, &train_config(p, plan.seed), meta).map_err(classifier_err)?
        }
    };

    let bytes = save_model(&model).map_err(classifier_err)?;
    let model_path = plan.out_dir.join(model_file_name(p.task, p.model));
    write_bytes(&model_path, &bytes)?;

    let summary = format!(
        "trained {} on {} records ({} classes, {} features) -> {}",
        p.model,
        dataset.len(),
        model.classes().len(),
        model.feature_dim(),
        model_path.display()
    );
    Ok((vec![model_path], summary))
}

fn exec_evaluate(plan: &RunPlan, p: &EvaluatePlan) -> Result<(Vec<PathBuf>, String), CliError> {
    let dataset = load_dataset(&p.data)?;
    let specs: Vec<ModelSpec> = p
        .models
        .iter()
        .map(|m| match m {
            ModelChoice::Nb => ModelSpec::NaiveBayes { name: "Naive Bayes".into(), alpha: p.alpha },
            ModelChoice::Logreg => ModelSpec::logreg(),
            ModelChoice::Svm => ModelSpec::svm(),
        })
        .collect();
    let config = CompareConfig {
        task: p.task,
        test_fraction: p.test_fraction,
        seed: plan.seed,
        stratified: true,
        min_df: p.min_df,
        max_features: p.max_features,
        tokenizer: TokenizerConfig::default(),
        train: TrainConfig {
            epochs: p.epochs,
            learning_rate: p.learning_rate,
            l2: p.l2,
            batch_size: p.batch_size,
            seed: plan.seed,
            ..TrainConfig::default()
        },
    };
    let report =
        compare_models(&dataset, &specs, &config).map_err(|e| CliError::runtime("eval", e))?;

    let text_path = plan.out_dir.join("comparison.txt");
    write_bytes(&text_path, report.render_text().as_bytes())?;
    let json_path = plan.out_dir.join("comparison.json");
    write_bytes(&json_path, report.to_json().as_bytes())?;

    let mut summary = format!(
        "compared {} models on {} train / {} test records (majority fraction {:.4})\n",
        report.rows.len(),
        report.train_size,
        report.test_size,
        report.majority_fraction
    );
    summary.push_str(report.render_text().trim_end());
    Ok((vec![text_path, json_path], summary))
}

fn stage_source(
    stage: &str,
    expected_task: Task,
    model_path: &Option<PathBuf>,
    scores_path: &Option<PathBuf>,
    positive: &Option<String>,
) -> Result<ScoreSource, CliError> {
    if let Some(path) = model_path {
        let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
        let model = load_model(&bytes).map_err(|e| CliError::runtime("classifiers", e))?;
        if model.task() != expected_task {
            return Err(CliError::runtime(
                "pipeline",
                format!(
                    "{stage} stage expects a model trained for that task; {} holds a {:?} model",
                    path.display(),
                    model.task()
                ),
            ));
        }
        let rule = match positive {
            Some(label) => PositiveRule::Label(label.clone()),
            None => PositiveRule::SecondClass,
        };
        return Ok(ScoreSource::Native { model: Box::new(model), rule });
    }
    let path = scores_path.as_ref().expect("plan validation enforces one source per stage");
    let scores = load_external_scores(File::open(path).map_err(|e| io_err(path, e))?)
        .map_err(|e| CliError::runtime("classifiers", e))?;
    Ok(ScoreSource::External(scores))
}

fn read_documents_file(path: &Path, strict: bool) -> Result<Vec<Document>, CliError> {
    Ok(parse_documents(open(path)?, strict).map_err(|e| CliError::runtime("corpus", e))?.records)
}

fn exec_pipeline(plan: &RunPlan, p: &PipelinePlan) -> Result<(Vec<PathBuf>, String), CliError> {
    let documents = read_documents_file(&p.documents, plan.strict)?;
    let sarcasm = stage_source(
        "sarcasm",
        Task::Sarcasm,
        &p.sarcasm_model,
        &p.sarcasm_scores,
        &p.sarcasm_positive,
    )?;
    let bully = stage_source(
        "bully",
        Task::Cyberbullying,
        &p.bully_model,
        &p.bully_scores,
        &p.bully_positive,
    )?;
    let config = PipelineConfig {
        threshold_s: p.threshold_s,
        threshold_b: p.threshold_b,
        require_keyword_match: p.keyword_gate,
    };
    let run = run_pipeline(&documents, &sarcasm, &bully, &config)
        .map_err(|e| CliError::runtime("pipeline", e))?;

    let verdicts_path = plan.out_dir.join("verdicts.jsonl");
    let mut buf = Vec::new();
    write_verdicts(&mut buf, &run.verdicts).map_err(|e| CliError::runtime("pipeline", e))?;
    write_bytes(&verdicts_path, &buf)?;

    let report = aggregate(&run.verdicts, p.top_k);
    let agg_text_path = plan.out_dir.join("aggregate.txt");
    write_bytes(&agg_text_path, report.render_text().as_bytes())?;
    let agg_json_path = plan.out_dir.join("aggregate.json");
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::runtime("pipeline", format!("aggregate serialization: {e}")))?;
    json.push('\n');
    write_bytes(&agg_json_path, json.as_bytes())?;

    let mut quadrants = BTreeMap::new();
    for v in &run.verdicts {
        *quadrants.entry(v.quadrant.as_str()).or_insert(0u64) += 1;
    }
    let mut summary = format!(
        "{} verdicts ({} documents excluded by the keyword gate) -> {}\n",
        run.verdicts.len(),
        run.excluded_no_keyword,
        verdicts_path.display()
    );
    let mut first = true;
    for (quadrant, count) in &quadrants {
        if !first {
            summary.push_str(", ");
        }
        let _ = write!(summary, "{}{quadrant}={count}", if first { "quadrants: " } else { "" });
        first = false;
    }
    Ok((vec![verdicts_path, agg_text_path, agg_json_path], summary))
}

fn read_verdicts_file(path: &Path) -> Result<Vec<Verdict>, CliError> {
    read_verdicts(open(path)?).map_err(|e| CliError::runtime("pipeline", e))
}

fn exec_graph(plan: &RunPlan, p: &GraphPlan) -> Result<(Vec<PathBuf>, String), CliError> {
    let verdicts = read_verdicts_file(&p.verdicts)?;
    let graph = build_bipartite(&verdicts, p.quadrant);

    let mut artifacts = Vec::new();
    for format in p.parsed_formats() {
        let bytes = export_graph(&graph, format).map_err(|e| CliError::runtime("netgraph", e))?;
        let ext = match format {
            barbnet_core::netgraph::GraphFormat::Dot => "dot",
            barbnet_core::netgraph::GraphFormat::GraphMl => "graphml",
            barbnet_core::netgraph::GraphFormat::NodeLinkJson => "json",
        };
        let path = plan.out_dir.join(format!("bipartite.{ext}"));
        write_bytes(&path, &bytes)?;
        artifacts.push(path);
    }

    let summary = format!(
        "{} quadrant graph: {} authors, {} subreddits, {} edges -> {} file(s) in {}",
        p.quadrant.as_str(),
        graph.authors().len(),
        graph.subreddits().len(),
        graph.edges().len(),
        artifacts.len(),
        plan.out_dir.display()
    );
    Ok((artifacts, summary))
}

fn read_comments_file(path: &Path, strict: bool) -> Result<Vec<RawComment>, CliError> {
    Ok(parse_comments(open(path)?, strict).map_err(|e| CliError::runtime("corpus", e))?.records)
}

fn exec_report(plan: &RunPlan, p: &ReportPlan) -> Result<(Vec<PathBuf>, String), CliError> {
    let verdicts = read_verdicts_file(&p.verdicts)?;
    let documents = read_documents_file(&p.documents, plan.strict)?;
    let comments = read_comments_file(&p.comments, plan.strict)?;

    let engagement = co_engagement(&verdicts, &comments, p.window_secs);
    let language = language_similarity(&documents, &verdicts, &LanguageConfig::default());
    let targets = target_overlap(&verdicts);
    let weights = ScoreWeights {
        co_engagement: p.w_engagement,
        language_similarity: p.w_language,
        target_overlap: p.w_target,
    };
    let edges = coordination_scores(&engagement, &language, &targets, &weights)
        .map_err(|e| CliError::runtime("netgraph", e))?;
    let clusters = detect_clusters(&edges, p.tau);

    let edges_path = plan.out_dir.join("coordination_edges.jsonl");
    let mut buf = String::new();
    for edge in &edges {
        let line = serde_json::to_string(edge)
            .map_err(|e| CliError::runtime("netgraph", format!("edge serialization: {e}")))?;
        buf.push_str(&line);
        buf.push('\n');
    }
    write_bytes(&edges_path, buf.as_bytes())?;

    let clusters_path = plan.out_dir.join("coordination_clusters.json");
    write_bytes(&clusters_path, render_cluster_report(&clusters, p.tau, &weights).as_bytes())?;

    let summary = format!(
        "{} scored pairs, {} clusters at tau {} -> {}",
        edges.len(),
        clusters.len(),
        p.tau,
        clusters_path.display()
    );
    Ok((vec![edges_path, clusters_path], summary))
}
