//! End-to-end tests of invocation parsing, command execution, and the
//! exit-code contract, using the library entry points directly.

use barbnet_cli::{execute, parse_invocation, run_cli, CommandPlan, ModelChoice, RunPlan};
use barbnet_core::classifiers::Task;
use barbnet_core::corpus::{write_comments, write_documents, DocKind, Document, RawComment};
use barbnet_core::pipeline::{
    read_verdicts, write_verdicts, Quadrant, SourceKind, Verdict, VerdictSources,
};
use std::collections::BTreeSet;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use tempfile::TempDir;

fn parse(args: &[&str]) -> Result<RunPlan, barbnet_cli::CliError> {
    parse_invocation(args, None)
}

fn write_sarcasm_csv(dir: &Path) -> PathBuf {
    let path = dir.join("sarcasm.csv");
    let mut rows = String::from("doc_id,text,label\n");
    for i in 0..8 {
        rows.push_str(&format!("lit{i},the city council approved the budget today,literal\n"));
        rows.push_str(&format!("sar{i},oh sure what a totally great flawless plan,sarcastic\n"));
    }
    fs::write(&path, rows).unwrap();
    path
}

fn write_bully_csv(dir: &Path) -> PathBuf {
    let path = dir.join("bully.csv");
    let mut rows = String::from("doc_id,text,label\n");
    for i in 0..8 {
        rows.push_str(&format!("ben{i},thanks for sharing this helpful and kind post,benign\n"));
        rows.push_str(&format!("bul{i},you worthless idiot nobody wants you here,bully\n"));
    }
    fs::write(&path, rows).unwrap();
    path
}

fn train_args<'a>(task: &'a str, data: &'a str, out: &'a str) -> Vec<&'a str> {
    vec!["train", "--task", task, "--model", "nb", "--data", data, "--min-df", "1", "--out", out]
}

fn six_documents(keyword: &str) -> Vec<Document> {
    (0..6)
        .map(|i| Document {
            doc_id: format!("d{i}"),
            kind: DocKind::Comment,
            author: format!("user{i}"),
            subreddit: if i < 3 { "memes".into() } else { "advice".into() },
            text: if i % 2 == 0 {
                format!("you worthless {keyword} nobody wants you here")
            } else {
                "oh sure what a totally great flawless plan".to_string()
            },
            created_ts: 1000 + i as i64,
            keywords: BTreeSet::from([keyword.to_string()]),
            post_id: "p0".into(),
            target_author: Some("victim".into()),
        })
        .collect()
}

#[test]
fn train_invocation_maps_to_a_logreg_plan() {
    let dir = TempDir::new().unwrap();
    let data = write_sarcasm_csv(dir.path());
    let out = dir.path().join("artifacts");
    let plan = parse(&[
        "train",
        "--task",
        "sarcasm",
        "--model",
        "logreg",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    assert_eq!(plan.command_name(), "train");
    assert_eq!(plan.seed, 42, "default seed is recorded explicitly");
    match &plan.command {
        CommandPlan::Train(t) => {
            assert_eq!(t.model, ModelChoice::Logreg);
            assert_eq!(t.task, Task::Sarcasm);
            assert_eq!(t.data, data);
            assert_eq!(t.epochs, 5, "built-in default");
        }
        other => panic!("wrong command plan: {other:?}"),
    }
    assert!(out.is_dir(), "output directory is created at validation time");
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let dir = TempDir::new().unwrap();
    let data = write_sarcasm_csv(dir.path());
    let config = dir.path().join("barbnet.toml");
    fs::write(
        &config,
        format!(
            "out = {:?}\n[train]\ntask = \"sarcasm\"\nmodel = \"logreg\"\ndata = {:?}\nepochs = 10\n",
            dir.path().join("artifacts").to_str().unwrap(),
            data.to_str().unwrap()
        ),
    )
    .unwrap();

    let epochs_of = |plan: &RunPlan| match &plan.command {
        CommandPlan::Train(t) => t.epochs,
        _ => unreachable!(),
    };

    let from_config = parse(&["train", "--config", config.to_str().unwrap()]).unwrap();
    assert_eq!(epochs_of(&from_config), 10, "config beats the default of 5");

    let from_flag =
        parse(&["train", "--config", config.to_str().unwrap(), "--epochs", "3"]).unwrap();
    assert_eq!(epochs_of(&from_flag), 3, "flag beats the config");
}

#[test]
fn config_file_parameter_is_a_fallback_for_the_flag() {
    let dir = TempDir::new().unwrap();
    let data = write_sarcasm_csv(dir.path());
    let config = dir.path().join("barbnet.toml");
    fs::write(
        &config,
        format!(
            "seed = 7\nout = {:?}\n[train]\ntask = \"sarcasm\"\nmodel = \"svm\"\ndata = {:?}\n",
            dir.path().join("artifacts").to_str().unwrap(),
            data.to_str().unwrap()
        ),
    )
    .unwrap();
    let plan = parse_invocation(&["train"], Some(&config)).unwrap();
    assert_eq!(plan.seed, 7);
    assert!(matches!(&plan.command, CommandPlan::Train(t) if t.model == ModelChoice::Svm));
}

#[test]
fn unknown_command_is_a_usage_error() {
    assert_eq!(run_cli(&["frobnicate"]), 2);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(run_cli(&["train", "--bogus", "1"]), 2);
}

#[test]
fn missing_input_path_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("artifacts");
    let code = run_cli(&[
        "train",
        "--task",
        "sarcasm",
        "--model",
        "nb",
        "--data",
        dir.path().join("no-such.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn bad_threshold_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let docs = dir.path().join("documents.jsonl");
    fs::write(&docs, "").unwrap();
    let scores = dir.path().join("scores.jsonl");
    fs::write(&scores, "").unwrap();
    let code = run_cli(&[
        "pipeline",
        "--documents",
        docs.to_str().unwrap(),
        "--sarcasm-scores",
        scores.to_str().unwrap(),
        "--bully-scores",
        scores.to_str().unwrap(),
        "--threshold-s",
        "1.5",
        "--out",
        dir.path().join("artifacts").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn config_typo_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("barbnet.toml");
    fs::write(&config, "[train]\nepoch = 10\n").unwrap();
    let err = parse(&["train", "--config", config.to_str().unwrap()]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("epoch"), "{err}");
}

#[test]
fn train_single_class_fails_naming_the_class() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("one_class.csv");
    let mut rows = String::from("doc_id,text,label\n");
    for i in 0..6 {
        rows.push_str(&format!("r{i},the city council approved the budget,literal\n"));
    }
    fs::write(&data, rows).unwrap();
    let out = dir.path().join("artifacts");
    let args = train_args("sarcasm", data.to_str().unwrap(), out.to_str().unwrap());

    let plan = parse(&args).unwrap();
    let err = execute(&plan).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let message = err.to_string();
    assert!(message.starts_with("classifiers:"), "{message}");
    assert!(message.contains("only the class 'literal'"), "{message}");

    let strs: Vec<&str> = args.to_vec();
    assert_eq!(run_cli(&strs), 1);
}

#[test]
fn pipeline_scores_a_six_document_fixture() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("artifacts");
    let out_s = out.to_str().unwrap();
    let sarcasm_csv = write_sarcasm_csv(dir.path());
    let bully_csv = write_bully_csv(dir.path());
    assert_eq!(run_cli(&train_args("sarcasm", sarcasm_csv.to_str().unwrap(), out_s)), 0);
    assert_eq!(run_cli(&train_args("cyberbullying", bully_csv.to_str().unwrap(), out_s)), 0);
    let sarcasm_model = out.join("sarcasm-nb.model.json");
    let bully_model = out.join("cyberbullying-nb.model.json");
    assert!(sarcasm_model.is_file() && bully_model.is_file());

    let docs_path = dir.path().join("documents.jsonl");
    let mut buf = Vec::new();
    write_documents(&mut buf, &six_documents("idiot")).unwrap();
    fs::write(&docs_path, &buf).unwrap();

    let pipeline_args = [
        "pipeline",
        "--documents",
        docs_path.to_str().unwrap(),
        "--sarcasm-model",
        sarcasm_model.to_str().unwrap(),
        "--bully-model",
        bully_model.to_str().unwrap(),
        "--out",
        out_s,
    ];
    assert_eq!(run_cli(&pipeline_args), 0);

    let verdicts_path = out.join("verdicts.jsonl");
    let verdicts = read_verdicts(BufReader::new(fs::File::open(&verdicts_path).unwrap())).unwrap();
    assert_eq!(verdicts.len(), 6, "one verdict per fixture document");
    assert!(out.join("aggregate.txt").is_file());
    assert!(out.join("aggregate.json").is_file());

    // Identical rerun produces byte-identical primary artifacts.
    let before = fs::read(&verdicts_path).unwrap();
    assert_eq!(run_cli(&pipeline_args), 0);
    assert_eq!(fs::read(&verdicts_path).unwrap(), before);
}

#[test]
fn graph_on_empty_verdicts_is_a_vacuous_success() {
    let dir = TempDir::new().unwrap();
    let verdicts = dir.path().join("verdicts.jsonl");
    fs::write(&verdicts, "").unwrap();
    let out = dir.path().join("artifacts");
    let code = run_cli(&[
        "graph",
        "--verdicts",
        verdicts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for name in ["bipartite.dot", "bipartite.graphml", "bipartite.json"] {
        let path = out.join(name);
        assert!(path.is_file(), "missing export {name}");
        assert!(!fs::read(&path).unwrap().is_empty(), "export {name} is empty");
    }
    let parsed =
        barbnet_core::netgraph::parse_node_link(&fs::read(out.join("bipartite.json")).unwrap())
            .unwrap();
    assert!(parsed.is_empty(), "empty verdicts produce an empty graph");
}

#[test]
fn manifest_records_the_resolved_plan_and_checksums() {
    let dir = TempDir::new().unwrap();
    let data = write_sarcasm_csv(dir.path());
    let out = dir.path().join("artifacts");
    let args = train_args("sarcasm", data.to_str().unwrap(), out.to_str().unwrap());
    let plan = parse(&args).unwrap();
    let outcome = execute(&plan).unwrap();
    assert_eq!(outcome.manifest_path, out.join("run_manifest.json"));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&outcome.manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["resolved_config"]["command"], "train");
    assert_eq!(manifest["resolved_config"]["seed"], 42);
    assert_eq!(manifest["resolved_config"]["model"], "nb");
    let checksum = manifest["input_checksums"][data.to_str().unwrap()].as_str().unwrap();
    assert_eq!(checksum.len(), 64);
    assert!(checksum.chars().all(|c| c.is_ascii_hexdigit()));
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert_eq!(artifacts.len(), 1);
    assert!(artifacts[0].as_str().unwrap().ends_with("sarcasm-nb.model.json"));
    assert!(manifest["started_at"].as_i64().unwrap() <= manifest["finished_at"].as_i64().unwrap());
}

#[test]
fn evaluate_writes_the_comparison_table() {
    let dir = TempDir::new().unwrap();
    let data = write_sarcasm_csv(dir.path());
    let out = dir.path().join("artifacts");
    let code = run_cli(&[
        "evaluate",
        "--task",
        "sarcasm",
        "--data",
        data.to_str().unwrap(),
        "--models",
        "nb,logreg",
        "--min-df",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let table = fs::read_to_string(out.join("comparison.txt")).unwrap();
    assert!(table.contains("Accuracy(in percentage)"), "{table}");
    assert!(table.contains("Naive Bayes"), "{table}");
    assert!(table.contains("Logistic Regression"), "{table}");
    assert!(out.join("comparison.json").is_file());
}

#[test]
fn ingest_respects_the_strict_flag() {
    let dir = TempDir::new().unwrap();
    let posts = dir.path().join("posts.jsonl");
    let good = serde_json::json!({
        "post_id": "p1", "subreddit": "memes", "author_id": "amy",
        "title": "look at this", "body": "what an idiot move", "score": 1,
        "num_comments": 30, "url": "https://example.invalid/p1",
        "created_ts": 100, "nsfw": false, "archived": false,
        "matched_keyword": "idiot"
    });
    fs::write(&posts, format!("{good}\nnot json at all\n")).unwrap();
    let comments = dir.path().join("comments.jsonl");
    fs::write(&comments, "").unwrap();
    let lexicon = dir.path().join("lexicon.txt");
    fs::write(&lexicon, "idiot\n").unwrap();
    let out = dir.path().join("artifacts");

    let base = [
        "ingest",
        "--posts",
        posts.to_str().unwrap(),
        "--comments",
        comments.to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run_cli(&base), 0, "lenient mode skips the bad line");
    assert!(out.join("documents.jsonl").is_file());

    let mut strict = base.to_vec();
    strict.push("--strict");
    assert_eq!(run_cli(&strict), 1, "strict mode surfaces the bad line");
}

#[test]
fn report_finds_the_coordinated_cluster() {
    let dir = TempDir::new().unwrap();
    let authors = ["ring_a", "ring_b", "ring_c"];
    let mut verdicts = Vec::new();
    let mut documents = Vec::new();
    let mut comments = Vec::new();
    for (ai, author) in authors.iter().enumerate() {
        for post in 0..2 {
            let doc_id = format!("c{ai}{post}");
            let ts = 1000 + 60 * post as i64 + ai as i64;
            verdicts.push(Verdict {
                doc_id: doc_id.clone(),
                subreddit: "memes".into(),
                author: author.to_string(),
                target_author: Some("victim".into()),
                p_sarcasm: 0.9,
                p_bully: 0.9,
                sarcastic: true,
                bullying: true,
                quadrant: Quadrant::Both,
                sources: VerdictSources {
                    sarcasm: SourceKind::NativeModel,
                    bully: SourceKind::NativeModel,
                },
            });
            documents.push(Document {
                doc_id: doc_id.clone(),
                kind: DocKind::Comment,
                author: author.to_string(),
                subreddit: "memes".into(),
                text: "nobody asked for your worthless opinion again".into(),
                created_ts: ts,
                keywords: BTreeSet::from(["worthless".to_string()]),
                post_id: format!("p{post}"),
                target_author: Some("victim".into()),
            });
            comments.push(RawComment {
                comment_id: doc_id,
                post_id: format!("p{post}"),
                author: author.to_string(),
                depth: 1,
                parent_id: Some("v0".into()),
                score: 1,
                text: "nobody asked for your worthless opinion again".into(),
                created_ts: ts,
            });
        }
    }
    let verdicts_path = dir.path().join("verdicts.jsonl");
    let mut buf = Vec::new();
    write_verdicts(&mut buf, &verdicts).unwrap();
    fs::write(&verdicts_path, &buf).unwrap();
    let documents_path = dir.path().join("documents.jsonl");
    let mut buf = Vec::new();
    write_documents(&mut buf, &documents).unwrap();
    fs::write(&documents_path, &buf).unwrap();
    let comments_path = dir.path().join("comments.jsonl");
    let mut buf = Vec::new();
    write_comments(&mut buf, &comments).unwrap();
    fs::write(&comments_path, &buf).unwrap();

    let out = dir.path().join("artifacts");
    let code = run_cli(&[
        "report",
        "--verdicts",
        verdicts_path.to_str().unwrap(),
        "--documents",
        documents_path.to_str().unwrap(),
        "--comments",
        comments_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("coordination_clusters.json")).unwrap())
            .unwrap();
    assert_eq!(report["cluster_count"], 1, "{report}");
    let members = report["clusters"][0]["members"].as_array().unwrap();
    assert_eq!(members.len(), 3);
    let edges = fs::read_to_string(out.join("coordination_edges.jsonl")).unwrap();
    assert_eq!(edges.lines().count(), 3, "three fully connected pairs");
}

#[test]
fn weights_must_sum_to_one() {
    let dir = TempDir::new().unwrap();
    for name in ["verdicts.jsonl", "documents.jsonl", "comments.jsonl"] {
        fs::write(dir.path().join(name), "").unwrap();
    }
    let code = run_cli(&[
        "report",
        "--verdicts",
        dir.path().join("verdicts.jsonl").to_str().unwrap(),
        "--documents",
        dir.path().join("documents.jsonl").to_str().unwrap(),
        "--comments",
        dir.path().join("comments.jsonl").to_str().unwrap(),
        "--w-engagement",
        "0.9",
        "--out",
        dir.path().join("artifacts").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "0.9 + 1/3 + 1/3 violates the weight-sum invariant");
}
