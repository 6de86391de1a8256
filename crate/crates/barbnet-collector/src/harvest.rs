//! The harvest loop: keyword search, engagement filtering, comment fetching,
//! checkpointed progress, and append-only corpus sinks.

use crate::client::RedditClient;
use crate::transport::{Clock, HttpTransport};
use crate::CollectorError;
use barbnet_core::corpus::{
    parse_comments, parse_posts, write_comments, write_posts, Lexicon, RawComment, RawPost,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Harvest parameters. `keywords` left empty means "use the whole lexicon".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarvestConfig {
    pub keywords: Vec<String>,
    pub max_posts_per_keyword: u64,
    /// Posts are kept only when they have strictly more comments than this.
    pub min_comments: u64,
    pub requests_per_second: f64,
    pub max_retries: u32,
    pub user_agent: String,
    pub checkpoint_path: Option<PathBuf>,
    pub page_size: u64,
}

impl Default for HarvestConfig {
    fn default() -> Self {
        Self {
            keywords: Vec::new(),
            max_posts_per_keyword: 100,
            min_comments: 20,
            requests_per_second: 1.0,
            max_retries: 3,
            user_agent: "barbnet/0.1 (research collector)".to_string(),
            checkpoint_path: None,
            page_size: 25,
        }
    }
}

impl HarvestConfig {
    pub fn validate(&self) -> Result<(), CollectorError> {
        if self.max_posts_per_keyword == 0 {
            return Err(CollectorError::Config("max_posts_per_keyword must be positive".into()));
        }
        if !(1..=100).contains(&self.page_size) {
            return Err(CollectorError::Config(format!(
                "page_size must be in 1..=100, got {}",
                self.page_size
            )));
        }
        if !(self.requests_per_second > 0.0 && self.requests_per_second.is_finite()) {
            return Err(CollectorError::Config(format!(
                "requests_per_second must be positive, got {}",
                self.requests_per_second
            )));
        }
        if self.user_agent.trim().is_empty() {
            return Err(CollectorError::Config("user_agent must be non-empty".into()));
        }
        Ok(())
    }
}

/// Durable position within one keyword's pagination.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KeywordProgress {
    pub last_cursor: Option<String>,
    pub completed: bool,
}

/// Resume state persisted after every processed page.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub keywords: BTreeMap<String, KeywordProgress>,
}

impl Checkpoint {
    /// A missing file is a fresh start, not an error.
    pub fn load(path: &Path) -> Result<Self, CollectorError> {
        if !path.exists() {
            return Ok(Self::default());
        }
        let file = File::open(path)?;
        serde_json::from_reader(BufReader::new(file))
            .map_err(|e| CollectorError::Checkpoint(format!("{}: {e}", path.display())))
    }

    /// Write-then-rename so a crash never leaves a truncated checkpoint.
    pub fn save(&self, path: &Path) -> Result<(), CollectorError> {
        let tmp = path.with_extension("tmp");
        let mut file = BufWriter::new(File::create(&tmp)?);
        serde_json::to_writer_pretty(&mut file, self)
            .map_err(|e| CollectorError::Checkpoint(format!("{}: {e}", tmp.display())))?;
        file.write_all(b"\n")?;
        file.flush()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Per-keyword tallies. `kept + dropped == fetched` always holds; a post is
/// dropped when it fails the engagement filter or was already collected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KeywordStats {
    pub fetched: u64,
    pub kept: u64,
    pub dropped: u64,
    pub comments: u64,
    pub more_stubs: u64,
    pub last_cursor: Option<String>,
}

/// Summary of one harvest run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct HarvestManifest {
    pub started_unix: i64,
    pub finished_unix: i64,
    pub per_keyword: BTreeMap<String, KeywordStats>,
    pub warnings: Vec<String>,
}

impl HarvestManifest {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }
}

/// Destination for harvested records. `append` receives one post together
/// with its full comment thread; `finalize` runs once at the end of a
/// successful harvest.
pub trait CorpusSink {
    fn existing_post_ids(&mut self) -> Result<BTreeSet<String>, CollectorError>;
    fn append(&mut self, post: &RawPost, comments: &[RawComment]) -> Result<(), CollectorError>;
    fn finalize(&mut self) -> Result<(), CollectorError>;
}

/// In-memory sink for tests and dry runs.
#[derive(Debug, Default)]
pub struct MemorySink {
    pub posts: Vec<RawPost>,
    pub comments: Vec<RawComment>,
    pub finalized: bool,
}

impl MemorySink {
    pub fn new() -> Self {
        Self::default()
    }
}

impl CorpusSink for MemorySink {
    fn existing_post_ids(&mut self) -> Result<BTreeSet<String>, CollectorError> {
        Ok(self.posts.iter().map(|p| p.post_id.clone()).collect())
    }

    fn append(&mut self, post: &RawPost, comments: &[RawComment]) -> Result<(), CollectorError> {
        self.posts.push(post.clone());
        self.comments.extend(comments.iter().cloned());
        Ok(())
    }

    fn finalize(&mut self) -> Result<(), CollectorError> {
        sort_records(&mut self.posts, &mut self.comments);
        self.finalized = true;
        Ok(())
    }
}

/// JSONL-file sink. Records are appended as they arrive so an interrupted run
/// keeps everything up to the last checkpoint; `finalize` rewrites both files
/// in (created_ts, id) order for deterministic output.
#[derive(Debug)]
pub struct JsonlSink {
    posts_path: PathBuf,
    comments_path: PathBuf,
}

impl JsonlSink {
    pub fn new(posts_path: impl Into<PathBuf>, comments_path: impl Into<PathBuf>) -> Self {
        Self { posts_path: posts_path.into(), comments_path: comments_path.into() }
    }

    fn append_lines<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CollectorError> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut out = BufWriter::new(file);
        for record in records {
            serde_json::to_writer(&mut out, record)
                .map_err(|e| CollectorError::Checkpoint(format!("{}: {e}", path.display())))?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

impl CorpusSink for JsonlSink {
    fn existing_post_ids(&mut self) -> Result<BTreeSet<String>, CollectorError> {
        if !self.posts_path.exists() {
            return Ok(BTreeSet::new());
        }
        let outcome = parse_posts(BufReader::new(File::open(&self.posts_path)?), true)?;
        Ok(outcome.records.into_iter().map(|p| p.post_id).collect())
    }

    fn append(&mut self, post: &RawPost, comments: &[RawComment]) -> Result<(), CollectorError> {
        Self::append_lines(&self.posts_path, std::slice::from_ref(post))?;
        Self::append_lines(&self.comments_path, comments)
    }

    fn finalize(&mut self) -> Result<(), CollectorError> {
        let mut posts = if self.posts_path.exists() {
            parse_posts(BufReader::new(File::open(&self.posts_path)?), true)?.records
        } else {
            Vec::new()
        };
        let mut comments = if self.comments_path.exists() {
            parse_comments(BufReader::new(File::open(&self.comments_path)?), true)?.records
        } else {
            Vec::new()
        };
        sort_records(&mut posts, &mut comments);

        let tmp = self.posts_path.with_extension("tmp");
        write_posts(BufWriter::new(File::create(&tmp)?), &posts)?;
        fs::rename(&tmp, &self.posts_path)?;
        let tmp = self.comments_path.with_extension("tmp");
        write_comments(BufWriter::new(File::create(&tmp)?), &comments)?;
        fs::rename(&tmp, &self.comments_path)?;
        Ok(())
    }
}

fn sort_records(posts: &mut [RawPost], comments: &mut [RawComment]) {
    posts.sort_by(|a, b| {
        (a.created_ts, a.post_id.as_str()).cmp(&(b.created_ts, b.post_id.as_str()))
    });
    comments.sort_by(|a, b| {
        (a.created_ts, a.comment_id.as_str()).cmp(&(b.created_ts, b.comment_id.as_str()))
    });
}

/// Run a full harvest: for each keyword, page through search results, keep
/// posts passing the engagement filter that are not already in the sink,
/// fetch their comment trees, and append them. Progress is checkpointed after
/// every page so an interrupted run resumes without refetching completed
/// keywords or duplicating posts.
pub fn harvest<T, C, S>(
    client: &mut RedditClient<T, C>,
    lexicon: &Lexicon,
    config: &HarvestConfig,
    sink: &mut S,
) -> Result<HarvestManifest, CollectorError>
where
    T: HttpTransport,
    C: Clock,
    S: CorpusSink,
{
    config.validate()?;
    let keywords: Vec<String> = if config.keywords.is_empty() {
        lexicon.entries().to_vec()
    } else {
        config.keywords.clone()
    };
    if keywords.is_empty() {
        return Err(CollectorError::Config("no keywords to harvest".into()));
    }

    let mut checkpoint = match &config.checkpoint_path {
        Some(path) => Checkpoint::load(path)?,
        None => Checkpoint::default(),
    };
    let mut seen = sink.existing_post_ids()?;
    let mut manifest =
        HarvestManifest { started_unix: client.clock().unix_now(), ..HarvestManifest::default() };

    let mut visited = BTreeSet::new();
    for keyword in keywords {
        if !visited.insert(keyword.clone()) {
            continue;
        }
        let progress = checkpoint.keywords.get(&keyword).cloned().unwrap_or_default();
        if progress.completed {
            manifest.warnings.push(format!("keyword '{keyword}': already completed, skipped"));
            manifest.per_keyword.insert(
                keyword,
                KeywordStats { last_cursor: progress.last_cursor, ..KeywordStats::default() },
            );
            continue;
        }

        let mut stats = KeywordStats { last_cursor: progress.last_cursor, ..Default::default() };
        loop {
            let remaining = config.max_posts_per_keyword - stats.fetched;
            if remaining == 0 {
                break;
            }
            let page = client.search_posts(
                &keyword,
                remaining.min(config.page_size),
                stats.last_cursor.clone(),
            )?;
            manifest.warnings.extend(page.warnings);
            let exhausted = page.posts.is_empty();
            stats.fetched += page.posts.len() as u64;
            for post in page.posts {
                if post.num_comments <= config.min_comments || seen.contains(&post.post_id) {
                    stats.dropped += 1;
                    continue;
                }
                let tree = client.fetch_comment_tree(&post.post_id)?;
                manifest.warnings.extend(tree.warnings);
                sink.append(&post, &tree.comments)?;
                seen.insert(post.post_id);
                stats.kept += 1;
                stats.comments += tree.comments.len() as u64;
                stats.more_stubs += tree.more_stubs;
            }
            stats.last_cursor = page.next_cursor;
            let done = exhausted
                || stats.last_cursor.is_none()
                || stats.fetched >= config.max_posts_per_keyword;
            checkpoint.keywords.insert(
                keyword.clone(),
                KeywordProgress { last_cursor: stats.last_cursor.clone(), completed: done },
            );
            if let Some(path) = &config.checkpoint_path {
                checkpoint.save(path)?;
            }
            if done {
                break;
            }
        }
        debug_assert_eq!(stats.kept + stats.dropped, stats.fetched);
        manifest.per_keyword.insert(keyword, stats);
    }

    sink.finalize()?;
    manifest.finished_unix = client.clock().unix_now();
    Ok(manifest)
}
