//! The endpoint client: search pagination, comment-tree flattening, retry
//! and backoff policy, and the global request-rate limiter.

use crate::transport::{Clock, HttpTransport};
use crate::CollectorError;
use barbnet_core::corpus::{RawComment, RawPost};
use serde::Deserialize;
use serde_json::Value;

const SEARCH_BASE: &str = "https://www.reddit.com/search.json";
const COMMENTS_BASE: &str = "https://www.reddit.com/comments";
const DELETED_AUTHOR: &str = "[deleted]";

/// One search_posts result: mapped posts, the cursor for the next page, and
/// per-record warnings for entries skipped due to schema drift.
#[derive(Debug, Clone)]
pub struct SearchPage {
    pub posts: Vec<RawPost>,
    pub next_cursor: Option<String>,
    pub warnings: Vec<String>,
}

/// One flattened comment tree plus the count of unexpanded "more" stubs.
#[derive(Debug, Clone)]
pub struct CommentTree {
    pub comments: Vec<RawComment>,
    pub more_stubs: u64,
    pub warnings: Vec<String>,
}

/// Client over an injected transport and clock. All requests flow through
/// one rate limiter; HTTP 429 and transient server errors are retried with
/// exponential backoff up to `max_retries` extra attempts.
pub struct RedditClient<T, C> {
    transport: T,
    clock: C,
    user_agent: String,
    min_interval: f64,
    max_retries: u32,
    backoff_base: f64,
    page_size: u64,
    last_request: Option<f64>,
    request_times: Vec<f64>,
}

impl<T: HttpTransport, C: Clock> RedditClient<T, C> {
    pub fn new(
        transport: T,
        clock: C,
        user_agent: &str,
        requests_per_second: f64,
        max_retries: u32,
    ) -> Result<Self, CollectorError> {
        if user_agent.trim().is_empty() {
            return Err(CollectorError::Config("user_agent must be non-empty".into()));
        }
        if !(requests_per_second > 0.0 && requests_per_second.is_finite()) {
            return Err(CollectorError::Config(format!(
                "requests_per_second must be positive, got {requests_per_second}"
            )));
        }
        Ok(Self {
            transport,
            clock,
            user_agent: user_agent.to_string(),
            min_interval: 1.0 / requests_per_second,
            max_retries,
            backoff_base: 1.0,
            page_size: 25,
            last_request: None,
            request_times: Vec::new(),
        })
    }

    /// Per-request page size for search pagination (endpoint default 25).
    pub fn with_page_size(mut self, page_size: u64) -> Self {
        self.page_size = page_size.max(1);
        self
    }

    /// Issue times of every request actually sent, in clock seconds.
    pub fn request_times(&self) -> &[f64] {
        &self.request_times
    }

    pub fn clock(&self) -> &C {
        &self.clock
    }

    fn throttled_get(
        &mut self,
        url: &str,
        tolerated: &[u16],
    ) -> Result<HttpResponseChecked, CollectorError> {
        let mut attempt: u32 = 0;
        loop {
            if let Some(last) = self.last_request {
                let due = last + self.min_interval;
                let now = self.clock.now();
                if now < due {
                    self.clock.sleep(due - now);
                }
            }
            let issued = self.clock.now();
            self.last_request = Some(issued);
            self.request_times.push(issued);

            let response = self.transport.get(url, &self.user_agent)?;
            if response.status == 200 {
                return Ok(HttpResponseChecked::Ok(response.body));
            }
            if tolerated.contains(&response.status) {
                return Ok(HttpResponseChecked::Tolerated(response.status));
            }
            if attempt >= self.max_retries {
                return Err(CollectorError::Http { url: url.to_string(), status: response.status });
            }
            // 429 and transient failures back off exponentially.
            self.clock.sleep(self.backoff_base * f64::from(1u32 << attempt.min(16)));
            attempt += 1;
        }
    }

    fn search_url(&self, keyword: &str, limit: u64, cursor: Option<&str>) -> String {
        let mut url = url::Url::parse(SEARCH_BASE).expect("static base URL");
        {
            let mut q = url.query_pairs_mut();
            q.append_pair("q", keyword);
            q.append_pair("sort", "new");
            q.append_pair("limit", &limit.to_string());
            q.append_pair("raw_json", "1");
            if let Some(after) = cursor {
                q.append_pair("after", after);
            }
        }
        url.to_string()
    }

    fn comments_url(&self, post_id: &str) -> String {
        let mut url =
            url::Url::parse(&format!("{COMMENTS_BASE}/{post_id}.json")).expect("valid post path");
        url.query_pairs_mut().append_pair("raw_json", "1");
        url.to_string()
    }

    /// Fetch up to `limit` posts for `keyword`, following pagination cursors
    /// across as many requests as needed. Posts are mapped into the corpus
    /// schema with `matched_keyword` set to the lowercased keyword; records
    /// missing required fields are skipped with a warning.
    pub fn search_posts(
        &mut self,
        keyword: &str,
        limit: u64,
        cursor: Option<String>,
    ) -> Result<SearchPage, CollectorError> {
        if keyword.trim().is_empty() {
            return Err(CollectorError::Config("search keyword must be non-empty".into()));
        }
        let mut page = SearchPage { posts: Vec::new(), next_cursor: cursor, warnings: Vec::new() };
        if limit == 0 {
            return Ok(page);
        }
        loop {
            let remaining = limit - page.posts.len() as u64;
            let request_limit = remaining.min(self.page_size);
            let url = self.search_url(keyword, request_limit, page.next_cursor.as_deref());
            let body = match self.throttled_get(&url, &[])? {
                HttpResponseChecked::Ok(body) => body,
                HttpResponseChecked::Tolerated(_) => unreachable!("no tolerated statuses"),
            };
            let listing: Listing =
                serde_json::from_slice(&body).map_err(|e| CollectorError::Malformed {
                    url: url.clone(),
                    reason: format!("not a listing: {e}"),
                })?;
            let got = listing.data.children.len();
            for (i, child) in listing.data.children.into_iter().enumerate() {
                if page.posts.len() as u64 >= limit {
                    break;
                }
                match map_post(&child.data, keyword) {
                    Ok(post) => page.posts.push(post),
                    Err(reason) => page
                        .warnings
                        .push(format!("search '{keyword}': skipped post {i}: {reason}")),
                }
            }
            page.next_cursor = listing.data.after;
            if page.posts.len() as u64 >= limit || page.next_cursor.is_none() || got == 0 {
                return Ok(page);
            }
        }
    }

    /// Fetch and flatten one post's comment tree. Depth and parent links come
    /// from the nesting structure; "more" stubs are counted, not expanded. A
    /// 404 yields an empty tree with a warning instead of an error.
    pub fn fetch_comment_tree(&mut self, post_id: &str) -> Result<CommentTree, CollectorError> {
        if post_id.trim().is_empty() {
            return Err(CollectorError::Config("post_id must be non-empty".into()));
        }
        let url = self.comments_url(post_id);
        let mut tree = CommentTree { comments: Vec::new(), more_stubs: 0, warnings: Vec::new() };
        let body = match self.throttled_get(&url, &[404])? {
            HttpResponseChecked::Ok(body) => body,
            HttpResponseChecked::Tolerated(status) => {
                tree.warnings.push(format!("post {post_id}: comments fetch returned {status}"));
                return Ok(tree);
            }
        };
        let listings: Vec<Listing> =
            serde_json::from_slice(&body).map_err(|e| CollectorError::Malformed {
                url: url.clone(),
                reason: format!("not a comment response: {e}"),
            })?;
        // Element 0 is the post's own listing; the tree is element 1.
        let Some(comment_listing) = listings.into_iter().nth(1) else {
            return Ok(tree);
        };
        for child in comment_listing.data.children {
            flatten_comment(&child, post_id, 0, None, &mut tree);
        }
        Ok(tree)
    }
}

enum HttpResponseChecked {
    Ok(Vec<u8>),
    Tolerated(u16),
}

#[derive(Deserialize)]
struct Listing {
    data: ListingData,
}

#[derive(Deserialize)]
struct ListingData {
    #[serde(default)]
    after: Option<String>,
    #[serde(default)]
    children: Vec<Child>,
}

#[derive(Deserialize)]
struct Child {
    #[serde(default)]
    kind: String,
    #[serde(default)]
    data: Value,
}

fn required_str(data: &Value, field: &str) -> Result<String, String> {
    data.get(field)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| format!("missing field '{field}'"))
}

fn author_or_deleted(data: &Value) -> String {
    match data.get("author").and_then(Value::as_str) {
        Some(a) if !a.is_empty() => a.to_string(),
        _ => DELETED_AUTHOR.to_string(),
    }
}

fn created_ts(data: &Value) -> Result<i64, String> {
    data.get("created_utc")
        .and_then(Value::as_f64)
        .map(|t| t as i64)
        .ok_or_else(|| "missing field 'created_utc'".to_string())
}

fn map_post(data: &Value, keyword: &str) -> Result<RawPost, String> {
    let post_id = required_str(data, "id")?;
    let permalink = data.get("permalink").and_then(Value::as_str);
    let url = data
        .get("url")
        .and_then(Value::as_str)
        .map(str::to_string)
        .or_else(|| permalink.map(|p| format!("https://www.reddit.com{p}")))
        .unwrap_or_default();
    Ok(RawPost {
        subreddit: required_str(data, "subreddit")?,
        author_id: author_or_deleted(data),
        title: required_str(data, "title")?,
        body: data.get("selftext").and_then(Value::as_str).unwrap_or_default().to_string(),
        score: data.get("score").and_then(Value::as_i64).unwrap_or(0),
        num_comments: data
            .get("num_comments")
            .and_then(Value::as_u64)
            .ok_or("missing field 'num_comments'")?,
        url,
        created_ts: created_ts(data)?,
        nsfw: data.get("over_18").and_then(Value::as_bool).unwrap_or(false),
        archived: data.get("archived").and_then(Value::as_bool).unwrap_or(false),
        matched_keyword: keyword.to_lowercase(),
        post_id,
    })
}

fn flatten_comment(
    child: &Child,
    post_id: &str,
    depth: u32,
    parent_id: Option<&str>,
    tree: &mut CommentTree,
) {
    if child.kind == "more" {
        tree.more_stubs += 1;
        return;
    }
    if child.kind != "t1" {
        tree.warnings.push(format!("post {post_id}: skipped child of kind '{}'", child.kind));
        return;
    }
    let data = &child.data;
    let (comment_id, text, ts) =
        match (required_str(data, "id"), required_str(data, "body"), created_ts(data)) {
            (Ok(id), Ok(body), Ok(ts)) => (id, body, ts),
            (id, body, ts) => {
                let reason = [id.err(), body.err(), ts.err()]
                    .into_iter()
                    .flatten()
                    .collect::<Vec<_>>()
                    .join(", ");
                tree.warnings.push(format!("post {post_id}: skipped comment: {reason}"));
                return;
            }
        };
    tree.comments.push(RawComment {
        comment_id: comment_id.clone(),
        post_id: post_id.to_string(),
        author: author_or_deleted(data),
        depth,
        parent_id: parent_id.map(str::to_string),
        score: data.get("score").and_then(Value::as_i64).unwrap_or(0),
        text,
        created_ts: ts,
    });
    // Replies are a nested listing; the endpoint sends "" when there are none.
    if let Some(replies) = data.get("replies") {
        if let Ok(listing) = serde_json::from_value::<Listing>(replies.clone()) {
            for reply in &listing.data.children {
                flatten_comment(reply, post_id, depth + 1, Some(&comment_id), tree);
            }
        }
    }
}
