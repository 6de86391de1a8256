//! HTTP and time abstractions so collection logic runs against fixtures.

use crate::CollectorError;
use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant, SystemTime};

/// A completed HTTP exchange: status code and raw body bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn ok(body: impl Into<Vec<u8>>) -> Self {
        Self { status: 200, body: body.into() }
    }

    pub fn status_only(status: u16) -> Self {
        Self { status, body: Vec::new() }
    }
}

/// Blocking GET. Implementations return transport-level failures as errors;
/// HTTP error statuses come back as ordinary responses for the caller's
/// retry policy to judge.
pub trait HttpTransport {
    fn get(&mut self, url: &str, user_agent: &str) -> Result<HttpResponse, CollectorError>;
}

/// Time source and sleeper. Seconds are relative to an arbitrary epoch;
/// `unix_now` is only for manifest timestamps.
pub trait Clock {
    fn now(&self) -> f64;
    fn sleep(&mut self, seconds: f64);
    fn unix_now(&self) -> i64;
}

/// Wall clock backed by [`Instant`] and [`std::thread::sleep`].
pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }

    fn sleep(&mut self, seconds: f64) {
        if seconds > 0.0 {
            std::thread::sleep(Duration::from_secs_f64(seconds));
        }
    }

    fn unix_now(&self) -> i64 {
        SystemTime::now()
            .duration_since(SystemTime::UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0)
    }
}

/// Deterministic clock for tests: time only moves when something sleeps.
#[derive(Debug, Clone, Default)]
pub struct FakeClock {
    now: f64,
    /// Every sleep requested, in order.
    pub sleeps: Vec<f64>,
}

impl FakeClock {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Clock for FakeClock {
    fn now(&self) -> f64 {
        self.now
    }

    fn sleep(&mut self, seconds: f64) {
        self.sleeps.push(seconds);
        if seconds > 0.0 {
            self.now += seconds;
        }
    }

    fn unix_now(&self) -> i64 {
        1_700_000_000 + self.now as i64
    }
}

/// Scripted transport: a FIFO of responses per URL. The final response for a
/// URL is served repeatedly, so a stable endpoint needs just one entry while
/// retry scripts list each response in order. Requests for unknown URLs are
/// transport errors.
#[derive(Debug, Default)]
pub struct FixtureTransport {
    responses: HashMap<String, VecDeque<HttpResponse>>,
    /// Every requested URL, in order.
    pub requests: Vec<String>,
}

impl FixtureTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, url: &str, response: HttpResponse) {
        self.responses.entry(url.to_string()).or_default().push_back(response);
    }

    pub fn request_count(&self) -> usize {
        self.requests.len()
    }
}

impl HttpTransport for FixtureTransport {
    fn get(&mut self, url: &str, _user_agent: &str) -> Result<HttpResponse, CollectorError> {
        self.requests.push(url.to_string());
        let queue = self.responses.get_mut(url).ok_or_else(|| CollectorError::Transport {
            url: url.to_string(),
            reason: "no fixture response recorded".to_string(),
        })?;
        if queue.len() > 1 {
            Ok(queue.pop_front().expect("len checked"))
        } else {
            queue.front().cloned().ok_or_else(|| CollectorError::Transport {
                url: url.to_string(),
                reason: "fixture queue empty".to_string(),
            })
        }
    }
}

/// Real HTTP transport. Non-2xx statuses are returned as responses, not
/// errors, so the client's retry policy sees them.
pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new() -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(30)))
            .build();
        Self { agent: config.new_agent() }
    }
}

impl Default for UreqTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl HttpTransport for UreqTransport {
    fn get(&mut self, url: &str, user_agent: &str) -> Result<HttpResponse, CollectorError> {
        let mut response =
            self.agent.get(url).header("User-Agent", user_agent).call().map_err(|e| {
                CollectorError::Transport { url: url.to_string(), reason: e.to_string() }
            })?;
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_vec().map_err(|e| CollectorError::Transport {
            url: url.to_string(),
            reason: format!("reading body: {e}"),
        })?;
        Ok(HttpResponse { status, body })
    }
}
