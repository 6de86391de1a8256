//! Deterministic synthetic corpora and labeled datasets.
//!
//! Everything here is template-generated from a seed, so any fixture a test
//! or benchmark needs can be rebuilt bit-for-bit anywhere. The headline set
//! stands in for public sarcasm datasets at the same scale; the Reddit-shaped
//! corpus plants coordinated author groups so network detection has known
//! structure to find.

use crate::corpus::{Lexicon, RawComment, RawPost};
use crate::eval::{LabeledDataset, LabeledRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Row count of the widely used public sarcasm-headlines corpus; the synthetic
/// surrogate defaults to the same scale.
pub const HEADLINE_ROWS: usize = 28_619;

const INSULTS: &[&str] =
    &["idiot", "loser", "moron", "pathetic", "stupid", "trash", "clown", "dumb", "jerk", "creep"];

/// A small offensive-keyword list matching the insult vocabulary the
/// generated corpus uses, for tests that need gate and corpus to agree.
pub fn demo_lexicon() -> Lexicon {
    Lexicon::new(INSULTS.iter().copied()).expect("static entries are valid")
}

const TOPICS: &[&str] = &[
    "budget",
    "election",
    "traffic",
    "housing",
    "weather",
    "science",
    "football",
    "economy",
    "health",
    "school",
    "library",
    "parking",
    "recycling",
    "tourism",
    "broadband",
    "zoning",
];

const CITIES: &[&str] = &[
    "springfield",
    "riverton",
    "lakeside",
    "fairview",
    "greenville",
    "ashford",
    "milton",
    "brookfield",
];

const ROLES: &[&str] =
    &["man", "woman", "teen", "official", "resident", "expert", "coach", "student"];

const OUTCOMES: &[&str] =
    &["turnout", "revenue", "morale", "attendance", "safety", "scores", "growth", "ratings"];

fn literal_headline(rng: &mut ChaCha8Rng) -> String {
    let topic = TOPICS[rng.gen_range(0..TOPICS.len())];
    let city = CITIES[rng.gen_range(0..CITIES.len())];
    let role = ROLES[rng.gen_range(0..ROLES.len())];
    let outcome = OUTCOMES[rng.gen_range(0..OUTCOMES.len())];
    match rng.gen_range(0..8) {
        0 => format!("{city} council approves new {topic} plan"),
        1 => format!("study finds {topic} changes linked to better {outcome}"),
        2 => format!("local {role} wins regional {topic} award"),
        3 => format!("{topic} report shows steady {outcome} this quarter"),
        4 => format!("officials outline {topic} updates for next year"),
        5 => format!("{city} schedules public hearing on {topic} proposal"),
        6 => format!("new {topic} program expands to {city} this fall"),
        _ => format!("{role} panel reviews {topic} figures ahead of vote"),
    }
}

fn sarcastic_headline(rng: &mut ChaCha8Rng) -> String {
    let topic = TOPICS[rng.gen_range(0..TOPICS.len())];
    let city = CITIES[rng.gen_range(0..CITIES.len())];
    let role = ROLES[rng.gen_range(0..ROLES.len())];
    let outcome = OUTCOMES[rng.gen_range(0..OUTCOMES.len())];
    match rng.gen_range(0..8) {
        0 => format!("local {role} heroically ignores {topic} advice once again"),
        1 => format!("area {role} stunned that {topic} meeting solved nothing"),
        2 => format!("nation thrilled as {topic} debate enters week two"),
        3 => format!("breaking {role} shares {topic} opinion nobody requested"),
        4 => format!("{city} man confident {topic} will surely fix itself"),
        5 => format!("report confirms {topic} exactly as bad as everyone said"),
        6 => format!("{role} bravely complains about {outcome} to wrong office"),
        _ => format!("experts baffled that ignoring {topic} did not help"),
    }
}

/// A two-class headline dataset of exactly `rows` records, labels `literal`
/// and `sarcastic`. The literal class holds a slim majority and 7% of labels
/// are flipped as noise, so separable-but-imperfect accuracy is the ceiling.
pub fn sarcasm_headlines(rows: usize, seed: u64) -> LabeledDataset {
    assert!(rows >= 8, "need at least 8 rows for a usable dataset");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let literal_rows = (rows as f64 * 0.52).round() as usize;
    let mut rows_out: Vec<(String, String)> = Vec::with_capacity(rows);
    for _ in 0..literal_rows {
        rows_out.push((literal_headline(&mut rng), "literal".to_string()));
    }
    for _ in literal_rows..rows {
        rows_out.push((sarcastic_headline(&mut rng), "sarcastic".to_string()));
    }
    for row in &mut rows_out {
        if rng.gen_bool(0.07) {
            row.1 = if row.1 == "literal" { "sarcastic".into() } else { "literal".into() };
        }
    }
    rows_out.shuffle(&mut rng);
    let records = rows_out
        .into_iter()
        .enumerate()
        .map(|(i, (text, label))| LabeledRecord { doc_id: format!("h{i:05}"), text, label })
        .collect();
    LabeledDataset::from_records("synthetic-headlines", records).expect("generated ids are unique")
}

fn benign_comment(rng: &mut ChaCha8Rng) -> String {
    let topic = TOPICS[rng.gen_range(0..TOPICS.len())];
    let outcome = OUTCOMES[rng.gen_range(0..OUTCOMES.len())];
    match rng.gen_range(0..6) {
        0 => format!("honestly the {topic} thread today was pretty interesting"),
        1 => format!("thanks for sharing this take on {topic}"),
        2 => format!("good point about {outcome} i had not considered that"),
        3 => format!("does anyone have a source for the {topic} numbers"),
        4 => format!("agreed the {topic} situation is improving slowly"),
        _ => format!("solid write up looking forward to the {topic} update"),
    }
}

fn bully_comment(rng: &mut ChaCha8Rng) -> String {
    let insult = INSULTS[rng.gen_range(0..INSULTS.len())];
    let second = INSULTS[rng.gen_range(0..INSULTS.len())];
    let topic = TOPICS[rng.gen_range(0..TOPICS.len())];
    match rng.gen_range(0..6) {
        0 => format!("you are such an {insult} nobody wants you here"),
        1 => format!("only a complete {insult} would post this {topic} garbage"),
        2 => format!("shut up you {insult} everyone laughs at you"),
        3 => format!("typical {insult} take from the resident {second}"),
        4 => format!("delete your account you absolute {insult}"),
        _ => format!("imagine being this much of a {insult} about {topic}"),
    }
}

fn sarcastic_comment(rng: &mut ChaCha8Rng) -> String {
    let topic = TOPICS[rng.gen_range(0..TOPICS.len())];
    match rng.gen_range(0..4) {
        0 => format!("oh sure because {topic} plans always go perfectly"),
        1 => format!("wow what a groundbreaking insight about {topic} truly"),
        2 => format!("yes clearly the {topic} committee has it all figured out"),
        _ => format!("great another {topic} thread exactly what we needed"),
    }
}

fn sarcastic_bully_comment(rng: &mut ChaCha8Rng) -> String {
    let insult = INSULTS[rng.gen_range(0..INSULTS.len())];
    match rng.gen_range(0..3) {
        0 => format!("wow truly a genius take from the local {insult}"),
        1 => format!("oh brilliant another masterpiece from our favorite {insult}"),
        _ => format!("sure listen to the {insult} that always works out"),
    }
}

/// A two-class comment dataset of exactly `rows` records, labels `benign`
/// and `bully`, with the bully class built on the demo lexicon's insults.
/// Class balance is roughly even with 5% label noise.
pub fn bully_comments(rows: usize, seed: u64) -> LabeledDataset {
    assert!(rows >= 8, "need at least 8 rows for a usable dataset");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let benign_rows = (rows as f64 * 0.54).round() as usize;
    let mut rows_out: Vec<(String, String)> = Vec::with_capacity(rows);
    for _ in 0..benign_rows {
        let text =
            if rng.gen_bool(0.3) { sarcastic_comment(&mut rng) } else { benign_comment(&mut rng) };
        rows_out.push((text, "benign".to_string()));
    }
    for _ in benign_rows..rows {
        let text = if rng.gen_bool(0.25) {
            sarcastic_bully_comment(&mut rng)
        } else {
            bully_comment(&mut rng)
        };
        rows_out.push((text, "bully".to_string()));
    }
    for row in &mut rows_out {
        if rng.gen_bool(0.05) {
            row.1 = if row.1 == "benign" { "bully".into() } else { "benign".into() };
        }
    }
    rows_out.shuffle(&mut rng);
    let records = rows_out
        .into_iter()
        .enumerate()
        .map(|(i, (text, label))| LabeledRecord { doc_id: format!("b{i:05}"), text, label })
        .collect();
    LabeledDataset::from_records("synthetic-comments", records).expect("generated ids are unique")
}

/// Shape of a generated corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPlan {
    pub subreddits: usize,
    pub authors: usize,
    pub posts: usize,
    /// Inclusive range for comments per post (before total adjustment).
    pub min_comments: usize,
    pub max_comments: usize,
    /// Author rings that co-comment, echo phrasing, and share a victim.
    pub coordinated_groups: usize,
    pub group_size: usize,
    /// When set, comment counts are nudged so posts + comments == this.
    pub target_docs: Option<usize>,
    pub seed: u64,
}

impl Default for CorpusPlan {
    fn default() -> Self {
        Self {
            subreddits: 6,
            authors: 60,
            posts: 40,
            min_comments: 8,
            max_comments: 30,
            coordinated_groups: 2,
            group_size: 3,
            target_docs: None,
            seed: 42,
        }
    }
}

impl CorpusPlan {
    /// The large end-to-end fixture: exactly 5,000 raw documents with every
    /// post clearing an engagement threshold of 20.
    pub fn e2e() -> Self {
        Self {
            subreddits: 8,
            authors: 120,
            posts: 160,
            min_comments: 22,
            max_comments: 38,
            coordinated_groups: 3,
            group_size: 4,
            target_docs: Some(5_000),
            seed: 42,
        }
    }
}

/// A generated corpus: posts plus their flattened comment threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub posts: Vec<RawPost>,
    pub comments: Vec<RawComment>,
}

impl SynthCorpus {
    /// Total raw documents (posts + comments).
    pub fn total_docs(&self) -> usize {
        self.posts.len() + self.comments.len()
    }
}

const SUBREDDIT_BANK: &[&str] = &[
    "memes", "gaming", "citynews", "sports", "movies", "music", "books", "fitness", "food",
    "history",
];

fn subreddit_name(i: usize) -> String {
    let base = SUBREDDIT_BANK[i % SUBREDDIT_BANK.len()];
    if i < SUBREDDIT_BANK.len() {
        base.to_string()
    } else {
        format!("{base}{}", i / SUBREDDIT_BANK.len())
    }
}

/// Generate a corpus per `plan`. Layout decisions:
///
/// - the first `coordinated_groups * group_size` authors form the rings, and
///   each ring gets a dedicated victim author after the regular pool;
/// - each ring picks a set of shared posts; the victim comments first, then
///   every ring member replies to the victim within minutes using phrasing
///   echoed across the ring;
/// - remaining comments are a mix of benign, sarcastic, and bullying texts
///   from the same template banks the labeled datasets use;
/// - every post's body mentions its `matched_keyword`, and `num_comments`
///   equals the actual generated thread size.
pub fn synth_corpus(plan: &CorpusPlan) -> SynthCorpus {
    assert!(plan.subreddits > 0 && plan.authors > 0 && plan.posts > 0);
    assert!(plan.min_comments >= 1 && plan.min_comments <= plan.max_comments);
    let ring_authors = plan.coordinated_groups * plan.group_size;
    assert!(
        ring_authors + plan.coordinated_groups < plan.authors,
        "author pool too small for the coordinated rings and victims"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);

    let authors: Vec<String> = (0..plan.authors).map(|i| format!("user{i:03}")).collect();
    let victims: Vec<String> =
        (0..plan.coordinated_groups).map(|g| format!("victim{g:02}")).collect();
    let rings: Vec<Vec<&str>> = (0..plan.coordinated_groups)
        .map(|g| (0..plan.group_size).map(|j| authors[g * plan.group_size + j].as_str()).collect())
        .collect();

    // Comment budget per post, nudged to hit target_docs exactly.
    let mut budget: Vec<usize> =
        (0..plan.posts).map(|_| rng.gen_range(plan.min_comments..=plan.max_comments)).collect();
    if let Some(target) = plan.target_docs {
        let floor = plan.posts + plan.posts * plan.min_comments;
        let ceil = plan.posts + plan.posts * plan.max_comments;
        assert!(
            (floor..=ceil).contains(&target),
            "target_docs {target} unreachable for this plan (range {floor}..={ceil})"
        );
        let mut total = plan.posts + budget.iter().sum::<usize>();
        let mut i = 0;
        while total != target {
            if total < target && budget[i] < plan.max_comments {
                budget[i] += 1;
                total += 1;
            } else if total > target && budget[i] > plan.min_comments {
                budget[i] -= 1;
                total -= 1;
            }
            i = (i + 1) % budget.len();
        }
    }

    // Each ring claims a third of the posts in one subreddit.
    let mut ring_posts: Vec<Vec<usize>> = vec![Vec::new(); plan.coordinated_groups];
    for (g, posts) in ring_posts.iter_mut().enumerate() {
        let home = g % plan.subreddits;
        *posts = (0..plan.posts).filter(|i| i % plan.subreddits == home && i % 3 == 0).collect();
    }

    let base_ts: i64 = 1_700_000_000;
    let mut posts = Vec::with_capacity(plan.posts);
    let mut comments = Vec::new();
    for (pi, &post_budget) in budget.iter().enumerate() {
        let subreddit = subreddit_name(pi % plan.subreddits);
        let author = authors[rng.gen_range(ring_authors..plan.authors)].clone();
        let keyword = INSULTS[rng.gen_range(0..INSULTS.len())];
        let title = literal_headline(&mut rng);
        let created_ts = base_ts + pi as i64 * 7_200 + rng.gen_range(0..600);
        let post_id = format!("p{pi:04}");

        let mut thread: Vec<RawComment> = Vec::with_capacity(post_budget);
        let mut ts = created_ts;
        let mut remaining = post_budget;

        // Ring activity first: victim comment plus one reply per member.
        for (g, ring) in rings.iter().enumerate() {
            if !ring_posts[g].contains(&pi) || remaining < ring.len() + 1 {
                continue;
            }
            ts += rng.gen_range(120..600);
            let victim_comment_id = format!("c{pi:04}_{:03}", thread.len());
            thread.push(RawComment {
                comment_id: victim_comment_id.clone(),
                post_id: post_id.clone(),
                author: victims[g].clone(),
                depth: 0,
                parent_id: None,
                score: rng.gen_range(-2..20),
                text: benign_comment(&mut rng),
                created_ts: ts,
            });
            remaining -= 1;
            let echo = bully_comment(&mut rng);
            for member in ring {
                ts += rng.gen_range(30..240);
                thread.push(RawComment {
                    comment_id: format!("c{pi:04}_{:03}", thread.len()),
                    post_id: post_id.clone(),
                    author: (*member).to_string(),
                    depth: 1,
                    parent_id: Some(victim_comment_id.clone()),
                    score: rng.gen_range(-10..5),
                    text: format!("{echo} {}", sarcastic_bully_comment(&mut rng)),
                    created_ts: ts,
                });
                remaining -= 1;
            }
        }

        // Background chatter fills the rest of the budget.
        for _ in 0..remaining {
            ts += rng.gen_range(60..3_600);
            let author = authors[rng.gen_range(0..plan.authors)].clone();
            let text = match rng.gen_range(0..20) {
                0..=10 => benign_comment(&mut rng),
                11..=14 => sarcastic_comment(&mut rng),
                15..=17 => bully_comment(&mut rng),
                _ => sarcastic_bully_comment(&mut rng),
            };
            let reply_to = if thread.is_empty() || rng.gen_bool(0.6) {
                None
            } else {
                Some(rng.gen_range(0..thread.len()))
            };
            let (depth, parent_id) = match reply_to {
                Some(idx) => (thread[idx].depth + 1, Some(thread[idx].comment_id.clone())),
                None => (0, None),
            };
            thread.push(RawComment {
                comment_id: format!("c{pi:04}_{:03}", thread.len()),
                post_id: post_id.clone(),
                author,
                depth,
                parent_id,
                score: rng.gen_range(-20..200),
                text,
                created_ts: ts,
            });
        }

        posts.push(RawPost {
            post_id: post_id.clone(),
            subreddit,
            author_id: author,
            title,
            body: format!(
                "{} people keep calling each other {keyword} in here",
                benign_comment(&mut rng)
            ),
            score: rng.gen_range(0..5_000),
            num_comments: thread.len() as u64,
            url: format!(
                "https://example.net/r/{}/{post_id}",
                subreddit_name(pi % plan.subreddits)
            ),
            created_ts,
            nsfw: false,
            archived: rng.gen_bool(0.1),
            matched_keyword: keyword.to_string(),
        });
        comments.extend(thread);
    }

    SynthCorpus { posts, comments }
}
