//! Candidate-selection filters and the post/comment → document transform.

use super::{match_keywords, DocKind, Document, Lexicon, RawComment, RawPost};
use crate::par;
use std::collections::HashMap;

/// Keep posts with strictly more than `min_comments` comments, preserving
/// order. The threshold is exclusive: a post with exactly `min_comments`
/// comments is dropped.
pub fn filter_posts(posts: Vec<RawPost>, min_comments: u64) -> Vec<RawPost> {
    posts.into_iter().filter(|p| p.num_comments > min_comments).collect()
}

/// Documents produced by [`to_documents`] plus the number of comments skipped
/// because their post was missing from the input.
#[derive(Debug, Clone)]
pub struct ToDocumentsResult {
    pub documents: Vec<Document>,
    pub skipped_comments: usize,
}

/// Unify posts and comments into [`Document`]s: post text is `title` and
/// `body` joined by one space, comment text passes through. Keywords are
/// matched against the lexicon; `target_author` is the parent comment's
/// author, or the post author for top-level comments.
///
/// Comments referencing a post absent from `posts` are skipped and counted.
pub fn to_documents(
    posts: &[RawPost],
    comments: &[RawComment],
    lexicon: &Lexicon,
) -> ToDocumentsResult {
    let post_index: HashMap<&str, &RawPost> =
        posts.iter().map(|p| (p.post_id.as_str(), p)).collect();
    let comment_author: HashMap<&str, (&str, &str)> = comments
        .iter()
        .map(|c| (c.comment_id.as_str(), (c.post_id.as_str(), c.author.as_str())))
        .collect();

    let mut documents = Vec::with_capacity(posts.len() + comments.len());
    for post in posts {
        documents.push(Document {
            doc_id: post.post_id.clone(),
            kind: DocKind::Post,
            author: post.author_id.clone(),
            subreddit: post.subreddit.clone(),
            text: format!("{} {}", post.title, post.body),
            created_ts: post.created_ts,
            keywords: Default::default(),
            post_id: post.post_id.clone(),
            target_author: None,
        });
    }

    let mut skipped_comments = 0;
    for comment in comments {
        let Some(post) = post_index.get(comment.post_id.as_str()) else {
            skipped_comments += 1;
            continue;
        };
        let target_author = if comment.depth == 0 {
            Some(post.author_id.clone())
        } else {
            comment.parent_id.as_deref().and_then(|pid| {
                comment_author
                    .get(pid)
                    .filter(|(post_id, _)| *post_id == comment.post_id)
                    .map(|(_, author)| author.to_string())
            })
        };
        documents.push(Document {
            doc_id: comment.comment_id.clone(),
            kind: DocKind::Comment,
            author: comment.author.clone(),
            subreddit: post.subreddit.clone(),
            text: comment.text.clone(),
            created_ts: comment.created_ts,
            keywords: Default::default(),
            post_id: comment.post_id.clone(),
            target_author,
        });
    }

    let keyword_sets = par::map_slice(&documents, |doc| match_keywords(&doc.text, lexicon));
    for (doc, keywords) in documents.iter_mut().zip(keyword_sets) {
        doc.keywords = keywords;
    }

    ToDocumentsResult { documents, skipped_comments }
}
