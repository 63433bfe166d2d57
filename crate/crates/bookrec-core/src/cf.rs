//! Collaborative filtering. Neighbors are chosen by normalized weighted
//! difference entropy over common ratings; predictions add the target's
//! mean to the similarity-weighted, mean-centered neighbor deviations. A
//! tag-based predictor covers the cold path where a user's history on
//! like-tagged books is more telling than the population.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::ratings::{BookId, RatingMatrix, Score, TagCatalog, UserId};
use crate::similarity::{normalize_wde, rating_diff, weighted_diff_entropy};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfError {
    #[error("user {user} rated no book sharing a tag with book {book}")]
    NoSimilarBooks { user: UserId, book: BookId },
    #[error("book {0} has no tags")]
    UntaggedBook(BookId),
    #[error("no user shares a rated book with user {0}")]
    NoCandidates(UserId),
    #[error("user {0} has no ratings")]
    NoRatings(UserId),
    #[error("neighbor count must be at least 1")]
    InvalidK,
}

/// A user's item space split into rated and unrated halves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserProfile {
    pub user: UserId,
    pub rated: BTreeSet<BookId>,
    pub unrated: BTreeSet<BookId>,
    pub item_space: BTreeSet<BookId>,
}

impl UserProfile {
    pub fn from_matrix(user: UserId, matrix: &RatingMatrix) -> Self {
        let item_space: BTreeSet<BookId> = matrix.books().collect();
        let rated: BTreeSet<BookId> = matrix
            .user_ratings(user)
            .map(|r| r.keys().copied().collect())
            .unwrap_or_default();
        let unrated = item_space.difference(&rated).copied().collect();
        Self {
            user,
            rated,
            unrated,
            item_space,
        }
    }
}

/// Top-k most similar users, similarity in [0, 1], most similar first.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet {
    pub target: UserId,
    pub neighbors: Vec<(UserId, f64)>,
    pub k: usize,
}

/// Unrated books with predicted scores, best first, ties toward the lower
/// book id.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    pub user: UserId,
    pub items: Vec<(BookId, f64)>,
}

fn user_mean(matrix: &RatingMatrix, user: UserId) -> Result<f64, CfError> {
    let ratings = matrix
        .user_ratings(user)
        .filter(|r| !r.is_empty())
        .ok_or(CfError::NoRatings(user))?;
    let sum: f64 = ratings.values().map(|&s| f64::from(s)).sum();
    Ok(sum / ratings.len() as f64)
}

/// Predicts a score from the user's own history on books sharing the
/// target's first tag: the score value with the most occurrences wins, count
/// ties going to the value nearest the user's mean, then to the lower value.
/// Only the `k` best-counted values stay in the running.
pub fn tag_knn_predict(
    u: UserId,
    book: BookId,
    matrix: &RatingMatrix,
    tags: &TagCatalog,
    k: usize,
) -> Result<Score, CfError> {
    if k == 0 {
        return Err(CfError::InvalidK);
    }
    let tag = tags.first_tag(book).ok_or(CfError::UntaggedBook(book))?;
    let ratings = matrix
        .user_ratings(u)
        .ok_or(CfError::NoSimilarBooks { user: u, book })?;
    let mut counts: BTreeMap<Score, usize> = BTreeMap::new();
    let mut total = 0usize;
    let mut score_sum = 0.0;
    for (&rated_book, &score) in ratings {
        if rated_book == book {
            continue;
        }
        let shares_tag = tags
            .tags(rated_book)
            .is_some_and(|list| list.iter().any(|t| t == tag));
        if shares_tag {
            *counts.entry(score).or_insert(0) += 1;
            total += 1;
            score_sum += f64::from(score);
        }
    }
    if total == 0 {
        return Err(CfError::NoSimilarBooks { user: u, book });
    }
    let mean = score_sum / total as f64;
    let mut values: Vec<(Score, usize)> = counts.into_iter().collect();
    values.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| {
                let da = libm::fabs(f64::from(a.0) - mean);
                let db = libm::fabs(f64::from(b.0) - mean);
                da.partial_cmp(&db).unwrap()
            })
            .then(a.0.cmp(&b.0))
    });
    values.truncate(k);
    Ok(values[0].0)
}

/// Ranks every user sharing at least one rated book with `u` by normalized
/// weighted difference entropy and keeps the best `k`. Ties go to the lower
/// user id.
pub fn nwde_neighbors(u: UserId, matrix: &RatingMatrix, k: usize) -> Result<NeighborSet, CfError> {
    if k == 0 {
        return Err(CfError::InvalidK);
    }
    if matrix.user_ratings(u).is_none_or(|r| r.is_empty()) {
        return Err(CfError::NoRatings(u));
    }
    let mut wde = BTreeMap::new();
    for other in matrix.users() {
        if other == u {
            continue;
        }
        let common = matrix.common_ratings(u, other);
        if common.is_empty() {
            continue;
        }
        let mine: Vec<Score> = common.iter().map(|&(a, _)| a).collect();
        let theirs: Vec<Score> = common.iter().map(|&(_, b)| b).collect();
        let diff = rating_diff(&mine, &theirs).expect("common set is nonempty");
        wde.insert(other, weighted_diff_entropy(&diff));
    }
    if wde.is_empty() {
        return Err(CfError::NoCandidates(u));
    }
    let nwde = normalize_wde(&wde);
    let mut neighbors: Vec<(UserId, f64)> = nwde.into_iter().collect();
    neighbors.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    neighbors.truncate(k);
    Ok(NeighborSet {
        target: u,
        neighbors,
        k,
    })
}

/// Mean-centered neighbor prediction: the target's mean plus the
/// similarity-weighted average deviation of neighbors who rated the book,
/// clamped to the rating scale. With no contributing neighbor (or all
/// similarities zero) the target's own mean stands.
pub fn predict_rating_cf(
    u: UserId,
    book: BookId,
    nb: &NeighborSet,
    matrix: &RatingMatrix,
) -> Result<f64, CfError> {
    let target_mean = user_mean(matrix, u)?;
    let mut sim_sum = 0.0;
    let mut centered = 0.0;
    for &(neighbor, sim) in &nb.neighbors {
        let Some(score) = matrix.get(neighbor, book) else {
            continue;
        };
        let neighbor_mean = user_mean(matrix, neighbor)?;
        sim_sum += sim;
        centered += sim * (f64::from(score) - neighbor_mean);
    }
    if sim_sum == 0.0 {
        return Ok(target_mean.clamp(1.0, 5.0));
    }
    Ok((target_mean + centered / sim_sum).clamp(1.0, 5.0))
}

/// Scores every book the user has not rated and keeps the `n` best,
/// descending by prediction, ties toward the lower book id. Fewer than `n`
/// candidates simply yields a shorter list.
pub fn top_n_recommend(
    u: UserId,
    n: usize,
    matrix: &RatingMatrix,
    nb: &NeighborSet,
) -> Result<RecommendationList, CfError> {
    let profile = UserProfile::from_matrix(u, matrix);
    let mut items = Vec::new();
    for &book in &profile.unrated {
        let predicted = predict_rating_cf(u, book, nb, matrix)?;
        items.push((book, predicted));
    }
    items.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    items.truncate(n);
    Ok(RecommendationList { user: u, items })
}
