//! Hybrid combination and evaluation. Two predictors are merged either by
//! averaging their scores (rounded half-up onto the integer scale) or by
//! interleaving their ranked lists; recommendation quality is measured as
//! the fraction of recommended books found in a held-out reference set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::cf::{nwde_neighbors, top_n_recommend, RecommendationList};
use crate::ratings::{BookId, Score, SplitPair, UserId};

/// Held-out ratings at or above this score count as relevant.
pub const POSITIVE_THRESHOLD: Score = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BlendError {
    #[error("cannot score an empty recommendation list")]
    EmptyRecommendation,
}

/// Mean of the two predictions, rounded half-up, clamped to the scale. A
/// cluster-side 0 (its no-data sentinel) simply drags the mean down and the
/// clamp floors the result at 1.
pub fn blend_scores(yi: Score, yj: f64) -> Score {
    let mean = (f64::from(yi) + yj) / 2.0;
    let rounded = libm::floor(mean + 0.5);
    rounded.clamp(1.0, 5.0) as Score
}

/// Both predictions next to their blended result.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendedScore {
    pub tag_knn: Score,
    pub cluster: f64,
    pub final_score: Score,
}

impl BlendedScore {
    pub fn compute(tag_knn: Score, cluster: f64) -> Self {
        Self {
            tag_knn,
            cluster,
            final_score: blend_scores(tag_knn, cluster),
        }
    }
}

/// Alternates between the two lists, skipping books already taken, until
/// `n` items are collected or both lists run dry. Relative order within
/// each source list is preserved; an exhausted list cedes its turns.
pub fn interleave_recommendations(
    a: &RecommendationList,
    b: &RecommendationList,
    n: usize,
) -> RecommendationList {
    let mut items = Vec::new();
    let mut seen = BTreeSet::new();
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut from_a = true;
    while items.len() < n && (ia < a.items.len() || ib < b.items.len()) {
        let (source, cursor) = if from_a {
            (&a.items, &mut ia)
        } else {
            (&b.items, &mut ib)
        };
        while *cursor < source.len() {
            let (book, score) = source[*cursor];
            *cursor += 1;
            if seen.insert(book) {
                items.push((book, score));
                break;
            }
        }
        from_a = !from_a;
    }
    RecommendationList {
        user: a.user,
        items,
    }
}

/// Share of recommended books that appear in the reference set.
pub fn hitrate(
    recommended: &RecommendationList,
    reference: &BTreeSet<BookId>,
) -> Result<f64, BlendError> {
    if recommended.items.is_empty() {
        return Err(BlendError::EmptyRecommendation);
    }
    let hits = recommended
        .items
        .iter()
        .filter(|(book, _)| reference.contains(book))
        .count();
    Ok(hits as f64 / recommended.items.len() as f64)
}

/// Per-user hitrates and their mean at one cutoff. The mean of an empty
/// cohort is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct HitrateReport {
    pub per_user: BTreeMap<UserId, f64>,
    pub mean: f64,
    pub n: usize,
}

impl HitrateReport {
    pub fn new(per_user: BTreeMap<UserId, f64>, n: usize) -> Self {
        let mean = if per_user.is_empty() {
            0.0
        } else {
            per_user.values().sum::<f64>() / per_user.len() as f64
        };
        Self { per_user, mean, n }
    }
}

/// Prediction-ranked recommendations against the unranked candidate
/// baseline at the same cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct HitrateComparison {
    pub n: usize,
    pub ranked: HitrateReport,
    pub unranked: HitrateReport,
}

/// Books the user rated at or above the positive threshold in the test
/// half of the split.
pub fn held_out_positives(split: &SplitPair, user: UserId) -> BTreeSet<BookId> {
    split
        .test
        .user_ratings(user)
        .map(|ratings| {
            ratings
                .iter()
                .filter(|&(_, &score)| score >= POSITIVE_THRESHOLD)
                .map(|(&book, _)| book)
                .collect()
        })
        .unwrap_or_default()
}

/// For each cutoff, recommends from the train half and scores against the
/// held-out positives, both with prediction-ranked lists and with the
/// plain ascending-id candidate order as a baseline. Users without train
/// ratings, without held-out positives, without any co-rating candidate,
/// or with nothing left to recommend are skipped.
pub fn hitrate_at_n(split: &SplitPair, n_values: &[usize], k: usize) -> Vec<HitrateComparison> {
    let train = &split.train;
    let candidates: Vec<BookId> = train.books().collect();
    let mut comparisons = Vec::new();
    for &n in n_values {
        let mut ranked_scores = BTreeMap::new();
        let mut unranked_scores = BTreeMap::new();
        for user in split.test.users() {
            let positives = held_out_positives(split, user);
            if positives.is_empty() {
                continue;
            }
            let Ok(nb) = nwde_neighbors(user, train, k) else {
                continue;
            };
            let Ok(ranked) = top_n_recommend(user, n, train, &nb) else {
                continue;
            };
            if ranked.items.is_empty() {
                continue;
            }
            let unranked = RecommendationList {
                user,
                items: candidates
                    .iter()
                    .filter(|&&book| train.get(user, book).is_none())
                    .take(n)
                    .map(|&book| (book, 0.0))
                    .collect(),
            };
            let ranked_hr = hitrate(&ranked, &positives).expect("ranked list is nonempty");
            let unranked_hr = hitrate(&unranked, &positives).expect("same pool as ranked");
            ranked_scores.insert(user, ranked_hr);
            unranked_scores.insert(user, unranked_hr);
        }
        comparisons.push(HitrateComparison {
            n,
            ranked: HitrateReport::new(ranked_scores, n),
            unranked: HitrateReport::new(unranked_scores, n),
        });
    }
    comparisons
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratings::holdout_split;
    use crate::synthetic;

    #[test]
    fn equal_predictions_are_a_fixed_point() {
        assert_eq!(blend_scores(3, 3.0), 3);
        assert_eq!(blend_scores(5, 5.0), 5);
    }

    #[test]
    fn half_points_round_up() {
        assert_eq!(blend_scores(4, 5.0), 5);
        assert_eq!(blend_scores(2, 5.0), 4);
        assert_eq!(blend_scores(2, 3.0), 3);
    }

    #[test]
    fn missing_cluster_side_floors_at_one() {
        assert_eq!(blend_scores(1, 0.0), 1);
        assert_eq!(blend_scores(2, 0.0), 1);
    }

    #[test]
    fn blend_lands_on_a_neighboring_integer_mean() {
        for yi in 1..=5u8 {
            for yj in 1..=5u8 {
                let got = blend_scores(yi, f64::from(yj));
                let lo = (u16::from(yi) + u16::from(yj)) / 2;
                let hi = (u16::from(yi) + u16::from(yj)).div_ceil(2);
                assert!(u16::from(got) == lo || u16::from(got) == hi);
            }
        }
    }

    fn list(user: UserId, books: &[BookId]) -> RecommendationList {
        RecommendationList {
            user,
            items: books.iter().map(|&b| (b, 5.0 - b as f64 * 0.1)).collect(),
        }
    }

    #[test]
    fn disjoint_lists_alternate() {
        let merged = interleave_recommendations(&list(1, &[10, 11]), &list(1, &[20, 21]), 4);
        let books: Vec<BookId> = merged.items.iter().map(|&(b, _)| b).collect();
        assert_eq!(books, vec![10, 20, 11, 21]);
    }

    #[test]
    fn duplicates_keep_their_first_slot() {
        let merged = interleave_recommendations(&list(1, &[10, 11]), &list(1, &[10, 20]), 3);
        let books: Vec<BookId> = merged.items.iter().map(|&(b, _)| b).collect();
        assert_eq!(books, vec![10, 20, 11]);
    }

    #[test]
    fn empty_side_yields_the_other_truncated() {
        let merged = interleave_recommendations(&list(1, &[10, 11, 12]), &list(1, &[]), 2);
        let books: Vec<BookId> = merged.items.iter().map(|&(b, _)| b).collect();
        assert_eq!(books, vec![10, 11]);
    }

    #[test]
    fn interleave_preserves_source_order() {
        let merged = interleave_recommendations(
            &list(1, &[10, 11, 12]),
            &list(1, &[20, 21, 22]),
            6,
        );
        let books: Vec<BookId> = merged.items.iter().map(|&(b, _)| b).collect();
        let a_positions: Vec<usize> = [10, 11, 12]
            .iter()
            .map(|b| books.iter().position(|x| x == b).unwrap())
            .collect();
        let b_positions: Vec<usize> = [20, 21, 22]
            .iter()
            .map(|b| books.iter().position(|x| x == b).unwrap())
            .collect();
        assert!(a_positions.windows(2).all(|w| w[0] < w[1]));
        assert!(b_positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn perfect_recommendations_hit_everything() {
        let rec = list(1, &[10, 11, 12]);
        let reference: BTreeSet<BookId> = [10, 11, 12].into();
        assert_eq!(hitrate(&rec, &reference).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_recommendations_hit_nothing() {
        let rec = list(1, &[10, 11, 12]);
        let reference: BTreeSet<BookId> = [20, 21].into();
        assert_eq!(hitrate(&rec, &reference).unwrap(), 0.0);
    }

    #[test]
    fn one_hit_in_three_scores_a_third() {
        let rec = list(1, &[10, 11, 12]);
        let reference: BTreeSet<BookId> = [12, 99].into();
        let hr = hitrate(&rec, &reference).unwrap();
        assert!((hr - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_lists_cannot_be_scored() {
        let rec = list(1, &[]);
        assert_eq!(
            hitrate(&rec, &BTreeSet::new()),
            Err(BlendError::EmptyRecommendation)
        );
    }

    #[test]
    fn growing_the_reference_never_hurts() {
        let rec = list(1, &[10, 11, 12, 13]);
        let small: BTreeSet<BookId> = [10].into();
        let large: BTreeSet<BookId> = [10, 11, 99].into();
        assert!(hitrate(&rec, &large).unwrap() >= hitrate(&rec, &small).unwrap());
    }

    #[test]
    fn ranked_beats_unranked_on_planted_preferences() {
        let (matrix, _, _) = synthetic::preference_dataset(40, 60, 4, 20, 5);
        let split = holdout_split(&matrix, 0.3, 5).unwrap();
        let reports = hitrate_at_n(&split, &[3], 5);
        assert_eq!(reports.len(), 1);
        let cmp = &reports[0];
        assert!(!cmp.ranked.per_user.is_empty());
        assert!(
            cmp.ranked.mean >= cmp.unranked.mean,
            "ranked {} vs unranked {}",
            cmp.ranked.mean,
            cmp.unranked.mean
        );
        for report in [&cmp.ranked, &cmp.unranked] {
            for &hr in report.per_user.values() {
                assert!((0.0..=1.0).contains(&hr));
            }
            let mean = report.per_user.values().sum::<f64>() / report.per_user.len() as f64;
            assert!((report.mean - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn cohorts_share_membership_across_ranked_and_unranked() {
        let (matrix, _, _) = synthetic::preference_dataset(20, 30, 3, 10, 9);
        let split = holdout_split(&matrix, 0.3, 9).unwrap();
        for cmp in hitrate_at_n(&split, &[1, 3, 5], 5) {
            let ranked_users: Vec<UserId> = cmp.ranked.per_user.keys().copied().collect();
            let unranked_users: Vec<UserId> = cmp.unranked.per_user.keys().copied().collect();
            assert_eq!(ranked_users, unranked_users);
        }
    }
}
