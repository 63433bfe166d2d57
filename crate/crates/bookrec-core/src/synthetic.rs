//! Deterministic synthetic datasets with known ground truth, used to
//! exercise clustering recovery, prediction sanity, and ranking quality.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::ClusterSet;
use crate::ratings::{BookId, RatingMatrix, TagCatalog, UserId};

/// Users split into groups that each rate a private block of books highly.
/// Within a group every pair shares all books with near-identical scores;
/// across groups no pair shares any book, so the planted partition is the
/// unique natural clustering. Returns the matrix and the user → group map.
pub fn planted_clusters(
    groups: usize,
    users_per_group: usize,
    books_per_group: usize,
    seed: u64,
) -> (RatingMatrix, BTreeMap<UserId, usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = RatingMatrix::new();
    let mut labels = BTreeMap::new();
    for group in 0..groups {
        for member in 0..users_per_group {
            let user = (group * users_per_group + member + 1) as UserId;
            labels.insert(user, group);
            for slot in 0..books_per_group {
                let book = (group * books_per_group + slot + 1) as BookId;
                matrix.insert(user, book, rng.random_range(4..=5));
            }
        }
    }
    (matrix, labels)
}

/// Fraction of users whose cluster's majority planted label matches their
/// own label.
pub fn cluster_purity(cs: &ClusterSet, labels: &BTreeMap<UserId, usize>) -> f64 {
    let mut matched = 0usize;
    for cluster in &cs.clusters {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for member in &cluster.members {
            *counts.entry(labels[member]).or_insert(0) += 1;
        }
        matched += counts.values().copied().max().unwrap_or(0);
    }
    matched as f64 / cs.total_users as f64
}

/// Every user rates every book with a uniform score in 1..=5.
pub fn random_matrix(users: usize, books: usize, seed: u64) -> RatingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = RatingMatrix::new();
    for user in 1..=users as UserId {
        for book in 1..=books as BookId {
            matrix.insert(user, book, rng.random_range(1..=5));
        }
    }
    matrix
}

/// Users with a planted genre preference: each user rates a random sample
/// of books, scoring the preferred genre 4..=5 and everything else 1..=3.
/// Books carry their genre as the first tag. A recommender that ranks by
/// predicted score should surface preferred-genre books first.
pub fn preference_dataset(
    users: usize,
    books: usize,
    genres: usize,
    ratings_per_user: usize,
    seed: u64,
) -> (RatingMatrix, TagCatalog, BTreeMap<UserId, usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = RatingMatrix::new();
    let mut tags = TagCatalog::new();
    let mut preferences = BTreeMap::new();

    let genre_of = |book: BookId| ((book - 1) as usize) % genres;
    for book in 1..=books as BookId {
        let label = alloc::format!("genre-{}", genre_of(book));
        tags.insert(book, alloc::vec![label]);
    }

    let all_books: Vec<BookId> = (1..=books as BookId).collect();
    for user in 1..=users as UserId {
        let preferred = ((user - 1) as usize) % genres;
        preferences.insert(user, preferred);
        let mut pool = all_books.clone();
        pool.shuffle(&mut rng);
        for &book in pool.iter().take(ratings_per_user.min(books)) {
            let score = if genre_of(book) == preferred {
                rng.random_range(4..=5)
            } else {
                rng.random_range(1..=3)
            };
            matrix.insert(user, book, score);
        }
    }
    (matrix, tags, preferences)
}
