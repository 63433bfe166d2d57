//! Shared fixtures for the integration suites: synthetic datasets written
//! to disk plus a handle on the compiled binary.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use bookrec_core::synthetic::preference_dataset;
use bookrec_core::{BookId, RatingMatrix, TagCatalog, UserId};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bookrec"))
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub ratings: PathBuf,
    pub tags: PathBuf,
    pub pairs: PathBuf,
    pub matrix: RatingMatrix,
    pub catalog: TagCatalog,
}

/// Genre-preference dataset serialized to TSV files in a temp directory.
/// The pairs file lists one unrated book per user for up to five users.
pub fn preference_fixture(
    users: usize,
    books: usize,
    genres: usize,
    ratings_per_user: usize,
    seed: u64,
) -> Fixture {
    let (matrix, catalog, _) = preference_dataset(users, books, genres, ratings_per_user, seed);
    let dir = tempfile::tempdir().expect("temp dir");

    let ratings = dir.path().join("ratings.tsv");
    std::fs::write(&ratings, matrix.to_tsv()).expect("write ratings");

    let tags = dir.path().join("tags.tsv");
    let mut tag_text = String::new();
    for book in 1..=books as BookId {
        let list = catalog.tags(book).expect("every book is tagged");
        tag_text.push_str(&format!("{}\t{}\n", book, list.join(",")));
    }
    std::fs::write(&tags, tag_text).expect("write tags");

    let pairs = dir.path().join("pairs.tsv");
    let mut pair_text = String::new();
    for user in matrix.users().take(5) {
        if let Some(book) = first_unrated(&matrix, user, books) {
            pair_text.push_str(&format!("{}\t{}\n", user, book));
        }
    }
    std::fs::write(&pairs, pair_text).expect("write pairs");

    Fixture {
        dir,
        ratings,
        tags,
        pairs,
        matrix,
        catalog,
    }
}

pub fn first_unrated(matrix: &RatingMatrix, user: UserId, books: usize) -> Option<BookId> {
    (1..=books as BookId).find(|&b| matrix.get(user, b).is_none())
}

pub fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}
