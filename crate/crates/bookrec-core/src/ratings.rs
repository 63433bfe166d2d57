//! Sparse user-book rating matrix, tag catalog, and holdout splitting.
//!
//! Scores are integers in `[1, 5]`; an absent entry means "unrated" and
//! reads as 0 wherever a dense view is needed. Collections are B-tree
//! backed so iteration order (and everything derived from it) is
//! deterministic.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type UserId = u64;
pub type BookId = u64;
pub type Score = u8;

pub const MIN_SCORE: Score = 1;
pub const MAX_SCORE: Score = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatingsError {
    #[error("line {0}: malformed line")]
    MalformedLine(usize),
    #[error("line {0}: score out of range (expected 1..=5)")]
    ScoreOutOfRange(usize),
    #[error("line {0}: empty tag list")]
    EmptyTagList(usize),
    #[error("user {0} has no ratings")]
    NoRatings(UserId),
    #[error("test fraction must lie in [0, 1]")]
    InvalidFraction,
}

/// Sparse m×n user-book score matrix with per-user and per-book views.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RatingMatrix {
    by_user: BTreeMap<UserId, BTreeMap<BookId, Score>>,
    by_book: BTreeMap<BookId, BTreeSet<UserId>>,
    entry_count: usize,
}

impl RatingMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a rating, replacing any previous score for the same pair.
    /// Returns the replaced score, if any. Panics on a score outside `[1, 5]`.
    pub fn insert(&mut self, user: UserId, book: BookId, score: Score) -> Option<Score> {
        assert!(
            (MIN_SCORE..=MAX_SCORE).contains(&score),
            "score {score} outside 1..=5"
        );
        let previous = self.by_user.entry(user).or_default().insert(book, score);
        self.by_book.entry(book).or_default().insert(user);
        if previous.is_none() {
            self.entry_count += 1;
        }
        previous
    }

    pub fn get(&self, user: UserId, book: BookId) -> Option<Score> {
        self.by_user.get(&user)?.get(&book).copied()
    }

    /// The user's rated books and scores, ordered by book id.
    pub fn user_ratings(&self, user: UserId) -> Option<&BTreeMap<BookId, Score>> {
        self.by_user.get(&user)
    }

    /// Users that rated the given book, ascending.
    pub fn raters(&self, book: BookId) -> impl Iterator<Item = UserId> + '_ {
        self.by_book.get(&book).into_iter().flatten().copied()
    }

    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.by_user.keys().copied()
    }

    pub fn books(&self) -> impl Iterator<Item = BookId> + '_ {
        self.by_book.keys().copied()
    }

    /// Number of distinct users with at least one rating (m).
    pub fn user_count(&self) -> usize {
        self.by_user.len()
    }

    /// Number of distinct books with at least one rating (n).
    pub fn book_count(&self) -> usize {
        self.by_book.len()
    }

    /// Number of stored (user, book) entries.
    pub fn len(&self) -> usize {
        self.entry_count
    }

    pub fn is_empty(&self) -> bool {
        self.entry_count == 0
    }

    /// All entries in (user, book) order.
    pub fn entries(&self) -> impl Iterator<Item = (UserId, BookId, Score)> + '_ {
        self.by_user.iter().flat_map(|(&user, ratings)| {
            ratings.iter().map(move |(&book, &score)| (user, book, score))
        })
    }

    /// Score pairs over the books both users rated, ordered by book id.
    pub fn common_ratings(&self, a: UserId, b: UserId) -> Vec<(Score, Score)> {
        match (self.by_user.get(&a), self.by_user.get(&b)) {
            (Some(ra), Some(rb)) => ra
                .iter()
                .filter_map(|(book, &sa)| rb.get(book).map(|&sb| (sa, sb)))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Arithmetic mean over the user's rated entries (unrated zeros excluded).
    pub fn mean_rating(&self, user: UserId) -> Result<f64, RatingsError> {
        let ratings = self
            .by_user
            .get(&user)
            .filter(|r| !r.is_empty())
            .ok_or(RatingsError::NoRatings(user))?;
        let sum: u32 = ratings.values().map(|&s| u32::from(s)).sum();
        Ok(f64::from(sum) / ratings.len() as f64)
    }

    /// Serializes to the `user<TAB>book<TAB>score` line format, entries in
    /// (user, book) order. Reloading the output reproduces the matrix.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (user, book, score) in self.entries() {
            let _ = writeln!(out, "{user}\t{book}\t{score}");
        }
        out
    }
}

/// Book-to-tags mapping; the first tag of a book is its primary label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagCatalog {
    tags: BTreeMap<BookId, Vec<String>>,
}

impl TagCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a book's tag list, replacing any previous one.
    /// Panics on an empty list.
    pub fn insert(&mut self, book: BookId, tags: Vec<String>) {
        assert!(!tags.is_empty(), "tag list for book {book} is empty");
        self.tags.insert(book, tags);
    }

    pub fn tags(&self, book: BookId) -> Option<&[String]> {
        self.tags.get(&book).map(Vec::as_slice)
    }

    /// The book's first (primary) tag.
    pub fn first_tag(&self, book: BookId) -> Option<&str> {
        self.tags.get(&book)?.first().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Result of parsing ratings text: the matrix plus the number of duplicate
/// (user, book) lines that were overwritten (last occurrence wins).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRatings {
    pub matrix: RatingMatrix,
    pub duplicates: usize,
}

/// Parses `user<TAB>book<TAB>score` lines. Empty lines and lines starting
/// with `#` are ignored.
pub fn parse_ratings(text: &str) -> Result<ParsedRatings, RatingsError> {
    let mut matrix = RatingMatrix::new();
    let mut duplicates = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (user, book, score) = match (fields.next(), fields.next(), fields.next(), fields.next())
        {
            (Some(u), Some(b), Some(s), None) => (u, b, s),
            _ => return Err(RatingsError::MalformedLine(line_no)),
        };
        let user: UserId = user
            .parse()
            .map_err(|_| RatingsError::MalformedLine(line_no))?;
        let book: BookId = book
            .parse()
            .map_err(|_| RatingsError::MalformedLine(line_no))?;
        let score: i64 = score
            .parse()
            .map_err(|_| RatingsError::MalformedLine(line_no))?;
        if !(i64::from(MIN_SCORE)..=i64::from(MAX_SCORE)).contains(&score) {
            return Err(RatingsError::ScoreOutOfRange(line_no));
        }
        if matrix.insert(user, book, score as Score).is_some() {
            duplicates += 1;
        }
    }
    Ok(ParsedRatings { matrix, duplicates })
}

/// Parses `book<TAB>tag1,tag2,...` lines. Empty lines and `#` comments are
/// ignored; tags keep file order.
pub fn parse_tags(text: &str) -> Result<TagCatalog, RatingsError> {
    let mut catalog = TagCatalog::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (book, tags) = match (fields.next(), fields.next(), fields.next()) {
            (Some(b), Some(t), None) => (b, t),
            _ => return Err(RatingsError::MalformedLine(line_no)),
        };
        let book: BookId = book
            .parse()
            .map_err(|_| RatingsError::MalformedLine(line_no))?;
        let tags: Vec<String> = tags
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from)
            .collect();
        if tags.is_empty() {
            return Err(RatingsError::EmptyTagList(line_no));
        }
        catalog.insert(book, tags);
    }
    Ok(catalog)
}

/// Disjoint train/test partition of a rating matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: RatingMatrix,
    pub test: RatingMatrix,
    pub seed: u64,
    pub test_fraction: f64,
}

/// Deterministic per-user stratified holdout split.
///
/// Each user's entries are shuffled with a seeded RNG and a `test_fraction`
/// share (rounded half-up) moves to the test side, except that a user with
/// two or more ratings always keeps at least one in train, and a user with a
/// single rating keeps it in train regardless of the fraction.
pub fn holdout_split(
    matrix: &RatingMatrix,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitPair, RatingsError> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(RatingsError::InvalidFraction);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = RatingMatrix::new();
    let mut test = RatingMatrix::new();
    for user in matrix.users().collect::<Vec<_>>() {
        let ratings = matrix.user_ratings(user).expect("user listed");
        let mut entries: Vec<(BookId, Score)> =
            ratings.iter().map(|(&b, &s)| (b, s)).collect();
        entries.shuffle(&mut rng);
        let count = entries.len();
        let desired = libm::floor(test_fraction * count as f64 + 0.5) as usize;
        let take = desired.min(count.saturating_sub(1));
        for (i, (book, score)) in entries.into_iter().enumerate() {
            if i < take {
                test.insert(user, book, score);
            } else {
                train.insert(user, book, score);
            }
        }
    }
    Ok(SplitPair {
        train,
        test,
        seed,
        test_fraction,
    })
}
