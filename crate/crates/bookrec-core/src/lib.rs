//! Core algorithms for a book recommendation pipeline.
//!
//! Three stages share this crate:
//!
//! 1. [`ahp`] and [`fuzzy`] derive criterion weights from pairwise
//!    comparison matrices and score alternatives against a grade scale.
//! 2. [`cluster`] groups users by an ant-colony grid process and predicts
//!    unrated scores from neighbor clusters; [`cf`] has a complementary
//!    tag-based nearest-neighbor predictor.
//! 3. [`cf`] and [`blend`] run entropy-similarity collaborative filtering,
//!    blend the two predictors, and evaluate top-N hitrate.
//!
//! The crate is `no_std` (with `alloc`); all file IO, serialization, and
//! the CLI live in the companion `bookrec` crate. Every randomized routine
//! takes an explicit seed and is deterministic for fixed inputs.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod ahp;
pub mod blend;
pub mod cf;
pub mod cluster;
pub mod fuzzy;
pub mod ratings;
pub mod similarity;
pub mod synthetic;

pub use ratings::{BookId, RatingMatrix, Score, SplitPair, TagCatalog, UserId};
