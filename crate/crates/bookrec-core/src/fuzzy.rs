//! Fuzzy comprehensive evaluation. Expert judgments arrive as a membership
//! matrix (each criterion row distributes belief over grades); weighting the
//! rows and averaging grade scores yields one composite score.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ahp::WeightVector;

const ROW_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FuzzyError {
    #[error("weight, membership, and grade dimensions must line up")]
    ShapeMismatch,
    #[error("membership at ({row}, {col}) must lie in [0, 1]")]
    InvalidMembership { row: usize, col: usize },
    #[error("membership row {0} must sum to 1")]
    RowNotNormalized(usize),
    #[error("grade scores must be strictly decreasing")]
    GradesNotDecreasing,
}

/// Ordered grading scale: labels with strictly decreasing scores.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeScale {
    labels: Vec<String>,
    scores: Vec<f64>,
}

impl GradeScale {
    pub fn new(labels: Vec<String>, scores: Vec<f64>) -> Result<Self, FuzzyError> {
        if labels.is_empty() || labels.len() != scores.len() {
            return Err(FuzzyError::ShapeMismatch);
        }
        if scores.windows(2).any(|pair| pair[0] <= pair[1]) {
            return Err(FuzzyError::GradesNotDecreasing);
        }
        Ok(Self { labels, scores })
    }

    /// Four-grade percentage scale.
    pub fn standard() -> Self {
        Self {
            labels: ["excellent", "good", "medium", "poor"]
                .map(String::from)
                .to_vec(),
            scores: alloc::vec![100.0, 75.0, 60.0, 35.0],
        }
    }

    /// Five-point survey scale, best to worst.
    pub fn survey() -> Self {
        Self {
            labels: ["5", "4", "3", "2", "1"].map(String::from).to_vec(),
            scores: alloc::vec![5.0, 4.0, 3.0, 2.0, 1.0],
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// One row per criterion distributing that criterion's judgment over the
/// grades; every row sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    rows: Vec<Vec<f64>>,
}

impl MembershipMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, FuzzyError> {
        let Some(width) = rows.first().map(Vec::len) else {
            return Err(FuzzyError::ShapeMismatch);
        };
        if width == 0 || rows.iter().any(|row| row.len() != width) {
            return Err(FuzzyError::ShapeMismatch);
        }
        for (i, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            for (j, &x) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&x) {
                    return Err(FuzzyError::InvalidMembership { row: i, col: j });
                }
                sum += x;
            }
            if libm::fabs(sum - 1.0) > ROW_SUM_TOLERANCE {
                return Err(FuzzyError::RowNotNormalized(i));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn criterion_count(&self) -> usize {
        self.rows.len()
    }

    pub fn grade_count(&self) -> usize {
        self.rows[0].len()
    }
}

/// Weighted-average membership per grade: `b_j = Σ_i w_i·r_ij`.
pub fn fuzzy_grade_distribution(
    w: &WeightVector,
    r: &MembershipMatrix,
) -> Result<Vec<f64>, FuzzyError> {
    if w.len() != r.criterion_count() {
        return Err(FuzzyError::ShapeMismatch);
    }
    let mut b = alloc::vec![0.0; r.grade_count()];
    for (&wi, row) in w.values().iter().zip(r.rows()) {
        for (bj, &rij) in b.iter_mut().zip(row) {
            *bj += wi * rij;
        }
    }
    Ok(b)
}

/// Composite score: the grade distribution dotted with the grade scores.
/// Always lies between the lowest and highest grade score.
pub fn fuzzy_composite_score(
    w: &WeightVector,
    r: &MembershipMatrix,
    g: &GradeScale,
) -> Result<f64, FuzzyError> {
    if r.grade_count() != g.len() {
        return Err(FuzzyError::ShapeMismatch);
    }
    let b = fuzzy_grade_distribution(w, r)?;
    Ok(b.iter().zip(g.scores()).map(|(&bj, &gj)| bj * gj).sum())
}
