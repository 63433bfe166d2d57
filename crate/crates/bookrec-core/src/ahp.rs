//! Pairwise-comparison weighting. A reciprocal judgment matrix is reduced to
//! a weight vector by column normalization and row averaging, checked for
//! consistency via an estimated principal eigenvalue, and two-level weight
//! hierarchies are composed by multiplying parent and child weights.

use alloc::vec::Vec;

/// Random consistency index by matrix order (1..=10). Orders 1 and 2 are
/// always consistent.
const RANDOM_INDEX: [f64; 10] = [0.0, 0.0, 0.52, 0.89, 1.12, 1.26, 1.36, 1.41, 1.46, 1.49];

/// Acceptable consistency means `cr` below this bound.
pub const CONSISTENCY_BOUND: f64 = 0.1;

const RECIPROCAL_TOLERANCE: f64 = 1e-9;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AhpError {
    #[error("matrix must be square and non-empty")]
    ShapeMismatch,
    #[error("entry at ({row}, {col}) must be a positive finite number")]
    NonPositive { row: usize, col: usize },
    #[error("entry at ({row}, {col}) is not the reciprocal of its mirror")]
    NonReciprocal { row: usize, col: usize },
    #[error("no random consistency index for order {0}")]
    UnknownOrder(usize),
    #[error("weights must be positive and sum to 1")]
    InvalidWeights,
}

/// Square matrix of pairwise importance judgments. Entry `(i, j)` says how
/// much more important criterion `i` is than criterion `j`, so the mirror
/// entry must be its reciprocal and the diagonal all ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    cells: Vec<Vec<f64>>,
}

impl ComparisonMatrix {
    pub fn new(cells: Vec<Vec<f64>>) -> Result<Self, AhpError> {
        let n = cells.len();
        if n == 0 || cells.iter().any(|row| row.len() != n) {
            return Err(AhpError::ShapeMismatch);
        }
        for (i, row) in cells.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !(x.is_finite() && x > 0.0) {
                    return Err(AhpError::NonPositive { row: i, col: j });
                }
            }
        }
        // Mirrored (i, j)/(j, i) access; iterator forms cannot express it.
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i..n {
                if libm::fabs(cells[j][i] - 1.0 / cells[i][j]) > RECIPROCAL_TOLERANCE {
                    return Err(AhpError::NonReciprocal { row: j, col: i });
                }
            }
        }
        Ok(Self { cells })
    }

    pub fn order(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> f64 {
        self.cells[row][col]
    }
}

/// Positive weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, AhpError> {
        if weights.is_empty() || weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(AhpError::InvalidWeights);
        }
        let sum: f64 = weights.iter().sum();
        if libm::fabs(sum - 1.0) > WEIGHT_SUM_TOLERANCE {
            return Err(AhpError::InvalidWeights);
        }
        Ok(Self { weights })
    }

    pub fn values(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Consistency diagnostics for a judgment matrix and its weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub acceptable: bool,
}

/// Weight of each criterion: every column is normalized to sum 1, then each
/// row is averaged. The output sums to 1 up to rounding.
pub fn ahp_weights(a: &ComparisonMatrix) -> WeightVector {
    let n = a.order();
    let mut col_sums = alloc::vec![0.0; n];
    for (j, sum) in col_sums.iter_mut().enumerate() {
        for i in 0..n {
            *sum += a.cell(i, j);
        }
    }
    let weights = (0..n)
        .map(|i| {
            let mut row = 0.0;
            for (j, &sum) in col_sums.iter().enumerate() {
                row += a.cell(i, j) / sum;
            }
            row / n as f64
        })
        .collect();
    WeightVector { weights }
}

/// Estimates the principal eigenvalue as the mean of `(A·w)_i / w_i` and
/// derives the consistency index and ratio from it. Orders 1 and 2 cannot be
/// inconsistent, so their ratio is 0 by definition.
pub fn consistency_check(
    a: &ComparisonMatrix,
    w: &WeightVector,
) -> Result<ConsistencyReport, AhpError> {
    let n = a.order();
    if w.len() != n {
        return Err(AhpError::ShapeMismatch);
    }
    if n > RANDOM_INDEX.len() {
        return Err(AhpError::UnknownOrder(n));
    }
    let weights = w.values();
    let mut ratio_sum = 0.0;
    for i in 0..n {
        let mut aw = 0.0;
        for (j, &wj) in weights.iter().enumerate() {
            aw += a.cell(i, j) * wj;
        }
        ratio_sum += aw / weights[i];
    }
    let lambda_max = ratio_sum / n as f64;
    let ci = if n >= 2 {
        (lambda_max - n as f64) / (n as f64 - 1.0)
    } else {
        0.0
    };
    let ri = RANDOM_INDEX[n - 1];
    let cr = if n <= 2 { 0.0 } else { ci / ri };
    Ok(ConsistencyReport {
        lambda_max,
        ci,
        ri,
        cr,
        acceptable: cr < CONSISTENCY_BOUND,
    })
}

/// Global weight of each leaf criterion: the parent weight times the child
/// weight, concatenated in parent order. Children must line up with the
/// parent one to one.
pub fn compose_global_weights(
    parent: &WeightVector,
    children: &[WeightVector],
) -> Result<WeightVector, AhpError> {
    if parent.len() != children.len() {
        return Err(AhpError::ShapeMismatch);
    }
    let mut weights = Vec::new();
    for (&a, child) in parent.values().iter().zip(children) {
        for &b in child.values() {
            weights.push(a * b);
        }
    }
    WeightVector::new(weights)
}
