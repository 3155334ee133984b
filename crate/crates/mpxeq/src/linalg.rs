//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Condition numbers above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

pub fn ones(n: usize) -> Vector {
    Vector::from_element(n, 1.0)
}

/// Maximum absolute column sum.
pub fn norm1(a: &Mat) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// LU inverse together with the exact 1-norm condition number.
/// Returns `Err(cond)` when the matrix is singular or too ill-conditioned.
pub fn checked_inverse(a: &Mat) -> Result<(Mat, f64), f64> {
    let inv = match a.clone().lu().try_inverse() {
        Some(inv) => inv,
        None => return Err(f64::INFINITY),
    };
    let cond = norm1(a) * norm1(&inv);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(cond);
    }
    Ok((inv, cond))
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(a: &Mat, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// `1 - cos(a, b)`. Two zero vectors count as parallel; a zero vector
/// against a nonzero one as orthogonal.
pub fn cosine_dissimilarity(a: &Vector, b: &Vector) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 && nb == 0.0 {
        return 0.0;
    }
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    (1.0 - a.dot(b) / (na * nb)).max(0.0)
}

/// Row-major nested vectors from a matrix.
pub fn to_rows(a: &Mat) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().cloned().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Mat {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(nrows, ncols, |i, j| rows[i][j])
}

/// Stack per-good vectors as the rows of an `s x n` matrix.
pub fn stack_rows(rows: &[Vector]) -> Mat {
    let n = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(rows.len(), n, |s, i| rows[s][i])
}
