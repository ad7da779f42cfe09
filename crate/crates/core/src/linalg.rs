//! Small dense real linear algebra: SVD-based rank, pseudoinverse and nullspace.

use nalgebra::{DMatrix, DVector};

pub type RealMatrix = DMatrix<f64>;
pub type RealVector = DVector<f64>;

/// Full singular value decomposition `M = U Σ Vᵀ`, singular values descending.
///
/// nalgebra's SVD loses accuracy on exactly rank-deficient inputs, which the
/// OMP systems always are, so this goes through faer.
struct FullSvd {
    u: RealMatrix,
    singular: Vec<f64>,
    v_t: RealMatrix,
}

fn full_svd(m: &RealMatrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let svd = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)])
        .svd()
        .expect("SVD of a finite matrix converges");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    FullSvd {
        u: RealMatrix::from_fn(rows, rows, |i, j| u[(i, j)]),
        singular: (0..rows.min(cols)).map(|k| s[k]).collect(),
        v_t: RealMatrix::from_fn(cols, cols, |i, j| v[(j, i)]),
    }
}

fn threshold(singular: &[f64], rank_tol: f64) -> f64 {
    let max = singular.iter().copied().fold(0.0, f64::max);
    rank_tol * max
}

fn is_kept(sigma: f64, cutoff: f64) -> bool {
    sigma > cutoff && sigma > 0.0
}

/// Numerical rank with the relative cutoff `rank_tol * sigma_max`.
pub fn rank(m: &RealMatrix, rank_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let svd = full_svd(m);
    let cutoff = threshold(&svd.singular, rank_tol);
    svd.singular.iter().filter(|&&s| is_kept(s, cutoff)).count()
}

/// Moore–Penrose pseudoinverse.
pub fn pinv(m: &RealMatrix, rank_tol: f64) -> RealMatrix {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return RealMatrix::zeros(cols, rows);
    }
    let svd = full_svd(m);
    let cutoff = threshold(&svd.singular, rank_tol);
    let mut out = RealMatrix::zeros(cols, rows);
    for (k, &sigma) in svd.singular.iter().enumerate() {
        if !is_kept(sigma, cutoff) || k >= svd.u.ncols() {
            continue;
        }
        let v = svd.v_t.row(k).transpose();
        let u = svd.u.column(k);
        out += (v * u.transpose()) / sigma;
    }
    out
}

/// Orthonormal basis of `{x : M x = 0}`.
pub fn nullspace(m: &RealMatrix, rank_tol: f64) -> Vec<RealVector> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return (0..cols)
            .map(|i| RealVector::from_fn(cols, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
    }
    let svd = full_svd(m);
    let cutoff = threshold(&svd.singular, rank_tol);
    (0..cols)
        .filter(|&k| k >= svd.singular.len() || !is_kept(svd.singular[k], cutoff))
        .map(|k| svd.v_t.row(k).transpose())
        .collect()
}

/// Stacks the rows of `top` above the rows of `bottom`.
pub fn vstack(top: &RealMatrix, bottom: &RealMatrix) -> RealMatrix {
    assert_eq!(top.ncols(), bottom.ncols(), "column count mismatch");
    let mut out = RealMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.view_mut((0, 0), top.shape()).copy_from(top);
    out.view_mut((top.nrows(), 0), bottom.shape())
        .copy_from(bottom);
    out
}

pub fn max_abs(v: &RealVector) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
