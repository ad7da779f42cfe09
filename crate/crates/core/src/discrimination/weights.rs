//! Nonnegative minimum-norm solutions of `Σ λ_i d_i = 0`, `Σ λ_i = 1`.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::bloch::Vec3;

/// Supports are enumerated exhaustively up to this many vectors; beyond it
/// only supports of at most four vectors are tried (Carathéodory guarantees
/// a feasible one exists among them, but not the minimum-norm one).
const EXHAUSTIVE_LIMIT: usize = 14;

fn system(dirs: &[Vec3], support: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(4, support.len(), |r, c| {
        if r < 3 {
            dirs[support[c]][r]
        } else {
            1.0
        }
    })
}

fn target() -> DVector<f64> {
    DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0])
}

/// Residual of the completeness system for explicit weights.
pub(crate) fn completeness_residual(dirs: &[Vec3], lambda: &[f64]) -> f64 {
    let sum: Vec3 = dirs
        .iter()
        .zip(lambda)
        .fold(Vec3::zeros(), |s, (d, l)| s + d * *l);
    let total: f64 = lambda.iter().sum();
    sum.amax().max((total - 1.0).abs())
}

fn solve_support(dirs: &[Vec3], support: &[usize], tol: f64) -> Option<DVector<f64>> {
    let a = system(dirs, support);
    let svd = a.clone().svd(true, true);
    let lambda = svd.solve(&target(), 1e-12).ok()?;
    let residual = (&a * &lambda - target()).amax();
    if residual > tol || lambda.iter().any(|&l| l < -tol) {
        return None;
    }
    Some(lambda)
}

/// Best residual achievable without the sign constraint, for error reports.
pub(crate) fn least_squares_residual(dirs: &[Vec3]) -> f64 {
    let support: Vec<usize> = (0..dirs.len()).collect();
    let a = system(dirs, &support);
    let svd = a.clone().svd(true, true);
    match svd.solve(&target(), 1e-12) {
        Ok(l) => (&a * &l - target()).amax(),
        Err(_) => f64::INFINITY,
    }
}

/// Minimum-norm `λ ≥ 0` with `Σ λ_i d_i = 0` and `Σ λ_i = 1`, or `None` when
/// the system has no nonnegative solution within `tol`.
pub(crate) fn nonnegative_min_norm(dirs: &[Vec3], tol: f64) -> Option<Vec<f64>> {
    let m = dirs.len();
    if m == 0 {
        return None;
    }
    let max_size = if m <= EXHAUSTIVE_LIMIT { m } else { 4 };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for size in 1..=max_size {
        for support in (0..m).combinations(size) {
            let Some(local) = solve_support(dirs, &support, tol) else {
                continue;
            };
            let norm = local.norm_squared();
            if best.as_ref().is_none_or(|(b, _)| norm < *b - 1e-15) {
                let mut full = vec![0.0; m];
                for (k, &i) in support.iter().enumerate() {
                    full[i] = local[k].max(0.0);
                }
                best = Some((norm, full));
            }
        }
    }
    best.map(|(_, l)| l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antipodal_pair_splits_evenly() {
        let l = nonnegative_min_norm(&[Vec3::z(), -Vec3::z()], 1e-9).unwrap();
        assert!((l[0] - 0.5).abs() < 1e-14 && (l[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn square_prefers_uniform_weights() {
        let dirs = [Vec3::z(), -Vec3::z(), Vec3::x(), -Vec3::x()];
        let l = nonnegative_min_norm(&dirs, 1e-9).unwrap();
        for v in l {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn one_sided_directions_are_infeasible() {
        assert!(nonnegative_min_norm(&[Vec3::z(), Vec3::x()], 1e-9).is_none());
        assert!(least_squares_residual(&[Vec3::z(), Vec3::x()]) > 0.1);
    }

    #[test]
    fn zero_direction_takes_all_weight() {
        let l = nonnegative_min_norm(&[Vec3::zeros(), Vec3::x()], 1e-9).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-14);
        assert!(l[1].abs() < 1e-14);
    }
}
