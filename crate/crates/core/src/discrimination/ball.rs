//! Smallest ball enclosing a family of balls.
//!
//! With `K = κ₀ I + κ·σ`, the constraint `K ⪰ q_x ρ_x` reads
//! `κ₀ ≥ q_x/2 + |κ − q_x v_x / 2|`: the ball of radius `κ₀` around `κ` must
//! contain the ball of radius `q_x/2` around `q_x v_x/2`. Minimising `tr K` is
//! therefore the smallest enclosing ball of balls, a convex problem in three
//! variables. A Polyak-step subgradient run locates the optimum roughly; the
//! support set is then recovered exactly by solving the tangency equations on
//! subsets of the near-active balls and certifying the first-order condition.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::bloch::Vec3;
use crate::discrimination::weights::nonnegative_min_norm;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Ball {
    pub center: Vec3,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Enclosing {
    pub center: Vec3,
    pub radius: f64,
    pub iterations: usize,
}

pub(crate) const MAX_ITERATIONS: usize = 100_000;
const LOCATE_ITERATIONS: usize = 4_000;
const CERTIFICATE_TOL: f64 = 1e-9;

fn objective(balls: &[Ball], kappa: &Vec3) -> (f64, usize) {
    balls
        .iter()
        .enumerate()
        .map(|(i, b)| (b.radius + (kappa - b.center).norm(), i))
        .fold((f64::NEG_INFINITY, 0), |acc, v| if v.0 > acc.0 { v } else { acc })
}

/// Rough minimiser of `max_x (a_x + |κ − c_x|)` by subgradient descent with
/// Polyak steps against a shrinking estimate of the optimum.
fn locate(balls: &[Ball], iterations: usize) -> (Vec3, f64, usize) {
    let n = balls.len() as f64;
    let mut kappa = balls.iter().fold(Vec3::zeros(), |s, b| s + b.center) / n;
    let (mut f, _) = objective(balls, &kappa);
    let mut best = (kappa, f);
    let scale = balls
        .iter()
        .map(|b| b.radius + b.center.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut used = 0;
    for k in 0..iterations {
        used = k + 1;
        let (value, arg) = objective(balls, &kappa);
        f = value;
        if f < best.1 {
            best = (kappa, f);
        }
        let diff = kappa - balls[arg].center;
        let len = diff.norm();
        if len <= 1e-15 * scale {
            // κ sits on the centre of the dominating ball: nothing can do better.
            best = (kappa, f);
            break;
        }
        let g = diff / len;
        let target = best.1 - scale / (k as f64 + 10.0);
        let step = f - target;
        if step <= 1e-16 * scale {
            break;
        }
        kappa -= g * step;
    }
    (best.0, best.1, used)
}

/// Ball internally tangent to every ball in `subset`, with centre in the
/// affine hull of their centres. Returns up to two candidates.
fn tangent_candidates(balls: &[Ball], subset: &[usize]) -> Vec<(Vec3, f64)> {
    let b0 = balls[subset[0]];
    let max_radius = subset
        .iter()
        .map(|&i| balls[i].radius)
        .fold(f64::NEG_INFINITY, f64::max);
    if subset.len() == 1 {
        return vec![(b0.center, b0.radius)];
    }
    let k = subset.len() - 1;
    let e: Vec<Vec3> = subset[1..]
        .iter()
        .map(|&i| balls[i].center - b0.center)
        .collect();
    let gram = DMatrix::from_fn(k, k, |i, j| 2.0 * e[i].dot(&e[j]));
    let rhs0 = DVector::from_fn(k, |i, _| {
        let bi = balls[subset[i + 1]];
        bi.center.norm_squared() - b0.center.norm_squared() - bi.radius.powi(2)
            + b0.radius.powi(2)
            - 2.0 * b0.center.dot(&e[i])
    });
    let rhs_r = DVector::from_fn(k, |i, _| 2.0 * (balls[subset[i + 1]].radius - b0.radius));

    let svd = gram.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax <= 0.0 || svd.singular_values.min() <= 1e-12 * smax {
        return Vec::new();
    }
    let (Ok(mu0), Ok(mu1)) = (svd.solve(&rhs0, 0.0), svd.solve(&rhs_r, 0.0)) else {
        return Vec::new();
    };
    let combine = |mu: &DVector<f64>| e.iter().zip(mu.iter()).fold(Vec3::zeros(), |s, (v, m)| s + v * *m);
    let p0 = combine(&mu0);
    let p1 = combine(&mu1);

    // |p0 + R p1|² = (R − a0)²
    let a = p1.norm_squared() - 1.0;
    let b = 2.0 * p0.dot(&p1) + 2.0 * b0.radius;
    let c = p0.norm_squared() - b0.radius.powi(2);
    let mut roots = Vec::with_capacity(2);
    if a.abs() <= 1e-14 * (1.0 + b.abs()) {
        if b.abs() > 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < -1e-14 * (b * b).max(1e-30) {
            return Vec::new();
        }
        let sq = disc.max(0.0).sqrt();
        let qq = -0.5 * (b + b.signum() * sq);
        if qq != 0.0 {
            roots.push(qq / a);
            roots.push(c / qq);
        } else {
            roots.push(-b / (2.0 * a));
        }
    }
    roots
        .into_iter()
        .filter(|r| r.is_finite() && *r >= max_radius - 1e-14)
        .map(|r| (b0.center + p0 + p1 * r, r))
        .collect()
}

/// Radius actually needed around `center`, if it is within rounding of the
/// tangency solution `radius`. Nearly nested balls make the tangency
/// quadratic lose digits, so the candidate is rescored rather than rejected.
fn enclosing_radius(balls: &[Ball], center: &Vec3, radius: f64) -> Option<f64> {
    let (needed, _) = objective(balls, center);
    (needed <= radius + 1e-9 * radius.abs().max(1.0)).then_some(needed)
}

/// First-order optimality: zero lies in the convex hull of the outward
/// gradients of the active constraints.
fn is_certified(balls: &[Ball], subset: &[usize], center: &Vec3) -> bool {
    let mut dirs = Vec::with_capacity(subset.len());
    for &i in subset {
        let d = center - balls[i].center;
        let len = d.norm();
        if len <= 1e-13 {
            return true;
        }
        dirs.push(d / len);
    }
    nonnegative_min_norm(&dirs, CERTIFICATE_TOL).is_some()
}

fn refine(balls: &[Ball], candidates: &[usize]) -> Option<(Vec3, f64)> {
    let mut best: Option<(Vec3, f64)> = None;
    for size in 1..=candidates.len().min(4) {
        for subset in candidates.iter().copied().combinations(size) {
            for (center, radius) in tangent_candidates(balls, &subset) {
                let Some(radius) = enclosing_radius(balls, &center, radius) else {
                    continue;
                };
                if best.is_some_and(|(_, r)| radius >= r) {
                    continue;
                }
                if is_certified(balls, &subset, &center) {
                    best = Some((center, radius));
                }
            }
        }
    }
    best
}

pub(crate) fn smallest_enclosing(balls: &[Ball], max_iterations: usize) -> Option<Enclosing> {
    let budget = max_iterations.min(LOCATE_ITERATIONS);
    let (kappa, f, iterations) = locate(balls, budget);
    let values: Vec<f64> = balls
        .iter()
        .map(|b| b.radius + (kappa - b.center).norm())
        .collect();
    let mut window = 1e-3 * f.abs().max(1e-3);
    loop {
        let candidates: Vec<usize> = (0..balls.len())
            .filter(|&i| values[i] >= f - window)
            .collect();
        if let Some((center, radius)) = refine(balls, &candidates) {
            return Some(Enclosing {
                center,
                radius,
                iterations,
            });
        }
        if candidates.len() == balls.len() {
            return None;
        }
        window *= 10.0;
    }
}
