#![allow(dead_code)]

use ompkit::{Ensemble, Tolerances, Vec3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Bloch vector with length in `[r_min, 1]`.
pub fn bloch(rng: &mut ChaCha8Rng, r_min: f64) -> Vec3 {
    unit(rng) * rng.gen_range(r_min..=1.0)
}

pub fn priors(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|q| q / total).collect()
}

pub fn ensemble(rng: &mut ChaCha8Rng, n: usize, equal: bool, r_min: f64) -> Ensemble {
    let tol = Tolerances::default();
    let q = if equal { vec![1.0 / n as f64; n] } else { priors(rng, n) };
    Ensemble::from_pairs(q.into_iter().map(|q| (q, bloch(rng, r_min))), &tol).unwrap()
}

pub fn pure_ensemble(rng: &mut ChaCha8Rng, n: usize, equal: bool) -> Ensemble {
    ensemble(rng, n, equal, 1.0)
}
