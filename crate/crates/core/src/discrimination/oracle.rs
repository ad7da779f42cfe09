//! Independent lower bound on the guessing probability by random search over
//! valid POVMs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bloch::Vec3;
use crate::ensemble::Ensemble;

pub(crate) fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm_squared();
        if n > 1e-6 && n <= 1.0 {
            return v / n.sqrt();
        }
    }
}

/// Success probability of the POVM `{(w_k/2)(I + n_k·σ)}` when every outcome
/// is mapped to the state it favours most.
fn best_assignment(ensemble: &Ensemble, elements: &[(f64, Vec3)]) -> f64 {
    elements
        .iter()
        .map(|(w, n)| {
            ensemble
                .states()
                .iter()
                .map(|s| s.q * w / 2.0 * (1.0 + n.dot(&s.bloch)))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

fn random_povm<R: Rng>(rng: &mut R) -> Vec<(f64, Vec3)> {
    let outcomes = rng.gen_range(2..=4);
    if outcomes == 2 {
        let n = random_unit(rng);
        return vec![(1.0, n), (1.0, -n)];
    }
    // Free elements with random weights, then one element that balances the
    // Bloch vectors; the whole set is rescaled to total weight 2.
    let mut elements: Vec<(f64, Vec3)> = (0..outcomes - 1)
        .map(|_| (rng.gen_range(0.05..1.0), random_unit(rng)))
        .collect();
    let sum = elements
        .iter()
        .fold(Vec3::zeros(), |s, (w, n)| s + n * *w);
    let len = sum.norm();
    if len > 1e-12 {
        elements.push((len, -sum / len));
    }
    let total: f64 = elements.iter().map(|(w, _)| w).sum();
    for e in &mut elements {
        e.0 *= 2.0 / total;
    }
    elements
}

/// Best success probability among `samples` random POVMs: projective
/// two-outcome ones and weighted three- or four-outcome ones. Never exceeds
/// the true guessing probability.
pub fn oracle_random_search(ensemble: &Ensemble, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Always guessing the most likely state is a valid (trivial) POVM.
    let mut best = ensemble
        .states()
        .iter()
        .map(|s| s.q)
        .fold(0.0, f64::max);
    for _ in 0..samples.max(1) {
        let p = best_assignment(ensemble, &random_povm(&mut rng));
        if p > best {
            best = p;
        }
    }
    best
}
