//! Prior-weighted qubit ensembles and their pairwise Helstrom data.

use serde::{Deserialize, Serialize};

use crate::bloch::{Herm2, Tolerances, Vec3};
use crate::error::{OmpError, Result};

/// Priors whose sum misses 1 by less than this are renormalized silently.
pub const PRIOR_DRIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedState {
    pub q: f64,
    pub bloch: Vec3,
}

/// A validated ensemble `{q_x, ρ_x}`: priors are positive and sum to one,
/// every Bloch vector lies in the unit ball, and there are at least two states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    states: Vec<WeightedState>,
}

/// `h_xy = q_x ρ_x − q_y ρ_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelstromPair {
    pub x: usize,
    pub y: usize,
    pub h: Herm2,
    /// `q_x v_x − q_y v_y`, which equals `2·beta(h)`.
    pub h_vec: Vec3,
}

impl Ensemble {
    pub fn validate(raw: Vec<WeightedState>, tol: &Tolerances) -> Result<Self> {
        if raw.len() < 2 {
            return Err(OmpError::TooFewStates(raw.len()));
        }
        for (i, s) in raw.iter().enumerate() {
            if !(s.q > 0.0 && s.q.is_finite()) {
                return Err(OmpError::BadPriors(format!(
                    "prior of state {i} must be positive, got {}",
                    s.q
                )));
            }
            let norm = s.bloch.norm();
            if !norm.is_finite() || norm > 1.0 + tol.psd_tol {
                return Err(OmpError::BlochOutOfBall { norm });
            }
        }
        let total: f64 = raw.iter().map(|s| s.q).sum();
        let drift = (total - 1.0).abs();
        if drift >= PRIOR_DRIFT_TOL {
            return Err(OmpError::BadPriors(format!("priors sum to {total}")));
        }
        let states = raw
            .into_iter()
            .map(|s| WeightedState {
                q: s.q / total,
                bloch: s.bloch,
            })
            .collect();
        Ok(Self { states })
    }

    /// Builds an ensemble from `(prior, Bloch vector)` pairs.
    pub fn from_pairs<I>(pairs: I, tol: &Tolerances) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec3)>,
    {
        Self::validate(
            pairs
                .into_iter()
                .map(|(q, bloch)| WeightedState { q, bloch })
                .collect(),
            tol,
        )
    }

    /// Equal priors over the given Bloch vectors.
    pub fn equiprobable(blochs: &[Vec3], tol: &Tolerances) -> Result<Self> {
        let q = 1.0 / blochs.len() as f64;
        Self::from_pairs(blochs.iter().map(|v| (q, *v)), tol)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[WeightedState] {
        &self.states
    }

    pub fn prior(&self, x: usize) -> f64 {
        self.states[x].q
    }

    pub fn bloch(&self, x: usize) -> Vec3 {
        self.states[x].bloch
    }

    /// `q_x ρ_x` in Bloch form.
    pub fn weighted(&self, x: usize) -> Herm2 {
        let s = &self.states[x];
        Herm2::new(s.q / 2.0, s.bloch * (s.q / 2.0))
    }

    pub fn is_equiprobable(&self, tol: f64) -> bool {
        let q0 = self.states[0].q;
        self.states.iter().all(|s| (s.q - q0).abs() <= tol)
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            Err(OmpError::IndexOutOfRange {
                index,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn helstrom(&self, x: usize, y: usize) -> Result<HelstromPair> {
        self.check_index(x)?;
        self.check_index(y)?;
        if x == y {
            return Err(OmpError::SameIndex(x));
        }
        let h = self.weighted(x) - self.weighted(y);
        let (sx, sy) = (&self.states[x], &self.states[y]);
        Ok(HelstromPair {
            x,
            y,
            h,
            h_vec: sx.bloch * sx.q - sy.bloch * sy.q,
        })
    }

    /// Removes state `drop` and renormalizes the remaining priors by
    /// `r = 1 − q_drop`. The returned `r` rescales the dual data:
    /// `K' = K/r`, `P_g' = P_g/r`, `r'_x = r_x/r`.
    pub fn reduce_unidentified(&self, drop: usize) -> Result<(Ensemble, f64)> {
        self.check_index(drop)?;
        if self.len() < 3 {
            return Err(OmpError::TooFewStates(self.len() - 1));
        }
        let r: f64 = self
            .states
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, s)| s.q)
            .sum();
        let states = self
            .states
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, s)| WeightedState {
                q: s.q / r,
                bloch: s.bloch,
            })
            .collect();
        Ok((Ensemble { states }, r))
    }

    /// The ensemble `{q_x, N[ρ_x]}` after a map `v ↦ f(v)` on Bloch vectors.
    pub fn map_states<F>(&self, f: F, tol: &Tolerances) -> Result<Ensemble>
    where
        F: Fn(&Vec3) -> Vec3,
    {
        Self::validate(
            self.states
                .iter()
                .map(|s| WeightedState {
                    q: s.q,
                    bloch: f(&s.bloch),
                })
                .collect(),
            tol,
        )
    }
}

/// Ensembles used as worked examples throughout the crate.
pub mod presets {
    use super::*;

    fn build(pairs: Vec<(f64, Vec3)>) -> Ensemble {
        Ensemble::from_pairs(pairs, &Tolerances::default()).expect("preset ensembles are valid")
    }

    /// The two eigenstates of Z with priors `q1` and `1 − q1`.
    pub fn one_basis(q1: f64) -> Ensemble {
        build(vec![(q1, Vec3::z()), (1.0 - q1, -Vec3::z())])
    }

    /// BB84: ±z then ±x, priors 1/4.
    pub fn bb84() -> Ensemble {
        build(
            [Vec3::z(), -Vec3::z(), Vec3::x(), -Vec3::x()]
                .into_iter()
                .map(|v| (0.25, v))
                .collect(),
        )
    }

    /// Six-state ensemble: ±z, ±x, ±y with priors 1/6.
    pub fn three_mubs() -> Ensemble {
        build(
            [
                Vec3::z(),
                -Vec3::z(),
                Vec3::x(),
                -Vec3::x(),
                Vec3::y(),
                -Vec3::y(),
            ]
            .into_iter()
            .map(|v| (1.0 / 6.0, v))
            .collect(),
        )
    }

    /// Tetrahedral (SIC) states with priors 1/4.
    pub fn sic() -> Ensemble {
        let s2 = 2f64.sqrt();
        let s23 = (2.0f64 / 3.0).sqrt();
        build(
            [
                Vec3::new(0.0, 0.0, 1.0),
                Vec3::new(2.0 * s2 / 3.0, 0.0, -1.0 / 3.0),
                Vec3::new(-s2 / 3.0, s23, -1.0 / 3.0),
                Vec3::new(-s2 / 3.0, -s23, -1.0 / 3.0),
            ]
            .into_iter()
            .map(|v| (0.25, v))
            .collect(),
        )
    }

    /// Three states with priors (1/3, 5/12, 1/4).
    pub fn unequal_priors() -> Ensemble {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        build(vec![
            (1.0 / 3.0, Vec3::new(3.0, 0.0, 3.0) / (4.0 * s2)),
            (5.0 / 12.0, Vec3::new(-3.0, 3.0 * s3, 0.0) / 10.0),
            (0.25, Vec3::new(-1.0, -s3, 0.0) / 2.0),
        ])
    }
}
