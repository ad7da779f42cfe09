//! Minimum-error discrimination of qubit ensembles.
//!
//! The dual optimum is the symmetry operator `K`, the unique minimal-trace
//! operator with `K ⪰ q_x ρ_x` for every state. From it follow the guessing
//! probability `P_g = tr K`, the parameters `r_x = P_g − q_x`, the
//! complementary states `σ_x = (K − q_x ρ_x)/r_x` and the optimal POVMs,
//! whose elements are weighted projectors orthogonal to the `σ_x`.

mod ball;
mod oracle;
pub(crate) mod weights;

use serde::{Deserialize, Serialize};

use crate::bloch::{Herm2, Tolerances, Vec3};
use crate::ensemble::Ensemble;
use crate::error::{OmpError, Result};

pub use oracle::oracle_random_search;

/// How state `x` enters the optimal strategies, read off `K − q_x ρ_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    /// `K = q_x ρ_x`: always guess `x` without measuring.
    NoMeasurement,
    /// `K − q_x ρ_x > 0`: no optimal measurement ever reports `x`.
    NeverIdentified,
    /// `K − q_x ρ_x` has one zero eigenvalue: `M_x` is a weighted projector.
    ProjectiveElement,
}

/// A qubit POVM `M_x = (w_x/2)(I + n_x·σ)`.
///
/// Completeness `Σ M_x = I` is `Σ w_x = 2` together with `Σ w_x n_x = 0`.
/// A zero direction with weight 2 encodes the trivial element `M_x = I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub weights: Vec<f64>,
    pub directions: Vec<Vec3>,
}

impl Measurement {
    pub fn element(&self, x: usize) -> Herm2 {
        let w = self.weights[x];
        Herm2::new(w / 2.0, self.directions[x] * (w / 2.0))
    }

    /// Largest Bloch-component deviation of `Σ M_x` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let total = (0..self.weights.len()).fold(Herm2::zero(), |s, x| s + self.element(x));
        total.max_abs_diff(&Herm2::identity())
    }

    /// `Σ_x q_x tr(M_x ρ_x)` on `ensemble`.
    pub fn success_probability(&self, ensemble: &Ensemble) -> f64 {
        (0..ensemble.len())
            .map(|x| ensemble.weighted(x).trace_product(&self.element(x)))
            .sum()
    }

    /// Indices with a nonzero element.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&x| self.weights[x] > tol)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationSolution {
    /// Symmetry operator.
    pub k: Herm2,
    pub p_guess: f64,
    /// `r_x = P_g − q_x ≥ 0`.
    pub r: Vec<f64>,
    /// Bloch vectors of the complementary states; unit length for identified
    /// states, shorter for never-identified ones, absent when `r_x = 0`.
    pub comp_states: Vec<Option<Vec3>>,
    /// States that some optimal measurement can report (sorted).
    pub identified: Vec<usize>,
    pub case_tags: Vec<CaseTag>,
    /// One optimal measurement: the minimum-norm completion over `identified`.
    pub measurement: Measurement,
    pub iterations: usize,
}

impl DiscriminationSolution {
    pub fn povm_weights(&self) -> &[f64] {
        &self.measurement.weights
    }

    /// `s_x − s_y` for two states that both have complementary states.
    pub fn comp_difference(&self, x: usize, y: usize) -> Result<Vec3> {
        let sx = self.comp_states[x].ok_or(OmpError::MissingComplementaryState(x))?;
        let sy = self.comp_states[y].ok_or(OmpError::MissingComplementaryState(y))?;
        Ok(sx - sy)
    }

    /// `σ_x` as an operator.
    pub fn comp_operator(&self, x: usize) -> Option<Herm2> {
        self.comp_states[x].map(|s| Herm2::new(0.5, s / 2.0))
    }

    pub fn min_r(&self, subset: &[usize]) -> f64 {
        subset
            .iter()
            .map(|&x| self.r[x])
            .fold(f64::INFINITY, f64::min)
    }

    /// Optimal measurement reporting only states in `subset`.
    pub fn measurement_for(
        &self,
        ensemble: &Ensemble,
        subset: &[usize],
        tol: &Tolerances,
    ) -> Result<Measurement> {
        povm_weights(&self.k, ensemble, subset, tol)
    }
}

/// Completes the data of a discrimination problem from its symmetry operator.
pub fn solution_from_symmetry_operator(
    ensemble: &Ensemble,
    k: Herm2,
    iterations: usize,
    tol: &Tolerances,
) -> Result<DiscriminationSolution> {
    let n = ensemble.len();
    let p_guess = k.trace();
    let mut r = Vec::with_capacity(n);
    let mut comp_states = Vec::with_capacity(n);
    let mut case_tags = Vec::with_capacity(n);
    for x in 0..n {
        let diff = k - ensemble.weighted(x);
        let rx = (p_guess - ensemble.prior(x)).max(0.0);
        r.push(rx);
        if rx <= tol.psd_tol {
            comp_states.push(None);
            case_tags.push(CaseTag::NoMeasurement);
            continue;
        }
        let mut s = diff.beta * (2.0 / rx);
        if diff.min_eigenvalue() <= tol.psd_tol {
            let len = s.norm();
            if len > 0.0 {
                s /= len;
            }
            case_tags.push(CaseTag::ProjectiveElement);
        } else {
            case_tags.push(CaseTag::NeverIdentified);
        }
        comp_states.push(Some(s));
    }
    let identified: Vec<usize> = (0..n)
        .filter(|&x| case_tags[x] != CaseTag::NeverIdentified)
        .collect();
    let measurement = match case_tags.iter().position(|t| *t == CaseTag::NoMeasurement) {
        Some(j) => {
            let mut weights = vec![0.0; n];
            weights[j] = 2.0;
            Measurement {
                weights,
                directions: vec![Vec3::zeros(); n],
            }
        }
        None => povm_weights(&k, ensemble, &identified, tol)?,
    };
    Ok(DiscriminationSolution {
        k,
        p_guess,
        r,
        comp_states,
        identified,
        case_tags,
        measurement,
        iterations,
    })
}

/// Closed-form (Helstrom) solution for two states.
pub fn solve_two_state(ensemble: &Ensemble, tol: &Tolerances) -> Result<DiscriminationSolution> {
    if ensemble.len() != 2 {
        return Err(OmpError::WrongArity {
            expected: 2,
            got: ensemble.len(),
        });
    }
    let h = ensemble.helstrom(0, 1)?.h;
    let p_guess = 0.5 * (1.0 + h.trace_norm());
    let len = h.beta.norm();
    let k = if h.alpha >= len {
        ensemble.weighted(0)
    } else if -h.alpha >= len {
        ensemble.weighted(1)
    } else {
        // σ₁ = −ĥ, σ₂ = +ĥ with ĥ the Helstrom eigenaxis.
        let axis = h.beta / len;
        let r1 = p_guess - ensemble.prior(0);
        ensemble.weighted(0) + Herm2::new(r1 / 2.0, -axis * (r1 / 2.0))
    };
    solution_from_symmetry_operator(ensemble, k, 0, tol)
}

/// General solver: smallest enclosing ball of the balls `B(q_x v_x/2, q_x/2)`.
pub fn solve_general(ensemble: &Ensemble, tol: &Tolerances) -> Result<DiscriminationSolution> {
    let balls: Vec<ball::Ball> = ensemble
        .states()
        .iter()
        .map(|s| ball::Ball {
            center: s.bloch * (s.q / 2.0),
            radius: s.q / 2.0,
        })
        .collect();
    let found = ball::smallest_enclosing(&balls, ball::MAX_ITERATIONS).ok_or(
        OmpError::ConvergenceFailure {
            iterations: ball::MAX_ITERATIONS,
        },
    )?;
    let k = Herm2::new(found.radius, found.center);
    solution_from_symmetry_operator(ensemble, k, found.iterations, tol)
}

/// Weights of an optimal measurement that reports exactly the states in
/// `subset` (a subset of the identified states for `k`). Among all
/// nonnegative completions the minimum-norm one is returned.
pub fn povm_weights(
    k: &Herm2,
    ensemble: &Ensemble,
    subset: &[usize],
    tol: &Tolerances,
) -> Result<Measurement> {
    if subset.is_empty() {
        return Err(OmpError::InfeasibleCompleteness {
            residual: f64::INFINITY,
        });
    }
    let n = ensemble.len();
    let p_guess = k.trace();
    let mut dirs = Vec::with_capacity(subset.len());
    for &x in subset {
        ensemble.check_index(x)?;
        let diff = *k - ensemble.weighted(x);
        if diff.min_eigenvalue() > tol.psd_tol {
            return Err(OmpError::NotIdentified(x));
        }
        if p_guess - ensemble.prior(x) <= tol.psd_tol {
            dirs.push(Vec3::zeros());
        } else {
            let len = diff.beta.norm();
            dirs.push(-diff.beta / len);
        }
    }
    let lambda = weights::nonnegative_min_norm(&dirs, tol.match_tol).ok_or_else(|| {
        OmpError::InfeasibleCompleteness {
            residual: weights::least_squares_residual(&dirs),
        }
    })?;
    let residual = weights::completeness_residual(&dirs, &lambda);
    if residual > tol.match_tol {
        return Err(OmpError::InfeasibleCompleteness { residual });
    }
    let mut w = vec![0.0; n];
    let mut directions = vec![Vec3::zeros(); n];
    for (i, &x) in subset.iter().enumerate() {
        w[x] = 2.0 * lambda[i];
        directions[x] = dirs[i];
    }
    Ok(Measurement {
        weights: w,
        directions,
    })
}
