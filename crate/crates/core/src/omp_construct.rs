//! The affine family of OMP channels for a fixed ensemble and measurement.
//!
//! Taking the `i`-th component of every pair equation gives
//!
//! ```text
//! H d_i + t_i q − δ w_i = H e_i,    i = 1, 2, 3,
//! ```
//!
//! where `d_i` is the `i`-th row of `D`. In the unknown
//! `x = (d_1, d_2, d_3, t, δ) ∈ ℝ¹³` this is `Q x = Q b`, with `b` the
//! identity channel. Every solution is `Q⁺Q b + (I − Q⁺Q) c`; the admissible
//! ones are in addition CPTP with `0 ≤ δ ≤ min r_x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{Tolerances, Vec3};
use crate::channel::{Matrix3f, QubitChannel, CPTP_TOL};
use crate::discrimination::DiscriminationSolution;
use crate::ensemble::Ensemble;
use crate::error::{OmpError, Result};
use crate::linalg::{nullspace, pinv, rank, vstack, RealMatrix, RealVector};
use crate::omp_check::check_omp;

pub const UNKNOWNS: usize = 13;
pub const DELTA_INDEX: usize = 12;
pub const T_INDICES: [usize; 3] = [9, 10, 11];

/// Names of the entries of `x`, in order.
pub const VARIABLE_NAMES: [&str; UNKNOWNS] = [
    "d11", "d12", "d13", "d21", "d22", "d23", "d31", "d32", "d33", "t1", "t2", "t3", "delta",
];

#[derive(Debug, Clone, PartialEq)]
pub struct OmpSystem {
    /// Rows `h_{a₁a_j} = q_{a₁} v_{a₁} − q_{a_j} v_{a_j}`, `j = 2..m`.
    pub h: RealMatrix,
    /// `q_{a₁} − q_{a_j}`.
    pub qdiff: RealVector,
    /// `w[i]` holds the `i`-th components of `s_{a₁} − s_{a_j}`.
    pub w: [RealVector; 3],
    pub q: RealMatrix,
    pub b: RealVector,
    /// The index set `I`, sorted; `a₁` is its first entry.
    pub index_set: Vec<usize>,
    /// `min_{x∈I} r_x`, the largest admissible `δ`.
    pub max_delta: f64,
}

impl OmpSystem {
    pub fn rhs(&self) -> RealVector {
        &self.q * &self.b
    }

    /// `max |Q x − Q b|`.
    pub fn residual(&self, x: &RealVector) -> f64 {
        (&self.q * x - self.rhs()).amax()
    }
}

pub fn build_system(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    subset: &[usize],
) -> Result<OmpSystem> {
    let mut set = subset.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() < 2 {
        return Err(OmpError::PairSetTooSmall(set.len()));
    }
    let a1 = set[0];
    let rows = set.len() - 1;
    let mut h = RealMatrix::zeros(rows, 3);
    let mut qdiff = RealVector::zeros(rows);
    let mut w = [
        RealVector::zeros(rows),
        RealVector::zeros(rows),
        RealVector::zeros(rows),
    ];
    for (j, &aj) in set[1..].iter().enumerate() {
        let pair = ensemble.helstrom(a1, aj)?;
        let s = sol.comp_difference(a1, aj)?;
        for i in 0..3 {
            h[(j, i)] = pair.h_vec[i];
            w[i][j] = s[i];
        }
        qdiff[j] = ensemble.prior(a1) - ensemble.prior(aj);
    }
    let mut q = RealMatrix::zeros(3 * rows, UNKNOWNS);
    for i in 0..3 {
        q.view_mut((i * rows, 3 * i), (rows, 3)).copy_from(&h);
        q.view_mut((i * rows, T_INDICES[i]), (rows, 1)).copy_from(&qdiff);
        q.view_mut((i * rows, DELTA_INDEX), (rows, 1)).copy_from(&(-&w[i]));
    }
    Ok(OmpSystem {
        h,
        qdiff,
        w,
        q,
        b: pack(&QubitChannel::identity(), 0.0),
        max_delta: sol.min_r(&set),
        index_set: set,
    })
}

/// `x = (d_1, d_2, d_3, t, δ)`.
pub fn pack(channel: &QubitChannel, delta: f64) -> RealVector {
    let mut x = RealVector::zeros(UNKNOWNS);
    for r in 0..3 {
        for c in 0..3 {
            x[3 * r + c] = channel.d[(r, c)];
        }
        x[T_INDICES[r]] = channel.t[r];
    }
    x[DELTA_INDEX] = delta;
    x
}

pub fn unpack(x: &[f64]) -> Result<(QubitChannel, f64)> {
    if x.len() != UNKNOWNS {
        return Err(OmpError::WrongLength {
            expected: UNKNOWNS,
            got: x.len(),
        });
    }
    let d = Matrix3f::from_row_slice(&x[..9]);
    let t = Vec3::new(x[9], x[10], x[11]);
    Ok((QubitChannel::new(d, t), x[DELTA_INDEX]))
}

/// Affine set `{x_particular + Σ c_k null_basis[k]}` of solutions of
/// `Q x = Q b` together with any extra linear constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct OmpFamily {
    pub system: OmpSystem,
    pub x_particular: RealVector,
    pub null_basis: Vec<RealVector>,
    pub dim: usize,
    /// Extra constraints `A x = c` on top of the OMP equations.
    pub extra_rows: RealMatrix,
    pub extra_rhs: RealVector,
}

pub fn solve_family(system: &OmpSystem, tol: &Tolerances) -> OmpFamily {
    let q_pinv = pinv(&system.q, tol.rank_tol);
    let x_particular = &q_pinv * system.rhs();
    let null_basis = nullspace(&system.q, tol.rank_tol);
    OmpFamily {
        system: system.clone(),
        x_particular,
        dim: null_basis.len(),
        null_basis,
        extra_rows: RealMatrix::zeros(0, UNKNOWNS),
        extra_rhs: RealVector::zeros(0),
    }
}

/// Dependent unknowns as affine functions of chosen free ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Parametrization {
    pub free: Vec<usize>,
    pub dependent: Vec<usize>,
    /// `x[dependent[i]] = constant[i] + Σ_k coefficients[(i, k)] x[free[k]]`.
    pub constant: RealVector,
    pub coefficients: RealMatrix,
}

impl Parametrization {
    /// Coefficient of free unknown `free_index` in dependent unknown `dep_index`.
    pub fn coefficient(&self, dep_index: usize, free_index: usize) -> Option<f64> {
        let i = self.dependent.iter().position(|&d| d == dep_index)?;
        let k = self.free.iter().position(|&f| f == free_index)?;
        Some(self.coefficients[(i, k)])
    }

    pub fn constant_of(&self, dep_index: usize) -> Option<f64> {
        let i = self.dependent.iter().position(|&d| d == dep_index)?;
        Some(self.constant[i])
    }

    /// One line per dependent unknown, e.g. `d13 = 0.000000 - 0.400000·t1`.
    pub fn describe(&self, tol: f64) -> Vec<String> {
        self.dependent
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut s = format!("{} = {:.6}", VARIABLE_NAMES[d], self.constant[i]);
                for (k, &f) in self.free.iter().enumerate() {
                    let c = self.coefficients[(i, k)];
                    if c.abs() > tol {
                        let sign = if c < 0.0 { '-' } else { '+' };
                        s.push_str(&format!(" {sign} {:.6}·{}", c.abs(), VARIABLE_NAMES[f]));
                    }
                }
                s
            })
            .collect()
    }
}

impl OmpFamily {
    pub fn point(&self, coefficients: &[f64]) -> RealVector {
        self.null_basis
            .iter()
            .zip(coefficients)
            .fold(self.x_particular.clone(), |x, (v, c)| x + v * *c)
    }

    /// Largest violation of the OMP equations and extra constraints.
    pub fn residual(&self, x: &RealVector) -> f64 {
        let extra = if self.extra_rows.nrows() == 0 {
            0.0
        } else {
            (&self.extra_rows * x - &self.extra_rhs).amax()
        };
        self.system.residual(x).max(extra)
    }

    fn stacked(&self) -> (RealMatrix, RealVector) {
        let m = vstack(&self.system.q, &self.extra_rows);
        let rhs = self.system.rhs();
        let mut full = RealVector::zeros(rhs.len() + self.extra_rhs.len());
        full.rows_mut(0, rhs.len()).copy_from(&rhs);
        full.rows_mut(rhs.len(), self.extra_rhs.len())
            .copy_from(&self.extra_rhs);
        (m, full)
    }

    /// Adds the constraints `rows · x = rhs`.
    pub fn restrict(&self, rows: &RealMatrix, rhs: &RealVector, tol: &Tolerances) -> Result<OmpFamily> {
        if rows.ncols() != UNKNOWNS || rows.nrows() != rhs.len() {
            return Err(OmpError::WrongLength {
                expected: UNKNOWNS,
                got: rows.ncols(),
            });
        }
        let extra_rows = vstack(&self.extra_rows, rows);
        let mut extra_rhs = RealVector::zeros(self.extra_rhs.len() + rhs.len());
        extra_rhs
            .rows_mut(0, self.extra_rhs.len())
            .copy_from(&self.extra_rhs);
        extra_rhs
            .rows_mut(self.extra_rhs.len(), rhs.len())
            .copy_from(rhs);
        let mut restricted = OmpFamily {
            extra_rows,
            extra_rhs,
            ..self.clone()
        };
        let (m, full_rhs) = restricted.stacked();
        let x = pinv(&m, tol.rank_tol) * &full_rhs;
        let scale = 1.0 + full_rhs.amax();
        if (&m * &x - &full_rhs).amax() > tol.match_tol * scale {
            return Err(OmpError::BadParameter(
                "the added constraints are inconsistent with the OMP equations".into(),
            ));
        }
        restricted.null_basis = nullspace(&m, tol.rank_tol);
        restricted.dim = restricted.null_basis.len();
        restricted.x_particular = x;
        Ok(restricted)
    }

    /// Fixes single unknowns: `x[index] = value` for each pair.
    pub fn fix(&self, values: &[(usize, f64)], tol: &Tolerances) -> Result<OmpFamily> {
        let mut rows = RealMatrix::zeros(values.len(), UNKNOWNS);
        let mut rhs = RealVector::zeros(values.len());
        for (r, &(index, value)) in values.iter().enumerate() {
            if index >= UNKNOWNS {
                return Err(OmpError::IndexOutOfRange {
                    index,
                    len: UNKNOWNS,
                });
            }
            rows[(r, index)] = 1.0;
            rhs[r] = value;
        }
        self.restrict(&rows, &rhs, tol)
    }

    /// Unital channels, `t = 0`.
    pub fn unital(&self, tol: &Tolerances) -> Result<OmpFamily> {
        self.fix(&T_INDICES.map(|i| (i, 0.0)), tol)
    }

    /// Channels with a fixed degradation.
    pub fn delta_slice(&self, delta: f64, tol: &Tolerances) -> Result<OmpFamily> {
        if !(delta >= 0.0) {
            return Err(OmpError::BadParameter(format!("degradation {delta} must be ≥ 0")));
        }
        self.fix(&[(DELTA_INDEX, delta)], tol)
            .map_err(|_| OmpError::DeltaUnreachable(delta))
    }

    /// Solves the family for the unknowns outside `free`. The free unknowns
    /// must determine a point of the family uniquely.
    pub fn parametrize(&self, free: &[usize], tol: &Tolerances) -> Result<Parametrization> {
        if free.iter().any(|&f| f >= UNKNOWNS) {
            return Err(OmpError::BadParameter("free index out of range".into()));
        }
        let dependent: Vec<usize> = (0..UNKNOWNS).filter(|i| !free.contains(i)).collect();
        let k = self.dim;
        let basis = RealMatrix::from_fn(UNKNOWNS, k, |r, c| self.null_basis[c][r]);
        let f_rows = basis.select_rows(free);
        if free.len() != k || rank(&f_rows, tol.rank_tol) < k {
            return Err(OmpError::Underdetermined);
        }
        let f_inv = pinv(&f_rows, tol.rank_tol);
        let d_rows = basis.select_rows(&dependent);
        let coefficients = &d_rows * &f_inv;
        let xp_free = self.x_particular.select_rows(free);
        let xp_dep = self.x_particular.select_rows(&dependent);
        let constant = xp_dep - &coefficients * xp_free;
        Ok(Parametrization {
            free: free.to_vec(),
            dependent,
            constant,
            coefficients,
        })
    }

    /// Whether some direction of the family changes `δ`.
    pub fn delta_is_free(&self, tol: &Tolerances) -> bool {
        self.null_basis
            .iter()
            .any(|v| v[DELTA_INDEX].abs() > tol.rank_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub samples: usize,
    pub seed: u64,
    /// Coefficients are drawn uniformly from `[−half_width, half_width]`.
    pub half_width: f64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
            half_width: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleChannel {
    pub sample: usize,
    pub channel: QubitChannel,
    pub delta: f64,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveResult {
    pub kept: Vec<AdmissibleChannel>,
    pub drawn: usize,
    pub rejected_delta: usize,
    pub rejected_cptp: usize,
    /// Samples that passed the sieve but failed the independent OMP check.
    pub rejected_check: usize,
}

enum Outcome {
    Kept(AdmissibleChannel),
    Delta,
    Cptp,
    Check,
}

/// Samples the family and keeps the admissible channels.
///
/// Coefficient vectors are drawn sequentially from the seed, evaluated in
/// parallel and returned in draw order.
pub fn sieve_admissible(
    family: &OmpFamily,
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    config: &SieveConfig,
    tol: &Tolerances,
) -> Result<SieveResult> {
    if config.samples == 0 || !(config.half_width > 0.0) {
        return Err(OmpError::BadParameter(
            "the sieve needs a positive sample count and box".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let draws: Vec<Vec<f64>> = (0..config.samples)
        .map(|_| {
            (0..family.dim)
                .map(|_| rng.gen_range(-config.half_width..=config.half_width))
                .collect()
        })
        .collect();
    let max_delta = family.system.max_delta;
    let outcomes: Vec<Outcome> = draws
        .into_par_iter()
        .enumerate()
        .map(|(sample, coefficients)| {
            let x = family.point(&coefficients);
            let (channel, delta) = unpack(x.as_slice()).expect("13 unknowns");
            if delta < -tol.match_tol || delta > max_delta + tol.match_tol {
                return Outcome::Delta;
            }
            if !channel.is_cptp_choi(CPTP_TOL).is_cptp() {
                return Outcome::Cptp;
            }
            match check_omp(ensemble, sol, &family.system.index_set, &channel, tol) {
                Ok(r) if r.is_omp => Outcome::Kept(AdmissibleChannel {
                    sample,
                    channel,
                    delta,
                    coefficients,
                }),
                _ => Outcome::Check,
            }
        })
        .collect();
    let mut result = SieveResult {
        kept: Vec::new(),
        drawn: config.samples,
        rejected_delta: 0,
        rejected_cptp: 0,
        rejected_check: 0,
    };
    for o in outcomes {
        match o {
            Outcome::Kept(c) => result.kept.push(c),
            Outcome::Delta => result.rejected_delta += 1,
            Outcome::Cptp => result.rejected_cptp += 1,
            Outcome::Check => result.rejected_check += 1,
        }
    }
    Ok(result)
}
