//! Bloch-form algebra for 2×2 Hermitian operators.
//!
//! Every operator is stored as `alpha·I + beta·σ` with real `alpha` and a real
//! 3-vector `beta`. A density matrix `½(I + v·σ)` has `alpha = ½`, `beta = v/2`.
//! An operator identity between Hermitian 2×2 matrices is therefore four real
//! equations, which keeps every comparison in this crate exact and cheap.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{OmpError, Result};

pub type Vec3 = Vector3<f64>;

/// Numerical slack used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalue slack for positivity tests.
    pub psd_tol: f64,
    /// Singular values below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Residual threshold for equation checks.
    pub match_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_tol: 1e-9,
            rank_tol: 1e-9,
            match_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(psd_tol: f64, rank_tol: f64, match_tol: f64) -> Result<Self> {
        let tol = Self {
            psd_tol,
            rank_tol,
            match_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("psd_tol", self.psd_tol),
            ("rank_tol", self.rank_tol),
            ("match_tol", self.match_tol),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(OmpError::BadTolerance(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// A 2×2 Hermitian operator `alpha·I + beta·σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Herm2 {
    pub alpha: f64,
    pub beta: Vec3,
}

/// Eigen-decomposition of a [`Herm2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub lo: f64,
    pub hi: f64,
    /// Bloch direction of the `hi` eigenvector; the `lo` eigenvector points along `-axis`.
    pub axis: Vec3,
}

impl Herm2 {
    pub fn new(alpha: f64, beta: Vec3) -> Self {
        Self { alpha, beta }
    }

    pub fn zero() -> Self {
        Self::new(0.0, Vec3::zeros())
    }

    pub fn identity() -> Self {
        Self::new(1.0, Vec3::zeros())
    }

    /// Density operator with Bloch vector `v`.
    pub fn from_state(v: &Vec3, tol: &Tolerances) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + tol.psd_tol {
            return Err(OmpError::BlochOutOfBall { norm });
        }
        Ok(Self::new(0.5, v / 2.0))
    }

    /// Rank-one projector onto the pure state with unit Bloch vector `n`.
    pub fn projector(n: &Vec3) -> Self {
        Self::new(0.5, n / 2.0)
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.alpha
    }

    pub fn eigen(&self) -> Eigen2 {
        let len = self.beta.norm();
        let axis = if len > 0.0 {
            self.beta / len
        } else {
            Vec3::z()
        };
        Eigen2 {
            lo: self.alpha - len,
            hi: self.alpha + len,
            axis,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.alpha - self.beta.norm()
    }

    pub fn is_psd(&self, tol: &Tolerances) -> bool {
        self.min_eigenvalue() >= -tol.psd_tol
    }

    pub fn trace_norm(&self) -> f64 {
        let len = self.beta.norm();
        (self.alpha + len).abs() + (self.alpha - len).abs()
    }

    /// `tr(A B)` for two operators in Bloch form.
    pub fn trace_product(&self, other: &Herm2) -> f64 {
        2.0 * (self.alpha * other.alpha + self.beta.dot(&other.beta))
    }

    /// Largest absolute deviation over the four real Bloch components.
    pub fn max_abs_diff(&self, other: &Herm2) -> f64 {
        let d = self.beta - other.beta;
        (self.alpha - other.alpha)
            .abs()
            .max(d.x.abs())
            .max(d.y.abs())
            .max(d.z.abs())
    }

    /// Bloch vector when the operator is read as a (unit-trace) state.
    pub fn bloch_vector(&self) -> Vec3 {
        self.beta / self.alpha
    }
}

pub fn eigen2(a: &Herm2) -> Eigen2 {
    a.eigen()
}

pub fn trace_norm(a: &Herm2) -> f64 {
    a.trace_norm()
}

pub fn herm2_from_state(v: &Vec3, tol: &Tolerances) -> Result<Herm2> {
    Herm2::from_state(v, tol)
}

impl Add for Herm2 {
    type Output = Herm2;
    fn add(self, rhs: Herm2) -> Herm2 {
        Herm2::new(self.alpha + rhs.alpha, self.beta + rhs.beta)
    }
}

impl Sub for Herm2 {
    type Output = Herm2;
    fn sub(self, rhs: Herm2) -> Herm2 {
        Herm2::new(self.alpha - rhs.alpha, self.beta - rhs.beta)
    }
}

impl Neg for Herm2 {
    type Output = Herm2;
    fn neg(self) -> Herm2 {
        Herm2::new(-self.alpha, -self.beta)
    }
}

impl Mul<Herm2> for f64 {
    type Output = Herm2;
    fn mul(self, rhs: Herm2) -> Herm2 {
        Herm2::new(self * rhs.alpha, self * rhs.beta)
    }
}
