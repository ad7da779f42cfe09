//! Qubit channels as affine maps of the Bloch ball, `v ↦ D v + t`.

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::bloch::{Herm2, Tolerances, Vec3};
use crate::error::{OmpError, Result};

pub type Matrix3f = Matrix3<f64>;

/// Default slack for the complete-positivity tests.
pub const CPTP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitChannel {
    pub d: Matrix3f,
    pub t: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CptpVerdict {
    Cptp,
    NotCp,
    /// The inequality test does not apply; the Choi test decides.
    InconclusiveUseChoi,
}

impl CptpVerdict {
    pub fn is_cptp(self) -> bool {
        self == CptpVerdict::Cptp
    }
}

/// `D = O1 · diag(λ) · O2` with proper rotations `O1`, `O2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Ordered by absolute value; any reflection sign sits on `λ₁`.
    pub lambdas: Vec3,
    /// `O1ᵀ t`.
    pub t_canon: Vec3,
    pub o1: Matrix3f,
    pub o2: Matrix3f,
}

impl CanonicalForm {
    pub fn reconstruct(&self) -> Matrix3f {
        self.o1 * Matrix3f::from_diagonal(&self.lambdas) * self.o2
    }
}

fn pauli() -> [Matrix2<Complex<f64>>; 4] {
    let z = Complex::new(0.0, 0.0);
    let o = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    [
        Matrix2::new(o, z, z, o),
        Matrix2::new(z, o, o, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(o, z, z, -o),
    ]
}

fn kron(a: &Matrix2<Complex<f64>>, b: &Matrix2<Complex<f64>>) -> Matrix4<Complex<f64>> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

impl QubitChannel {
    pub fn new(d: Matrix3f, t: Vec3) -> Self {
        Self { d, t }
    }

    pub fn identity() -> Self {
        Self::new(Matrix3f::identity(), Vec3::zeros())
    }

    /// `ρ ↦ (1−η)ρ + η I/2`.
    pub fn depolarizing(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(OmpError::BadParameter(format!(
                "depolarizing parameter {eta} outside [0, 1]"
            )));
        }
        Ok(Self::new(Matrix3f::identity() * (1.0 - eta), Vec3::zeros()))
    }

    /// Conjugation by `exp(−i angle axis·σ/2)`: a rotation of the Bloch ball.
    pub fn unitary(axis: &Vec3, angle: f64) -> Result<Self> {
        if (axis.norm() - 1.0).abs() > 1e-9 || !angle.is_finite() {
            return Err(OmpError::BadParameter(format!(
                "rotation axis must be a unit vector, got norm {}",
                axis.norm()
            )));
        }
        let k = axis.cross_matrix();
        let d = Matrix3f::identity() + k * angle.sin() + k * k * (1.0 - angle.cos());
        Ok(Self::new(d, Vec3::zeros()))
    }

    pub fn apply(&self, v: &Vec3, tol: &Tolerances) -> Result<Vec3> {
        let norm = v.norm();
        if norm > 1.0 + tol.psd_tol {
            return Err(OmpError::BlochOutOfBall { norm });
        }
        Ok(self.d * v + self.t)
    }

    /// Action on an arbitrary operator `αI + β·σ`.
    pub fn apply_operator(&self, a: &Herm2) -> Herm2 {
        Herm2::new(a.alpha, self.d * a.beta + self.t * a.alpha)
    }

    /// `self` followed by `after`.
    pub fn then(&self, after: &QubitChannel) -> QubitChannel {
        QubitChannel::new(after.d * self.d, after.d * self.t + after.t)
    }

    /// `(1−κ)·self + κ·other`.
    pub fn mix(&self, other: &QubitChannel, kappa: f64) -> QubitChannel {
        QubitChannel::new(
            self.d * (1.0 - kappa) + other.d * kappa,
            self.t * (1.0 - kappa) + other.t * kappa,
        )
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.t.amax() <= tol
    }

    /// `Dᵀ D = I`, `det D = +1` and `t = 0`.
    pub fn is_rotation(&self, tol: f64) -> bool {
        (self.d.transpose() * self.d - Matrix3f::identity()).amax() <= tol
            && (self.d.determinant() - 1.0).abs() <= tol
            && self.is_unital(tol)
    }

    /// Axis and angle in `[0, π]` of a rotation channel. The axis is `ẑ` for
    /// the identity.
    pub fn rotation_axis_angle(&self, tol: f64) -> Result<(Vec3, f64)> {
        if !self.is_rotation(tol) {
            return Err(OmpError::NotUnitary);
        }
        let r = self.d;
        let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        let angle = cos.acos();
        let skew = Vec3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
        if skew.norm() > 1e-6 {
            return Ok((skew.normalize(), angle));
        }
        if angle < 0.5 {
            return Ok((Vec3::z(), 0.0));
        }
        // Half-turn: R + I = 2 n nᵀ.
        let sym = (r + Matrix3f::identity()) / 2.0;
        let col = (0..3)
            .max_by(|&a, &b| sym[(a, a)].total_cmp(&sym[(b, b)]))
            .unwrap_or(2);
        Ok((sym.column(col).normalize(), angle))
    }

    /// `J = ½ Σ_ν σ_νᵀ ⊗ N(σ_ν)`, a 4×4 operator of trace 2.
    pub fn choi(&self) -> Matrix4<Complex<f64>> {
        let p = pauli();
        let image = |nu: usize| -> Matrix2<Complex<f64>> {
            let (alpha, beta) = if nu == 0 {
                (1.0, self.t)
            } else {
                (0.0, self.d.column(nu - 1).into_owned())
            };
            p[0] * Complex::from(alpha)
                + p[1] * Complex::from(beta.x)
                + p[2] * Complex::from(beta.y)
                + p[3] * Complex::from(beta.z)
        };
        (0..4).fold(Matrix4::zeros(), |acc, nu| {
            acc + kron(&p[nu].transpose(), &image(nu)) * Complex::from(0.5)
        })
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.choi())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_cptp_choi(&self, tol: f64) -> CptpVerdict {
        if self.choi_min_eigenvalue() >= -tol {
            CptpVerdict::Cptp
        } else {
            CptpVerdict::NotCp
        }
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let svd = self.d.svd(true, true);
        let u = svd.u.expect("requested U");
        let v_t = svd.v_t.expect("requested V^T");
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let mut o1 = Matrix3f::zeros();
        let mut o2 = Matrix3f::zeros();
        let mut lambdas = Vec3::zeros();
        for (k, &src) in order.iter().enumerate() {
            let mut col = u.column(src).into_owned();
            let mut row = v_t.row(src).into_owned();
            // Deterministic sign: the largest entry of each O1 column is positive.
            let pivot = col.iamax();
            if col[pivot] < 0.0 {
                col = -col;
                row = -row;
            }
            o1.set_column(k, &col);
            o2.set_row(k, &row);
            lambdas[k] = svd.singular_values[src];
        }
        if o1.determinant() < 0.0 {
            o1.set_column(0, &(-o1.column(0)));
            lambdas[0] = -lambdas[0];
        }
        if o2.determinant() < 0.0 {
            o2.set_row(0, &(-o2.row(0)));
            lambdas[0] = -lambdas[0];
        }
        CanonicalForm {
            lambdas,
            t_canon: o1.transpose() * self.t,
            o1,
            o2,
        }
    }
}

/// Complete positivity from the closed-form inequalities on `(λ, t)`.
///
/// They apply when the translation has at most one nonzero component in the
/// canonical frame; that component and its `λ` are moved to the third slot.
/// Any other translation gives [`CptpVerdict::InconclusiveUseChoi`].
pub fn is_cptp_inequalities(form: &CanonicalForm, tol: f64) -> CptpVerdict {
    let t = form.t_canon;
    let scale = 1.0 + t.amax();
    let nonzero: Vec<usize> = (0..3).filter(|&i| t[i].abs() > tol * scale).collect();
    let slot = match nonzero.as_slice() {
        [] => 2,
        [k] => *k,
        _ => return CptpVerdict::InconclusiveUseChoi,
    };
    // A cyclic relabelling is a rotation, so the verdict is unchanged.
    let perm = [(slot + 1) % 3, (slot + 2) % 3, slot];
    let (l1, l2, l3) = (
        form.lambdas[perm[0]],
        form.lambdas[perm[1]],
        form.lambdas[perm[2]],
    );
    let t3 = if nonzero.is_empty() { 0.0 } else { t[slot] };

    let within = |lhs: f64, rhs: f64| lhs <= rhs + tol;
    if [l1, l2, l3].iter().any(|l| l.abs() > 1.0 + tol) || !within(l3.abs() + t3.abs(), 1.0) {
        return CptpVerdict::NotCp;
    }
    let t2 = t3 * t3;
    let pair_plus = within((l1 + l2).powi(2), (1.0 + l3).powi(2) - t2);
    let pair_minus = within((l1 - l2).powi(2), (1.0 - l3).powi(2) - t2);
    let (s1, s2, s3) = (l1 * l1, l2 * l2, l3 * l3);
    let lhs = (1.0 - (s1 + s2 + s3) - t2).powi(2);
    let rhs = 4.0 * (s1 * s2 + s2 * s3 + s3 * (t2 + s1) - 2.0 * l1 * l2 * l3);
    if pair_plus && pair_minus && within(rhs, lhs) {
        CptpVerdict::Cptp
    } else {
        CptpVerdict::NotCp
    }
}

/// Subintervals of `[lo, hi]` on which `family(p)` passes the Choi test.
///
/// The parameter range is scanned on `steps` cells and each sign change of
/// the verdict is located by bisection.
pub fn cptp_intervals<F>(family: F, lo: f64, hi: f64, steps: usize, tol: f64) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> QubitChannel,
{
    let ok = |p: f64| family(p).is_cptp_choi(tol).is_cptp();
    let edge = |mut a: f64, mut b: f64| {
        // ok(a) != ok(b)
        let left = ok(a);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if ok(mid) == left {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let mut intervals = Vec::new();
    let mut start = ok(lo).then_some(lo);
    let mut prev = lo;
    for k in 1..=steps.max(1) {
        let p = lo + (hi - lo) * k as f64 / steps.max(1) as f64;
        match (start, ok(p)) {
            (None, true) => start = Some(edge(prev, p)),
            (Some(s), false) => {
                intervals.push((s, edge(prev, p)));
                start = None;
            }
            _ => {}
        }
        prev = p;
    }
    if let Some(s) = start {
        intervals.push((s, hi));
    }
    intervals
}
