//! Does a channel preserve an optimal measurement?
//!
//! A CPTP map `N` preserves the optimal measurements supported on the index
//! set `I` exactly when, for every pair in `I`,
//!
//! ```text
//! (D − I) h_xy + (q_x − q_y) t − δ (s_x − s_y) = 0,    0 ≤ δ ≤ min r_x,
//! ```
//!
//! with `h_xy = q_x v_x − q_y v_y` and `s_x` the complementary Bloch vectors.
//! The scalar `δ` is then the loss of guessing probability.

use serde::{Deserialize, Serialize};

use crate::bloch::{Tolerances, Vec3};
use crate::channel::{QubitChannel, CPTP_TOL};
use crate::discrimination::{solve_general, CaseTag, DiscriminationSolution, Measurement};
use crate::ensemble::Ensemble;
use crate::error::{OmpError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OmpMode {
    /// Every optimal measurement of the solution.
    Strong,
    /// Only measurements supported on a chosen subset.
    Weak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmpReport {
    pub is_omp: bool,
    pub delta: f64,
    /// Max-abs residual of the pair equation for `(a₁, a_j)`, `j = 2..m`.
    pub residuals: Vec<f64>,
    pub r_bound_ok: bool,
    pub index_set: Vec<usize>,
    pub mode: OmpMode,
    pub p_guess_before: f64,
    pub p_guess_after: f64,
    /// Whether the re-solved transformed problem confirms `δ`.
    pub cross_check_ok: bool,
    pub reason: Option<String>,
}

impl OmpReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn sorted_subset(sol: &DiscriminationSolution, subset: &[usize]) -> Result<Vec<usize>> {
    let mut set = subset.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() < 2 {
        return Err(OmpError::PairSetTooSmall(set.len()));
    }
    for &x in &set {
        if x >= sol.case_tags.len() {
            return Err(OmpError::IndexOutOfRange {
                index: x,
                len: sol.case_tags.len(),
            });
        }
        if !sol.identified.contains(&x) {
            return Err(OmpError::NotIdentified(x));
        }
    }
    Ok(set)
}

fn require_cptp(channel: &QubitChannel) -> Result<()> {
    let min_eigenvalue = channel.choi_min_eigenvalue();
    if min_eigenvalue < -CPTP_TOL {
        return Err(OmpError::ChannelNotCptp { min_eigenvalue });
    }
    Ok(())
}

/// Pair vectors `(g_j, s_j)` with `g_j = (D − I)h + Δq t` and `s_j = s_{a₁} − s_{a_j}`.
fn pair_terms(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    set: &[usize],
    channel: &QubitChannel,
) -> Result<Vec<(Vec3, Vec3)>> {
    let a1 = set[0];
    set[1..]
        .iter()
        .map(|&aj| {
            let pair = ensemble.helstrom(a1, aj)?;
            let dq = ensemble.prior(a1) - ensemble.prior(aj);
            let g = channel.d * pair.h_vec - pair.h_vec + channel.t * dq;
            Ok((g, sol.comp_difference(a1, aj)?))
        })
        .collect()
}

/// Least-squares `δ` for the stacked pair equations, and the per-pair residuals.
fn fit_delta(terms: &[(Vec3, Vec3)]) -> (f64, Vec<f64>) {
    let num: f64 = terms.iter().map(|(g, s)| g.dot(s)).sum();
    let den: f64 = terms.iter().map(|(_, s)| s.norm_squared()).sum();
    let delta = if den > 0.0 { num / den } else { 0.0 };
    let residuals = terms.iter().map(|(g, s)| (g - s * delta).amax()).collect();
    (delta, residuals)
}

/// Theorem test for the measurements supported on `subset`.
///
/// Passing `sol.identified` checks strong preservation. A verdict of OMP is
/// confirmed by re-solving the transformed ensemble: the loss of guessing
/// probability must equal `δ`, and the preserved measurement must stay optimal.
pub fn check_omp(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    subset: &[usize],
    channel: &QubitChannel,
    tol: &Tolerances,
) -> Result<OmpReport> {
    let set = sorted_subset(sol, subset)?;
    require_cptp(channel)?;
    let mode = if set == sol.identified {
        OmpMode::Strong
    } else {
        OmpMode::Weak
    };
    let measurement = sol.measurement_for(ensemble, &set, tol)?;
    let (delta, residuals) = fit_delta(&pair_terms(ensemble, sol, &set, channel)?);
    let min_r = sol.min_r(&set);
    let r_bound_ok = delta <= min_r + tol.match_tol;

    let transformed = ensemble.map_states(|v| channel.d * v + channel.t, tol)?;
    let after = solve_general(&transformed, tol)?;
    let p_guess_after = after.p_guess;

    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let mut reason = None;
    if max_residual > tol.match_tol {
        reason = Some(format!("pair equations violated (residual {max_residual:.3e})"));
    } else if delta < -tol.match_tol {
        reason = Some(format!("negative degradation {delta:.3e}"));
    } else if !r_bound_ok {
        reason = Some(format!("degradation {delta:.6} exceeds min r_x = {min_r:.6}"));
    }
    let mut cross_check_ok = false;
    if reason.is_none() {
        let loss_gap = (delta - (sol.p_guess - p_guess_after)).abs();
        let kept_gap = (measurement.success_probability(&transformed) - p_guess_after).abs();
        cross_check_ok = loss_gap <= 10.0 * tol.match_tol && kept_gap <= tol.match_tol;
        if !cross_check_ok {
            reason = Some(format!(
                "re-solved problem disagrees (loss gap {loss_gap:.3e}, measurement gap {kept_gap:.3e})"
            ));
        }
    }
    Ok(OmpReport {
        is_omp: reason.is_none(),
        delta,
        residuals,
        r_bound_ok,
        index_set: set,
        mode,
        p_guess_before: sol.p_guess,
        p_guess_after,
        cross_check_ok,
        reason,
    })
}

/// [`check_omp`] on the full identified set.
pub fn check_omp_strong(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    channel: &QubitChannel,
    tol: &Tolerances,
) -> Result<OmpReport> {
    check_omp(ensemble, sol, &sol.identified, channel, tol)
}

/// [`check_omp`] for a user-chosen measurement, given by its support.
pub fn check_omp_weak(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    measurement: &Measurement,
    channel: &QubitChannel,
    tol: &Tolerances,
) -> Result<OmpReport> {
    let support = measurement.support(tol.psd_tol);
    if (measurement.success_probability(ensemble) - sol.p_guess).abs() > tol.match_tol
        || measurement.completeness_residual() > tol.match_tol
    {
        return Err(OmpError::NotOmp(
            "the given measurement is not optimal for the ensemble".into(),
        ));
    }
    check_omp(ensemble, sol, &support, channel, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquiprobableReport {
    pub is_omp: bool,
    /// Scale of the pair differences: `D(v_x − v_y) = κ (v_x − v_y)`.
    pub kappa: f64,
    /// `(1 − κ)(P_g − 1/n)`.
    pub delta: f64,
    pub residual: f64,
}

/// Equal priors: the channel is OMP iff it scales every pair difference in
/// the identified set by the same `κ ∈ (0, 1]`.
pub fn check_equiprobable(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    channel: &QubitChannel,
    tol: &Tolerances,
) -> Result<EquiprobableReport> {
    if !ensemble.is_equiprobable(tol.match_tol) {
        return Err(OmpError::NotEquiprobable);
    }
    let set = sorted_subset(sol, &sol.identified)?;
    require_cptp(channel)?;
    let diffs: Vec<Vec3> = set[1..]
        .iter()
        .map(|&y| ensemble.bloch(set[0]) - ensemble.bloch(y))
        .collect();
    let num: f64 = diffs.iter().map(|u| u.dot(&(channel.d * u))).sum();
    let den: f64 = diffs.iter().map(|u| u.norm_squared()).sum();
    let kappa = if den > 0.0 { num / den } else { 1.0 };
    let residual = diffs
        .iter()
        .map(|u| (channel.d * u - u * kappa).amax())
        .fold(0.0, f64::max);
    let r = sol.p_guess - 1.0 / ensemble.len() as f64;
    Ok(EquiprobableReport {
        is_omp: residual <= tol.match_tol
            && kappa > tol.match_tol
            && kappa <= 1.0 + tol.match_tol,
        kappa,
        delta: (1.0 - kappa) * r,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStateReport {
    pub is_omp: bool,
    /// `N(h₁₂) = λ h₁₂ + μ I`.
    pub lambda: f64,
    pub mu: f64,
    /// `(1 − λ)(P_g − ½)`.
    pub delta: f64,
    pub residual: f64,
    /// Smallest admissible `λ`, `1 − min r_x / (P_g − ½)`.
    pub lambda_min: f64,
}

/// Two states: OMP iff `N(h₁₂) = λ h₁₂ + μ I` with `λ_min ≤ λ ≤ 1`; trace
/// preservation then forces `μ = (1 − λ)(q₁ − q₂)/2`.
pub fn check_two_state(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    channel: &QubitChannel,
    tol: &Tolerances,
) -> Result<TwoStateReport> {
    if ensemble.len() != 2 {
        return Err(OmpError::WrongArity {
            expected: 2,
            got: ensemble.len(),
        });
    }
    if sol.case_tags.contains(&CaseTag::NoMeasurement) {
        return Err(OmpError::DominatedState);
    }
    require_cptp(channel)?;
    let pair = ensemble.helstrom(0, 1)?;
    let dq = ensemble.prior(0) - ensemble.prior(1);
    let image_beta = (channel.d * pair.h_vec + channel.t * dq) / 2.0;
    let h_beta = pair.h_vec / 2.0;
    let lambda = image_beta.dot(&h_beta) / h_beta.norm_squared();
    let mu = pair.h.alpha - lambda * pair.h.alpha;
    let residual = (image_beta - h_beta * lambda).amax();
    let excess = sol.p_guess - 0.5;
    let lambda_min = 1.0 - sol.min_r(&[0, 1]) / excess;
    Ok(TwoStateReport {
        is_omp: residual <= tol.match_tol
            && lambda >= lambda_min - tol.match_tol
            && lambda <= 1.0 + tol.match_tol,
        lambda,
        mu,
        delta: (1.0 - lambda) * excess,
        residual,
        lambda_min,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryVerdict {
    pub is_omp: bool,
    /// Always zero: unitaries do not change the guessing probability.
    pub delta: f64,
    pub axis: Vec3,
    pub angle: f64,
    pub reason: String,
}

/// OMP status of a rotation channel for the solution's identified set.
///
/// With two identified states the rotation must fix their Helstrom vector;
/// with more, only the identity qualifies.
pub fn check_unitary_propositions(
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    channel: &QubitChannel,
    tol: &Tolerances,
) -> Result<UnitaryVerdict> {
    let (axis, angle) = channel.rotation_axis_angle(1e3 * tol.match_tol)?;
    let verdict = |is_omp: bool, reason: &str| UnitaryVerdict {
        is_omp,
        delta: 0.0,
        axis,
        angle,
        reason: reason.to_string(),
    };
    if angle <= tol.match_tol {
        return Ok(verdict(true, "identity rotation"));
    }
    match sol.identified.as_slice() {
        [] | [_] => Ok(verdict(true, "a single identified state needs no measurement")),
        [x, y] => {
            let h = ensemble.helstrom(*x, *y)?.h_vec;
            let aligned = axis.cross(&h).norm() <= tol.match_tol * h.norm().max(1.0);
            Ok(if aligned {
                verdict(true, "rotation axis is parallel to the Helstrom vector")
            } else {
                verdict(false, "rotation moves the Helstrom vector")
            })
        }
        _ => Ok(verdict(
            false,
            "no rotation other than the identity preserves more than two identified states",
        )),
    }
}

/// `q_x N[ρ_x] − q_y N[ρ_y] = q_x ρ_x − q_y ρ_y` for every pair, which is
/// the same as keeping the guessing probability unchanged.
pub fn check_pg_preserving(ensemble: &Ensemble, channel: &QubitChannel, tol: &Tolerances) -> bool {
    let n = ensemble.len();
    (0..n).all(|x| {
        (x + 1..n).all(|y| {
            let h = ensemble.bloch(x) * ensemble.prior(x) - ensemble.bloch(y) * ensemble.prior(y);
            let dq = ensemble.prior(x) - ensemble.prior(y);
            ((channel.d * h - h + channel.t * dq) / 2.0).amax() <= tol.match_tol
        })
    })
}

/// Checks the mixture `(1−κ)N₁ + κN₂` of two OMP channels; its degradation
/// must be the same mixture of theirs.
pub fn convex_mix_check(
    first: &QubitChannel,
    second: &QubitChannel,
    kappa: f64,
    ensemble: &Ensemble,
    sol: &DiscriminationSolution,
    subset: &[usize],
    tol: &Tolerances,
) -> Result<OmpReport> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(OmpError::BadParameter(format!("mixing weight {kappa} outside [0, 1]")));
    }
    let r1 = check_omp(ensemble, sol, subset, first, tol)?;
    let r2 = check_omp(ensemble, sol, subset, second, tol)?;
    if !r1.is_omp || !r2.is_omp {
        return Err(OmpError::NotOmp("both channels must be OMP to mix".into()));
    }
    let mut report = check_omp(ensemble, sol, subset, &first.mix(second, kappa), tol)?;
    let expected = (1.0 - kappa) * r1.delta + kappa * r2.delta;
    if report.is_omp && (report.delta - expected).abs() > tol.match_tol {
        report.is_omp = false;
        report.reason = Some(format!(
            "mixture degradation {} differs from {expected}",
            report.delta
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Matrix3f;
    use crate::discrimination::solve_two_state;
    use crate::ensemble::presets;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_is_omp() {
        for e in [presets::bb84(), presets::sic(), presets::unequal_priors()] {
            let s = solve_general(&e, &tol()).unwrap();
            let r = check_omp_strong(&e, &s, &QubitChannel::identity(), &tol()).unwrap();
            assert!(r.is_omp, "{r:?}");
            assert!(r.delta.abs() < 1e-12);
            assert_eq!(r.mode, OmpMode::Strong);
        }
    }

    #[test]
    fn depolarizing_bb84() {
        let e = presets::bb84();
        let s = solve_general(&e, &tol()).unwrap();
        let c = QubitChannel::depolarizing(0.2).unwrap();
        let r = check_omp_strong(&e, &s, &c, &tol()).unwrap();
        assert!(r.is_omp);
        assert!((r.delta - 0.05).abs() < 1e-12);
        assert!((r.p_guess_after - 0.45).abs() < 1e-12);
        let eq = check_equiprobable(&e, &s, &c, &tol()).unwrap();
        assert!(eq.is_omp && (eq.kappa - 0.8).abs() < 1e-12 && (eq.delta - 0.05).abs() < 1e-12);
    }

    #[test]
    fn z_rotation_on_bb84_is_weak_only() {
        let e = presets::bb84();
        let s = solve_general(&e, &tol()).unwrap();
        let c = QubitChannel::unitary(&Vec3::z(), PI / 7.0).unwrap();
        let weak = check_omp(&e, &s, &[0, 1], &c, &tol()).unwrap();
        assert!(weak.is_omp && weak.delta.abs() < 1e-12);
        assert_eq!(weak.mode, OmpMode::Weak);
        let strong = check_omp_strong(&e, &s, &c, &tol()).unwrap();
        assert!(!strong.is_omp);
        let u = check_unitary_propositions(&e, &s, &c, &tol()).unwrap();
        assert!(!u.is_omp);
    }

    #[test]
    fn depolarizing_breaks_unequal_priors() {
        let e = presets::unequal_priors();
        let s = solve_general(&e, &tol()).unwrap();
        let c = QubitChannel::depolarizing(0.1).unwrap();
        let r = check_omp_strong(&e, &s, &c, &tol()).unwrap();
        assert!(!r.is_omp);
        assert!(r.max_residual() > 1e-3);
    }

    #[test]
    fn not_cptp_is_an_error() {
        let e = presets::one_basis(0.5);
        let s = solve_general(&e, &tol()).unwrap();
        let flip = QubitChannel::new(Matrix3f::from_diagonal(&Vec3::new(1.0, 1.0, -1.0)), Vec3::zeros());
        assert!(matches!(
            check_omp_strong(&e, &s, &flip, &tol()),
            Err(OmpError::ChannelNotCptp { .. })
        ));
    }

    #[test]
    fn two_state_examples() {
        let e = presets::one_basis(0.5);
        let s = solve_two_state(&e, &tol()).unwrap();
        let r = check_two_state(&e, &s, &QubitChannel::identity(), &tol()).unwrap();
        assert!(r.is_omp && (r.lambda - 1.0).abs() < 1e-15 && r.mu.abs() < 1e-15);
        let r = check_two_state(&e, &s, &QubitChannel::depolarizing(0.3).unwrap(), &tol()).unwrap();
        assert!(r.is_omp && (r.lambda - 0.7).abs() < 1e-12 && r.mu.abs() < 1e-15);

        let e = Ensemble::from_pairs([(0.6, Vec3::new(0.0, 0.6, 0.8)), (0.4, Vec3::x())], &tol()).unwrap();
        let s = solve_two_state(&e, &tol()).unwrap();
        let h = e.helstrom(0, 1).unwrap().h_vec.normalize();
        let c = QubitChannel::unitary(&h, 1.2).unwrap();
        let r = check_two_state(&e, &s, &c, &tol()).unwrap();
        assert!(r.is_omp && (r.lambda - 1.0).abs() < 1e-12 && r.delta.abs() < 1e-12);
        assert!(check_pg_preserving(&e, &c, &tol()));
        assert!(check_unitary_propositions(&e, &s, &c, &tol()).unwrap().is_omp);
        let perp = h.cross(&Vec3::z()).normalize();
        let c = QubitChannel::unitary(&perp, 0.3).unwrap();
        assert!(!check_unitary_propositions(&e, &s, &c, &tol()).unwrap().is_omp);
        assert!(!check_omp_strong(&e, &s, &c, &tol()).unwrap().is_omp);
    }

    #[test]
    fn two_state_lambda_matches_theorem() {
        let e = Ensemble::from_pairs([(0.7, Vec3::z()), (0.3, Vec3::x())], &tol()).unwrap();
        let s = solve_two_state(&e, &tol()).unwrap();
        let c = QubitChannel::depolarizing(0.1).unwrap();
        let two = check_two_state(&e, &s, &c, &tol()).unwrap();
        let general = check_omp_strong(&e, &s, &c, &tol()).unwrap();
        assert_eq!(two.is_omp, general.is_omp);
    }

    #[test]
    fn dominated_pair_is_rejected() {
        let e = Ensemble::from_pairs([(0.9, Vec3::z() * 0.05), (0.1, -Vec3::z() * 0.05)], &tol()).unwrap();
        let s = solve_two_state(&e, &tol()).unwrap();
        assert_eq!(
            check_two_state(&e, &s, &QubitChannel::identity(), &tol()).unwrap_err(),
            OmpError::DominatedState
        );
    }

    #[test]
    fn pg_preserving() {
        let e = presets::bb84();
        assert!(check_pg_preserving(&e, &QubitChannel::identity(), &tol()));
        assert!(!check_pg_preserving(&e, &QubitChannel::depolarizing(0.1).unwrap(), &tol()));
    }

    #[test]
    fn mixing_identity_with_depolarizing() {
        let e = presets::three_mubs();
        let s = solve_general(&e, &tol()).unwrap();
        let dep = QubitChannel::depolarizing(0.4).unwrap();
        let r0 = convex_mix_check(&QubitChannel::identity(), &dep, 0.0, &e, &s, &s.identified, &tol()).unwrap();
        assert!(r0.is_omp && r0.delta.abs() < 1e-12);
        let r = convex_mix_check(&QubitChannel::identity(), &dep, 0.5, &e, &s, &s.identified, &tol()).unwrap();
        let full = check_omp_strong(&e, &s, &dep, &tol()).unwrap();
        assert!(r.is_omp && (r.delta - full.delta / 2.0).abs() < 1e-12);
    }

    #[test]
    fn total_depolarization_is_not_omp_for_equal_priors() {
        let e = presets::bb84();
        let s = solve_general(&e, &tol()).unwrap();
        let r = check_equiprobable(&e, &s, &QubitChannel::depolarizing(1.0).unwrap(), &tol()).unwrap();
        assert!(!r.is_omp && r.kappa.abs() < 1e-15);
    }

    #[test]
    fn kernel_example_for_three_mubs() {
        // D = ½I plus a nilpotent part that kills nothing in the pair differences
        let e = presets::three_mubs();
        let s = solve_general(&e, &tol()).unwrap();
        let mut d = Matrix3f::identity() * 0.5;
        d[(0, 2)] = 0.2;
        let c = QubitChannel::new(d, Vec3::zeros());
        let r = check_equiprobable(&e, &s, &c, &tol()).unwrap();
        assert!(!r.is_omp);
        // on the xy-plane pairs alone the same D acts as ½I
        let ring = Ensemble::equiprobable(&[Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y()], &tol()).unwrap();
        let s = solve_general(&ring, &tol()).unwrap();
        let r = check_equiprobable(&ring, &s, &c, &tol()).unwrap();
        assert!(r.is_omp && (r.kappa - 0.5).abs() < 1e-12);
    }
}
