//! Two states: a channel is OMP iff it maps the Helstrom operator to
//! λ h + μ I with λ_min ≤ λ ≤ 1.

use ompkit::discrimination::solve_two_state;
use ompkit::omp_check::check_two_state;
use ompkit::{Ensemble, QubitChannel, Tolerances, Vec3};

fn main() -> ompkit::Result<()> {
    let tol = Tolerances::default();
    let e = Ensemble::from_pairs(
        [(0.6, Vec3::new(0.0, 0.0, 0.9)), (0.4, Vec3::new(0.6, 0.0, -0.5))],
        &tol,
    )?;
    let sol = solve_two_state(&e, &tol)?;
    let h = e.helstrom(0, 1)?.h_vec.normalize();
    println!("P_guess {:.6}  Helstrom axis ({:+.3}, {:+.3}, {:+.3})", sol.p_guess, h.x, h.y, h.z);

    let channels = [
        ("depolarizing 0.3", QubitChannel::depolarizing(0.3)?),
        ("rotation about h", QubitChannel::unitary(&h, 1.0)?),
        ("rotation about y", QubitChannel::unitary(&Vec3::y(), 1.0)?),
        ("heavy depolarizing", QubitChannel::depolarizing(0.95)?),
    ];
    for (name, ch) in channels {
        let r = check_two_state(&e, &sol, &ch, &tol)?;
        println!(
            "{name:<20} omp {:<5} λ {:+.4}  μ {:+.4}  δ {:.4}  (λ_min {:.4}, residual {:.1e})",
            r.is_omp, r.lambda, r.mu, r.delta, r.lambda_min, r.residual
        );
    }
    Ok(())
}
