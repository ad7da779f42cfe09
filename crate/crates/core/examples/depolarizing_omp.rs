//! With equal priors, depolarizing noise preserves the optimal measurement
//! until the degradation δ exceeds the smallest r_x. With unequal priors
//! and three or more states it generally does not.

use ompkit::discrimination::solve_general;
use ompkit::ensemble::presets;
use ompkit::omp_check::{check_equiprobable, check_omp};
use ompkit::{QubitChannel, Tolerances};

fn main() -> ompkit::Result<()> {
    let tol = Tolerances::default();
    for (name, e) in [("bb84", presets::bb84()), ("unequal", presets::unequal_priors())] {
        let sol = solve_general(&e, &tol)?;
        println!("{name}: P_guess {:.6}, min r {:.6}", sol.p_guess, sol.min_r(&sol.identified));
        for eta in [0.0, 0.2, 0.5, 0.9] {
            let ch = QubitChannel::depolarizing(eta)?;
            let r = check_omp(&e, &sol, &sol.identified, &ch, &tol)?;
            print!(
                "  eta {eta:.1}: omp {:<5}  δ {:.6}  P_guess after {:.6}",
                r.is_omp, r.delta, r.p_guess_after
            );
            if e.is_equiprobable(tol.match_tol) {
                let eq = check_equiprobable(&e, &sol, &ch, &tol)?;
                print!("  κ {:.6}", eq.kappa);
            }
            println!();
        }
    }
    Ok(())
}
