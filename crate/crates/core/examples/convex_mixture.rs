//! Mixing two OMP channels gives an OMP channel whose degradation is the
//! same mixture of theirs.

use ompkit::discrimination::solve_general;
use ompkit::ensemble::presets;
use ompkit::omp_check::convex_mix_check;
use ompkit::omp_construct::{build_system, sieve_admissible, solve_family, SieveConfig};
use ompkit::Tolerances;

fn main() -> ompkit::Result<()> {
    let tol = Tolerances::default();
    let e = presets::bb84();
    let sol = solve_general(&e, &tol)?;
    let fam = solve_family(&build_system(&e, &sol, &sol.identified)?, &tol);
    let kept = sieve_admissible(&fam, &e, &sol, &SieveConfig { samples: 200, half_width: 0.5, ..SieveConfig::default() }, &tol)?.kept;
    println!("{} admissible channels sampled", kept.len());

    for pair in kept.chunks(2).take(5) {
        let [a, b] = pair else { break };
        for kappa in [0.25, 0.5] {
            let r = convex_mix_check(&a.channel, &b.channel, kappa, &e, &sol, &sol.identified, &tol)?;
            println!(
                "δ1 {:.4} δ2 {:.4} κ {kappa}: omp {} δ {:.4} expected {:.4}",
                a.delta,
                b.delta,
                r.is_omp,
                r.delta,
                (1.0 - kappa) * a.delta + kappa * b.delta
            );
        }
    }
    Ok(())
}
