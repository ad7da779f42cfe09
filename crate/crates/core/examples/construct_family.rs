//! Unital OMP families of the three-MUB and SIC ensembles, sampled and
//! filtered down to admissible channels.

use ompkit::discrimination::solve_general;
use ompkit::ensemble::presets;
use ompkit::omp_construct::{build_system, sieve_admissible, solve_family, SieveConfig};
use ompkit::Tolerances;

fn main() -> ompkit::Result<()> {
    let tol = Tolerances::default();
    let seed = std::env::var("OMPKIT_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    for (name, e) in [("three-mubs", presets::three_mubs()), ("sic", presets::sic())] {
        let sol = solve_general(&e, &tol)?;
        let sys = build_system(&e, &sol, &sol.identified)?;
        let fam = solve_family(&sys, &tol);
        let unital = fam.unital(&tol)?;
        println!("{name}: Q is {}x13, nullity {}, unital slice dim {}", sys.q.nrows(), fam.dim, unital.dim);

        let config = SieveConfig { samples: 500, seed, ..SieveConfig::default() };
        let res = sieve_admissible(&unital, &e, &sol, &config, &tol)?;
        println!(
            "  kept {} of {} (δ out of range {}, not CPTP {}, failed check {})",
            res.kept.len(),
            res.drawn,
            res.rejected_delta,
            res.rejected_cptp,
            res.rejected_check
        );
        for k in res.kept.iter().take(3) {
            println!("  δ {:.4}: diag D = {:.4} (1 - D11)/δ = {:.4}", k.delta, k.channel.d[(0, 0)], (1.0 - k.channel.d[(0, 0)]) / k.delta);
        }
    }
    Ok(())
}
