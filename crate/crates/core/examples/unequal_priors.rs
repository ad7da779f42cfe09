//! Three states with unequal priors: complementary states, and the OMP
//! family written with d11, d12, d21, d22, d31, d32 and δ as free unknowns.

use ompkit::discrimination::solve_general;
use ompkit::ensemble::presets;
use ompkit::omp_construct::{build_system, solve_family};
use ompkit::Tolerances;

fn main() -> ompkit::Result<()> {
    let tol = Tolerances::default();
    let e = presets::unequal_priors();
    let sol = solve_general(&e, &tol)?;

    println!("P_guess = {:.6}", sol.p_guess);
    for x in 0..e.len() {
        let v = e.bloch(x);
        let s = sol.comp_states[x].unwrap();
        println!(
            "q{} = {:.2}  v = ({:+.3}, {:+.3}, {:+.3})  s = ({:+.3}, {:+.3}, {:+.3})",
            x + 1,
            e.prior(x),
            v.x,
            v.y,
            v.z,
            s.x,
            s.y,
            s.z
        );
    }

    let sys = build_system(&e, &sol, &sol.identified)?;
    let fam = solve_family(&sys, &tol);
    println!("\nnullity {}", fam.dim);
    let p = fam.parametrize(&[0, 1, 3, 4, 6, 7, 12], &tol)?;
    for line in p.describe(1e-9) {
        println!("  {line}");
    }
    Ok(())
}
