//! Optimal discrimination of the four BB84 states, and the two
//! single-basis measurements that are also optimal.

use ompkit::discrimination::solve_general;
use ompkit::ensemble::presets;
use ompkit::Tolerances;

fn main() -> ompkit::Result<()> {
    let tol = Tolerances::default();
    let e = presets::bb84();
    let sol = solve_general(&e, &tol)?;

    println!("P_guess = {:.12}", sol.p_guess);
    println!("K = {:.6} I + ({:.1e}, {:.1e}, {:.1e})·σ", sol.k.alpha, sol.k.beta.x, sol.k.beta.y, sol.k.beta.z);
    for x in 0..e.len() {
        let s = sol.comp_states[x].unwrap();
        println!(
            "state {}: r = {:.6}  s = ({:+.3}, {:+.3}, {:+.3})  weight {:.3}  {:?}",
            x + 1,
            sol.r[x],
            s.x,
            s.y,
            s.z,
            sol.povm_weights()[x],
            sol.case_tags[x]
        );
    }

    // M_Z only uses states 1 and 2, M_X only states 3 and 4.
    for (name, subset) in [("M_Z", [0, 1]), ("M_X", [2, 3])] {
        let m = sol.measurement_for(&e, &subset, &tol)?;
        println!("{name}: weights {:?}  success {:.12}", m.weights, m.success_probability(&e));
    }
    Ok(())
}
