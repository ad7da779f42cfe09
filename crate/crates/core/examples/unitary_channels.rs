//! Rotations: for two identified states only rotations about the Helstrom
//! axis are OMP; for three or more only the identity is.

use std::f64::consts::PI;

use ompkit::discrimination::solve_general;
use ompkit::ensemble::presets;
use ompkit::omp_check::{check_omp, check_unitary_propositions};
use ompkit::{QubitChannel, Tolerances, Vec3};

fn main() -> ompkit::Result<()> {
    let tol = Tolerances::default();
    let axes = [("z", Vec3::z()), ("x", Vec3::x()), ("diag", Vec3::new(1.0, 1.0, 1.0).normalize())];

    for (name, e) in [("one-basis", presets::one_basis(0.7)), ("bb84", presets::bb84())] {
        let sol = solve_general(&e, &tol)?;
        println!("{name} ({} identified)", sol.identified.len());
        for (axis_name, axis) in &axes {
            let ch = QubitChannel::unitary(axis, PI / 5.0)?;
            let prop = check_unitary_propositions(&e, &sol, &ch, &tol)?;
            let full = check_omp(&e, &sol, &sol.identified, &ch, &tol)?;
            println!(
                "  axis {axis_name:<4} propositions {:<5} theorem {:<5} {}",
                prop.is_omp,
                full.is_omp,
                prop.reason
            );
        }
    }
    Ok(())
}
