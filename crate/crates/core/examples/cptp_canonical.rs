//! Canonical form of the BB84 unital slice and where it is CPTP, by the
//! Choi matrix and by the canonical-form inequalities.

use ompkit::channel::{cptp_intervals, is_cptp_inequalities, CPTP_TOL};
use ompkit::golden::{bb84_translated_slice, bb84_unital_slice};

fn main() {
    for delta in [0.05, 0.1, 0.15, 0.2] {
        let ch = bb84_unital_slice(delta);
        let f = ch.canonical_form();
        println!(
            "δ {delta:.2}: λ = ({:+.4}, {:+.4}, {:+.4})  choi {:?}  inequalities {:?}  min eig {:+.4}",
            f.lambdas.x,
            f.lambdas.y,
            f.lambdas.z,
            ch.is_cptp_choi(CPTP_TOL),
            is_cptp_inequalities(&f, CPTP_TOL),
            ch.choi_min_eigenvalue()
        );
    }

    let unital = cptp_intervals(bb84_unital_slice, 0.0, 0.25, 2000, CPTP_TOL);
    println!("unital slice CPTP for δ in {unital:.5?}");
    let shifted = cptp_intervals(|t2| bb84_translated_slice(0.3, t2), -1.0, 1.0, 2000, CPTP_TOL);
    println!("δ = 0.3, t = (0, t2, 0): CPTP for t2 in {shifted:.5?}");
}
