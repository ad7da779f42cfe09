//! Recomputes the five worked examples and compares them to the stored
//! reference values.

use ompkit::golden::{default_golden, run_examples};
use ompkit::Tolerances;

fn main() {
    let outcomes = run_examples(&default_golden(), &Tolerances::default());
    for o in &outcomes {
        println!("{:<16} {}", o.name, if o.pass { "PASS" } else { "FAIL" });
        for f in o.failures() {
            println!("    {} expected {} got {:?}", f.field, f.expected, f.actual);
        }
    }
}
