//! Worked examples with reference values: one basis, BB84, three MUBs, the
//! SIC ensemble and a three-state ensemble with unequal priors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bloch::{Tolerances, Vec3};
use crate::channel::{cptp_intervals, Matrix3f, QubitChannel, CPTP_TOL};
use crate::discrimination::{solve_general, DiscriminationSolution};
use crate::ensemble::{presets, Ensemble};
use crate::error::{OmpError, Result};
use crate::omp_construct::{build_system, solve_family, unpack, OmpFamily, DELTA_INDEX};

pub const GOLDEN_JSON: &str = include_str!("../data/golden.json");

pub const EXAMPLE_NAMES: [&str; 5] = ["one-basis", "bb84", "three-mubs", "sic", "unequal-priors"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenValue {
    pub value: f64,
    pub tol: f64,
}

/// Example name → field name → reference value.
pub type GoldenTable = BTreeMap<String, BTreeMap<String, GoldenValue>>;

pub fn default_golden() -> GoldenTable {
    serde_json::from_str(GOLDEN_JSON).expect("embedded golden table parses")
}

pub fn parse_golden(text: &str) -> Result<GoldenTable> {
    serde_json::from_str(text).map_err(|e| OmpError::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldResult {
    pub field: String,
    pub expected: f64,
    /// `None` when the example did not produce the field.
    pub actual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleOutcome {
    pub name: String,
    pub pass: bool,
    pub fields: Vec<FieldResult>,
    pub error: Option<String>,
}

impl ExampleOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &FieldResult> {
        self.fields.iter().filter(|f| !f.pass)
    }
}

type Fields = BTreeMap<String, f64>;

fn strong_family(e: &Ensemble, tol: &Tolerances) -> Result<(DiscriminationSolution, OmpFamily)> {
    let sol = solve_general(e, tol)?;
    let sys = build_system(e, &sol, &sol.identified)?;
    let fam = solve_family(&sys, tol);
    Ok((sol, fam))
}

fn record_system(f: &mut Fields, fam: &OmpFamily) {
    let sys = &fam.system;
    for r in 0..sys.h.nrows() {
        for c in 0..3 {
            f.insert(format!("h_{}_{}", r + 1, c + 1), sys.h[(r, c)]);
            f.insert(format!("s_pair_{}_{}", r + 1, c + 1), sys.w[c][r]);
        }
        for i in 0..3 {
            f.insert(format!("w{}_{}", i + 1, r + 1), sys.w[i][r]);
        }
    }
    f.insert("nullity".into(), fam.dim as f64);
}

fn record_weights(f: &mut Fields, sol: &DiscriminationSolution) {
    f.insert("p_guess".into(), sol.p_guess);
    for (x, w) in sol.povm_weights().iter().enumerate() {
        f.insert(format!("weight_{}", x + 1), *w);
    }
}

/// Point of a one-dimensional family with the given `δ`.
fn at_delta(fam: &OmpFamily, delta: f64) -> Result<QubitChannel> {
    let v = fam
        .null_basis
        .iter()
        .find(|v| v[DELTA_INDEX].abs() > 1e-12)
        .ok_or(OmpError::DeltaUnreachable(delta))?;
    let c = (delta - fam.x_particular[DELTA_INDEX]) / v[DELTA_INDEX];
    Ok(unpack((&fam.x_particular + v * c).as_slice())?.0)
}

/// Unital depolarizing-type families: `D = (constant + slope·δ) I`.
fn record_unital_scaling(f: &mut Fields, fam: &OmpFamily, tol: &Tolerances) -> Result<()> {
    let unital = fam.unital(tol)?;
    let d0 = at_delta(&unital, 0.0)?.d;
    let d1 = at_delta(&unital, 0.1)?.d;
    let mut offdiag: f64 = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            if r != c {
                offdiag = offdiag.max(d0[(r, c)].abs()).max(d1[(r, c)].abs());
            }
        }
    }
    let spread = |d: &Matrix3f| {
        let diag = d.diagonal();
        diag.max() - diag.min()
    };
    f.insert("unital_diag_constant".into(), d0[(0, 0)]);
    f.insert("unital_diag_per_delta".into(), (d1[(0, 0)] - d0[(0, 0)]) / 0.1);
    f.insert("unital_offdiag_max_abs".into(), offdiag);
    f.insert("unital_diag_spread".into(), spread(&d0).max(spread(&d1)));
    f.insert("unital_dim".into(), unital.dim as f64);
    Ok(())
}

fn one_basis(tol: &Tolerances) -> Result<Fields> {
    let e = presets::one_basis(0.7);
    let (sol, fam) = strong_family(&e, tol)?;
    let mut f = Fields::new();
    f.insert("p_guess".into(), sol.p_guess);
    record_system(&mut f, &fam);
    for i in 0..3 {
        f.insert(format!("w{}", i + 1), fam.system.w[i][0]);
    }
    let free: Vec<usize> = (0..13).filter(|i| ![2, 5, 8].contains(i)).collect();
    let p = fam.parametrize(&free, tol)?;
    let coef = |d, x| p.coefficient(d, x).unwrap_or(f64::NAN);
    f.insert("d13_per_t1".into(), coef(2, 9));
    f.insert("d23_per_t2".into(), coef(5, 10));
    f.insert("d33_per_t3".into(), coef(8, 11));
    f.insert("d33_per_delta".into(), coef(8, 12));
    f.insert("d33_constant".into(), p.constant_of(8).unwrap_or(f64::NAN));
    let slice = fam.unital(tol)?.delta_slice(0.1, tol)?;
    let p = slice.parametrize(&[0, 1, 3, 4, 6, 7], tol)?;
    f.insert("unital_d13".into(), p.constant_of(2).unwrap_or(f64::NAN));
    f.insert("unital_d23".into(), p.constant_of(5).unwrap_or(f64::NAN));
    f.insert("unital_d33_at_delta_0.1".into(), p.constant_of(8).unwrap_or(f64::NAN));
    Ok(f)
}

/// The BB84 unital channel with `y = z = w = 1 − 4δ`.
pub fn bb84_unital_slice(delta: f64) -> QubitChannel {
    let a = 1.0 - 4.0 * delta;
    QubitChannel::new(
        Matrix3f::new(a, a, 0.0, 0.0, a, 0.0, 0.0, a, a),
        Vec3::zeros(),
    )
}

/// The BB84 slice `y = z = w = 1 − 4δ`, `t = (0, t₂, 0)`.
pub fn bb84_translated_slice(delta: f64, t2: f64) -> QubitChannel {
    let mut c = bb84_unital_slice(delta);
    c.t = Vec3::new(0.0, t2, 0.0);
    c
}

fn bb84(tol: &Tolerances) -> Result<Fields> {
    let e = presets::bb84();
    let (sol, fam) = strong_family(&e, tol)?;
    let mut f = Fields::new();
    record_weights(&mut f, &sol);
    let mz = sol.measurement_for(&e, &[0, 1], tol)?;
    let mx = sol.measurement_for(&e, &[2, 3], tol)?;
    f.insert("mz_success".into(), mz.success_probability(&e));
    f.insert("mx_success".into(), mx.success_probability(&e));
    record_system(&mut f, &fam);

    let p = fam.parametrize(&[1, 4, 7, 9, 10, 11, 12], tol)?;
    f.insert("d11_per_delta".into(), p.coefficient(0, 12).unwrap_or(f64::NAN));
    f.insert("d11_constant".into(), p.constant_of(0).unwrap_or(f64::NAN));
    f.insert("d33_per_delta".into(), p.coefficient(8, 12).unwrap_or(f64::NAN));
    f.insert("d33_constant".into(), p.constant_of(8).unwrap_or(f64::NAN));
    let mut fixed: f64 = 0.0;
    for dep in [2, 3, 5, 6] {
        fixed = fixed.max(p.constant_of(dep).unwrap_or(f64::NAN).abs());
        for free in &p.free {
            fixed = fixed.max(p.coefficient(dep, *free).unwrap_or(f64::NAN).abs());
        }
    }
    f.insert("fixed_entries_max_abs".into(), fixed);

    let slice = bb84_unital_slice(0.1);
    if fam.residual(&crate::omp_construct::pack(&slice, 0.1)) > tol.match_tol {
        return Err(OmpError::NotOmp("BB84 unital slice left the family".into()));
    }
    let lambdas = slice.canonical_form().lambdas;
    for k in 0..3 {
        f.insert(format!("lambda{}_at_delta_0.1", k + 1), lambdas[k]);
    }
    let intervals = cptp_intervals(bb84_unital_slice, 0.0, 0.25 - 1e-9, 2500, CPTP_TOL);
    if let Some(last) = intervals.last() {
        f.insert("unital_slice_cptp_from".into(), last.0);
    }
    Ok(f)
}

fn symmetric(e: Ensemble, tol: &Tolerances) -> Result<Fields> {
    let (sol, fam) = strong_family(&e, tol)?;
    let mut f = Fields::new();
    record_weights(&mut f, &sol);
    record_system(&mut f, &fam);
    record_unital_scaling(&mut f, &fam, tol)?;
    Ok(f)
}

fn unequal_priors(tol: &Tolerances) -> Result<Fields> {
    let e = presets::unequal_priors();
    let (sol, fam) = strong_family(&e, tol)?;
    let mut f = Fields::new();
    record_weights(&mut f, &sol);
    for (x, s) in sol.comp_states.iter().enumerate() {
        if let Some(s) = s {
            for c in 0..3 {
                f.insert(format!("s{}_{}", x + 1, c + 1), s[c]);
            }
        }
    }
    record_system(&mut f, &fam);
    let p = fam.parametrize(&[0, 1, 3, 4, 6, 7, 12], tol)?;
    let coef = |d, x| p.coefficient(d, x).unwrap_or(f64::NAN);
    let konst = |d| p.constant_of(d).unwrap_or(f64::NAN);
    f.insert("d13_constant".into(), konst(2));
    f.insert("d13_per_d11".into(), coef(2, 0));
    f.insert("d13_per_delta".into(), coef(2, 12));
    f.insert("d23_per_d21".into(), coef(5, 3));
    f.insert("d23_per_delta".into(), coef(5, 12));
    f.insert("d33_constant".into(), konst(8));
    f.insert("d33_per_d31".into(), coef(8, 6));
    f.insert("d33_per_delta".into(), coef(8, 12));
    f.insert("t1_per_d12".into(), coef(9, 1));
    f.insert("t1_per_delta".into(), coef(9, 12));
    f.insert("t2_constant".into(), konst(10));
    f.insert("t2_per_d22".into(), coef(10, 4));
    f.insert("t2_per_delta".into(), coef(10, 12));
    f.insert("t3_per_d32".into(), coef(11, 7));
    f.insert("t3_per_delta".into(), coef(11, 12));
    Ok(f)
}

/// Every field computed for one example.
pub fn compute_example(name: &str, tol: &Tolerances) -> Result<BTreeMap<String, f64>> {
    match name {
        "one-basis" => one_basis(tol),
        "bb84" => bb84(tol),
        "three-mubs" => symmetric(presets::three_mubs(), tol),
        "sic" => symmetric(presets::sic(), tol),
        "unequal-priors" => unequal_priors(tol),
        other => Err(OmpError::BadParameter(format!("unknown example {other}"))),
    }
}

/// Runs every example and compares it against `golden`.
pub fn run_examples(golden: &GoldenTable, tol: &Tolerances) -> Vec<ExampleOutcome> {
    EXAMPLE_NAMES
        .iter()
        .map(|&name| {
            let expected = golden.get(name).cloned().unwrap_or_default();
            match compute_example(name, tol) {
                Err(e) => ExampleOutcome {
                    name: name.into(),
                    pass: false,
                    fields: Vec::new(),
                    error: Some(e.to_string()),
                },
                Ok(actual) => {
                    let fields: Vec<FieldResult> = expected
                        .iter()
                        .map(|(field, g)| {
                            let value = actual.get(field).copied();
                            FieldResult {
                                field: field.clone(),
                                expected: g.value,
                                actual: value,
                                tol: g.tol,
                                pass: value.is_some_and(|v| (v - g.value).abs() <= g.tol),
                            }
                        })
                        .collect();
                    let pass = !fields.is_empty() && fields.iter().all(|f| f.pass);
                    ExampleOutcome {
                        name: name.into(),
                        pass,
                        fields,
                        error: if expected.is_empty() {
                            Some("no golden values".into())
                        } else {
                            None
                        },
                    }
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_examples_pass() {
        let outcomes = run_examples(&default_golden(), &Tolerances::default());
        for o in &outcomes {
            let bad: Vec<_> = o.failures().collect();
            assert!(o.pass, "{}: {:?} {:?}", o.name, o.error, bad);
        }
    }

    #[test]
    fn corrupted_golden_fails_with_diff() {
        let mut golden = default_golden();
        golden.get_mut("bb84").unwrap().get_mut("p_guess").unwrap().value = 0.6;
        let outcomes = run_examples(&golden, &Tolerances::default());
        let bb84 = outcomes.iter().find(|o| o.name == "bb84").unwrap();
        assert!(!bb84.pass);
        let bad: Vec<_> = bb84.failures().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].field, "p_guess");
        assert!((bad[0].actual.unwrap() - 0.5).abs() < 1e-12);
    }
}
