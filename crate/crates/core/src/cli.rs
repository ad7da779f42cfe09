//! Command-line front end: `solve`, `check`, `family` and `examples`.
//!
//! Exit codes: 0 success (or OMP), 1 negative verdict, 2 bad input, 3 an
//! invariant or measurement failed, 4 solver failure, 5 channel not CPTP.
//! State indices on the command line and in reports start at 1.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bloch::Tolerances;
use crate::channel::{is_cptp_inequalities, CPTP_TOL};
use crate::discrimination::{solve_general, DiscriminationSolution};
use crate::ensemble::Ensemble;
use crate::error::OmpError;
use crate::golden::{default_golden, parse_golden, run_examples};
use crate::io::{
    channel_json, matrix_json, one_based, parse_channel, parse_ensemble, report, vec3_json,
    vector_json,
};
use crate::omp_check::{check_equiprobable, check_omp, check_two_state};
use crate::omp_construct::{
    build_system, sieve_admissible, solve_family, unpack, SieveConfig, VARIABLE_NAMES,
};

pub const SEED_ENV: &str = "OMPKIT_SEED";

#[derive(Debug, Parser)]
#[command(name = "ompkit", version, about = "Qubit state discrimination and optimal-measurement-preserving channels")]
pub struct Cli {
    /// Leave the timestamp out of reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct TolArgs {
    /// Equation-residual tolerance.
    #[arg(long = "tol", default_value_t = 1e-8)]
    pub match_tol: f64,
    /// Eigenvalue slack.
    #[arg(long, default_value_t = 1e-9)]
    pub psd_tol: f64,
    /// Relative singular-value cutoff.
    #[arg(long, default_value_t = 1e-9)]
    pub rank_tol: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        Ok(Tolerances::new(self.psd_tol, self.rank_tol, self.match_tol)?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve minimum-error discrimination for an ensemble file.
    Solve {
        ensemble: PathBuf,
        /// Report the optimal measurement supported on these states (e.g. 1,2).
        #[arg(long, value_delimiter = ',')]
        measurement: Option<Vec<usize>>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check whether a channel preserves the optimal measurement.
    Check {
        ensemble: PathBuf,
        channel: PathBuf,
        /// Check only the measurement supported on these states.
        #[arg(long, value_delimiter = ',')]
        weak: Option<Vec<usize>>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Build the family of OMP channels and sample admissible ones.
    Family {
        ensemble: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// RNG seed; defaults to $OMPKIT_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Half-width of the coefficient box.
        #[arg(long = "box", default_value_t = 2.0)]
        half_width: f64,
        /// Restrict to t = 0.
        #[arg(long)]
        unital: bool,
        #[arg(long)]
        fixed_delta: Option<f64>,
        /// Preserve the measurement supported on these states instead of all.
        #[arg(long, value_delimiter = ',')]
        measurement: Option<Vec<usize>>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run the built-in worked examples against their reference values.
    Examples {
        #[arg(long)]
        json: bool,
        /// Reference values to compare against instead of the built-in ones.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub fn exit_code(e: &OmpError) -> i32 {
    match e {
        OmpError::Parse(_)
        | OmpError::BadPriors(_)
        | OmpError::BlochOutOfBall { .. }
        | OmpError::TooFewStates(_)
        | OmpError::IndexOutOfRange { .. }
        | OmpError::SameIndex(_)
        | OmpError::WrongLength { .. }
        | OmpError::BadParameter(_)
        | OmpError::BadTolerance(_)
        | OmpError::PairSetTooSmall(_)
        | OmpError::DeltaUnreachable(_) => 2,
        OmpError::ConvergenceFailure { .. } => 4,
        OmpError::ChannelNotCptp { .. } => 5,
        _ => 3,
    }
}

impl From<OmpError> for CliError {
    fn from(e: OmpError) -> Self {
        CliError {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> CliError {
    CliError { code: 2, message }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_ensemble(path: &PathBuf, tol: &Tolerances) -> Result<Ensemble, CliError> {
    parse_ensemble(&read(path)?, tol).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

/// 1-based command-line indices to 0-based ones.
fn zero_based(indices: &[usize], len: usize) -> Result<Vec<usize>, CliError> {
    indices
        .iter()
        .map(|&i| {
            if i == 0 || i > len {
                Err(input_error(format!("state index {i} outside 1..={len}")))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

/// Seed from the flag, then `$OMPKIT_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| input_error(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn solution_json(sol: &DiscriminationSolution) -> Value {
    json!({
        "K": { "alpha": sol.k.alpha, "beta": vec3_json(&sol.k.beta) },
        "p_guess": sol.p_guess,
        "r": sol.r,
        "comp_states": sol.comp_states.iter().map(|s| s.as_ref().map(vec3_json)).collect::<Vec<_>>(),
        "identified": one_based(&sol.identified),
        "case_tags": sol.case_tags,
        "povm_weights": sol.measurement.weights,
        "povm_directions": sol.measurement.directions.iter().map(vec3_json).collect::<Vec<_>>(),
        "iterations": sol.iterations,
    })
}

struct Outcome {
    code: i32,
    report: Value,
    text: Option<String>,
}

fn cmd_solve(ensemble: &PathBuf, measurement: &Option<Vec<usize>>, tol: &Tolerances) -> Result<Outcome, CliError> {
    let e = load_ensemble(ensemble, tol)?;
    let sol = solve_general(&e, tol)?;
    let mut result = solution_json(&sol);
    if let Some(m) = measurement {
        let subset = zero_based(m, e.len())?;
        let meas = sol.measurement_for(&e, &subset, tol)?;
        let mut sorted = subset.clone();
        sorted.sort_unstable();
        result["measurement"] = json!({
            "index_set": one_based(&sorted),
            "weights": meas.weights,
            "directions": meas.directions.iter().map(vec3_json).collect::<Vec<_>>(),
            "success_probability": meas.success_probability(&e),
            "completeness_residual": meas.completeness_residual(),
        });
    }
    Ok(Outcome { code: 0, report: result, text: None })
}

fn cmd_check(
    ensemble: &PathBuf,
    channel: &PathBuf,
    weak: &Option<Vec<usize>>,
    tol: &Tolerances,
) -> Result<Outcome, CliError> {
    let e = load_ensemble(ensemble, tol)?;
    let c = parse_channel(&read(channel)?).map_err(|err| {
        let mut err = CliError::from(err);
        err.message = format!("{}: {}", channel.display(), err.message);
        err
    })?;
    let sol = solve_general(&e, tol)?;
    let subset = match weak {
        Some(w) => zero_based(w, e.len())?,
        None => sol.identified.clone(),
    };
    let r = check_omp(&e, &sol, &subset, &c, tol)?;
    let mut result = json!({
        "is_omp": r.is_omp,
        "mode": r.mode,
        "delta": r.delta,
        "residuals": r.residuals,
        "r_bound_ok": r.r_bound_ok,
        "index_set": one_based(&r.index_set),
        "p_guess_before": r.p_guess_before,
        "p_guess_after": r.p_guess_after,
        "cross_check_ok": r.cross_check_ok,
        "reason": r.reason,
        "channel": channel_json(&c),
        "cptp": {
            "choi": c.is_cptp_choi(CPTP_TOL),
            "choi_min_eigenvalue": c.choi_min_eigenvalue(),
            "inequalities": is_cptp_inequalities(&c.canonical_form(), CPTP_TOL),
        },
    });
    if weak.is_none() && e.is_equiprobable(tol.match_tol) {
        if let Ok(eq) = check_equiprobable(&e, &sol, &c, tol) {
            result["equiprobable"] = json!(eq);
        }
    }
    if e.len() == 2 {
        if let Ok(two) = check_two_state(&e, &sol, &c, tol) {
            result["two_state"] = json!(two);
        }
    }
    Ok(Outcome {
        code: if r.is_omp { 0 } else { 1 },
        report: result,
        text: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_family(
    ensemble: &PathBuf,
    samples: usize,
    seed: Option<u64>,
    half_width: f64,
    unital: bool,
    fixed_delta: Option<f64>,
    measurement: &Option<Vec<usize>>,
    tol: &Tolerances,
) -> Result<Outcome, CliError> {
    let e = load_ensemble(ensemble, tol)?;
    let seed = resolve_seed(seed)?;
    let sol = solve_general(&e, tol)?;
    let subset = match measurement {
        Some(m) => zero_based(m, e.len())?,
        None => sol.identified.clone(),
    };
    let sys = build_system(&e, &sol, &subset)?;
    let mut fam = solve_family(&sys, tol);
    let full_nullity = fam.dim;
    if unital {
        fam = fam.unital(tol)?;
    }
    if let Some(d) = fixed_delta {
        fam = fam.delta_slice(d, tol)?;
    }
    let config = SieveConfig {
        samples,
        seed,
        half_width,
    };
    let sieve = sieve_admissible(&fam, &e, &sol, &config, tol)?;
    let (particular, particular_delta) = unpack(fam.x_particular.as_slice())?;
    let result = json!({
        "index_set": one_based(&sys.index_set),
        "H": matrix_json(&sys.h),
        "qdiff": vector_json(&sys.qdiff),
        "w": sys.w.iter().map(vector_json).collect::<Vec<_>>(),
        "Q": matrix_json(&sys.q),
        "b": vector_json(&sys.b),
        "unknowns": VARIABLE_NAMES,
        "nullity": full_nullity,
        "slice": { "unital": unital, "fixed_delta": fixed_delta, "dim": fam.dim },
        "x_particular": vector_json(&fam.x_particular),
        "particular_channel": channel_json(&particular),
        "particular_delta": particular_delta,
        "null_basis": fam.null_basis.iter().map(vector_json).collect::<Vec<_>>(),
        "max_delta": sys.max_delta,
        "sieve": {
            "samples": samples,
            "seed": seed,
            "box": half_width,
            "kept": sieve.kept.len(),
            "rejected_delta": sieve.rejected_delta,
            "rejected_cptp": sieve.rejected_cptp,
            "rejected_check": sieve.rejected_check,
            "channels": sieve.kept.iter().map(|k| json!({
                "sample": k.sample,
                "delta": k.delta,
                "D": channel_json(&k.channel)["D"],
                "t": vec3_json(&k.channel.t),
            })).collect::<Vec<_>>(),
        },
    });
    Ok(Outcome { code: 0, report: result, text: None })
}

fn cmd_examples(json_out: bool, golden: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let table = match golden {
        Some(p) => parse_golden(&read(p)?)?,
        None => default_golden(),
    };
    let outcomes = run_examples(&table, &Tolerances::default());
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let mut text = String::new();
    for o in &outcomes {
        let ok = o.fields.iter().filter(|f| f.pass).count();
        text.push_str(&format!(
            "{:<16} {}  ({ok}/{} fields)\n",
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.fields.len()
        ));
        if let Some(err) = &o.error {
            text.push_str(&format!("    error: {err}\n"));
        }
        for f in o.failures() {
            let actual = f.actual.map_or("missing".to_string(), |a| format!("{a:.10}"));
            text.push_str(&format!(
                "    {}: expected {:.10} ± {:e}, got {actual}\n",
                f.field, f.expected, f.tol
            ));
        }
    }
    text.push_str(&format!("{passed}/{} PASS\n", outcomes.len()));
    let code = if passed == outcomes.len() { 0 } else { 1 };
    Ok(Outcome {
        code,
        report: json!({ "passed": passed, "total": outcomes.len(), "examples": outcomes }),
        text: (!json_out).then_some(text),
    })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let default_tol = Tolerances::default();
    let (name, tol, outcome) = match &cli.command {
        Command::Solve { ensemble, measurement, tol } => {
            let t = tol.tolerances();
            ("solve", t.as_ref().ok().copied(), t.and_then(|t| cmd_solve(ensemble, measurement, &t)))
        }
        Command::Check { ensemble, channel, weak, tol } => {
            let t = tol.tolerances();
            ("check", t.as_ref().ok().copied(), t.and_then(|t| cmd_check(ensemble, channel, weak, &t)))
        }
        Command::Family {
            ensemble,
            samples,
            seed,
            half_width,
            unital,
            fixed_delta,
            measurement,
            tol,
        } => {
            let t = tol.tolerances();
            (
                "family",
                t.as_ref().ok().copied(),
                t.and_then(|t| {
                    cmd_family(ensemble, *samples, *seed, *half_width, *unital, *fixed_delta, measurement, &t)
                }),
            )
        }
        Command::Examples { json, golden } => ("examples", None, cmd_examples(*json, golden)),
    };
    match outcome {
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
        Ok(o) => {
            let full = report(name, &tol.unwrap_or(default_tol), !cli.no_timestamp, o.report);
            let rendered = serde_json::to_string_pretty(&full).expect("reports serialize");
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, format!("{rendered}\n")) {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    return 2;
                }
            }
            let _ = match o.text {
                Some(t) => write!(out, "{t}"),
                None => writeln!(out, "{rendered}"),
            };
            o.code
        }
    }
}

