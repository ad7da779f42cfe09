mod common;

use nalgebra::DMatrix;
use ompkit::channel::{is_cptp_inequalities, Matrix3f, CPTP_TOL};
use ompkit::discrimination::{oracle_random_search, solve_general, solve_two_state};
use ompkit::linalg::{nullspace, pinv, rank, RealMatrix};
use ompkit::omp_check::check_omp;
use ompkit::omp_construct::{build_system, sieve_admissible, solve_family, SieveConfig, T_INDICES};
use ompkit::{CptpVerdict, Ensemble, Herm2, QubitChannel, Tolerances, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn vec3(range: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-range..range).prop_map(Vec3::from)
}

/// Random matrix, rank deficient about half the time.
fn matrix() -> impl Strategy<Value = RealMatrix> {
    (1usize..=12, 1usize..=13, any::<u64>(), any::<bool>()).prop_map(|(r, c, seed, low)| {
        let mut g = rng(seed);
        if low {
            let k = g.gen_range(1..=r.min(c));
            let a = DMatrix::from_fn(r, k, |_, _| g.gen_range(-1.0..1.0));
            let b = DMatrix::from_fn(k, c, |_, _| g.gen_range(-1.0..1.0));
            a * b
        } else {
            DMatrix::from_fn(r, c, |_, _| g.gen_range(-1.0..1.0))
        }
    })
}

/// A CPTP channel: random affine map pulled towards the fully depolarizing one.
fn random_cptp(g: &mut ChaCha8Rng) -> QubitChannel {
    let c = QubitChannel::new(
        Matrix3f::from_fn(|_, _| g.gen_range(-1.0..1.0)),
        Vec3::from_fn(|_, _| g.gen_range(-0.5..0.5)),
    );
    let dead = QubitChannel::depolarizing(1.0).unwrap();
    (0..=20)
        .map(|k| c.mix(&dead, k as f64 / 20.0))
        .find(|m| m.is_cptp_choi(CPTP_TOL).is_cptp())
        .unwrap()
}

fn rotated(e: &Ensemble, ch: &QubitChannel) -> Ensemble {
    e.map_states(|v| ch.d * v, &tol()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigen_reconstructs(alpha in -2.0..2.0f64, beta in vec3(2.0)) {
        let a = Herm2::new(alpha, beta);
        let e = a.eigen();
        let hi = Herm2::projector(&e.axis);
        let lo = Herm2::projector(&-e.axis);
        let back = e.hi * hi + e.lo * lo;
        prop_assert!(a.max_abs_diff(&back) <= 1e-10);
    }

    #[test]
    fn moore_penrose_identities(m in matrix()) {
        let p = pinv(&m, 1e-9);
        let scale = 1.0 + m.amax() * p.amax();
        prop_assert!((&m * &p * &m - &m).amax() <= 1e-9 * scale * (1.0 + m.amax()), "{:?} {:?} {:e}", m.shape(), m.clone().svd(false, false).singular_values.as_slice(), (&m * &p * &m - &m).amax());
        prop_assert!((&p * &m * &p - &p).amax() <= 1e-9 * scale * (1.0 + p.amax()));
        let mp = &m * &p;
        let pm = &p * &m;
        prop_assert!((&mp - mp.transpose()).amax() <= 1e-9 * scale);
        prop_assert!((&pm - pm.transpose()).amax() <= 1e-9 * scale);
    }

    #[test]
    fn rank_plus_nullity(m in matrix()) {
        prop_assert_eq!(rank(&m, 1e-9) + nullspace(&m, 1e-9).len(), m.ncols());
    }

    #[test]
    fn cptp_tests_agree(d in prop::array::uniform9(-1.2..1.2f64), t in vec3(1.2), mode in 0usize..3) {
        let d = Matrix3f::from_row_slice(&d);
        let t = match mode {
            0 => Vec3::zeros(),
            1 => QubitChannel::new(d, Vec3::zeros()).canonical_form().o1.column(2) * t.x,
            _ => t,
        };
        let c = QubitChannel::new(d, t);
        let ineq = is_cptp_inequalities(&c.canonical_form(), CPTP_TOL);
        if ineq != CptpVerdict::InconclusiveUseChoi {
            prop_assert_eq!(ineq, c.is_cptp_choi(CPTP_TOL));
        }
    }

    #[test]
    fn report_numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let r = ompkit::io::report("solve", &tol(), false, serde_json::json!({ "x": x }));
        let text = serde_json::to_string_pretty(&r).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back["result"]["x"].as_f64().unwrap().to_bits(), x.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn two_state_matches_general(seed in any::<u64>()) {
        let e = common::ensemble(&mut rng(seed), 2, false, 0.0);
        let a = solve_two_state(&e, &tol()).unwrap();
        let b = solve_general(&e, &tol()).unwrap();
        prop_assert!((a.p_guess - b.p_guess).abs() <= 1e-8);
        prop_assert!(a.k.max_abs_diff(&b.k) <= 1e-8);
        let helstrom = 0.5 * (1.0 + e.helstrom(0, 1).unwrap().h.trace_norm());
        prop_assert!((a.p_guess - helstrom).abs() <= 1e-12);
    }

    #[test]
    fn cptp_image_stays_in_ball(seed in any::<u64>()) {
        let mut g = rng(seed);
        let c = random_cptp(&mut g);
        let v = common::bloch(&mut g, 0.0);
        prop_assert!(c.apply(&v, &tol()).is_ok_and(|w| w.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn composition_is_cptp(seed in any::<u64>()) {
        let mut g = rng(seed);
        let first = random_cptp(&mut g);
        let second = random_cptp(&mut g);
        let both = first.then(&second);
        prop_assert!(both.is_cptp_choi(CPTP_TOL).is_cptp());
        prop_assert!((both.d - second.d * first.d).amax() <= 1e-15);
        let v = common::bloch(&mut g, 0.0);
        let step = second.apply(&first.apply(&v, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!((both.apply(&v, &tol()).unwrap() - step).amax() <= 1e-12);
    }

    #[test]
    fn guessing_probability_never_increases(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=5);
        let e = common::ensemble(&mut g, n, false, 0.0);
        let c = random_cptp(&mut g);
        let before = solve_general(&e, &tol()).unwrap().p_guess;
        let after = solve_general(&e.map_states(|v| c.d * v + c.t, &tol()).unwrap(), &tol()).unwrap().p_guess;
        prop_assert!(after <= before + tol().match_tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn helstrom_vectors_are_antisymmetric_and_additive(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(3..=6);
        let e = common::ensemble(&mut g, n, false, 0.0);
        let (x, k, y) = (0, 1, 2);
        let xy = e.helstrom(x, y).unwrap();
        let yx = e.helstrom(y, x).unwrap();
        prop_assert!(xy.h.max_abs_diff(&-yx.h) == 0.0);
        let sum = e.helstrom(x, k).unwrap().h_vec + e.helstrom(k, y).unwrap().h_vec;
        prop_assert!((sum - xy.h_vec).amax() <= 1e-15);
    }

    #[test]
    fn duality_bracket_and_congruence(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=5);
        let e = common::ensemble(&mut g, n, false, 0.0);
        let t = tol();
        let sol = solve_general(&e, &t).unwrap();
        for x in 0..n {
            prop_assert!((sol.k - e.weighted(x)).min_eigenvalue() >= -t.psd_tol);
        }
        prop_assert!((sol.p_guess - sol.k.trace()).abs() <= t.match_tol);
        prop_assert!(oracle_random_search(&e, 2000, seed) <= sol.p_guess + 1e-8);
        for &x in &sol.identified {
            for &y in sol.identified.iter().filter(|&&y| y != x) {
                if let (Some(sx), Some(sy)) = (sol.comp_operator(x), sol.comp_operator(y)) {
                    let rhs = sol.r[y] * sy - sol.r[x] * sx;
                    prop_assert!(e.helstrom(x, y).unwrap().h.max_abs_diff(&rhs) <= t.match_tol);
                }
            }
        }
    }

    #[test]
    fn dropping_an_unidentified_state_rescales(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=4);
        let mut pairs: Vec<(f64, Vec3)> = (0..n).map(|_| (1.0, common::unit(&mut g))).collect();
        pairs.push((g.gen_range(0.05..0.5), common::bloch(&mut g, 0.0) * 0.1));
        let total: f64 = pairs.iter().map(|p| p.0).sum();
        let e = Ensemble::from_pairs(pairs.into_iter().map(|(q, v)| (q / total, v)), &tol()).unwrap();
        let sol = solve_general(&e, &tol()).unwrap();
        prop_assume!(!sol.identified.contains(&n));
        let (reduced, r) = e.reduce_unidentified(n).unwrap();
        let rs = solve_general(&reduced, &tol()).unwrap();
        prop_assert!((rs.p_guess - sol.p_guess / r).abs() <= 1e-8);
        prop_assert!(rs.k.max_abs_diff(&((1.0 / r) * sol.k)) <= 1e-8);
        for x in 0..n {
            prop_assert!((rs.r[x] - sol.r[x] / r).abs() <= 1e-8);
        }
    }

    #[test]
    fn rotations_carry_complementary_states(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=5);
        let e = common::ensemble(&mut g, n, false, 0.3);
        let u = QubitChannel::unitary(&common::unit(&mut g), g.gen_range(-3.0..3.0)).unwrap();
        let a = solve_general(&e, &tol()).unwrap();
        let b = solve_general(&rotated(&e, &u), &tol()).unwrap();
        for x in 0..n {
            prop_assert!((a.r[x] - b.r[x]).abs() <= 1e-8);
            if let (Some(sa), Some(sb)) = (a.comp_states[x], b.comp_states[x]) {
                prop_assert!((u.d * sa - sb).amax() <= 1e-7);
            }
        }
    }

    #[test]
    fn trace_preservation_leaves_alpha_alone(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=5);
        let e = common::ensemble(&mut g, n, true, 0.0);
        let c = random_cptp(&mut g);
        let h = e.helstrom(0, 1).unwrap().h;
        prop_assert!(h.alpha == 0.0);
        prop_assert!(c.apply_operator(&h).alpha.abs() <= 1e-15);
    }

    #[test]
    fn omp_verdicts_are_confirmed_by_resolving(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=5);
        let e = common::ensemble(&mut g, n, true, 0.2);
        let t = tol();
        let sol = solve_general(&e, &t).unwrap();
        prop_assume!(sol.identified.len() >= 2);
        let c = QubitChannel::depolarizing(g.gen_range(0.0..1.0)).unwrap();
        let report = check_omp(&e, &sol, &sol.identified, &c, &t).unwrap();
        if report.is_omp {
            let after = e.map_states(|v| c.d * v + c.t, &t).unwrap();
            let p_after = solve_general(&after, &t).unwrap().p_guess;
            prop_assert!((p_after - (sol.p_guess - report.delta)).abs() <= 10.0 * t.match_tol);
            prop_assert!((sol.measurement.success_probability(&after) - p_after).abs() <= 10.0 * t.match_tol);
        }
    }

    #[test]
    fn equal_priors_leave_t_free(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=5);
        let e = common::ensemble(&mut g, n, true, 0.2);
        let sol = solve_general(&e, &tol()).unwrap();
        prop_assume!(sol.identified.len() >= 2);
        let sys = build_system(&e, &sol, &sol.identified).unwrap();
        for c in T_INDICES {
            prop_assert!(sys.q.column(c).amax() <= 1e-15);
        }
    }

    #[test]
    fn small_measurements_leave_room(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=6);
        let e = common::ensemble(&mut g, n, false, 0.0);
        let t = tol();
        let sol = solve_general(&e, &t).unwrap();
        prop_assume!(sol.identified.len() >= 2);
        let m = sol.identified.len().min(4);
        let sys = build_system(&e, &sol, &sol.identified[..m]).unwrap();
        let fam = solve_family(&sys, &t);
        prop_assert!(fam.dim >= 4);
        prop_assert!(sys.residual(&sys.b) <= 1e-12);
    }

    #[test]
    fn family_points_solve_the_system(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=5);
        let e = common::ensemble(&mut g, n, false, 0.0);
        let t = tol();
        let sol = solve_general(&e, &t).unwrap();
        prop_assume!(sol.identified.len() >= 2);
        let sys = build_system(&e, &sol, &sol.identified).unwrap();
        let fam = solve_family(&sys, &t);
        let c: Vec<f64> = (0..fam.dim).map(|_| g.gen_range(-2.0..2.0)).collect();
        prop_assert!(sys.residual(&fam.point(&c)) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn sieve_output_is_sound(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(2..=4);
        let equal = g.gen_bool(0.5);
        let e = common::ensemble(&mut g, n, equal, 0.3);
        let t = tol();
        let sol = solve_general(&e, &t).unwrap();
        prop_assume!(sol.identified.len() >= 2);
        let fam = solve_family(&build_system(&e, &sol, &sol.identified).unwrap(), &t);
        let config = SieveConfig { samples: 200, seed, half_width: 0.5 };
        for k in sieve_admissible(&fam, &e, &sol, &config, &t).unwrap().kept {
            prop_assert!(k.channel.is_cptp_choi(CPTP_TOL).is_cptp());
            prop_assert!(check_omp(&e, &sol, &sol.identified, &k.channel, &t).unwrap().is_omp);
        }
    }
}
