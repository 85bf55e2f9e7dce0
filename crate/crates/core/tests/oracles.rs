//! Values checked against independent computations (mpmath at 25 digits,
//! direct summation, dense Newton seeding), frozen here.

use lcrit::auxseries::{s1_dual, s2_dual, SERIES_CUTOFF};
use lcrit::characters::{character, primitive_characters};
use lcrit::critzeros::{count_zeros, find_critical_points, newton_refine, SearchRect};
use lcrit::diophantine::{kronecker_defect, AngleTargets, Tau, TauCertificate};
use lcrit::lfengine::{dirichlet_l, log_l, zeta_prime, EvalConfig};
use lcrit::primesums::PrimeTable;
use lcrit::scanner::{check_thm1_inequality, euler_factor_bound, thm1_triangle};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn l_values_mod_five() {
    let cfg = EvalConfig::default();
    let chr = character(5, 1).unwrap();
    let cases = [
        (c(1.0, 2.0), c(1.323_208_069_610_121_9, 0.363_739_445_532_604_97)),
        (c(0.5, 14.0), c(1.090_064_759_586_415_5, -0.694_015_304_705_972_7)),
        (c(1.0, 1000.0), c(1.346_034_475_135_958_5, -0.948_032_043_576_883_3)),
    ];
    for (s, want) in cases {
        let got = dirichlet_l(s, &chr, &cfg).unwrap().value;
        assert!((got - want).norm() < 1e-10, "{s}: {got} vs {want}");
    }
}

#[test]
fn log_l_is_a_logarithm() {
    let cfg = EvalConfig::default();
    let chr = character(5, 1).unwrap();
    let s = c(1.0, 1000.0);
    let lg = log_l(s, &chr, &cfg).unwrap().value;
    // principal value from mpmath
    let principal = c(0.498_580_129_847_108, -0.613_615_957_599_523_6);
    assert!((lg.re - principal.re).abs() < 1e-10);
    let k = (lg.im - principal.im) / (2.0 * std::f64::consts::PI);
    assert!((k - k.round()).abs() < 1e-9, "branch offset {k}");
}

#[test]
fn zeta_prime_off_axis() {
    let v = zeta_prime(c(1.0, 10.0), &EvalConfig::default()).unwrap().value;
    assert!((v - c(-0.262_274_134_165_414_4, 0.022_271_072_307_072_81)).norm() < 1e-11);
}

#[test]
fn s_constants_two_routes() {
    let cfg = EvalConfig::default();
    let tbl = PrimeTable::new(SERIES_CUTOFF).unwrap();
    let chr = character(5, 1).unwrap();
    let a = s1_dual(&chr, &cfg, &tbl, SERIES_CUTOFF).unwrap();
    let b = s2_dual(&chr, &cfg, &tbl, SERIES_CUTOFF).unwrap();
    for d in [&a, &b] {
        assert!(d.agreement <= 1e-6, "{d:?}");
    }
    assert!((a.analytic.value - c(0.244_494_94, -0.088_336_13)).norm() < 1e-6);
    assert!((b.analytic.value - c(-0.684_316_90, 0.088_336_13)).norm() < 1e-6);
}

#[test]
fn zero_free_right_rectangle_by_grid_minimum() {
    let cfg = EvalConfig::default();
    let r = SearchRect::new(1.5, 3.0, 0.0, 10.0, 0.05).unwrap();
    assert_eq!(count_zeros(&r, &cfg).unwrap(), 0);
    let mut min = f64::INFINITY;
    for i in 0..=60 {
        for j in 0..=200 {
            let s = c(1.5 + 1.5 * i as f64 / 60.0, 10.0 * j as f64 / 200.0);
            min = min.min(zeta_prime(s, &cfg).unwrap().value.norm());
        }
    }
    assert!(min > 0.05, "grid minimum {min}");
}

#[test]
fn count_matches_dense_newton_seeding() {
    let cfg = EvalConfig::default();
    let r = SearchRect::new(0.4, 1.2, 20.0, 30.0, 0.05).unwrap();
    let n = count_zeros(&r, &cfg).unwrap();
    let mut found: Vec<Complex64> = Vec::new();
    for i in 0..=16 {
        for j in 0..=100 {
            let z0 = c(0.4 + 0.8 * i as f64 / 16.0, 20.0 + 10.0 * j as f64 / 100.0);
            if let Some(z) = newton_refine(z0, &cfg).unwrap() {
                if r.contains(z) && found.iter().all(|w| (w - z).norm() > 1e-6) {
                    assert!(zeta_prime(z, &cfg).unwrap().value.norm() <= 1e-8);
                    found.push(z);
                }
            }
        }
    }
    assert_eq!(n as usize, found.len());
}

#[test]
fn conjugate_rectangle_gives_conjugate_points() {
    let cfg = EvalConfig::default();
    let r = SearchRect::new(0.0, 3.0, 20.0, 45.0, 0.05).unwrap();
    let a = find_critical_points(&r, &cfg).unwrap();
    let b = find_critical_points(&r.conj(), &cfg).unwrap();
    assert_eq!(a.points.len(), b.points.len());
    for p in &a.points {
        assert!(b.points.iter().any(|q| (q.point() - p.point().conj()).norm() < 1e-10));
    }
    let sym = SearchRect::new(0.0, 3.0, -45.0, 45.0, 0.05).unwrap();
    assert_eq!(count_zeros(&sym, &cfg).unwrap() % 2, 0);
}

#[test]
fn certificate_json_revalidates() {
    let tg = AngleTargets::new(
        vec![2, 3, 5, 7, 11, 13],
        [1u64, 3, 5, 7, 2, 4].iter().map(|&k| lcrit::characters::Angle::new(k, 8)).collect(),
        0.05,
    )
    .unwrap();
    let cert = lcrit::diophantine::find_tau(&tg, 0.0, f64::INFINITY, &Default::default()).unwrap();
    assert!(cert.success);
    let text = serde_json::to_string(&cert).unwrap();
    let back: TauCertificate = serde_json::from_str(&text).unwrap();
    assert!(back.t_max.is_infinite());
    assert!(back.revalidate(&tg));
    let tau: Tau = back.tau.to_string().parse().unwrap();
    assert_eq!(kronecker_defect(&tau, &tg), cert.max_defect);
}

#[test]
fn thm1_slack_and_triangle_bound() {
    let tbl = PrimeTable::new(100_000).unwrap();
    for chr in primitive_characters(5).unwrap() {
        let r = check_thm1_inequality(c(1.0, 1e5), &chr, 1e5, 0.0, &tbl).unwrap();
        assert!(r.slack > 0.0);
        assert!(r.lhs <= thm1_triangle(5, r.x, &tbl).unwrap() + 1e-12);
    }
}

#[test]
fn single_euler_factor_lower_bound() {
    let tbl = PrimeTable::new(10_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let p = tbl.primes()[rng.gen_range(0..tbl.primes().len())];
        let z = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let s = c(1.0, rng.gen_range(-1e4..1e4));
        let (v, lb) = euler_factor_bound(p, z, s);
        assert!(v >= lb - 1e-15, "p {p}: {v} < {lb}");
    }
}
