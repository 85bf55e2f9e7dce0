use lcrit::characters::{characters, Angle};
use lcrit::critzeros::{count_zeros, SearchRect};
use lcrit::diophantine::{defects, kronecker_defect, AngleTargets, Tau};
use lcrit::lfengine::{dirichlet_l, log_l_truncated, EvalConfig};
use lcrit::primesums::{log_euler_identity, PrimeTable};
use lcrit::scanner::{summarize, theorem_bounds, PointSource, ScanRecord};
use num_complex::Complex64;
use proptest::prelude::*;

fn table() -> &'static PrimeTable {
    static T: std::sync::OnceLock<PrimeTable> = std::sync::OnceLock::new();
    T.get_or_init(|| PrimeTable::new(100_000).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characters_are_completely_multiplicative(q in 3u64..40, m in 1u64..500, n in 1u64..500) {
        for chr in characters(q).unwrap() {
            let d = chr.eval(m * n) - chr.eval(m) * chr.eval(n);
            prop_assert!(d.norm() < 1e-12);
            prop_assert!((chr.conj().eval(m) - chr.eval(m).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn l_reflects_under_conjugation(q in 3u64..15, sigma in 1.2f64..4.0, t in -60.0f64..60.0) {
        let cfg = EvalConfig::default();
        let s = Complex64::new(sigma, t);
        for chr in characters(q).unwrap().into_iter().filter(|c| !c.is_principal()) {
            let a = dirichlet_l(s, &chr, &cfg).unwrap().value;
            let b = dirichlet_l(s.conj(), &chr.conj(), &cfg).unwrap().value;
            prop_assert!((a - b.conj()).norm() < 1e-11 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn truncated_log_reflects(t in 10.0f64..1e6, label in 1u64..4) {
        let chr = lcrit::characters::character(5, label).unwrap();
        let s = Complex64::new(1.0, t);
        let a = log_l_truncated(table(), s, &chr, t).unwrap().value;
        let b = log_l_truncated(table(), s.conj(), &chr.conj(), t).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn zero_weight_gives_zero_sides(x in 2u64..50_000, t in -100.0f64..100.0) {
        let d = log_euler_identity(table(), Complex64::new(1.0, t), x, |_| Complex64::new(0.0, 0.0)).unwrap();
        prop_assert_eq!(d.lambda_side, Complex64::new(0.0, 0.0));
        prop_assert_eq!(d.prime_side, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn tau_text_roundtrip(int in 0u64..u64::MAX, frac in 0u32..1_000_000) {
        let s = format!("{int}{}.{frac:06}", "123456789".repeat(4));
        let t: Tau = s.parse().unwrap();
        let again: Tau = t.to_string().parse().unwrap();
        prop_assert_eq!(t.to_string(), again.to_string());
    }

    #[test]
    fn defects_are_distances(t in 0.0f64..1e9, nums in proptest::collection::vec(0u64..360, 6)) {
        let primes = vec![2u64, 3, 5, 7, 11, 13];
        let targets: Vec<Angle> = nums.iter().map(|&k| Angle::new(k, 360)).collect();
        let tg = AngleTargets::new(primes.clone(), targets.clone(), 0.1).unwrap();
        let tau = Tau::from_f64(t);
        let d = defects(&tau, &tg);
        for (i, &di) in d.iter().enumerate() {
            prop_assert!((0.0..=0.5).contains(&di));
            let w = (tau.p_minus_i_tau(primes[i]) - tg.weight(i)).norm();
            prop_assert!(w <= 2.0 * (std::f64::consts::PI * di).sin() + 1e-9);
        }
        // adding a prime never lowers the max defect
        let sub = AngleTargets::new(primes[..4].to_vec(), targets[..4].to_vec(), 0.1).unwrap();
        prop_assert!(kronecker_defect(&tau, &sub) <= kronecker_defect(&tau, &tg));
    }

    #[test]
    fn doubling_identities(q in 3u64..10_000) {
        let b = theorem_bounds(q).unwrap();
        prop_assert_eq!(b.thm1, 2.0 * b.thm2);
        prop_assert_eq!(b.thm4, 2.0 * b.thm3);
    }

    #[test]
    fn running_extremes_monotone(vals in proptest::collection::vec((16.0f64..1e6, 0.0f64..10.0), 1..40)) {
        let chr = lcrit::characters::character(5, 1).unwrap();
        let recs: Vec<ScanRecord> = vals
            .iter()
            .filter_map(|&(t, a)| ScanRecord::from_value(Complex64::new(1.0, t), a, &chr, PointSource::SigmaGrid))
            .collect();
        let r = summarize(recs, vec![], theorem_bounds(5).unwrap(), &Default::default());
        prop_assert!(r.running_max_norm_large.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(r.running_min_norm_small.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn zero_counts_add_across_a_cut(cut in 21.0f64..49.0) {
        let cfg = EvalConfig::default();
        let whole = count_zeros(&SearchRect::new(0.3, 3.0, 20.0, 50.0, 0.05).unwrap(), &cfg).unwrap();
        let lo = count_zeros(&SearchRect::new(0.3, 3.0, 20.0, cut, 0.05).unwrap(), &cfg).unwrap();
        let hi = count_zeros(&SearchRect::new(0.3, 3.0, cut, 50.0, 0.05).unwrap(), &cfg).unwrap();
        prop_assert_eq!(whole, lo + hi);
    }

    #[test]
    fn count_stable_under_halving(t0 in 15.0f64..40.0) {
        let cfg = EvalConfig::default();
        let r = SearchRect::new(0.2, 2.8, t0, t0 + 15.0, 0.1).unwrap();
        prop_assert_eq!(count_zeros(&r, &cfg).unwrap(), count_zeros(&r.with_resolution(0.05), &cfg).unwrap());
    }
}

#[test]
fn scan_report_is_deterministic() {
    let config = lcrit::config::Config::default();
    let chr = lcrit::characters::character(7, 2).unwrap();
    let grid = lcrit::scanner::sigma_grid(1.0, 100.0, 5000.0, 40);
    let a = lcrit::scanner::scan(&grid, &chr, &config).unwrap();
    let b = lcrit::scanner::scan(&grid, &chr, &config).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
