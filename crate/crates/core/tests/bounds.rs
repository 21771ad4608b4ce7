use proptest::prelude::*;

use fk_rigidity::bounds::{
    cj_sequence, decay_audit, find_b0, k0, k0_bar, ln_c_prime, polymer_report, q_bar, PolymerInputs, C_D,
};
use fk_rigidity::lattice::Volume;
use fk_rigidity::quantum::{extract_couplings, FkParameters};

/// Smallest k ≥ 1 with pre·base^k ≤ 1, by direct iteration.
fn k0_scan(pre: f64, base: f64) -> u32 {
    let mut k = 1;
    while pre * base.powi(k as i32) > 1.0 {
        k += 1;
    }
    k
}

#[test]
fn test_cj_example_and_limits() {
    let r = cj_sequence(3, 1.0, 24.0, 10.0, 0.5).unwrap();
    assert!((r.ratio - 0.5).abs() < 1e-15);
    assert!((r.terms[0] - 0.25).abs() < 1e-15);
    assert!((r.tail - 0.5).abs() < 1e-15);
    assert!(r.converges);

    let cold = cj_sequence(3, 1.0, 24.0, 1e6, 0.5).unwrap();
    assert_eq!(cold.c0, 0.0);
    assert!(cold.sum_below_one);

    // U below 2dt/c.
    let bad = cj_sequence(3, 1.0, 10.0, 10.0, 0.5).unwrap();
    assert!(!bad.converges && !bad.sum_below_one);
    assert!(bad.tail.is_infinite());

    assert!(cj_sequence(3, 1.0, 24.0, 1.0, 1.5).is_err());
    assert!(cj_sequence(3, 1.0, 0.5, 1.0, 0.5).is_err());
}

#[test]
fn test_cj_flag_matches_direct_summation() {
    for u in [13.0, 20.0, 40.0, 100.0] {
        for beta in [0.01, 0.05, 1.0] {
            let r = cj_sequence(3, 1.0, u, beta, 0.5).unwrap();
            let direct: f64 = r.c0 + (2..400).map(|j| r.ratio.powi(j)).sum::<f64>();
            assert!((direct - r.total).abs() < 1e-12, "{u} {beta}");
            assert_eq!(r.sum_below_one, direct < 1.0);
        }
    }
}

#[test]
fn test_k0_examples() {
    let a = 2.0;
    let lambda = 0.5 / (C_D * f64::exp(a));
    assert_eq!(k0(10.0, 1.0, lambda, C_D, a), Some(4));
    assert_eq!(k0(1.0, 1.0, lambda, C_D, a), Some(1));
    assert_eq!(k0(1.0, 1.0, 1.01 / (C_D * f64::exp(a)), C_D, a), None);
}

#[test]
fn test_infeasible_lambda_flags() {
    let p = PolymerInputs::new(1.0, 1.0, 0.1, 10.0);
    let r = polymer_report(&p).unwrap();
    assert!(!r.flags.cond2 && !r.flags.cond4);
    assert!(r.k0.is_none() && r.zpol_bound.is_none());
    assert!(polymer_report(&PolymerInputs::new(1.0, 1.0, -0.1, 10.0)).is_err());
}

#[test]
fn test_non_positive_q_has_no_polymer_bound() {
    let lambda = 1e-4;
    let r = polymer_report(&PolymerInputs::new(1.0, 1.0, lambda, 1.0)).unwrap();
    assert!(r.flags.cond2);
    let q = r.q.unwrap();
    assert!(q <= 0.0);
    assert!(!r.flags.cond4 && r.zpol_bound.is_none());
}

#[test]
fn test_large_b_gives_convergence() {
    let lambda = 1e-5;
    let b0 = find_b0(1.0, 1.0, lambda).unwrap().b0;
    // Rounding k0 up costs a factor of up to c_d in C4, so the integer chain
    // turns positive somewhat later than the continuous one.
    let first = (0..80)
        .map(|i| polymer_report(&PolymerInputs::new(1.0, 1.0, lambda, b0 * 2f64.powi(i))).unwrap())
        .find(|r| r.flags.cond4)
        .expect("q > 0 for large b");
    assert!(first.inputs.b >= b0);
    // e^{-q} underflows once q is large, so the bound may be exactly zero.
    let z = first.zpol_bound.unwrap();
    assert!((0.0..1.0).contains(&z));
}

#[test]
fn test_b0_brackets_the_sign_change() {
    for (c1, c2) in [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)] {
        let p = PolymerInputs::new(c1, c2, 1.0, 1.0);
        let lambda = 0.5 * p.lambda0();
        let r = find_b0(c1, c2, lambda).unwrap();
        assert!(r.big_b > 1.0);
        assert_eq!(r.lambda0, p.lambda0());
        assert!(q_bar(&p, lambda, r.b0 * 0.99) <= 0.0);
        assert!(q_bar(&p, lambda, r.b0 * 1.01) > 0.0);
        assert!(r.b_min <= r.b0);
    }
    let p = PolymerInputs::new(1.0, 1.0, 1.0, 1.0);
    assert!(find_b0(1.0, 1.0, p.lambda0()).is_err());
}

#[test]
fn test_thresholds_are_ordered() {
    let p = PolymerInputs::new(1.0, 1.0, 1e-4, 1.0);
    assert!(p.lambda0() < p.lambda1());
    assert!(p.lambda0() < p.lambda2());
    assert!(p.x(p.lambda2()).abs() < 1e-9);
    assert!(p.x(p.lambda0()) > 0.0);
    assert!(p.r() > 0.0 && p.r() < 1.0);
}

#[test]
fn test_c_prime_decreases_to_zero() {
    let p = PolymerInputs::new(1.0, 1.0, 1.0, 1.0);
    let b0 = find_b0(1.0, 1.0, p.lambda0() * 0.999).unwrap().b0;
    let mut last = f64::INFINITY;
    for i in 1..40 {
        let b = b0 * 2f64.powi(i);
        let Some(l) = ln_c_prime(&p, b) else { continue };
        assert!(l < last, "ln C' at {b}");
        last = l;
    }
    assert!(last < -100.0, "{last}");
}

#[test]
fn test_decay_audit_without_hopping_is_vacuous() {
    let vol = Volume::with_lo([0, 0, 0], [2, 2, 1], 0);
    let p = FkParameters { t: 0.0, ..FkParameters::half_filled(16.0, 160.0) };
    let t = extract_couplings(&vol, None, &p, 4).unwrap();
    let a = decay_audit(&t, 1.0, 0.5);
    assert!(a.passed());
    assert!(a.pair_residuals.iter().all(|(_, r)| r.abs() < 1e-12));
}

#[test]
fn test_decay_audit_at_strong_coupling() {
    let vol = Volume::with_lo([0, 0, 0], [2, 2, 1], 0);
    let t = extract_couplings(&vol, None, &FkParameters::half_filled(16.0, 256.0), 4).unwrap();
    let a = decay_audit(&t, 1.0, 0.5);
    assert!(a.checked > 0);
    assert!(a.fitted_c1_over_u < 1.0, "{}", a.fitted_c1_over_u);
    assert!(a.pairs_ok, "{:?}", a.pair_residuals);
    assert!(a.passed(), "{:?}", a.violations);
    // An absurdly tight template fails.
    assert!(!decay_audit(&t, 1e-9, 1e-3).passed());
}

proptest! {
    #[test]
    fn prop_k0_matches_scan(pre in 1.0f64..1e6, base in 0.01f64..0.95) {
        let a = 2.0;
        let lambda = base / (C_D * f64::exp(a));
        prop_assert_eq!(k0(pre, 1.0, lambda, C_D, a), Some(k0_scan(pre, base)));
    }

    #[test]
    fn prop_q_bar_increases_past_b0(c1 in 0.5f64..2.0, c2 in 0.5f64..2.0, frac in 0.1f64..0.9) {
        let p = PolymerInputs::new(c1, c2, 1.0, 1.0);
        let lambda = frac * p.lambda0();
        let r = find_b0(c1, c2, lambda).unwrap();
        let mut prev = q_bar(&p, lambda, r.b0);
        for i in 1..30 {
            let q = q_bar(&p, lambda, r.b0 * (1.0 + 0.5 * i as f64));
            prop_assert!(q > prev);
            prev = q;
        }
        prop_assert!(k0_bar(&p, r.b0) > 1.0);
    }
}
