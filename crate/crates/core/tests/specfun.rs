mod common;

use common::*;
use metacav::specfun;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_z_arg(r_min: f64, r_max: f64, arg: f64) -> impl Strategy<Value = Complex64> {
    (r_min..r_max, -arg..arg).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn arb_z(r_min: f64, r_max: f64) -> impl Strategy<Value = Complex64> {
    arb_z_arg(r_min, r_max, 3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wronskian_j_y(m in 0i32..=64, z in arb_z(0.1, 80.0)) {
        prop_assert!(wronskian_jy(m, z) < 1e-12);
    }

    #[test]
    // K is only provided on Re z ≥ 0.
    fn wronskian_i_k(m in 0i32..=64, z in arb_z_arg(0.1, 80.0, std::f64::consts::FRAC_PI_2)) {
        prop_assert!(wronskian_ik(m, z) < 1e-12);
    }

    #[test]
    fn wronskian_j_h(m in 0i32..=64, z in arb_z(0.1, 80.0)) {
        prop_assert!(wronskian_jh(m, z) < 1e-12);
    }

    #[test]
    fn recurrences(m in 1i32..=63, z in arb_z(0.1, 60.0)) {
        for f in [Family::J, Family::I, Family::H] {
            prop_assert!(recurrence(f, m, z) < 1e-11, "{f:?}");
        }
    }

    #[test]
    fn parities(m in 1i32..=64, z in arb_z(0.1, 60.0)) {
        for f in [Family::J, Family::I, Family::H] {
            prop_assert!(parity(f, m, z) < 1e-14, "{f:?}");
        }
    }

    #[test]
    fn derivatives(m in 0i32..=64, z in arb_z(0.5, 60.0)) {
        for f in [Family::J, Family::I, Family::H] {
            prop_assert!(derivative(f, m, z) < 1e-6, "{f:?}");
        }
    }
}

#[test]
fn seeded_wronskian_annulus() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let z = random_z(&mut rng, 0.1, 80.0, 3.0);
        for m in 0..=64 {
            assert!(wronskian_jy(m, z) < 1e-12, "m {m} z {z}");
        }
    }
}

/// Power series Σ (−1)^k (z/2)^{2k+m} / (k!(k+m)!), an oracle for moderate |z|.
fn j_series(m: i32, z: Complex64) -> Complex64 {
    let half = z / 2.0;
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..=m {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

fn i_series(m: i32, z: Complex64) -> Complex64 {
    j_series(m, z * Complex64::new(0.0, -1.0)) * Complex64::new(0.0, 1.0).powi(m)
}

#[test]
fn series_oracles() {
    let z = Complex64::new(3.5905, 0.0);
    let j = specfun::bessel_j(12, z).unwrap().value;
    assert!((j - j_series(12, z)).norm() < 1e-12 * j.norm());
    let z = Complex64::new(1.1f64.sqrt() * 3.27, 0.0);
    let i = specfun::bessel_i(6, z).unwrap().value;
    assert!((i - i_series(6, z)).norm() < 1e-12 * i.norm());
    let z = Complex64::new(2.0, 1.5);
    for m in [0, 3, 17] {
        let j = specfun::bessel_j(m, z).unwrap().value;
        assert!((j - j_series(m, z)).norm() < 1e-13 * j.norm());
    }
}

/// Hankel's large-argument series for H⁽¹⁾_m.
fn hankel_asymptotic(m: i32, z: Complex64) -> Complex64 {
    let mu = 4.0 * (m as f64).powi(2);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..40 {
        let kf = k as f64;
        term *= Complex64::new(0.0, 1.0) * (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * z);
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        sum += term;
    }
    let phase = z - std::f64::consts::PI * (0.5 * m as f64 + 0.25);
    (2.0 / (std::f64::consts::PI * z)).sqrt() * (Complex64::new(0.0, 1.0) * phase).exp() * sum
}

#[test]
fn large_argument_hankel() {
    let z = Complex64::new(50.0, 0.0);
    let h = specfun::hankel1(0, z).unwrap().value;
    let lead = (2.0 / (std::f64::consts::PI * z)).sqrt() * (Complex64::new(0.0, 1.0) * (z - std::f64::consts::FRAC_PI_4)).exp();
    assert!((h - lead).norm() < 5e-3 * h.norm());
    assert!((h - hankel_asymptotic(0, z)).norm() < 1e-8 * h.norm());
    for (m, z) in [(3, Complex64::new(60.0, 5.0)), (10, Complex64::new(75.0, -2.0))] {
        let h = specfun::hankel1(m, z).unwrap().value;
        assert!((h - hankel_asymptotic(m, z)).norm() < 1e-8 * h.norm());
    }
}
