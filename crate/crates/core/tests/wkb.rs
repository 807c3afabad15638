use metacav::geometry::{build_curve, CurveDescriptor, PermittivityDescriptor, PermittivityProfile};
use metacav::wkb::{
    plasmon_intervals, quasi_resonance_coeffs, quasimode_eval, winding_number, WkbError, WkbExpansion, WkbOptions,
};
use proptest::prelude::*;

fn build(d: CurveDescriptor, n: usize, p: PermittivityProfile) -> Result<WkbExpansion, WkbError> {
    let c = build_curve(&d, n).unwrap();
    WkbExpansion::build(&c, &p, &WkbOptions::default())
}

#[test]
fn disk_interval_contains_k12() {
    let e = build(CurveDescriptor::Circle { radius: 1.0 }, 64, PermittivityProfile::Constant(-1.1)).unwrap();
    let iv = plasmon_intervals(&e, &[12]).unwrap()[0];
    assert!(iv.a <= 3.5905173384492284 && 3.5905173384492284 <= iv.b, "{iv:?}");
}

#[test]
fn peanut_intervals_shrink() {
    let e = build(CurveDescriptor::Peanut {}, 256, PermittivityProfile::Constant(-1.1)).unwrap();
    let ivs = plasmon_intervals(&e, &(1..=12).collect::<Vec<_>>()).unwrap();
    assert_eq!(ivs.len(), 12);
    for w in ivs.windows(2) {
        assert!(w[1].b - w[1].a < w[0].b - w[0].a);
        assert!(w[1].center > w[0].center);
    }
}

#[test]
fn variable_permittivity_leading_coefficient() {
    let p: PermittivityProfile = PermittivityDescriptor::LinearX { eps_m: -1.2, eps_max: -1.1 }.into();
    let e = build(CurveDescriptor::Circle { radius: 1.0 }, 128, p).unwrap();
    // ℓ̆₀ = 1/⟨f̂⟩ with η₀² = 1.15 + 0.05 cos t on the unit circle
    let n = 4096;
    let mean = (0..n)
        .map(|j| {
            let eta2 = 1.15 + 0.05 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos();
            (1.0 - 1.0 / eta2).powf(-0.5)
        })
        .sum::<f64>()
        / n as f64;
    let q = quasi_resonance_coeffs(&e);
    assert!((q.ell[0] - 1.0 / mean).abs() < 1e-12);
    let iv = plasmon_intervals(&e, &[10]).unwrap()[0];
    assert!(iv.a < iv.center && iv.center < iv.b);
}

#[test]
fn regimes_are_enforced() {
    let e = build(CurveDescriptor::Circle { radius: 1.0 }, 64, PermittivityProfile::Constant(-0.9)).unwrap();
    assert!(matches!(plasmon_intervals(&e, &[3]), Err(WkbError::WrongRegime)));
    assert!(quasi_resonance_coeffs(&e).imaginary);
    let mixed: PermittivityProfile = PermittivityDescriptor::LinearX { eps_m: -1.3, eps_max: -0.7 }.into();
    let r = build(CurveDescriptor::Circle { radius: 1.0 }, 64, mixed);
    assert!(matches!(r, Err(WkbError::MixedSign | WkbError::CriticalCoefficient { .. } | WkbError::Geometry(_))), "{:?}", r.err());
}

#[test]
fn quasimode_is_localized() {
    let e = build(CurveDescriptor::Peanut {}, 256, PermittivityProfile::Constant(-1.1)).unwrap();
    let d = e.curve.delta;
    let v = quasimode_eval(&e, 16, 2, &[(0.3, 0.0), (0.3, -0.4 * d), (0.3, 0.4 * d)]).unwrap();
    assert!(v[1].norm() < v[0].norm() && v[2].norm() < v[0].norm());
    assert!(quasimode_eval(&e, 16, 2, &[(0.3, 2.0 * d)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn winding_number_is_m(m in 1i32..40, eps in -3.0f64..-1.05) {
        let e = build(CurveDescriptor::Peanut {}, 256, PermittivityProfile::Constant(eps)).unwrap();
        prop_assert_eq!(winding_number(&e, m, 2).unwrap(), m as i64);
    }

    /// For constant ε, λ₀ = 1 − η⁻² on any curve and every λ_n is real.
    #[test]
    fn order0_depends_only_on_contrast(a2 in -0.1f64..0.1, eps in -3.0f64..-1.05) {
        let d = CurveDescriptor::Polar { cos: vec![1.0, 0.0, a2], sin: vec![] };
        let e = build(d, 128, PermittivityProfile::Constant(eps)).unwrap();
        prop_assert!((e.lambda[0] - (1.0 + 1.0 / eps)).abs() < 1e-13);
        prop_assert!(e.lambda_imag.iter().all(|x| x.abs() < 1e-10));
    }
}
