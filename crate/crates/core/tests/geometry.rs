use metacav::geometry::{
    boundary_mean, build_curve, permittivity_trace, spectral, CurveDescriptor, PermittivityDescriptor,
    PermittivityProfile,
};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn circle_invariants() {
    for radius in [0.5, 1.0, 2.0] {
        let c = build_curve(&CurveDescriptor::Circle { radius }, 128).unwrap();
        assert!((c.length - 2.0 * PI * radius).abs() < 1e-12);
        assert!(c.curvature.iter().all(|k| (k - 1.0 / radius).abs() < 1e-10));
        assert!((c.signed_area() - PI * radius * radius).abs() < 1e-10);
        for j in 0..c.len() {
            let (p, n) = (c.points[j], c.normal[j]);
            assert!((p[0] * n[0] + p[1] * n[1] - radius).abs() < 1e-12, "normal points outward");
        }
    }
}

#[test]
fn ellipse_perimeter() {
    let c = build_curve(&CurveDescriptor::Ellipse { a: 2.0, b: 1.0 }, 256).unwrap();
    assert!((c.length - 9.688448220547675).abs() < 1e-10);
    assert!((c.signed_area() - 2.0 * PI).abs() < 1e-10);
}

#[test]
fn peanut_has_length_two_pi() {
    let c = build_curve(&CurveDescriptor::Peanut {}, 256).unwrap();
    assert!((c.length - 2.0 * PI).abs() < 1e-10);
    assert!(c.curvature.iter().any(|&k| k < 0.0), "peanut is non-convex");
    assert!(c.delta > 0.0 && c.delta <= 0.5 / c.max_abs_curvature() + 1e-15);
}

#[test]
fn clockwise_descriptor_is_reversed() {
    let d = CurveDescriptor::Parametric { x_cos: vec![0.0, 1.0], x_sin: vec![], y_cos: vec![], y_sin: vec![0.0, -1.0] };
    let c = build_curve(&d, 64).unwrap();
    assert!(c.reversed);
    assert!(c.signed_area() > 0.0);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(build_curve(&CurveDescriptor::Circle { radius: 1.0 }, 100).is_err());
    assert!(build_curve(&CurveDescriptor::Circle { radius: 1.0 }, 32).is_err());
    assert!(build_curve(&CurveDescriptor::Circle { radius: -1.0 }, 64).is_err());
    // limaçon with an inner loop
    assert!(build_curve(&CurveDescriptor::Polar { cos: vec![0.3, 1.0], sin: vec![] }, 128).is_err());
}

#[test]
fn linear_trace_on_the_circle() {
    let c = build_curve(&CurveDescriptor::Circle { radius: 1.0 }, 128).unwrap();
    let p: PermittivityProfile = PermittivityDescriptor::LinearX { eps_m: -1.2, eps_max: -1.1 }.into();
    let t = permittivity_trace(&p, &c, 2).unwrap();
    for j in 0..c.len() {
        let x = c.points[j][0];
        let eta = (1.15 - 0.05 * x).sqrt();
        assert!((t.eta0()[j] - eta).abs() < 1e-13);
        // ∂_ξ η = −ε_x n_x / (2η) with ε_x = 0.05 and n = (x, y)
        assert!((t.eta1()[j] + 0.05 * x / (2.0 * eta)).abs() < 1e-8);
    }
    assert!(permittivity_trace(&PermittivityProfile::Constant(0.5), &c, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// ∫κ ds = 2π and ⟨1⟩ = 1 for smooth star-shaped perturbations.
    #[test]
    fn total_curvature(a2 in -0.15f64..0.15, a3 in -0.1f64..0.1, b2 in -0.1f64..0.1) {
        let d = CurveDescriptor::Polar { cos: vec![1.0, 0.0, a2, a3], sin: vec![0.0, 0.0, b2] };
        let c = build_curve(&d, 256).unwrap();
        let total = c.curvature.iter().sum::<f64>() * c.length / c.len() as f64;
        prop_assert!((total - 2.0 * PI).abs() < 1e-8);
        prop_assert!((boundary_mean(&vec![1.0; c.len()], &c).unwrap() - 1.0).abs() < 1e-14);
        let step: Vec<f64> = c.points.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).collect();
        let h = c.length / c.len() as f64;
        prop_assert!(step.iter().all(|s| (s - h).abs() < 1e-3 * h), "arclength grid is uniform");
    }

    #[test]
    fn spectral_derivative_of_trig(k in 1usize..20, phase in 0.0f64..std::f64::consts::TAU) {
        let (n, l) = (64usize, 3.0f64);
        let w = 2.0 * PI * k as f64 / l;
        let f: Vec<f64> = (0..n).map(|j| (w * l * j as f64 / n as f64 + phase).sin()).collect();
        let d = spectral::derivative(&f, l);
        for j in 0..n {
            let want = w * (w * l * j as f64 / n as f64 + phase).cos();
            prop_assert!((d[j] - want).abs() < 1e-10 * w);
        }
    }
}
