use std::f64::consts::PI;

use locfield::greens::{
    ab_coefficients, body_green_linear, f_constant_q, f_integrand, vacuum_green, AngularRule, CenteredSphere,
    DisplacedSphere, Dyadic, FnBoundary, UnitVector3,
};
use locfield::oracle::{quad_reference, Domain};
use locfield::quad::integrate_adaptive;
use locfield::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `q² e^{2iq} [a² δ_ij + (b² − 2ab) s_i s_j]`, the radial integrand behind
/// the braces of `f_integrand`.
fn radial_integrand(q: f64, s: [f64; 3], i: usize, j: usize) -> Complex64 {
    let (a, b) = ab_coefficients(q).unwrap();
    let iso = if i == j { a * a } else { c(0.0, 0.0) };
    q * q * Complex64::new(0.0, 2.0 * q).exp() * (iso + (b * b - 2.0 * a * b) * s[i] * s[j])
}

#[test]
fn radial_antiderivative_matches_quadrature() {
    // braces(q2) − braces(q1) = −∫_{q1}^{q2} radial integrand
    let s = UnitVector3::z();
    for &(q1, q2) in &[(0.01, 0.02), (0.01, 1.0), (0.3, 4.0), (2.0, 9.0)] {
        let d = f_integrand(q2, &s, c(1.0, 0.0)).unwrap() - f_integrand(q1, &s, c(1.0, 0.0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let scale = 1.0 + (1.0 / q1).powi(3);
                let r = integrate_adaptive(
                    |q| Ok(radial_integrand(q, s.components(), i, j)),
                    q1,
                    q2,
                    1e-13 * scale,
                    20_000,
                )
                .unwrap();
                let diff = (d.get(i, j) + r.value).norm();
                assert!(diff <= 1e-10 * scale, "[{q1},{q2}] ({i},{j}): {diff:e}");
            }
        }
    }
}

#[test]
fn sphere_average_of_dyad() {
    let mut total = Dyadic::zero();
    for i in 0..3 {
        for j in 0..3 {
            let v = quad_reference(
                |p| {
                    let s = UnitVector3::from_angles(p[0], p[1]).components();
                    c(s[i] * s[j], 0.0)
                },
                Domain::UnitSphere,
                1e-13,
            )
            .unwrap();
            total.0[i][j] = v;
        }
    }
    let expected = Dyadic::scaled_identity(c(4.0 * PI / 3.0, 0.0));
    assert!(total.max_abs_diff(&expected) < 1e-12, "{total:?}");
}

#[test]
fn constant_radius_angular_integral_matches_closed_form() {
    let chi = c(0.1, 0.0);
    let q = 0.5;
    let closed = f_constant_q(q, chi).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let v = quad_reference(
                |p| f_integrand(q, &UnitVector3::from_angles(p[0], p[1]), chi).unwrap().get(i, j),
                Domain::UnitSphere,
                1e-13,
            )
            .unwrap();
            let f = -v / (16.0 * PI * PI);
            assert!((f - closed.get(i, j)).norm() <= 1e-10, "({i},{j}) {f} vs {}", closed.get(i, j));
        }
    }
}

#[test]
fn body_tensor_of_centred_sphere_equals_constant_q() {
    let chi = c(0.1, 1e-8);
    for &q in &[0.3, 2.0, 6.5] {
        let g = body_green_linear(&CenteredSphere { q_radius: q }, chi, 1e-12, AngularRule::default()).unwrap();
        assert!(g.max_abs_diff(&f_constant_q(q, chi).unwrap()) < 1e-12);
    }
}

#[test]
fn body_tensor_of_ellipsoid_is_symmetric() {
    let ellipsoid = FnBoundary(|theta: f64, phi: f64| {
        let (a, b, cc) = (3.0, 2.0, 4.0);
        let s = UnitVector3::from_angles(theta, phi).components();
        1.0 / ((s[0] / a).powi(2) + (s[1] / b).powi(2) + (s[2] / cc).powi(2)).sqrt()
    });
    let g = body_green_linear(&ellipsoid, c(0.1, 0.01), 1e-9, AngularRule::default()).unwrap();
    assert!(g.is_symmetric());
    assert!(g.is_finite());
}

#[test]
fn displaced_sphere_boundary() {
    let b = DisplacedSphere { q_radius: 5.0, q_offset: 1.0 };
    assert!((b.radius_at_cos(1.0) - 6.0).abs() < 1e-15);
    assert!((b.radius_at_cos(-1.0) - 4.0).abs() < 1e-15);
}

#[test]
fn constant_q_oscillates_with_period_pi() {
    let chi = c(0.1, 0.0);
    for &q in &[20.0, 50.3, 120.7] {
        let a = f_constant_q(q, chi).unwrap().get(0, 0);
        let b = f_constant_q(q + PI, chi).unwrap().get(0, 0);
        // only the 1/q-suppressed terms change over one period
        assert!((a.im - b.im).abs() <= 0.1 / (q * q), "{q}");
    }
}

proptest! {
    #[test]
    fn vacuum_tensor_symmetric(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0, k in 0.1f64..5.0) {
        prop_assume!(x * x + y * y + z * z > 1e-6);
        let g = vacuum_green([x, y, z], k).unwrap();
        prop_assert!(g.is_symmetric());
    }

    #[test]
    fn f_integrand_symmetric(q in 0.01f64..50.0, theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI)) {
        let g = f_integrand(q, &UnitVector3::from_angles(theta, phi), c(0.1, 0.02)).unwrap();
        prop_assert!(g.is_symmetric());
    }
}
