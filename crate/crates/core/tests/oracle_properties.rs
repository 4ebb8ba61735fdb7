use locfield::greens::{body_green_linear, cavity_green_linear, f_constant_q, AngularRule, DisplacedSphere, Dyadic};
use locfield::oracle::{mc_delta1_green, mc_delta1_green_with_mode, quad_reference, Domain, RegionSampler, SamplingMode};
use locfield::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest per-component deviation in units of the standard error, over the
/// real and imaginary parts.
fn max_sigma(value: &Dyadic, stderr: &Dyadic, expected: &Dyadic) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let d = value.get(i, j) - expected.get(i, j);
            let s = stderr.get(i, j);
            worst = worst.max(d.re.abs() / s.re.max(1e-300)).max(d.im.abs() / s.im.max(1e-300));
        }
    }
    worst
}

#[test]
fn sphere_minus_cavity_decomposes_into_cavity_and_body_terms() {
    let chi = c(0.1, 0.0);
    let sampler = RegionSampler::sphere_minus_cavity(2.0, 0.0, 0.1).unwrap();
    let (value, stderr) = mc_delta1_green(&sampler, chi, 400_000, 11).unwrap();
    let expected = cavity_green_linear(0.1, chi).unwrap() + f_constant_q(2.0, chi).unwrap();
    let sigma = max_sigma(&value, &stderr, &expected);
    assert!(sigma <= 3.0, "{sigma}");
}

#[test]
fn displaced_sphere_matches_star_quadrature() {
    let chi = c(0.1, 0.02);
    let sampler = RegionSampler::sphere_minus_cavity(3.0, 1.0, 0.1).unwrap();
    let (value, stderr) = mc_delta1_green(&sampler, chi, 400_000, 5).unwrap();
    let body = body_green_linear(
        &DisplacedSphere { q_radius: 3.0, q_offset: 1.0 },
        chi,
        1e-11,
        AngularRule::default(),
    )
    .unwrap();
    let expected = cavity_green_linear(0.1, chi).unwrap() + body;
    let sigma = max_sigma(&value, &stderr, &expected);
    assert!(sigma <= 4.0, "{sigma}");
}

#[test]
fn uniform_mode_agrees_on_a_thick_shell() {
    let chi = c(0.1, 0.0);
    let sampler = RegionSampler::shell(0.5, 3.0).unwrap();
    let (value, stderr) = mc_delta1_green_with_mode(&sampler, chi, 400_000, 3, SamplingMode::Uniform).unwrap();
    let expected = cavity_green_linear(0.5, chi).unwrap() + f_constant_q(3.0, chi).unwrap();
    let sigma = max_sigma(&value, &stderr, &expected);
    assert!(sigma <= 4.0, "{sigma}");
}

#[test]
fn standard_error_halves_when_samples_quadruple() {
    let sampler = RegionSampler::shell(0.1, 5.0).unwrap();
    let chi = c(0.1, 0.0);
    let (_, e1) = mc_delta1_green(&sampler, chi, 50_000, 1).unwrap();
    let (_, e4) = mc_delta1_green(&sampler, chi, 200_000, 1).unwrap();
    for k in 0..3 {
        let ratio = e4.get(k, k).re / e1.get(k, k).re;
        assert!((ratio - 0.5).abs() <= 0.15, "component {k}: {ratio}");
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let sampler = RegionSampler::shell(0.1, 4.0).unwrap();
    let a = mc_delta1_green(&sampler, c(0.1, 0.01), 20_000, 99).unwrap();
    let b = mc_delta1_green(&sampler, c(0.1, 0.01), 20_000, 99).unwrap();
    assert_eq!(a, b);
    let other = mc_delta1_green(&sampler, c(0.1, 0.01), 20_000, 100).unwrap();
    assert_ne!(a.0, other.0);
}

#[test]
fn zero_susceptibility_and_sample_floor() {
    let sampler = RegionSampler::shell(0.1, 4.0).unwrap();
    let (v, e) = mc_delta1_green(&sampler, c(0.0, 0.0), 5_000, 1).unwrap();
    assert_eq!(v, Dyadic::zero());
    assert_eq!(e, Dyadic::zero());
    assert!(matches!(mc_delta1_green(&sampler, c(0.1, 0.0), 999, 1), Err(Error::Precondition(_))));
}

#[test]
fn region_acceptance_matches_volume() {
    let sampler = RegionSampler::sphere_minus_cavity(3.0, 1.0, 0.5).unwrap();
    let half = sampler.outer_radius();
    let cube = (2.0 * half).powi(3);
    let n = 400_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let hits = (0..n)
        .filter(|_| {
            let p = [
                half * (2.0 * rng.gen::<f64>() - 1.0),
                half * (2.0 * rng.gen::<f64>() - 1.0),
                half * (2.0 * rng.gen::<f64>() - 1.0),
            ];
            sampler.contains(p)
        })
        .count();
    let frac = hits as f64 / n as f64;
    let sigma = (frac * (1.0 - frac) / n as f64).sqrt();
    let expected = sampler.volume() / cube;
    assert!((frac - expected).abs() <= 3.0 * sigma, "{frac} vs {expected}");
}

#[test]
fn uniform_samples_stay_in_region() {
    let sampler = RegionSampler::sphere_minus_cavity(2.0, 0.5, 0.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        assert!(sampler.contains(sampler.sample_uniform(&mut rng)));
    }
}

#[test]
fn quadrature_reference_domains() {
    let v = quad_reference(|_| c(2.5, -1.0), Domain::Rectangle { x0: 0.0, x1: 2.0, y0: -1.0, y1: 3.0 }, 1e-12).unwrap();
    assert!((v - c(20.0, -8.0)).norm() < 1e-12);
    let v = quad_reference(|p| c(p[0].cos(), 0.0), Domain::Interval { a: 0.0, b: 1.0 }, 1e-13).unwrap();
    assert!((v.re - 1f64.sin()).abs() < 1e-13);
    let v = quad_reference(|_| c(1.0, 0.0), Domain::UnitSphere, 1e-13).unwrap();
    assert!((v.re - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn preconditions() {
    assert!(matches!(RegionSampler::shell(0.0, 1.0), Err(Error::Precondition(_))));
    assert!(matches!(RegionSampler::sphere_minus_cavity(1.0, 0.95, 0.1), Err(Error::Precondition(_))));
}
