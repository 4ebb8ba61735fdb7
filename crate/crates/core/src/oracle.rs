//! Brute-force validators: Monte Carlo volume integration of the first Born
//! term at coincidence, and nested adaptive quadrature for low-dimensional
//! reference integrals.
//!
//! The emitter sits at the origin and is always excluded from the sampled
//! region by a cavity of radius `q_c > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greens::{ab_coefficients, Dyadic};
use crate::quad::integrate_adaptive;

/// Fewer samples than this are rejected.
pub const MIN_SAMPLES: usize = 1000;
/// Independent random streams; fixed so results do not depend on thread count.
pub const STREAMS: u64 = 32;

/// Integration region around the emitter (all lengths times `k_A`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `q_inner <= |r| <= q_outer`.
    Shell { q_inner: f64, q_outer: f64 },
    /// Sphere of radius `q_r` centred at `(0, 0, −q_l)`, minus the ball
    /// `|r| < q_c` around the emitter.
    SphereMinusCavity { q_r: f64, q_l: f64, q_c: f64 },
}

/// Point generator over a [`Region`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSampler {
    region: Region,
}

impl RegionSampler {
    pub fn shell(q_inner: f64, q_outer: f64) -> Result<Self> {
        if !(q_inner > 0.0) || !(q_outer > q_inner) || !q_outer.is_finite() {
            return Err(Error::Precondition(format!(
                "shell needs 0 < q_inner < q_outer, got [{q_inner}, {q_outer}]"
            )));
        }
        Ok(RegionSampler { region: Region::Shell { q_inner, q_outer } })
    }

    pub fn sphere_minus_cavity(q_r: f64, q_l: f64, q_c: f64) -> Result<Self> {
        if !(q_c > 0.0) || !(q_l >= 0.0) || !(q_l + q_c < q_r) || !q_r.is_finite() {
            return Err(Error::Precondition(format!(
                "cavity must lie strictly inside the sphere: q_r = {q_r}, q_l = {q_l}, q_c = {q_c}"
            )));
        }
        Ok(RegionSampler { region: Region::SphereMinusCavity { q_r, q_l, q_c } })
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Exclusion radius around the emitter.
    pub fn inner_radius(&self) -> f64 {
        match self.region {
            Region::Shell { q_inner, .. } => q_inner,
            Region::SphereMinusCavity { q_c, .. } => q_c,
        }
    }

    /// Radius of the smallest emitter-centred ball containing the region.
    pub fn outer_radius(&self) -> f64 {
        match self.region {
            Region::Shell { q_outer, .. } => q_outer,
            Region::SphereMinusCavity { q_r, q_l, .. } => q_r + q_l,
        }
    }

    pub fn volume(&self) -> f64 {
        let ball = |r: f64| 4.0 * PI / 3.0 * r * r * r;
        match self.region {
            Region::Shell { q_inner, q_outer } => ball(q_outer) - ball(q_inner),
            Region::SphereMinusCavity { q_r, q_c, .. } => ball(q_r) - ball(q_c),
        }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        match self.region {
            Region::Shell { q_inner, q_outer } => r2 >= q_inner * q_inner && r2 <= q_outer * q_outer,
            Region::SphereMinusCavity { q_r, q_l, q_c } => {
                let dz = p[2] + q_l;
                r2 >= q_c * q_c && p[0] * p[0] + p[1] * p[1] + dz * dz <= q_r * q_r
            }
        }
    }

    /// Uniform point in the region by rejection from the enclosing ball.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        let r_max = self.outer_radius();
        loop {
            let p = [
                r_max * (2.0 * rng.gen::<f64>() - 1.0),
                r_max * (2.0 * rng.gen::<f64>() - 1.0),
                r_max * (2.0 * rng.gen::<f64>() - 1.0),
            ];
            if self.contains(p) {
                return p;
            }
        }
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let cos_t: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    [sin_t * phi.cos(), sin_t * phi.sin(), cos_t]
}

/// `[a² I + (b² − 2ab) ûû] e^{2iq}` at point `p`, as 9 complex entries.
fn born_kernel(p: [f64; 3]) -> Result<[Complex64; 9]> {
    let q = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let (a, b) = ab_coefficients(q)?;
    let phase = Complex64::new(0.0, 2.0 * q).exp();
    let iso = a * a * phase;
    let aniso = (b * b - 2.0 * a * b) * phase;
    let u = [p[0] / q, p[1] / q, p[2] / q];
    let mut out = [Complex64::new(0.0, 0.0); 9];
    for i in 0..3 {
        for j in 0..3 {
            out[3 * i + j] = aniso * (u[i] * u[j]) + if i == j { iso } else { Complex64::new(0.0, 0.0) };
        }
    }
    Ok(out)
}

/// Running first and second moments of 18 real components.
#[derive(Clone)]
struct Moments {
    count: usize,
    sum: [f64; 18],
    sum_sq: [f64; 18],
}

impl Moments {
    fn new() -> Self {
        Moments { count: 0, sum: [0.0; 18], sum_sq: [0.0; 18] }
    }

    fn push(&mut self, values: &[Complex64; 9], weight: f64) {
        self.count += 1;
        for (k, v) in values.iter().enumerate() {
            let (re, im) = (v.re * weight, v.im * weight);
            self.sum[2 * k] += re;
            self.sum[2 * k + 1] += im;
            self.sum_sq[2 * k] += re * re;
            self.sum_sq[2 * k + 1] += im * im;
        }
    }

    fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        for k in 0..18 {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
    }

    /// Mean and variance of the mean per component.
    fn estimate(&self) -> ([f64; 18], [f64; 18]) {
        let n = self.count as f64;
        let mut mean = [0.0; 18];
        let mut var = [0.0; 18];
        if self.count == 0 {
            return (mean, var);
        }
        for k in 0..18 {
            mean[k] = self.sum[k] / n;
            if self.count > 1 {
                let s2 = (self.sum_sq[k] - n * mean[k] * mean[k]).max(0.0) / (n - 1.0);
                var[k] = s2 / n;
            }
        }
        (mean, var)
    }
}

/// Sampling strategy for [`mc_delta1_green_with_mode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Two radial strata around the emitter: density `∝ q^{-4}` on
    /// `[q_c, min(1, q_max)]` and uniform in `q` beyond, isotropic directions.
    /// Half the samples go to each stratum.
    Stratified,
    /// Uniform points in the region.
    Uniform,
}

/// Sampled radius with its inverse density in `q`.
fn sample_inverse_quartic<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> (f64, f64) {
    let (ia, ib) = (a.powi(-3), b.powi(-3));
    let u: f64 = rng.gen();
    let r = (ia - u * (ia - ib)).powf(-1.0 / 3.0);
    let norm = (ia - ib) / 3.0;
    (r, norm * r.powi(4))
}

fn run_stream(
    sampler: &RegionSampler,
    mode: SamplingMode,
    seed: u64,
    stream: u64,
    n_near: usize,
    n_far: usize,
) -> Result<(Moments, Moments)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut near = Moments::new();
    let mut far = Moments::new();
    let q_in = sampler.inner_radius();
    let q_out = sampler.outer_radius();
    let split = q_out.min(1.0_f64.max(q_in));
    let zero = [Complex64::new(0.0, 0.0); 9];
    match mode {
        SamplingMode::Uniform => {
            let volume = sampler.volume();
            for _ in 0..n_near + n_far {
                let p = sampler.sample_uniform(&mut rng);
                near.push(&born_kernel(p)?, volume);
            }
        }
        SamplingMode::Stratified => {
            for _ in 0..n_near {
                let (r, inv_density) = sample_inverse_quartic(&mut rng, q_in, split);
                let d = random_direction(&mut rng);
                let p = [r * d[0], r * d[1], r * d[2]];
                if sampler.contains(p) {
                    near.push(&born_kernel(p)?, 4.0 * PI * r * r * inv_density);
                } else {
                    near.push(&zero, 0.0);
                }
            }
            if split < q_out {
                for _ in 0..n_far {
                    let r = split + (q_out - split) * rng.gen::<f64>();
                    let d = random_direction(&mut rng);
                    let p = [r * d[0], r * d[1], r * d[2]];
                    if sampler.contains(p) {
                        far.push(&born_kernel(p)?, 4.0 * PI * r * r * (q_out - split));
                    } else {
                        far.push(&zero, 0.0);
                    }
                }
            }
        }
    }
    Ok((near, far))
}

/// Monte Carlo estimate of the linear Born scattering tensor at the emitter,
/// `(χ/16π²) ∫ d³q [a² I + (b² − 2ab) ûû] e^{2iq}` over the sampler's region,
/// in units of `k_A`, with per-component standard errors (real and imaginary
/// parts separately). Uses [`SamplingMode::Stratified`].
pub fn mc_delta1_green(
    sampler: &RegionSampler,
    chi: Complex64,
    n_samples: usize,
    seed: u64,
) -> Result<(Dyadic, Dyadic)> {
    mc_delta1_green_with_mode(sampler, chi, n_samples, seed, SamplingMode::Stratified)
}

pub fn mc_delta1_green_with_mode(
    sampler: &RegionSampler,
    chi: Complex64,
    n_samples: usize,
    seed: u64,
    mode: SamplingMode,
) -> Result<(Dyadic, Dyadic)> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "Monte Carlo needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let has_far = sampler.outer_radius() > 1.0_f64.max(sampler.inner_radius());
    let (total_near, total_far) = match mode {
        SamplingMode::Stratified if has_far => (n_samples / 2, n_samples - n_samples / 2),
        _ => (n_samples, 0),
    };
    let per_stream = |total: usize, s: u64| total / STREAMS as usize + usize::from((s as usize) < total % STREAMS as usize);
    let results: Vec<Result<(Moments, Moments)>> = (0..STREAMS)
        .into_par_iter()
        .map(|s| run_stream(sampler, mode, seed, s, per_stream(total_near, s), per_stream(total_far, s)))
        .collect();
    let mut near = Moments::new();
    let mut far = Moments::new();
    for r in results {
        let (a, b) = r?;
        near.merge(&a);
        far.merge(&b);
    }
    let (mean_near, var_near) = near.estimate();
    let (mean_far, var_far) = far.estimate();

    let scale = chi / (16.0 * PI * PI);
    let mut value = Dyadic::zero();
    let mut stderr = Dyadic::zero();
    for k in 0..9 {
        let (i, j) = (k / 3, k % 3);
        let mean = Complex64::new(mean_near[2 * k] + mean_far[2 * k], mean_near[2 * k + 1] + mean_far[2 * k + 1]);
        let var_re = var_near[2 * k] + var_far[2 * k];
        let var_im = var_near[2 * k + 1] + var_far[2 * k + 1];
        value.0[i][j] = mean * scale;
        // propagate the complex scale factor to real and imaginary errors
        let (sr, si) = (scale.re, scale.im);
        stderr.0[i][j] = Complex64::new(
            (sr * sr * var_re + si * si * var_im).sqrt(),
            (si * si * var_re + sr * sr * var_im).sqrt(),
        );
    }
    Ok((value, stderr))
}

/// Domain of [`quad_reference`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `∫_a^b f(x) dx`, integrand called with `[x]`.
    Interval { a: f64, b: f64 },
    /// `∫_0^{2π} dφ ∫_0^π dθ sin θ f(θ, φ)`, integrand called with `[θ, φ]`.
    UnitSphere,
    /// `∫_{y0}^{y1} dy ∫_{x0}^{x1} dx f(x, y)`, integrand called with `[x, y]`.
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
}

const REFERENCE_PANELS: usize = 20_000;

/// Nested adaptive Gauss–Kronrod reference value; `tol` is the absolute error
/// target of the outer integral (inner integrals use `tol / 10` scaled by the
/// outer interval length).
pub fn quad_reference<F>(f: F, domain: Domain, tol: f64) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64,
{
    reference(&f, domain, tol)
}

fn reference(f: &dyn Fn(&[f64]) -> Complex64, domain: Domain, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance {tol} must be positive")));
    }
    let checked = |v: Complex64| {
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("reference integrand".into()))
        }
    };
    match domain {
        Domain::Interval { a, b } => Ok(integrate_adaptive(|x| checked(f(&[x])), a, b, tol, REFERENCE_PANELS)?.value),
        Domain::UnitSphere => reference(
            &|p: &[f64]| f(&[p[0], p[1]]) * p[0].sin(),
            Domain::Rectangle { x0: 0.0, x1: PI, y0: 0.0, y1: 2.0 * PI },
            tol,
        ),
        Domain::Rectangle { x0, x1, y0, y1 } => {
            let inner_tol = tol / (10.0 * (y1 - y0).abs().max(1.0));
            let outer = |y: f64| -> Result<Complex64> {
                Ok(integrate_adaptive(|x| checked(f(&[x, y])), x0, x1, inner_tol, REFERENCE_PANELS)?.value)
            };
            Ok(integrate_adaptive(outer, y0, y1, tol, REFERENCE_PANELS)?.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::{cavity_green_linear, f_constant_q};

    #[test]
    fn sampler_geometry() {
        let s = RegionSampler::shell(0.1, 2.0).unwrap();
        assert!((s.volume() - 4.0 * PI / 3.0 * (8.0 - 1e-3)).abs() < 1e-12);
        assert!(s.contains([0.0, 0.0, 1.0]) && !s.contains([0.05, 0.0, 0.0]));
        let s = RegionSampler::sphere_minus_cavity(2.0, 1.0, 0.1).unwrap();
        assert!(s.contains([0.0, 0.0, 0.95]) && !s.contains([0.0, 0.0, 1.05]));
        assert!(s.contains([0.0, 0.0, -2.9]));
        assert!(RegionSampler::sphere_minus_cavity(2.0, 1.95, 0.1).is_err());
        assert!(RegionSampler::shell(0.0, 1.0).is_err());
    }

    #[test]
    fn too_few_samples() {
        let s = RegionSampler::shell(0.1, 2.0).unwrap();
        assert!(matches!(mc_delta1_green(&s, Complex64::new(0.1, 0.0), 999, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_susceptibility() {
        let s = RegionSampler::shell(0.1, 2.0).unwrap();
        let (g, e) = mc_delta1_green(&s, Complex64::new(0.0, 0.0), 4000, 3).unwrap();
        assert_eq!(g.max_norm(), 0.0);
        assert_eq!(e.max_norm(), 0.0);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let s = RegionSampler::shell(0.1, 5.0).unwrap();
        let chi = Complex64::new(0.1, 0.01);
        let a = mc_delta1_green(&s, chi, 20_000, 42).unwrap();
        let b = mc_delta1_green(&s, chi, 20_000, 42).unwrap();
        assert_eq!(a, b);
        let c = mc_delta1_green(&s, chi, 20_000, 43).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn shell_matches_closed_form_difference() {
        // integral over [q1, q2] equals −F_0(q1) + F_0(q2)
        let chi = Complex64::new(0.1, 0.0);
        let s = RegionSampler::shell(0.2, 3.0).unwrap();
        let (g, err) = mc_delta1_green(&s, chi, 400_000, 7).unwrap();
        let expected = cavity_green_linear(0.2, chi).unwrap() + f_constant_q(3.0, chi).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = g.get(i, j) - expected.get(i, j);
                let e = err.get(i, j);
                assert!(d.re.abs() <= 4.0 * e.re + 1e-12, "({i},{j}) re {d} vs {e}");
                assert!(d.im.abs() <= 4.0 * e.im + 1e-12, "({i},{j}) im {d} vs {e}");
            }
        }
    }

    #[test]
    fn reference_quadrature_basics() {
        let v = quad_reference(|_| Complex64::new(2.0, 0.0), Domain::Rectangle { x0: 0.0, x1: 3.0, y0: -1.0, y1: 1.0 }, 1e-12)
            .unwrap();
        assert!((v.re - 12.0).abs() < 1e-12);
        let v = quad_reference(|_| Complex64::new(1.0, 0.0), Domain::UnitSphere, 1e-12).unwrap();
        assert!((v.re - 4.0 * PI).abs() < 1e-11);
        let v = quad_reference(|x| Complex64::new(x[0].exp(), 0.0), Domain::Interval { a: 0.0, b: 1.0 }, 1e-13).unwrap();
        assert!((v.re - (1f64.exp() - 1.0)).abs() < 1e-13);
    }
}
