//! Exact scattering Green tensor of a homogeneous dielectric sphere at the
//! emitter position, its local-field corrected body term, and the exact total
//! rate at the sphere centre.
//!
//! The reflection coefficients use `j_m` in the denominators (the regular
//! solution inside the sphere).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::born::{check_cavity_radius, Orientation, DEFAULT_NU};
use crate::cavity::{cavity_bracket, gamma_b_corrected, ratio};
use crate::error::{Error, Result};
use crate::greens::{Dyadic, Permittivity};
use crate::specfun::{riccati_from_pair, spherical_bessel_j_orders, spherical_hankel_h1_orders, MAX_ORDER};

/// Truncation control of the Mie series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieSeriesSettings {
    /// Highest order summed; `None` selects `ceil(q_R |n|) + 30`.
    pub m_max: Option<usize>,
    /// Terms below `term_tolerance × |running sum|` count as small.
    pub term_tolerance: f64,
    /// Stop after this many consecutive small terms.
    pub consecutive_small: usize,
}

impl Default for MieSeriesSettings {
    fn default() -> Self {
        MieSeriesSettings { m_max: None, term_tolerance: 1e-14, consecutive_small: 3 }
    }
}

impl MieSeriesSettings {
    pub fn resolved_m_max(&self, eps: &Permittivity, q_r: f64) -> usize {
        let m = self.m_max.unwrap_or_else(|| (q_r * eps.n().norm()).ceil() as usize + 30);
        m.clamp(1, MAX_ORDER)
    }
}

/// Coefficient arrays for orders `0..=m_max` shared by all orders.
struct SphereFunctions {
    h0: Vec<Complex64>,
    j1: Vec<Complex64>,
    h1: Vec<Complex64>,
    z0: Complex64,
    z1: Complex64,
}

impl SphereFunctions {
    fn new(eps: &Permittivity, q_r: f64, m_max: usize) -> Result<Self> {
        let z0 = Complex64::new(q_r, 0.0);
        let z1 = eps.n() * q_r;
        Ok(SphereFunctions {
            h0: spherical_hankel_h1_orders(m_max, z0)?,
            j1: spherical_bessel_j_orders(m_max, z1)?,
            h1: spherical_hankel_h1_orders(m_max, z1)?,
            z0,
            z1,
        })
    }

    fn coefficients(&self, e: Complex64, m: usize) -> Result<(Complex64, Complex64)> {
        let (z0, z1) = (self.z0, self.z1);
        let dh0 = riccati_from_pair(m, z0, self.h0[m - 1], self.h0[m]);
        let dh1 = riccati_from_pair(m, z1, self.h1[m - 1], self.h1[m]);
        let dj1 = riccati_from_pair(m, z1, self.j1[m - 1], self.j1[m]);
        let (h0, h1, j1) = (self.h0[m], self.h1[m], self.j1[m]);
        let c_n = -ratio(e * h1 * dh0 - dh1 * h0, e * j1 * dh0 - dj1 * h0, "C^N")?;
        let c_m = -ratio(h1 * dh0 - dh1 * h0, j1 * dh0 - dj1 * h0, "C^M")?;
        Ok((c_n, c_m))
    }
}

fn check_radius(q_r: f64) -> Result<()> {
    if !(q_r > 0.0) || !q_r.is_finite() {
        return Err(Error::Domain(format!("sphere radius q_r = {q_r} must be positive")));
    }
    Ok(())
}

/// Reflection coefficients `(C^N_m, C^M_m)` of the sphere surface for
/// `z_0 = q_R`, `z_1 = n q_R`.
pub fn sphere_coefficients(eps: &Permittivity, q_r: f64, m: usize) -> Result<(Complex64, Complex64)> {
    check_radius(q_r)?;
    if m < 1 {
        return Err(Error::Domain("Mie order must be at least 1".into()));
    }
    SphereFunctions::new(eps, q_r, m)?.coefficients(eps.epsilon(), m)
}

/// Scattering tensor of the sphere without cavity at an emitter displaced by
/// `q_l` along `+z` from the centre, in units of `k_A`. Diagonal, with
///
/// `G_zz = (i n/4π) Σ (2m+1) m(m+1) C^N_m [j_m(x)/x]²`,
/// `G_xx = G_yy = (i n/8π) Σ (2m+1) [C^M_m j_m(x)² + C^N_m ([x j_m(x)]'/x)²]`,
///
/// `x = n q_l`. At `q_l = 0` only `m = 1` survives and `G = i n C^N_1/(6π) I`.
pub fn sphere_green_scattering(
    eps: &Permittivity,
    q_r: f64,
    q_l: f64,
    settings: &MieSeriesSettings,
) -> Result<Dyadic> {
    check_radius(q_r)?;
    if !(q_l >= 0.0) || q_l >= q_r {
        return Err(Error::Precondition(format!("need 0 <= q_l < q_r, got q_l = {q_l}, q_r = {q_r}")));
    }
    let n = eps.n();
    let e = eps.epsilon();
    if q_l == 0.0 {
        let (c_n, _) = sphere_coefficients(eps, q_r, 1)?;
        return Ok(Dyadic::scaled_identity(Complex64::i() * n * c_n / (6.0 * PI)));
    }
    let m_max = settings.resolved_m_max(eps, q_r);
    let x = n * q_l;
    // orders are tabulated in blocks so a generous m_max does not overflow
    // h_m at orders the converged series never reaches
    let mut len = m_max.min(MieSeriesSettings::default().resolved_m_max(eps, q_r));
    let mut funcs = SphereFunctions::new(eps, q_r, len)?;
    let mut jx = spherical_bessel_j_orders(len, x)?;

    let mut sum_zz = Complex64::new(0.0, 0.0);
    let mut sum_xx = Complex64::new(0.0, 0.0);
    let mut small_run = 0;
    for m in 1..=m_max {
        if m > len {
            len = (2 * len).min(m_max);
            let not_converged = |err: Error| {
                Error::Accuracy(format!("Mie series at q_r = {q_r}, q_l = {q_l} not converged by order {m}: {err}"))
            };
            funcs = SphereFunctions::new(eps, q_r, len).map_err(not_converged)?;
            jx = spherical_bessel_j_orders(len, x).map_err(not_converged)?;
        }
        let (c_n, c_m) = funcs.coefficients(e, m)?;
        let mf = m as f64;
        let weight = (2 * m + 1) as f64;
        let jm = jx[m];
        let djm = riccati_from_pair(m, x, jx[m - 1], jm);
        let term_zz = c_n * (jm / x).powi(2) * (weight * mf * (mf + 1.0));
        let term_xx = (c_m * jm * jm + c_n * (djm / x).powi(2)) * weight;
        sum_zz += term_zz;
        sum_xx += term_xx;
        let tol = settings.term_tolerance;
        let small = term_zz.norm() <= tol * sum_zz.norm() && term_xx.norm() <= tol * sum_xx.norm();
        small_run = if small { small_run + 1 } else { 0 };
        if small_run >= settings.consecutive_small {
            let i = Complex64::i();
            let zz = i * n / (4.0 * PI) * sum_zz;
            let xx = i * n / (8.0 * PI) * sum_xx;
            return Ok(Dyadic::diagonal([xx, xx, zz]));
        }
    }
    Err(Error::Accuracy(format!(
        "Mie series at q_r = {q_r}, q_l = {q_l} not converged within m_max = {m_max}"
    )))
}

/// Exact local-field corrected body term `Γ_B/Γ_0` for an emitter in a sphere.
pub fn gamma_b_exact(
    eps: &Permittivity,
    q_r: f64,
    q_l: f64,
    orient: Orientation,
    settings: &MieSeriesSettings,
) -> Result<f64> {
    let g = sphere_green_scattering(eps, q_r, q_l, settings)?;
    gamma_b_corrected(eps, &g, &orient.dipole())
}

/// Exact total rate `Γ/Γ_0` at the centre of a sphere with a real cavity:
/// `Im{3χ/(2ε+1)/q_C³ + 9χ(4ε+1)/[5(2ε+1)²]/q_C + 9iε^{5/2}/(2ε+1)² (1 + C^N_1)}`.
pub fn gamma_center_exact(eps: &Permittivity, q_r: f64, q_c: f64) -> Result<f64> {
    check_radius(q_r)?;
    check_cavity_radius(q_c)?;
    if q_r <= (1.0 + DEFAULT_NU) * q_c {
        return Err(Error::Precondition(format!(
            "sphere radius q_r = {q_r} must exceed (1+nu) q_c = {}",
            (1.0 + DEFAULT_NU) * q_c
        )));
    }
    let e = eps.epsilon();
    let chi = eps.chi();
    let d = 2.0 * e + 1.0;
    let (c_n, _) = sphere_coefficients(eps, q_r, 1)?;
    let k = Complex64::i() * 9.0 * eps.eps_five_halves() / (d * d);
    let value = 3.0 * chi / d / (q_c * q_c * q_c) + 9.0 * chi * (4.0 * e + 1.0) / (5.0 * d * d) / q_c + k * (1.0 + c_n);
    Ok(value.im)
}

/// Same quantity assembled as `1 + Γ_C + Γ_B` from the cavity bracket and the
/// centre tensor.
pub fn gamma_center_assembled(eps: &Permittivity, q_r: f64, q_c: f64) -> Result<f64> {
    let g = sphere_green_scattering(eps, q_r, 0.0, &MieSeriesSettings::default())?;
    let b = gamma_b_corrected(eps, &g, &Orientation::Radial.dipole())?;
    Ok(1.0 + cavity_bracket(eps, q_c).im + b)
}
