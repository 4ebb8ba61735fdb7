//! Exact real-cavity model for a small empty spherical cavity around the
//! emitter: the cavity term `Γ_C`, the transmission coefficient `A`, the
//! outside-scattering coefficients `B_m`, and the corrected body term carrying
//! the factor `(3ε/(2ε+1))²`.
//!
//! Residuals of order `q_C` in the decomposition are not modelled.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::born::{check_cavity_radius, gamma_c_linear};
use crate::error::{Error, Result};
use crate::greens::{Dyadic, Permittivity, UnitVector3};
use crate::specfun::{riccati_from_pair, spherical_bessel_j_orders, spherical_hankel_h1_orders};

/// Relative asymmetry above which a coincidence tensor is rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Closed bulk formulas require `Im ε` at most this.
pub const NEGLIGIBLE_ABSORPTION: f64 = 1e-6;

const TINY_DENOMINATOR: f64 = 1e-300;

/// `f_m(z)` and `[z f_m(z)]'` for one order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Riccati {
    pub value: Complex64,
    pub derivative: Complex64,
}

pub(crate) fn bessel_j_pair(m: usize, z: Complex64) -> Result<Riccati> {
    let j = spherical_bessel_j_orders(m, z)?;
    let derivative = if m == 0 { z.cos() } else { riccati_from_pair(m, z, j[m - 1], j[m]) };
    Ok(Riccati { value: j[m], derivative })
}

pub(crate) fn hankel_pair(m: usize, z: Complex64) -> Result<Riccati> {
    let h = spherical_hankel_h1_orders(m, z)?;
    let derivative = if m == 0 { (Complex64::i() * z).exp() } else { riccati_from_pair(m, z, h[m - 1], h[m]) };
    Ok(Riccati { value: h[m], derivative })
}

pub(crate) fn ratio(num: Complex64, den: Complex64, what: &str) -> Result<Complex64> {
    if den.norm() < TINY_DENOMINATOR {
        return Err(Error::Singularity(format!("{what}: vanishing denominator {den}")));
    }
    let v = crate::specfun::cdiv(num, den);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn check_q_c(q_c: f64) -> Result<()> {
    if !(q_c > 0.0) || !q_c.is_finite() {
        return Err(Error::Domain(format!("cavity radius q_c = {q_c} must be positive")));
    }
    Ok(())
}

/// Transmission coefficient of the dipole field through the cavity surface,
/// `A → n·3ε/(2ε+1)` as `q_C → 0`.
pub fn transmission_coefficient(eps: &Permittivity, q_c: f64) -> Result<Complex64> {
    check_q_c(q_c)?;
    let n = eps.n();
    let z0 = Complex64::new(q_c, 0.0);
    let z1 = n * q_c;
    let j0 = bessel_j_pair(1, z0)?;
    let h0 = hankel_pair(1, z0)?;
    let h1 = hankel_pair(1, z1)?;
    let num = j0.value * h0.derivative - j0.derivative * h0.value;
    let den = j0.value * h1.derivative - eps.epsilon() * j0.derivative * h1.value;
    Ok(n * ratio(num, den, "transmission coefficient")?)
}

/// Outside-scattering coefficients `B_m^M`, `B_m^N` for `m = 1..=m_max`, stored
/// at index `m − 1`, together with the transmission coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityCoefficients {
    pub transmission: Complex64,
    pub b_m: Vec<Complex64>,
    pub b_n: Vec<Complex64>,
}

pub fn outside_scatter_coefficients(eps: &Permittivity, q_c: f64, m_max: usize) -> Result<CavityCoefficients> {
    check_q_c(q_c)?;
    if m_max < 1 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    let e = eps.epsilon();
    let z0 = Complex64::new(q_c, 0.0);
    let z1 = eps.n() * q_c;
    let mut b_m = Vec::with_capacity(m_max);
    let mut b_n = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let j0 = bessel_j_pair(m, z0)?;
        let j1 = bessel_j_pair(m, z1)?;
        let h1 = hankel_pair(m, z1)?;
        let num_m = j0.value * j1.derivative - j0.derivative * j1.value;
        let den_m = j0.value * h1.derivative - j0.derivative * h1.value;
        let num_n = j0.value * j1.derivative - e * j0.derivative * j1.value;
        let den_n = j0.value * h1.derivative - e * j0.derivative * h1.value;
        b_m.push(-ratio(num_m, den_m, "B^M")?);
        b_n.push(-ratio(num_n, den_n, "B^N")?);
    }
    Ok(CavityCoefficients { transmission: transmission_coefficient(eps, q_c)?, b_m, b_n })
}

/// Complex quantity whose imaginary part is `Γ_C/Γ_0`:
/// `3χ/(2ε+1)/q_C³ + 9χ(4ε+1)/[5(2ε+1)²]/q_C + i[9ε^{5/2}/(2ε+1)² − 1]`.
pub(crate) fn cavity_bracket(eps: &Permittivity, q_c: f64) -> Complex64 {
    let e = eps.epsilon();
    let chi = eps.chi();
    let d = 2.0 * e + 1.0;
    let first = 3.0 * chi / d / (q_c * q_c * q_c);
    let second = 9.0 * chi * (4.0 * e + 1.0) / (5.0 * d * d) / q_c;
    let third = Complex64::i() * (9.0 * eps.eps_five_halves() / (d * d) - 1.0);
    first + second + third
}

/// Exact cavity contribution `Γ_C/Γ_0`.
pub fn gamma_c_exact(eps: &Permittivity, q_c: f64) -> Result<f64> {
    check_q_c(q_c)?;
    if q_c > crate::born::WARN_CAVITY_RADIUS {
        log::warn!("cavity radius q_c = {q_c} is not small compared with 1/k_A");
    }
    Ok(cavity_bracket(eps, q_c).im)
}

/// Corrected body term `6π Im[(3ε/(2ε+1))² d̂·G_B·d̂]` for the scattering
/// tensor `gB1` (units of `k_A`) of the host body without the cavity.
pub fn gamma_b_corrected(eps: &Permittivity, gb1: &Dyadic, dipole: &UnitVector3) -> Result<f64> {
    if !gb1.is_finite() {
        return Err(Error::NonFinite("body tensor".into()));
    }
    if !gb1.is_symmetric_within(SYMMETRY_TOLERANCE) {
        return Err(Error::Invariant(format!("body tensor is not symmetric: {gb1:?}")));
    }
    let f = eps.cavity_factor();
    Ok(6.0 * PI * (f * f * gb1.contract(dipole)).im)
}

/// Weak-absorption form of the total rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakAbsorption {
    /// `Γ/Γ_0`.
    pub gamma: f64,
    /// Absorption shift `ΔΓ/Γ_0`.
    pub delta_gamma: f64,
    /// Left side of the applicability inequality; the form holds when `≪ 1`.
    pub condition_value: f64,
}

/// `Γ/Γ_0 = (3 Re ε/(2 Re ε + 1))² Γ_B/Γ_0 + ΔΓ/Γ_0`, with `Γ_B` the uncorrected
/// rate `√Re ε + 6π Im(d̂·G_B·d̂)` supplied by the caller.
///
/// The condition value uses `√Re ε/6π + Im(d̂·G_B·d̂)` for the imaginary part
/// of the full coincidence tensor.
pub fn gamma_weak_absorption(
    eps: &Permittivity,
    q_c: f64,
    gamma_b_uncorrected: f64,
    gb1: &Dyadic,
    dipole: &UnitVector3,
) -> Result<WeakAbsorption> {
    check_q_c(q_c)?;
    let re = eps.epsilon().re;
    let im = eps.epsilon().im;
    let d = 2.0 * re + 1.0;
    let factor = (3.0 * re / d).powi(2);
    let delta_gamma = 9.0 / (d * d) * im / (q_c * q_c * q_c) + 9.0 * (14.0 * re + 1.0) / (5.0 * d * d * d) * im / q_c;
    let g = gb1.contract(dipole);
    let full_im = re.sqrt() / (6.0 * PI) + g.im;
    let condition_value = if im == 0.0 { 0.0 } else { (im * g.re / (re * full_im)).abs() };
    Ok(WeakAbsorption { gamma: factor * gamma_b_uncorrected + delta_gamma, delta_gamma, condition_value })
}

/// Bulk-medium rate models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BulkModel {
    /// `(3ε/(2ε+1))² √ε`, negligible absorption.
    RealCavity,
    /// `((ε+2)/3)² √ε`, negligible absorption.
    VirtualCavity,
    /// `1 + 7χ/6`, negligible absorption.
    Linear,
    /// `1 + Γ_C/Γ_0` from the exact cavity term.
    ExactAbsorbing,
    /// `1 + Γ_C/Γ_0` from the linear cavity term.
    LinearAbsorbing,
}

/// Bulk rate `Γ/Γ_0`. The three closed forms use `Re ε` and reject
/// `Im ε > 10^{-6}`.
pub fn gamma_bulk(eps: &Permittivity, q_c: f64, model: BulkModel) -> Result<f64> {
    let e = eps.epsilon();
    let closed = matches!(model, BulkModel::RealCavity | BulkModel::VirtualCavity | BulkModel::Linear);
    if closed && e.im > NEGLIGIBLE_ABSORPTION {
        return Err(Error::Precondition(format!(
            "{model:?} bulk formula assumes negligible absorption, Im ε = {}",
            e.im
        )));
    }
    let re = e.re;
    Ok(match model {
        BulkModel::RealCavity => (3.0 * re / (2.0 * re + 1.0)).powi(2) * re.sqrt(),
        BulkModel::VirtualCavity => ((re + 2.0) / 3.0).powi(2) * re.sqrt(),
        BulkModel::Linear => 1.0 + 7.0 * (re - 1.0) / 6.0,
        BulkModel::ExactAbsorbing => {
            check_cavity_radius(q_c)?;
            1.0 + gamma_c_exact(eps, q_c)?
        }
        BulkModel::LinearAbsorbing => {
            check_cavity_radius(q_c)?;
            1.0 + gamma_c_linear(eps.chi(), q_c)?
        }
    })
}
