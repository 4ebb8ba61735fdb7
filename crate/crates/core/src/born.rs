//! Decay-rate contributions in the linear Born approximation: the cavity term
//! `Γ_C`, the body term `Γ_B` for spheres and general star-shaped bodies, and
//! the assembled totals. All rates are ratios `Γ/Γ_0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::{body_green_linear, f_integrand_parts, AngularRule, StarBoundary, UnitVector3};
use crate::quad::integrate_adaptive;

/// Default margin `ν` of the homogeneity condition `q_L + (1+ν) q_C < q_R`.
pub const DEFAULT_NU: f64 = 0.1;
/// Default absolute tolerance of the 1D angular integral.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Cavity radii above this are rejected.
pub const MAX_CAVITY_RADIUS: f64 = 0.2;
/// Cavity radii above this log a warning.
pub const WARN_CAVITY_RADIUS: f64 = 0.1;

const MAX_PANELS: usize = 4000;

/// Sphere geometry in units of `1/k_A`: radius `q_r`, emitter displacement
/// from the centre `q_l`, real-cavity radius `q_c`, margin `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereConfig {
    pub q_r: f64,
    pub q_l: f64,
    pub q_c: f64,
    pub nu: f64,
}

impl SphereConfig {
    /// Validated configuration with the default margin.
    pub fn new(q_r: f64, q_l: f64, q_c: f64) -> Result<Self> {
        Self::with_margin(q_r, q_l, q_c, DEFAULT_NU)
    }

    pub fn with_margin(q_r: f64, q_l: f64, q_c: f64, nu: f64) -> Result<Self> {
        let cfg = SphereConfig { q_r, q_l, q_c, nu };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.q_r, self.q_l, self.q_c, self.nu].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Precondition(format!("non-finite sphere parameters {self:?}")));
        }
        if !(self.q_r > 0.0) || !(self.q_c > 0.0) || self.q_l < 0.0 || self.nu < 0.0 {
            return Err(Error::Precondition(format!(
                "need q_r > 0, q_c > 0, q_l >= 0, nu >= 0, got {self:?}"
            )));
        }
        check_cavity_radius(self.q_c)?;
        // the emitter must sit strictly inside the homogeneous region
        if self.q_l >= self.q_r - (1.0 + self.nu) * self.q_c {
            return Err(Error::Precondition(format!(
                "emitter too close to the surface: q_l = {} >= q_r - (1+nu) q_c = {}",
                self.q_l,
                self.q_r - (1.0 + self.nu) * self.q_c
            )));
        }
        Ok(())
    }

    /// Largest distance from the emitter to the sphere surface.
    pub fn max_boundary_distance(&self) -> f64 {
        self.q_r + self.q_l
    }
}

pub(crate) fn check_cavity_radius(q_c: f64) -> Result<()> {
    if !(q_c > 0.0) || !q_c.is_finite() {
        return Err(Error::Domain(format!("cavity radius q_c = {q_c} must be positive")));
    }
    if q_c > MAX_CAVITY_RADIUS {
        return Err(Error::Precondition(format!(
            "cavity radius q_c = {q_c} exceeds {MAX_CAVITY_RADIUS}; the small-cavity model does not apply"
        )));
    }
    if q_c > WARN_CAVITY_RADIUS {
        log::warn!("cavity radius q_c = {q_c} is not small compared with 1/k_A");
    }
    Ok(())
}

/// Dipole orientation relative to the line from the sphere centre to the
/// emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Radial,
    Tangential,
}

impl Orientation {
    /// Radial is `ẑ`, tangential is `x̂`, with the emitter displaced along `+z`.
    pub fn dipole(self) -> UnitVector3 {
        match self {
            Orientation::Radial => UnitVector3::z(),
            Orientation::Tangential => UnitVector3::x(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Orientation::Radial => "radial",
            Orientation::Tangential => "tangential",
        }
    }
}

/// Rate contributions in units of `Γ_0`; `total_ratio = 1 + gamma_c_ratio +
/// gamma_b_ratio`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    pub gamma_c_ratio: f64,
    pub gamma_b_ratio: f64,
    pub total_ratio: f64,
}

impl RateBreakdown {
    pub fn new(gamma_c_ratio: f64, gamma_b_ratio: f64) -> Self {
        RateBreakdown { gamma_c_ratio, gamma_b_ratio, total_ratio: 1.0 + gamma_c_ratio + gamma_b_ratio }
    }
}

/// `Γ_C/Γ_0 = Im χ/q_C³ + Im χ/q_C + 7 Re χ/6`.
pub fn gamma_c_linear(chi: Complex64, q_c: f64) -> Result<f64> {
    if !(q_c > 0.0) || !q_c.is_finite() {
        return Err(Error::Domain(format!("cavity radius q_c = {q_c} must be positive")));
    }
    Ok(chi.im / (q_c * q_c * q_c) + chi.im / q_c + 7.0 * chi.re / 6.0)
}

/// `f^⊥(q, z)`; the tangential function is `f^⊥(q, (1 − z)/2)`.
fn f_perp(q: f64, z: f64) -> Result<Complex64> {
    let (iso, aniso, ei_term) = f_integrand_parts(q)?;
    Ok(iso + aniso * z + ei_term * (1.0 / 3.0 - z))
}

/// `∫_{-1}^{1} f^{⊥(∥)}(q_o(x), x²) dx` for the displaced sphere.
pub fn sphere_angular_integral(cfg: &SphereConfig, orient: Orientation, tol: f64) -> Result<Complex64> {
    let r2 = cfg.q_r * cfg.q_r;
    let l = cfg.q_l;
    let integrand = |x: f64| {
        let q = l * x + (r2 - l * l * (1.0 - x * x)).sqrt();
        let z = match orient {
            Orientation::Radial => x * x,
            Orientation::Tangential => 0.5 * (1.0 - x * x),
        };
        f_perp(q, z)
    };
    Ok(integrate_adaptive(integrand, -1.0, 1.0, tol, MAX_PANELS)?.value)
}

/// `Γ_B/Γ_0 = −(3/4) Im[χ ∫ f^{⊥(∥)}(q_o(x), x²) dx]` for an emitter at
/// distance `q_l` from the centre of a sphere of radius `q_r`.
///
/// `tol` bounds the absolute error of the `x` integral, so the rate error is at
/// most `0.75 |χ| tol`.
pub fn gamma_b_sphere_linear(cfg: &SphereConfig, chi: Complex64, orient: Orientation, tol: f64) -> Result<f64> {
    cfg.validate()?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance {tol} must be positive")));
    }
    let integral = sphere_angular_integral(cfg, orient, tol)?;
    Ok(-0.75 * (chi * integral).im)
}

/// Closed form at the sphere centre:
/// `−Im{χ [1/q³ − 2i/q² − 1/q + i/2] e^{2iq}}`.
pub fn gamma_b_center_closed(q_r: f64, chi: Complex64) -> Result<f64> {
    if !(q_r > 0.0) || !q_r.is_finite() {
        return Err(Error::Domain(format!("sphere radius q_r = {q_r} must be positive")));
    }
    let q = q_r;
    let bracket = Complex64::new(1.0 / (q * q * q) - 1.0 / q, -2.0 / (q * q) + 0.5);
    Ok(-(chi * bracket * Complex64::new(0.0, 2.0 * q).exp()).im)
}

/// `Γ_B/Γ_0 = 6π Im(d̂·G_B·d̂)` for a linear-order body tensor in units of `k_A`.
pub fn gamma_b_from_tensor(g: &crate::greens::Dyadic, dipole: &UnitVector3) -> f64 {
    6.0 * std::f64::consts::PI * g.contract(dipole).im
}

/// Bulk medium: the body term vanishes.
pub fn gamma_total_bulk_linear(chi: Complex64, q_c: f64) -> Result<RateBreakdown> {
    check_cavity_radius(q_c)?;
    Ok(RateBreakdown::new(gamma_c_linear(chi, q_c)?, 0.0))
}

/// Total rate for an emitter in a sphere.
pub fn gamma_total_sphere_linear(
    cfg: &SphereConfig,
    chi: Complex64,
    orient: Orientation,
    tol: f64,
) -> Result<RateBreakdown> {
    let c = gamma_c_linear(chi, cfg.q_c)?;
    let b = gamma_b_sphere_linear(cfg, chi, orient, tol)?;
    Ok(RateBreakdown::new(c, b))
}

/// Total rate for an emitter in a star-shaped body, with the body tensor from
/// the angular quadrature of [`body_green_linear`].
pub fn gamma_total_body_linear(
    boundary: &dyn StarBoundary,
    q_c: f64,
    chi: Complex64,
    dipole: &UnitVector3,
    tol: f64,
    rule: AngularRule,
) -> Result<RateBreakdown> {
    check_cavity_radius(q_c)?;
    let g = body_green_linear(boundary, chi, tol, rule)?;
    Ok(RateBreakdown::new(gamma_c_linear(chi, q_c)?, gamma_b_from_tensor(&g, dipole)))
}

pub const SIZE_THRESHOLD: f64 = 0.3;
pub const ABSORPTION_THRESHOLD: f64 = 0.1;

/// Applicability of the linear Born rates: body size `|χ| q_max` and cavity
/// absorption `Im χ/q_C³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// `None` for an unbounded medium.
    pub size_value: Option<f64>,
    pub size_ok: bool,
    pub absorption_value: f64,
    pub absorption_ok: bool,
}

impl ValidityReport {
    pub fn all_ok(&self) -> bool {
        self.size_ok && self.absorption_ok
    }
}

/// `boundary_max` is the largest emitter-to-surface distance, `None` for bulk.
pub fn validity_check(chi: Complex64, q_c: f64, boundary_max: Option<f64>) -> ValidityReport {
    let size_value = boundary_max.map(|r| chi.norm() * r);
    let absorption_value = chi.im / (q_c * q_c * q_c);
    ValidityReport {
        size_value,
        size_ok: size_value.is_none_or(|v| v <= SIZE_THRESHOLD),
        absorption_value,
        absorption_ok: absorption_value <= ABSORPTION_THRESHOLD,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::DisplacedSphere;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_c_linear_examples() {
        let v = gamma_c_linear(c(0.1, 1e-8), 0.01).unwrap();
        assert!((v - (1e-2 + 1e-6 + 0.7 / 6.0)).abs() < 1e-14);
        assert!((gamma_c_linear(c(0.3, 0.0), 0.05).unwrap() - 0.35).abs() < 1e-15);
        assert!((gamma_c_linear(c(0.0, 1e-6), 0.01).unwrap() - 1.0001).abs() < 1e-12);
        assert!(gamma_c_linear(c(0.1, 0.0), 0.0).is_err());
    }

    #[test]
    fn config_rejects_atom_at_surface() {
        assert!(SphereConfig::new(2.0, 0.0, 0.01).is_ok());
        let edge = 2.0 - 1.1 * 0.01;
        assert!(matches!(SphereConfig::new(2.0, edge, 0.01), Err(Error::Precondition(_))));
        assert!(SphereConfig::new(2.0, edge - 1e-9, 0.01).is_ok());
        assert!(matches!(SphereConfig::new(2.0, 0.0, 0.25), Err(Error::Precondition(_))));
        assert!(SphereConfig::new(2.0, 0.0, 0.15).is_ok());
    }

    #[test]
    fn centre_quadrature_matches_closed_form() {
        for &q_r in &[0.5, 2.0, 7.3] {
            let cfg = SphereConfig::new(q_r, 0.0, 0.01).unwrap();
            let chi = c(0.1, 1e-8);
            let closed = gamma_b_center_closed(q_r, chi).unwrap();
            for orient in [Orientation::Radial, Orientation::Tangential] {
                let v = gamma_b_sphere_linear(&cfg, chi, orient, 1e-10).unwrap();
                assert!((v - closed).abs() <= 1e-12 * closed.abs().max(1e-3), "{q_r} {orient:?}");
            }
        }
    }

    #[test]
    fn zero_susceptibility_gives_zero() {
        let cfg = SphereConfig::new(5.0, 1.0, 0.01).unwrap();
        assert_eq!(gamma_b_sphere_linear(&cfg, c(0.0, 0.0), Orientation::Radial, 1e-10).unwrap(), 0.0);
        assert_eq!(gamma_b_center_closed(3.0, c(0.0, 0.0)).unwrap(), 0.0);
        let total = gamma_total_sphere_linear(&cfg, c(0.0, 0.0), Orientation::Tangential, 1e-10).unwrap();
        assert_eq!(total.total_ratio, 1.0);
    }

    #[test]
    fn off_centre_matches_angular_tensor_quadrature() {
        let chi = c(0.1, 1e-8);
        let cfg = SphereConfig::new(5.0, 1.0, 0.01).unwrap();
        let boundary = DisplacedSphere { q_radius: 5.0, q_offset: 1.0 };
        let g = body_green_linear(&boundary, chi, 1e-12, AngularRule::default()).unwrap();
        for orient in [Orientation::Radial, Orientation::Tangential] {
            let one_d = gamma_b_sphere_linear(&cfg, chi, orient, 1e-12).unwrap();
            let two_d = gamma_b_from_tensor(&g, &orient.dipole());
            assert!((one_d - two_d).abs() <= 1e-8, "{orient:?}: {one_d} vs {two_d}");
        }
    }

    #[test]
    fn bulk_total_is_one_plus_seven_sixths_chi() {
        let b = gamma_total_bulk_linear(c(0.1, 0.0), 0.01).unwrap();
        assert!((b.total_ratio - (1.0 + 0.7 / 6.0)).abs() < 1e-15);
        assert_eq!(b.gamma_b_ratio, 0.0);
    }

    #[test]
    fn validity_examples() {
        let r = validity_check(c(0.1, 1e-8), 0.01, Some(2.0));
        assert!((r.absorption_value - 1e-2).abs() < 1e-15 && r.absorption_ok);
        let r = validity_check(c(0.0, 0.0), 0.01, Some(2.0));
        assert!(r.all_ok() && r.size_value == Some(0.0) && r.absorption_value == 0.0);
        let r = validity_check(c(0.2, 1e-8), 0.01, Some(10.0));
        assert!((r.size_value.unwrap() - 2.0).abs() < 1e-12 && !r.size_ok);
    }

    #[test]
    fn oscillation_law_for_large_spheres() {
        let chi = 0.1;
        for i in 0..200 {
            let q = 10.0 + 0.37 * i as f64;
            let g = gamma_b_center_closed(q, c(chi, 0.0)).unwrap();
            assert!((g + 0.5 * chi * (2.0 * q).cos()).abs() <= 2.0 * chi / q, "q = {q}");
        }
    }
}
