//! Rate assembly: the SI free-space rate, the uncorrected rate, and dispatch
//! of a rate request to the linear Born, exact, weak-absorption or
//! uncorrected path.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::born::{
    self, gamma_b_from_tensor, gamma_b_sphere_linear, gamma_c_linear, validity_check, Orientation, RateBreakdown,
    SphereConfig, ValidityReport, DEFAULT_NU, DEFAULT_TOLERANCE,
};
use crate::cavity::{self, gamma_b_corrected, gamma_c_exact, gamma_weak_absorption, NEGLIGIBLE_ABSORPTION};
use crate::error::{Error, Result};
use crate::greens::{body_green_linear, AngularRule, Dyadic, Permittivity, StarBoundary, UnitVector3};
use crate::mie::{gamma_b_exact, sphere_green_scattering, MieSeriesSettings};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// One debye in C m.
pub const DEBYE: f64 = 3.335_640_952e-30;

/// Transition wavenumber and, for SI rates, dipole moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// `k_A` in 1/m.
    pub k_a: f64,
    /// `d_A` in C m.
    pub dipole_moment: Option<f64>,
}

impl AtomParams {
    pub fn new(k_a: f64, dipole_moment: Option<f64>) -> Result<Self> {
        if !(k_a > 0.0) || !k_a.is_finite() {
            return Err(Error::Precondition(format!("k_A = {k_a} must be positive")));
        }
        if let Some(d) = dipole_moment {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Precondition(format!("dipole moment {d} must be positive")));
            }
        }
        Ok(AtomParams { k_a, dipole_moment })
    }

    /// From the vacuum transition wavelength in metres.
    pub fn from_wavelength(lambda: f64, dipole_moment: Option<f64>) -> Result<Self> {
        Self::new(2.0 * PI / lambda, dipole_moment)
    }
}

/// Free-space rate `k_A³ d_A²/(3π ħ ε_0)` in 1/s.
pub fn gamma0_si(params: &AtomParams) -> Result<f64> {
    let d = params
        .dipole_moment
        .ok_or_else(|| Error::Precondition("the SI free-space rate needs a dipole moment".into()))?;
    Ok(params.k_a.powi(3) * d * d / (3.0 * PI * HBAR * EPSILON_0))
}

fn check_negligible_absorption(eps: &Permittivity) -> Result<()> {
    if eps.epsilon().im > NEGLIGIBLE_ABSORPTION {
        return Err(Error::Precondition(format!(
            "uncorrected rate assumes negligible absorption, Im ε = {}",
            eps.epsilon().im
        )));
    }
    Ok(())
}

/// Uncorrected rate `√ε + 6π Im(d̂·G_B·d̂)` with `ε` taken real.
pub fn gamma_uncorrected(eps: &Permittivity, gb1: &Dyadic, dipole: &UnitVector3) -> Result<f64> {
    check_negligible_absorption(eps)?;
    Ok(eps.epsilon().re.sqrt() + gamma_b_from_tensor(gb1, dipole))
}

/// Host geometry of a rate request.
#[derive(Clone, Copy)]
pub enum Geometry<'a> {
    /// Unbounded medium.
    Bulk,
    /// Sphere of radius `q_r` with the emitter at distance `q_l` from its centre.
    Sphere { q_r: f64, q_l: f64 },
    /// Star-shaped body seen from the emitter (linear Born only).
    Body(&'a dyn StarBoundary),
    /// Externally supplied host scattering tensor at the emitter, units of `k_A`.
    Supplied(Dyadic),
}

impl std::fmt::Debug for Geometry<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Geometry::Bulk => write!(f, "Bulk"),
            Geometry::Sphere { q_r, q_l } => write!(f, "Sphere {{ q_r: {q_r}, q_l: {q_l} }}"),
            Geometry::Body(_) => write!(f, "Body(..)"),
            Geometry::Supplied(g) => write!(f, "Supplied({g:?})"),
        }
    }
}

/// Rate formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    LinearBorn,
    Exact,
    WeakAbsorption,
    Uncorrected,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::LinearBorn => "linear_born",
            Method::Exact => "exact",
            Method::WeakAbsorption => "weak_absorption",
            Method::Uncorrected => "uncorrected",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear_born" => Some(Method::LinearBorn),
            "exact" => Some(Method::Exact),
            "weak_absorption" => Some(Method::WeakAbsorption),
            "uncorrected" => Some(Method::Uncorrected),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RateRequest<'a> {
    pub geometry: Geometry<'a>,
    pub eps: Permittivity,
    pub q_c: f64,
    pub nu: f64,
    pub orientation: Orientation,
    pub method: Method,
    /// Absolute tolerance of the angular quadratures.
    pub tolerance: f64,
}

impl<'a> RateRequest<'a> {
    pub fn new(geometry: Geometry<'a>, eps: Permittivity, q_c: f64, orientation: Orientation, method: Method) -> Self {
        RateRequest { geometry, eps, q_c, nu: DEFAULT_NU, orientation, method, tolerance: DEFAULT_TOLERANCE }
    }
}

/// Result of [`compute`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub breakdown: RateBreakdown,
    pub validity: ValidityReport,
    /// Applicability value of the weak-absorption form, when that path ran.
    pub condition_value: Option<f64>,
}

fn sphere_config(req: &RateRequest, q_r: f64, q_l: f64) -> Result<SphereConfig> {
    SphereConfig::with_margin(q_r, q_l, req.q_c, req.nu)
}

/// Uncorrected host tensor used by the weak-absorption and uncorrected paths.
fn host_tensor(req: &RateRequest, linear: bool) -> Result<Dyadic> {
    let chi = req.eps.chi();
    match req.geometry {
        Geometry::Bulk => Ok(Dyadic::zero()),
        Geometry::Supplied(g) => Ok(g),
        Geometry::Sphere { q_r, q_l } => {
            let cfg = sphere_config(req, q_r, q_l)?;
            if linear {
                let b = crate::greens::DisplacedSphere { q_radius: cfg.q_r, q_offset: cfg.q_l };
                body_green_linear(&b, chi, req.tolerance, AngularRule::default())
            } else {
                sphere_green_scattering(&req.eps, cfg.q_r, cfg.q_l, &MieSeriesSettings::default())
            }
        }
        Geometry::Body(boundary) => body_green_linear(boundary, chi, req.tolerance, AngularRule::default()),
    }
}

/// Evaluates `Γ/Γ_0` for a request and attaches the linear-Born validity
/// report.
pub fn compute(req: &RateRequest) -> Result<RateReport> {
    let eps = &req.eps;
    let chi = eps.chi();
    let dipole = req.orientation.dipole();
    born::check_cavity_radius(req.q_c)?;
    let boundary_max = match req.geometry {
        Geometry::Bulk | Geometry::Supplied(_) => None,
        Geometry::Sphere { q_r, q_l } => Some(q_r + q_l),
        Geometry::Body(b) => Some(b.max_radius()),
    };
    let validity = validity_check(chi, req.q_c, boundary_max);
    let mut condition_value = None;

    let breakdown = match req.method {
        Method::LinearBorn => {
            let c = gamma_c_linear(chi, req.q_c)?;
            let b = match req.geometry {
                Geometry::Bulk => 0.0,
                Geometry::Sphere { q_r, q_l } => {
                    let cfg = sphere_config(req, q_r, q_l)?;
                    gamma_b_sphere_linear(&cfg, chi, req.orientation, req.tolerance)?
                }
                Geometry::Body(_) | Geometry::Supplied(_) => gamma_b_from_tensor(&host_tensor(req, true)?, &dipole),
            };
            RateBreakdown::new(c, b)
        }
        Method::Exact => {
            let c = gamma_c_exact(eps, req.q_c)?;
            let b = match req.geometry {
                Geometry::Bulk => 0.0,
                Geometry::Sphere { q_r, q_l } => {
                    let cfg = sphere_config(req, q_r, q_l)?;
                    gamma_b_exact(eps, cfg.q_r, cfg.q_l, req.orientation, &MieSeriesSettings::default())?
                }
                Geometry::Supplied(g) => gamma_b_corrected(eps, &g, &dipole)?,
                Geometry::Body(_) => {
                    return Err(Error::Config(
                        "the exact method needs a sphere or a supplied host tensor, not a star body".into(),
                    ))
                }
            };
            RateBreakdown::new(c, b)
        }
        Method::WeakAbsorption => {
            if matches!(req.geometry, Geometry::Body(_)) {
                return Err(Error::Config(
                    "the weak-absorption method needs a sphere, bulk, or a supplied host tensor".into(),
                ));
            }
            let g = host_tensor(req, false)?;
            let re = eps.epsilon().re;
            let uncorrected = re.sqrt() + gamma_b_from_tensor(&g, &dipole);
            let w = gamma_weak_absorption(eps, req.q_c, uncorrected, &g, &dipole)?;
            condition_value = Some(w.condition_value);
            let factor = (3.0 * re / (2.0 * re + 1.0)).powi(2);
            let b = factor * gamma_b_from_tensor(&g, &dipole);
            let c = w.gamma - 1.0 - b;
            RateBreakdown { gamma_c_ratio: c, gamma_b_ratio: b, total_ratio: w.gamma }
        }
        Method::Uncorrected => {
            check_negligible_absorption(eps)?;
            let b = match req.geometry {
                Geometry::Bulk => 0.0,
                Geometry::Sphere { q_r, q_l } => {
                    let cfg = sphere_config(req, q_r, q_l)?;
                    gamma_b_sphere_linear(&cfg, chi, req.orientation, req.tolerance)?
                }
                _ => gamma_b_from_tensor(&host_tensor(req, true)?, &dipole),
            };
            RateBreakdown::new(eps.epsilon().re.sqrt() - 1.0, b)
        }
    };
    if !breakdown.total_ratio.is_finite() {
        return Err(Error::NonFinite("total rate".into()));
    }
    Ok(RateReport { breakdown, validity, condition_value })
}

/// Bulk reference used for sweep tables: the exact absorbing bulk rate
/// `1 + Γ_C/Γ_0`.
pub fn bulk_reference(eps: &Permittivity, q_c: f64) -> Result<f64> {
    cavity::gamma_bulk(eps, q_c, cavity::BulkModel::ExactAbsorbing)
}

/// Convenience: complex permittivity from parts with validation.
pub fn permittivity(re: f64, im: f64) -> Result<Permittivity> {
    Permittivity::new(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::CenteredSphere;
    use crate::mie::gamma_center_exact;

    #[test]
    fn si_rate_scaling() {
        let p = AtomParams::from_wavelength(1e-6, Some(DEBYE)).unwrap();
        let g = gamma0_si(&p).unwrap();
        let p2 = AtomParams::new(p.k_a, Some(2.0 * DEBYE)).unwrap();
        assert!((gamma0_si(&p2).unwrap() / g - 4.0).abs() < 1e-12);
        let p3 = AtomParams::new(2.0 * p.k_a, Some(DEBYE)).unwrap();
        assert!((gamma0_si(&p3).unwrap() / g - 8.0).abs() < 1e-12);
        assert!(matches!(gamma0_si(&AtomParams::new(1.0, None).unwrap()), Err(Error::Precondition(_))));
    }

    #[test]
    fn uncorrected_examples() {
        let e = permittivity(1.1, 0.0).unwrap();
        let v = gamma_uncorrected(&e, &Dyadic::zero(), &UnitVector3::z()).unwrap();
        assert!((v - 1.1f64.sqrt()).abs() < 1e-15 && (v - 1.04881).abs() < 1e-5);
        let absorbing = permittivity(1.1, 1e-3).unwrap();
        assert!(matches!(
            gamma_uncorrected(&absorbing, &Dyadic::zero(), &UnitVector3::z()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn vacuum_gives_unity_for_every_method() {
        let e = Permittivity::vacuum();
        for method in [Method::LinearBorn, Method::Exact, Method::WeakAbsorption, Method::Uncorrected] {
            for geometry in [Geometry::Bulk, Geometry::Sphere { q_r: 2.0, q_l: 0.5 }] {
                let r = compute(&RateRequest::new(geometry, e, 0.01, Orientation::Radial, method)).unwrap();
                assert_eq!(r.breakdown.total_ratio, 1.0, "{method:?} {geometry:?}");
            }
        }
    }

    #[test]
    fn exact_centre_dispatch() {
        let e = permittivity(1.1, 1e-8).unwrap();
        let r = compute(&RateRequest::new(Geometry::Sphere { q_r: 2.0, q_l: 0.0 }, e, 0.01, Orientation::Radial, Method::Exact))
            .unwrap();
        let direct = gamma_center_exact(&e, 2.0, 0.01).unwrap();
        assert!((r.breakdown.total_ratio - direct).abs() < 1e-12);
    }

    #[test]
    fn linear_bulk_dispatch() {
        let e = permittivity(1.1, 1e-8).unwrap();
        let r = compute(&RateRequest::new(Geometry::Bulk, e, 0.01, Orientation::Radial, Method::LinearBorn)).unwrap();
        assert!((r.breakdown.total_ratio - (1.0 + 0.7 / 6.0 + 1e-2 + 1e-6)).abs() < 1e-12);
        assert!(r.validity.all_ok());
    }

    #[test]
    fn inconsistent_requests() {
        let e = permittivity(1.1, 1e-8).unwrap();
        let body = CenteredSphere { q_radius: 2.0 };
        let req = RateRequest::new(Geometry::Body(&body), e, 0.01, Orientation::Radial, Method::Exact);
        assert!(matches!(compute(&req), Err(Error::Config(_))));
        let req = RateRequest::new(Geometry::Sphere { q_r: 1.0, q_l: 0.999 }, e, 0.01, Orientation::Radial, Method::LinearBorn);
        assert!(matches!(compute(&req), Err(Error::Precondition(_))));
    }

    #[test]
    fn body_path_matches_sphere_path() {
        let e = permittivity(1.1, 1e-8).unwrap();
        let body = CenteredSphere { q_radius: 2.0 };
        let a = compute(&RateRequest::new(Geometry::Body(&body), e, 0.01, Orientation::Radial, Method::LinearBorn)).unwrap();
        let b = compute(&RateRequest::new(Geometry::Sphere { q_r: 2.0, q_l: 0.0 }, e, 0.01, Orientation::Radial, Method::LinearBorn))
            .unwrap();
        assert!((a.breakdown.total_ratio - b.breakdown.total_ratio).abs() < 1e-9);
    }
}
