//! Dyadic Green-tensor building blocks.
//!
//! All tensors returned here are divided by the transition wavenumber `k_A`,
//! so that `6π · d̂·Im G·d̂` is directly a rate in units of the free-space
//! rate. Distances are dimensionless (`q = k_A · length`).
//!
//! Linear-order scattering tensors at the emitter position:
//!
//! * a small empty cavity of radius `q_C` carved out of bulk material:
//!   [`cavity_green_linear`], equal to `-F(q_C)` with the closed form
//!   [`f_constant_q`];
//! * a homogeneous host body that is star-shaped with respect to the emitter:
//!   [`body_green_linear`], the angular integral of [`f_integrand`] evaluated
//!   at the outer boundary `q_o(θ, φ)`. An infinitely extended host gives zero.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::specfun::exponential_integral_ei;

/// 3×3 complex tensor.
#[derive(Clone, Copy, PartialEq)]
pub struct Dyadic(pub [[Complex64; 3]; 3]);

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic([[Complex64::new(0.0, 0.0); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::scaled_identity(Complex64::new(1.0, 0.0))
    }

    pub fn scaled_identity(s: Complex64) -> Self {
        let mut d = Self::zero();
        for i in 0..3 {
            d.0[i][i] = s;
        }
        d
    }

    /// Real dyad `u u` of a vector with itself.
    pub fn outer(u: [f64; 3]) -> Self {
        let mut d = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                d.0[i][j] = Complex64::new(u[i] * u[j], 0.0);
            }
        }
        d
    }

    pub fn diagonal(values: [Complex64; 3]) -> Self {
        let mut d = Self::zero();
        for (i, v) in values.into_iter().enumerate() {
            d.0[i][i] = v;
        }
        d
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut d = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                d.0[i][j] = self.0[j][i];
            }
        }
        d
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// `d̂ · G · d̂` for a real unit vector.
    pub fn contract(&self, d: &UnitVector3) -> Complex64 {
        let v = d.components();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += self.0[i][j] * (v[i] * v[j]);
            }
        }
        acc
    }

    /// Largest component modulus.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Exact symmetry of all off-diagonal pairs.
    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.0[i][j] == self.0[j][i]))
    }

    /// Symmetry within `rel_tol` of the largest component.
    pub fn is_symmetric_within(&self, rel_tol: f64) -> bool {
        let scale = self.max_norm();
        (0..3).all(|i| (0..3).all(|j| (self.0[i][j] - self.0[j][i]).norm() <= rel_tol * scale))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut d = *self;
        for row in d.0.iter_mut() {
            for c in row.iter_mut() {
                *c = f(*c);
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest componentwise difference to `other`.
    pub fn max_abs_diff(&self, other: &Dyadic) -> f64 {
        (*self - *other).max_norm()
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Dyadic[")?;
        for row in &self.0 {
            writeln!(f, "  {:.6e} {:.6e} {:.6e}", row[0], row[1], row[2])?;
        }
        write!(f, "]")
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let mut d = self;
        for i in 0..3 {
            for j in 0..3 {
                d.0[i][j] += rhs.0[i][j];
            }
        }
        d
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        self.map(|c| -c)
    }
}

impl Mul<Complex64> for Dyadic {
    type Output = Dyadic;
    fn mul(self, s: Complex64) -> Dyadic {
        self.map(|c| c * s)
    }
}

impl Mul<f64> for Dyadic {
    type Output = Dyadic;
    fn mul(self, s: f64) -> Dyadic {
        self.map(|c| c * s)
    }
}

/// Relative permittivity of the host at the transition frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Permittivity {
    epsilon: Complex64,
}

impl Permittivity {
    /// Requires finite components and `Im ε >= 0`.
    pub fn new(epsilon: Complex64) -> Result<Self> {
        if !(epsilon.re.is_finite() && epsilon.im.is_finite()) {
            return Err(Error::Domain(format!("permittivity {epsilon} is not finite")));
        }
        if epsilon.im < 0.0 {
            return Err(Error::Domain(format!("permittivity {epsilon} has Im < 0 (gain medium)")));
        }
        Ok(Permittivity { epsilon })
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn vacuum() -> Self {
        Permittivity { epsilon: Complex64::new(1.0, 0.0) }
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    /// Susceptibility `χ = ε − 1`.
    pub fn chi(&self) -> Complex64 {
        self.epsilon - 1.0
    }

    /// Refractive index, principal root (`Im n >= 0`).
    pub fn n(&self) -> Complex64 {
        self.epsilon.sqrt()
    }

    /// `ε^{5/2}` taken as `ε² √ε` with the principal root.
    pub fn eps_five_halves(&self) -> Complex64 {
        self.epsilon * self.epsilon * self.n()
    }

    /// Real-cavity field factor `3ε/(2ε+1)`.
    pub fn cavity_factor(&self) -> Complex64 {
        3.0 * self.epsilon / (2.0 * self.epsilon + 1.0)
    }
}

/// Real unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3([f64; 3]);

impl UnitVector3 {
    /// Accepts vectors whose norm is 1 within `1e-12`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Invariant(format!("|({x}, {y}, {z})| = {norm} is not 1")));
        }
        Ok(UnitVector3([x, y, z]))
    }

    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("cannot normalise a zero vector".into()));
        }
        Ok(UnitVector3([x / norm, y / norm, z / norm]))
    }

    pub fn x() -> Self {
        UnitVector3([1.0, 0.0, 0.0])
    }

    pub fn z() -> Self {
        UnitVector3([0.0, 0.0, 1.0])
    }

    /// Direction `(cos φ sin θ, sin φ sin θ, cos θ)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        UnitVector3([phi.cos() * theta.sin(), phi.sin() * theta.sin(), theta.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }
}

/// Outer boundary `q_o(θ, φ) = k_A R_o(θ, φ)` of a homogeneous host body,
/// measured from the emitter, which must see every boundary point along a
/// straight interior ray.
pub trait StarBoundary: Sync {
    fn radius(&self, theta: f64, phi: f64) -> f64;

    /// Largest boundary distance; the default samples a 181×360 grid.
    fn max_radius(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..=180 {
            let theta = PI * i as f64 / 180.0;
            for j in 0..360 {
                let phi = 2.0 * PI * j as f64 / 360.0;
                best = best.max(self.radius(theta, phi));
            }
        }
        best
    }
}

/// Sphere of radius `q_radius` centred on the emitter.
#[derive(Debug, Clone, Copy)]
pub struct CenteredSphere {
    pub q_radius: f64,
}

impl StarBoundary for CenteredSphere {
    fn radius(&self, _theta: f64, _phi: f64) -> f64 {
        self.q_radius
    }
    fn max_radius(&self) -> f64 {
        self.q_radius
    }
}

/// Sphere of radius `q_radius` whose centre lies a distance `q_offset` from the
/// emitter along `-z`, so the radial direction of the emitter is `+z`:
/// `q_o(θ) = q_l cos θ + sqrt(q_R² − q_l² sin² θ)`.
#[derive(Debug, Clone, Copy)]
pub struct DisplacedSphere {
    pub q_radius: f64,
    pub q_offset: f64,
}

impl DisplacedSphere {
    pub fn radius_at_cos(&self, x: f64) -> f64 {
        let l = self.q_offset;
        l * x + (self.q_radius * self.q_radius - l * l * (1.0 - x * x)).sqrt()
    }
}

impl StarBoundary for DisplacedSphere {
    fn radius(&self, theta: f64, _phi: f64) -> f64 {
        self.radius_at_cos(theta.cos())
    }
    fn max_radius(&self) -> f64 {
        self.q_radius + self.q_offset
    }
}

/// Boundary given by an arbitrary closure.
pub struct FnBoundary<F>(pub F);

impl<F> StarBoundary for FnBoundary<F>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn radius(&self, theta: f64, phi: f64) -> f64 {
        (self.0)(theta, phi)
    }
}

/// Radial coefficients `a(q) = 1/q + i/q² − 1/q³`, `b(q) = 1/q + 3i/q² − 3/q³`.
pub fn ab_coefficients(q: f64) -> Result<(Complex64, Complex64)> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q = {q} must be positive")));
    }
    let (q1, q2, q3) = (1.0 / q, 1.0 / (q * q), 1.0 / (q * q * q));
    Ok((Complex64::new(q1 - q3, q2), Complex64::new(q1 - 3.0 * q3, 3.0 * q2)))
}

/// Free-space Green tensor `(k/4π)(a I − b ũũ) e^{iq}` at separation `u`
/// (physical length), excluding the contact δ-term. Returned in units of
/// `k_A` when `k` is given in units of `k_A`.
pub fn vacuum_green(u: [f64; 3], k: f64) -> Result<Dyadic> {
    let len = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if len == 0.0 {
        return Err(Error::Singularity("vacuum Green tensor at zero separation".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber {k} must be positive")));
    }
    let q = k * len;
    let (a, b) = ab_coefficients(q)?;
    let dir = [u[0] / len, u[1] / len, u[2] / len];
    let phase = Complex64::new(0.0, q).exp() * (k / (4.0 * PI));
    Ok((Dyadic::scaled_identity(a) - Dyadic::outer(dir) * b) * phase)
}

/// Braces of the radial antiderivative evaluated at radius `q` along direction
/// `s_hat`:
///
/// `e^{2iq}[(1/3q³ − 2i/3q² − 5/3q + i/2) I + (1/q³ − 2i/q² + 3/q − i/2) s̃s̃]
///  + 4i Ei(2iq) (I/3 − s̃s̃)`.
///
/// Multiplying by `χ` is left to the callers; `chi` is accepted only for
/// parity with the scattering tensors and scales the result.
pub fn f_integrand(q: f64, s_hat: &UnitVector3, chi: Complex64) -> Result<Dyadic> {
    let (iso, aniso, ei_term) = f_integrand_parts(q)?;
    let ss = Dyadic::outer(s_hat.components());
    let third = Dyadic::scaled_identity(Complex64::new(1.0 / 3.0, 0.0));
    let d = Dyadic::scaled_identity(iso) + ss * aniso + (third - ss) * ei_term;
    Ok(d * chi)
}

/// Scalar pieces of [`f_integrand`]: coefficient of `I`, of `s̃s̃`, and the
/// `4i Ei(2iq)` factor multiplying `(I/3 − s̃s̃)`.
pub(crate) fn f_integrand_parts(q: f64) -> Result<(Complex64, Complex64, Complex64)> {
    f_integrand_parts_damped(q, 0.0)
}

/// As [`f_integrand_parts`] with the damped exponent `(2i − η) q`.
pub(crate) fn f_integrand_parts_damped(q: f64, eta: f64) -> Result<(Complex64, Complex64, Complex64)> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q = {q} must be positive")));
    }
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("damping η = {eta} must be non-negative")));
    }
    let i = Complex64::i();
    let (q1, q2, q3) = (1.0 / q, 1.0 / (q * q), 1.0 / (q * q * q));
    let exponent = Complex64::new(-eta * q, 2.0 * q);
    let phase = exponent.exp();
    let iso = phase * (Complex64::new(q3 / 3.0 - 5.0 * q1 / 3.0, -2.0 * q2 / 3.0) + 0.5 * i);
    let aniso = phase * (Complex64::new(q3 + 3.0 * q1, -2.0 * q2) - 0.5 * i);
    let ei = exponential_integral_ei(exponent)?;
    Ok((iso, aniso, 4.0 * i * ei))
}

/// `F(q)` for a boundary at constant distance `q`:
/// `−(χ/12π)(2/q³ − 4i/q² − 2/q + i) e^{2iq} I`, units of `k_A`.
pub fn f_constant_q(q: f64, chi: Complex64) -> Result<Dyadic> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q = {q} must be positive")));
    }
    let bracket = Complex64::new(2.0 / (q * q * q) - 2.0 / q, -4.0 / (q * q) + 1.0);
    let phase = Complex64::new(0.0, 2.0 * q).exp();
    Ok(Dyadic::scaled_identity(-chi / (12.0 * PI) * bracket * phase))
}

/// Linear-order scattering tensor at the centre of an empty spherical cavity of
/// radius `q_c` in bulk material of susceptibility `chi`.
pub fn cavity_green_linear(q_c: f64, chi: Complex64) -> Result<Dyadic> {
    Ok(-f_constant_q(q_c, chi)?)
}

/// Angular quadrature settings for [`body_green_linear`].
#[derive(Debug, Clone, Copy)]
pub struct AngularRule {
    /// Gauss–Legendre nodes in `cos θ`.
    pub theta_nodes: usize,
    /// Uniform nodes in `φ`.
    pub phi_nodes: usize,
    /// Give up once either node count would exceed this.
    pub max_nodes: usize,
}

impl Default for AngularRule {
    fn default() -> Self {
        AngularRule { theta_nodes: 64, phi_nodes: 64, max_nodes: 1024 }
    }
}

fn body_green_fixed(
    boundary: &dyn StarBoundary,
    chi: Complex64,
    eta: f64,
    theta_nodes: usize,
    phi_nodes: usize,
) -> Result<Dyadic> {
    let (xs, ws) = gauss_legendre(theta_nodes);
    let dphi = 2.0 * PI / phi_nodes as f64;
    let rows: Vec<Result<Dyadic>> = xs
        .par_iter()
        .zip(ws.par_iter())
        .map(|(&x, &w)| {
            let theta = x.clamp(-1.0, 1.0).acos();
            let mut row = Dyadic::zero();
            for j in 0..phi_nodes {
                let phi = dphi * j as f64;
                let q = boundary.radius(theta, phi);
                if !(q > 0.0) || !q.is_finite() {
                    return Err(Error::Domain(format!(
                        "boundary distance {q} at (θ, φ) = ({theta}, {phi}) must be positive"
                    )));
                }
                let (iso, aniso, ei_term) = f_integrand_parts_damped(q, eta)?;
                let ss = Dyadic::outer(UnitVector3::from_angles(theta, phi).components());
                let third = Dyadic::scaled_identity(Complex64::new(1.0 / 3.0, 0.0));
                row = row + Dyadic::scaled_identity(iso) + ss * aniso + (third - ss) * ei_term;
            }
            Ok(row * (w * dphi))
        })
        .collect();
    let mut total = Dyadic::zero();
    for row in rows {
        total = total + row?;
    }
    Ok(total * (-chi / (16.0 * PI * PI)))
}

/// Linear-order scattering tensor of a homogeneous star-shaped host body
/// (without the cavity) at the emitter position, units of `k_A`.
///
/// The node counts of `rule` are doubled until two successive estimates agree
/// to `tolerance` in every component.
pub fn body_green_linear(
    boundary: &dyn StarBoundary,
    chi: Complex64,
    tolerance: f64,
    rule: AngularRule,
) -> Result<Dyadic> {
    body_green_damped(boundary, chi, 0.0, tolerance, rule)
}

/// [`body_green_linear`] evaluated with a finite damping `η > 0` of the
/// background, i.e. before the `η → 0` limit.
pub fn body_green_damped(
    boundary: &dyn StarBoundary,
    chi: Complex64,
    eta: f64,
    tolerance: f64,
    rule: AngularRule,
) -> Result<Dyadic> {
    let (mut nt, mut np) = (rule.theta_nodes.max(2), rule.phi_nodes.max(2));
    let mut previous = body_green_fixed(boundary, chi, eta, nt, np)?;
    loop {
        if 2 * nt.max(np) > rule.max_nodes {
            return Err(Error::Accuracy(format!(
                "angular quadrature did not reach {tolerance:.1e} with {nt}×{np} nodes"
            )));
        }
        nt *= 2;
        np *= 2;
        let next = body_green_fixed(boundary, chi, eta, nt, np)?;
        if next.max_abs_diff(&previous) <= tolerance {
            return Ok(next);
        }
        previous = next;
    }
}
