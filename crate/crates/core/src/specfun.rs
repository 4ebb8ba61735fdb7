//! Complex-argument spherical Bessel and Hankel functions, Riccati–Bessel
//! derivatives and the exponential integral.
//!
//! Orders up to [`MAX_ORDER`] and arguments with `|z| < MAX_ABS_ARG` are
//! supported. Evaluation strategy for `j_m`:
//!
//! * `|z| <= 1`: ascending power series, order by order;
//! * `m <= |z|` with a nearly real argument: closed forms for `j_0`, `j_1`
//!   followed by upward recurrence;
//! * otherwise: Miller's downward recurrence normalised against `j_0` or `j_1`.
//!
//! `h_m^{(1)}` is assembled as `j_m + i y_m` (upward recurrence for `y_m`)
//! unless `Im z > 2`, where `j_m` and `y_m` both grow like `e^{Im z}` and the
//! sum would cancel; there the closed-form seeds of `h_0`, `h_1` are recurred
//! upward directly.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 200;
pub const MAX_ABS_ARG: f64 = 1.0e4;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const RESCALE_ABOVE: f64 = 1.0e250;
const RESCALE_BY: f64 = 1.0e-250;

/// Which Riccati–Bessel function `z f_m(z)` to differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiccatiKind {
    BesselJ,
    HankelH1,
}

fn finite(v: Complex64, ctx: &str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(ctx.to_string()))
    }
}

fn check_range(m: usize, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if m > MAX_ORDER {
        return Err(Error::Domain(format!("order {m} exceeds {MAX_ORDER}")));
    }
    if z.norm() >= MAX_ABS_ARG {
        return Err(Error::Domain(format!("|z| = {} exceeds {MAX_ABS_ARG}", z.norm())));
    }
    Ok(())
}

/// `z^m/(2m+1)!! * sum_k (-z^2/2)^k / (k! (2m+3)(2m+5)...(2m+2k+1))`
fn j_series(m: usize, z: Complex64) -> Complex64 {
    let mut prefactor = Complex64::new(1.0, 0.0);
    for i in 1..=m {
        prefactor *= z / (2 * i + 1) as f64;
    }
    let w = -z * z * 0.5;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..400 {
        term *= w / (k as f64 * (2 * m + 2 * k + 1) as f64);
        sum += term;
        if term.norm() <= 1.0e-17 * sum.norm() {
            break;
        }
    }
    prefactor * sum
}

fn j0_closed(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        z.sin() / z
    }
}

fn j1_closed(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        j_series(1, z)
    } else {
        z.sin() / (z * z) - z.cos() / z
    }
}

fn j_upward(m_max: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(j0_closed(z));
    if m_max >= 1 {
        out.push(j1_closed(z));
    }
    for k in 2..=m_max {
        let next = (2 * k - 1) as f64 / z * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

fn j_miller(m_max: usize, z: Complex64) -> Vec<Complex64> {
    // the start ignores m_max so shorter arrays are bitwise prefixes of longer ones
    let reach = (MAX_ORDER as f64).max(z.norm());
    let start = reach.ceil() as usize + 20 + (40.0 * reach.max(1.0)).sqrt().ceil() as usize;

    // kept[m] is stored with the number of rescalings applied before it was
    // reached; the remaining ones are folded in logarithmically at the end
    let mut kept = vec![(Complex64::new(0.0, 0.0), 0u32); m_max + 1];
    let mut rescales = 0u32;
    let mut upper = Complex64::new(0.0, 0.0);
    let mut current = Complex64::new(1.0e-30, 0.0);
    for k in (1..=start).rev() {
        let lower = (2 * k + 1) as f64 / z * current - upper;
        upper = current;
        current = lower;
        if k - 1 <= m_max {
            kept[k - 1] = (current, rescales);
        }
        if current.norm() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            upper *= RESCALE_BY;
            rescales += 1;
        }
    }
    // current = f_0, upper = f_1
    let scale = if current.norm() >= upper.norm() {
        cdiv(j0_closed(z), current)
    } else {
        cdiv(j1_closed(z), upper)
    };
    kept.iter()
        .map(|&(v, at)| {
            let pending = rescales - at;
            if pending == 0 || v.norm() == 0.0 {
                return v * scale;
            }
            let log_mag = v.norm().ln() + scale.norm().ln() + f64::from(pending) * RESCALE_BY.ln();
            Complex64::from_polar(log_mag.exp(), v.arg() + scale.arg())
        })
        .collect()
}

/// `j_0(z), ..., j_{m_max}(z)`.
pub fn spherical_bessel_j_orders(m_max: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_range(m_max, z)?;
    let r = z.norm();
    let values = if r == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); m_max + 1];
        v[0] = Complex64::new(1.0, 0.0);
        v
    } else if r <= 1.0 {
        (0..=m_max).map(|m| j_series(m, z)).collect()
    } else if (m_max as f64) <= r && z.im.abs() <= 1.0 {
        j_upward(m_max, z)
    } else {
        j_miller(m_max, z)
    };
    for v in &values {
        finite(*v, "spherical_bessel_j")?;
    }
    Ok(values)
}

/// Spherical Bessel function of the first kind `j_m(z)`.
pub fn spherical_bessel_j(m: usize, z: Complex64) -> Result<Complex64> {
    Ok(spherical_bessel_j_orders(m, z)?[m])
}

fn y_upward(m_max: usize, z: Complex64) -> Vec<Complex64> {
    let (s, c) = (z.sin(), z.cos());
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(-c / z);
    if m_max >= 1 {
        out.push(-c / (z * z) - s / z);
    }
    for k in 2..=m_max {
        let next = (2 * k - 1) as f64 / z * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

fn h_upward(m_max: usize, z: Complex64) -> Vec<Complex64> {
    let i = Complex64::i();
    let e = (i * z).exp();
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(-i * e / z);
    if m_max >= 1 {
        out.push(-(1.0 / z + i / (z * z)) * e);
    }
    for k in 2..=m_max {
        let next = (2 * k - 1) as f64 / z * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

/// `h^{(1)}_0(z), ..., h^{(1)}_{m_max}(z)`.
pub fn spherical_hankel_h1_orders(m_max: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_range(m_max, z)?;
    if z.norm() == 0.0 {
        return Err(Error::Singularity("h^(1)_m(z) at z = 0".into()));
    }
    let values = if z.im > 2.0 {
        h_upward(m_max, z)
    } else {
        let j = spherical_bessel_j_orders(m_max, z)?;
        let y = y_upward(m_max, z);
        j.iter()
            .zip(&y)
            .map(|(j, y)| j + Complex64::i() * y)
            .collect()
    };
    for v in &values {
        finite(*v, "spherical_hankel_h1")?;
    }
    Ok(values)
}

/// Spherical Hankel function of the first kind `h^{(1)}_m(z)`.
pub fn spherical_hankel_h1(m: usize, z: Complex64) -> Result<Complex64> {
    Ok(spherical_hankel_h1_orders(m, z)?[m])
}

/// `a/b` without forming `|b|²`, which overflows once `|b| > 1e154`.
pub(crate) fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}

/// `[z f_m(z)]'` given `f_{m-1}(z)` and `f_m(z)` (m >= 1).
pub(crate) fn riccati_from_pair(m: usize, z: Complex64, lower: Complex64, f: Complex64) -> Complex64 {
    z * lower - m as f64 * f
}

/// Derivative of the Riccati–Bessel function `z f_m(z)` with respect to `z`,
/// from the identity `[z f_m]' = z f_{m-1} - m f_m`.
pub fn riccati_derivative(kind: RiccatiKind, m: usize, z: Complex64) -> Result<Complex64> {
    check_range(m, z)?;
    let value = match (kind, m) {
        (RiccatiKind::BesselJ, 0) => z.cos(),
        (RiccatiKind::HankelH1, 0) => {
            if z.norm() == 0.0 {
                return Err(Error::Singularity("h^(1)_0(z) at z = 0".into()));
            }
            (Complex64::i() * z).exp()
        }
        (RiccatiKind::BesselJ, m) => {
            let j = spherical_bessel_j_orders(m, z)?;
            riccati_from_pair(m, z, j[m - 1], j[m])
        }
        (RiccatiKind::HankelH1, m) => {
            let h = spherical_hankel_h1_orders(m, z)?;
            riccati_from_pair(m, z, h[m - 1], h[m])
        }
    };
    finite(value, "riccati_derivative")
}

/// `E_1(w)` by the modified Lentz evaluation of its continued fraction.
fn e1_continued_fraction(w: Complex64) -> Result<Complex64> {
    const TINY: f64 = 1.0e-300;
    let mut b = w + 1.0;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..20_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1.0e-16 {
            return Ok(h * (-w).exp());
        }
    }
    Err(Error::Accuracy(format!("E1 continued fraction at w = {w}")))
}

fn ei_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let r = z.norm();
    for k in 1..6000usize {
        let kf = k as f64;
        term *= z / kf; // z^k / k!
        let contribution = term / kf;
        sum += contribution;
        if kf > r && contribution.norm() <= 1.0e-17 * sum.norm() {
            break;
        }
    }
    EULER_GAMMA + z.ln() + sum
}

/// Exponential integral `Ei(z)` on the principal branch (cut along the
/// negative real axis; points on the cut take the side selected by the sign
/// of the imaginary zero, `+0` meaning the upper side).
///
/// Uses the ascending series while it is free of cancellation and the
/// continued fraction of `E_1(-z)` otherwise.
pub fn exponential_integral_ei(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Singularity("Ei(z) at z = 0".into()));
    }
    let value = if r <= 12.0 || r - z.re <= 10.0 {
        ei_series(z)
    } else {
        let e1 = e1_continued_fraction(-z)?;
        let side = if z.im.is_sign_negative() { -1.0 } else { 1.0 };
        -e1 + Complex64::new(0.0, side * std::f64::consts::PI)
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("Ei({z}) is not representable")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn j1_at_pi() {
        let v = spherical_bessel_j(1, c(PI, 0.0)).unwrap();
        assert!((v.re - 1.0 / PI).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(spherical_bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        for m in 1..5 {
            assert_eq!(spherical_bessel_j(m, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn j1_matches_thirty_term_series() {
        // ascending series of j_1: sum_k (-1)^k z^(2k+1) / (2^k k! (2k+3)!!)
        let z = c(0.5, 0.1);
        let mut sum = c(0.0, 0.0);
        let mut zpow = z;
        let mut fact = 1.0;
        let mut two_k = 1.0;
        let mut dfact = 3.0; // (2k+3)!!
        for k in 0..30 {
            if k > 0 {
                fact *= k as f64;
                two_k *= 2.0;
                dfact *= (2 * k + 3) as f64;
                zpow *= z * z;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += zpow * (sign / (two_k * fact * dfact));
        }
        let v = spherical_bessel_j(1, z).unwrap();
        assert!(rel(v, sum) < 1e-14, "{v} vs {sum}");
    }

    #[test]
    fn h1_closed_form_at_one() {
        let expected = -(c(1.0, 1.0)) * c(0.0, 1.0).exp();
        let v = spherical_hankel_h1(1, c(1.0, 0.0)).unwrap();
        assert!(rel(v, expected) < 1e-15);
    }

    #[test]
    fn h1_small_argument_leading_term() {
        let z = Complex64::from_polar(1e-3, 0.7);
        let v = spherical_hankel_h1(1, z).unwrap();
        assert!((v.norm() / 1e6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn h2_matches_recurrence_from_closed_forms() {
        let z = c(0.3, 0.2);
        let i = Complex64::i();
        let h0 = -i * (i * z).exp() / z;
        let h1 = -(1.0 / z + i / (z * z)) * (i * z).exp();
        let h2 = 3.0 / z * h1 - h0;
        let v = spherical_hankel_h1(2, z).unwrap();
        assert!(rel(v, h2) < 1e-13, "{v} vs {h2}");
    }

    #[test]
    fn hankel_singular_at_origin() {
        assert!(matches!(
            spherical_hankel_h1(1, c(0.0, 0.0)),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(spherical_bessel_j(201, c(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(spherical_bessel_j(1, c(2.0e4, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn riccati_examples() {
        let z = c(0.8, -0.3);
        let d = riccati_derivative(RiccatiKind::BesselJ, 0, z).unwrap();
        assert!(rel(d, z.cos()) < 1e-15);

        let small = c(1e-4, 0.0);
        let d = riccati_derivative(RiccatiKind::BesselJ, 1, small).unwrap();
        assert!((d.re / (2.0 * 1e-4 / 3.0) - 1.0).abs() < 1e-7);

        // central difference of z h_1(z) at z = 1
        let step = 1e-6;
        let f = |x: f64| c(x, 0.0) * spherical_hankel_h1(1, c(x, 0.0)).unwrap();
        let fd = (f(1.0 + step) - f(1.0 - step)) / (2.0 * step);
        let d = riccati_derivative(RiccatiKind::HankelH1, 1, c(1.0, 0.0)).unwrap();
        assert!(rel(d, fd) < 1e-8, "{d} vs {fd}");
    }

    #[test]
    fn ei_at_one() {
        let v = exponential_integral_ei(c(1.0, 0.0)).unwrap();
        assert!((v.re - 1.895_117_816_355_936_8).abs() < 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn ei_positive_real_matches_real_function() {
        // Ei(50) = 1.0585636897131690963e20
        let v = exponential_integral_ei(c(50.0, 0.0)).unwrap();
        assert!((v.re / 1.058_563_689_713_169_1e20 - 1.0).abs() < 1e-13);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn ei_overflows_far_on_positive_axis() {
        assert!(matches!(
            exponential_integral_ei(c(800.0, 0.0)),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(
            exponential_integral_ei(c(0.0, 0.0)),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn ei_branch_sides_across_cut() {
        let above = exponential_integral_ei(c(-20.0, 0.0)).unwrap();
        let below = exponential_integral_ei(c(-20.0, -0.0)).unwrap();
        assert!((above.im - PI).abs() < 1e-14);
        assert!((below.im + PI).abs() < 1e-14);
        assert!((above.re - below.re).abs() < 1e-25);
        // Ei(-20) = -E1(20) = -9.8355252906498816904e-11
        assert!((above.re / -9.835_525_290_649_882e-11 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ei_is_continuous_across_series_switch() {
        for &arg in &[0.3, 1.2, 2.0, 2.8] {
            let zi = Complex64::from_polar(11.999_999, arg);
            let zo = Complex64::from_polar(12.000_001, arg);
            let inside = exponential_integral_ei(zi).unwrap();
            let outside = exponential_integral_ei(zo).unwrap();
            let zm = 0.5 * (zi + zo);
            let predicted = inside + zm.exp() / zm * (zo - zi);
            assert!(rel(predicted, outside) < 1e-11, "arg {arg}");
        }
    }

}
