//! Sweep specifications, the built-in figure presets and the flat
//! `key = value` config format.
//!
//! A config file is a list of `key = value` lines; `#` starts a comment and
//! blank lines are ignored. Keys:
//!
//! | key | value |
//! |-----|-------|
//! | `preset` | name of a built-in preset used as the starting point |
//! | `variable` | `qR`, `im_chi` or `qL` |
//! | `lo`, `hi` | sweep range, `lo < hi` |
//! | `points` | number of sweep points, at least 2 |
//! | `spacing` | `linear` (default) or `log` |
//! | `eps_re`, `eps_im` | host permittivity |
//! | `q_r`, `q_l`, `q_c` | sphere radius, emitter offset, cavity radius (units of `1/k_A`) |
//! | `nu` | relative cavity margin kept from the sphere surface |
//! | `tolerance` | absolute tolerance of the angular quadratures |
//! | `series` | comma-separated `method:orientation[:qc=v][:ql=v]` items |
//!
//! Later keys override earlier ones, so command-line overrides are appended
//! after the file contents.

use std::fmt;

use locfield::born::{Orientation, DEFAULT_NU, DEFAULT_TOLERANCE};
use locfield::rates::Method;

use crate::error::{CliError, Result};

/// Upper bound on sweep points; larger tables are almost certainly typos.
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptVariable {
    /// Sphere radius `k_A R`.
    QR,
    /// Imaginary part of the susceptibility, equal to `Im ε`.
    ImChi,
    /// Emitter offset from the sphere centre `k_A l_A`.
    QL,
}

impl SweptVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweptVariable::QR => "qR",
            SweptVariable::ImChi => "im_chi",
            SweptVariable::QL => "qL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "qR" => Some(SweptVariable::QR),
            "im_chi" => Some(SweptVariable::ImChi),
            "qL" => Some(SweptVariable::QL),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Parameters held fixed along the sweep; the swept one is overwritten per
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub eps_re: f64,
    pub eps_im: f64,
    pub q_r: f64,
    pub q_l: f64,
    pub q_c: f64,
    pub nu: f64,
    pub tolerance: f64,
}

impl FixedParams {
    pub fn at(&self, variable: SweptVariable, value: f64) -> FixedParams {
        let mut p = *self;
        match variable {
            SweptVariable::QR => p.q_r = value,
            SweptVariable::ImChi => p.eps_im = value,
            SweptVariable::QL => p.q_l = value,
        }
        p
    }
}

/// One output column: a method and orientation, optionally with its own
/// cavity radius or emitter offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Series {
    pub method: Method,
    pub orientation: Orientation,
    pub q_c: Option<f64>,
    pub q_l: Option<f64>,
}

impl Series {
    pub fn new(method: Method, orientation: Orientation) -> Self {
        Series { method, orientation, q_c: None, q_l: None }
    }

    pub fn with_q_c(self, q_c: f64) -> Self {
        Series { q_c: Some(q_c), ..self }
    }

    pub fn with_q_l(self, q_l: f64) -> Self {
        Series { q_l: Some(q_l), ..self }
    }

    /// CSV column name, e.g. `linear_born_radial_qc0.02`.
    pub fn column_name(&self) -> String {
        let mut s = format!("{}_{}", self.method.label(), self.orientation.label());
        if let Some(q) = self.q_c {
            s.push_str(&format!("_qc{q}"));
        }
        if let Some(q) = self.q_l {
            s.push_str(&format!("_ql{q}"));
        }
        s
    }

    /// Inverse of [`Series::column_name`].
    pub fn parse_column(name: &str) -> Option<Series> {
        let methods = [Method::LinearBorn, Method::Exact, Method::WeakAbsorption, Method::Uncorrected];
        let (method, rest) = methods
            .iter()
            .find_map(|&m| name.strip_prefix(m.label()).and_then(|r| r.strip_prefix('_')).map(|r| (m, r)))?;
        let (orientation, mut rest) = [Orientation::Radial, Orientation::Tangential]
            .iter()
            .find_map(|&o| rest.strip_prefix(o.label()).map(|r| (o, r)))?;
        let mut series = Series::new(method, orientation);
        if let Some(r) = rest.strip_prefix("_qc") {
            let end = r.find("_ql").unwrap_or(r.len());
            series.q_c = Some(r[..end].parse().ok()?);
            rest = &r[end..];
        }
        if let Some(r) = rest.strip_prefix("_ql") {
            series.q_l = Some(r.parse().ok()?);
            rest = "";
        }
        rest.is_empty().then_some(series)
    }

    /// Parses a config item `method:orientation[:qc=v][:ql=v]`.
    pub fn parse_item(item: &str) -> Result<Series> {
        let mut parts = item.split(':').map(str::trim);
        let method = parts.next().unwrap_or_default();
        let method = Method::parse(method).ok_or_else(|| CliError::Config(format!("unknown method `{method}`")))?;
        let orientation = match parts.next() {
            Some("radial") => Orientation::Radial,
            Some("tangential") => Orientation::Tangential,
            other => {
                return Err(CliError::Config(format!(
                    "series `{item}`: orientation must be `radial` or `tangential`, got {other:?}"
                )))
            }
        };
        let mut series = Series::new(method, orientation);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("series `{item}`: expected key=value, got `{part}`")))?;
            let value = parse_f64(key, value)?;
            match key.trim() {
                "qc" => series.q_c = Some(value),
                "ql" => series.q_l = Some(value),
                k => return Err(CliError::Config(format!("series `{item}`: unknown option `{k}`"))),
            }
        }
        Ok(series)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.method.label(), self.orientation.label())?;
        if let Some(q) = self.q_c {
            write!(f, ":qc={q}")?;
        }
        if let Some(q) = self.q_l {
            write!(f, ":ql={q}")?;
        }
        Ok(())
    }
}

/// A one-dimensional sweep producing one CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweptVariable,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub fixed: FixedParams,
    pub series: Vec<Series>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return bad(format!("sweep range needs finite lo < hi, got [{}, {}]", self.lo, self.hi));
        }
        if self.points < 2 {
            return bad(format!("a sweep needs at least 2 points, got {}", self.points));
        }
        if self.points > MAX_POINTS {
            return bad(format!("at most {MAX_POINTS} points, got {}", self.points));
        }
        if self.spacing == Spacing::Log && self.lo <= 0.0 {
            return bad(format!("log spacing needs lo > 0, got {}", self.lo));
        }
        if self.series.is_empty() {
            return bad("no series requested".into());
        }
        let f = &self.fixed;
        for (name, v) in [
            ("eps_re", f.eps_re),
            ("eps_im", f.eps_im),
            ("q_r", f.q_r),
            ("q_l", f.q_l),
            ("q_c", f.q_c),
            ("nu", f.nu),
            ("tolerance", f.tolerance),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if f.tolerance <= 0.0 {
            return bad(format!("tolerance must be positive, got {}", f.tolerance));
        }
        let mut names: Vec<String> = self.series.iter().map(Series::column_name).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("series `{}` requested twice", w[0]));
        }
        Ok(())
    }

    /// Sweep abscissae; the end points are exactly `lo` and `hi`.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == 0 {
                    return self.lo;
                }
                if k == last {
                    return self.hi;
                }
                let t = k as f64 / last as f64;
                match self.spacing {
                    Spacing::Linear => self.lo + t * (self.hi - self.lo),
                    Spacing::Log => (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }
}

pub const PRESETS: [&str; 7] = ["fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6a", "fig6b"];

fn fixed(eps_re: f64, q_r: f64, q_l: f64) -> FixedParams {
    FixedParams { eps_re, eps_im: 1e-8, q_r, q_l, q_c: 0.01, nu: DEFAULT_NU, tolerance: DEFAULT_TOLERANCE }
}

/// Built-in figure sweeps.
pub fn preset(name: &str) -> Result<SweepSpec> {
    use Method::*;
    use Orientation::*;
    let centre = vec![Series::new(Exact, Radial), Series::new(LinearBorn, Radial)];
    let both = |method| [Series::new(method, Radial), Series::new(method, Tangential)];
    let radius = |eps_re| SweepSpec {
        variable: SweptVariable::QR,
        lo: 0.5,
        hi: 10.0,
        points: 200,
        spacing: Spacing::Linear,
        fixed: fixed(eps_re, 0.5, 0.0),
        series: centre.clone(),
    };
    // positions stop short of the surface so the cavity stays inside
    let position = |q_r: f64| SweepSpec {
        variable: SweptVariable::QL,
        lo: 0.0,
        hi: 0.98 * q_r,
        points: 99,
        spacing: Spacing::Linear,
        fixed: fixed(1.1, q_r, 0.0),
        series: [both(LinearBorn), both(Uncorrected)].concat(),
    };
    let offset = |q_l: f64, points| SweepSpec {
        variable: SweptVariable::QR,
        lo: q_l + 0.5,
        hi: 10.0,
        points,
        spacing: Spacing::Linear,
        fixed: fixed(1.1, q_l + 0.5, q_l),
        series: [&both(LinearBorn)[..], &[Series::new(LinearBorn, Radial).with_q_l(0.0)]].concat(),
    };
    Ok(match name {
        "fig3a" => radius(1.1),
        "fig3b" => radius(1.2),
        "fig4" => SweepSpec {
            variable: SweptVariable::ImChi,
            lo: 1e-8,
            hi: 1e-6,
            points: 41,
            spacing: Spacing::Log,
            fixed: fixed(1.1, 2.0, 0.0),
            series: [0.01, 0.02]
                .iter()
                .flat_map(|&q| [Series::new(Exact, Radial).with_q_c(q), Series::new(LinearBorn, Radial).with_q_c(q)])
                .collect(),
        },
        "fig5a" => position(1.0),
        "fig5b" => position(5.0),
        "fig6a" => offset(1.0, 171),
        "fig6b" => offset(5.0, 91),
        other => return Err(CliError::Config(format!("unknown preset `{other}`; known: {}", PRESETS.join(", ")))),
    })
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.trim().parse().map_err(|_| CliError::Config(format!("{}: `{}` is not a number", key.trim(), value.trim())))
}

/// Splits config text into `(key, value)` pairs in file order.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Parses a single `key=value` command-line override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (key, value) =
        s.split_once('=').ok_or_else(|| CliError::Config(format!("override `{s}` is not of the form key=value")))?;
    Ok((key.trim().to_string(), value.trim().to_string()))
}

#[derive(Default)]
struct Draft {
    variable: Option<SweptVariable>,
    lo: Option<f64>,
    hi: Option<f64>,
    points: Option<usize>,
    spacing: Option<Spacing>,
    eps_re: Option<f64>,
    eps_im: Option<f64>,
    q_r: Option<f64>,
    q_l: Option<f64>,
    q_c: Option<f64>,
    nu: Option<f64>,
    tolerance: Option<f64>,
    series: Option<Vec<Series>>,
}

impl Draft {
    fn from_spec(s: SweepSpec) -> Draft {
        let f = s.fixed;
        Draft {
            variable: Some(s.variable),
            lo: Some(s.lo),
            hi: Some(s.hi),
            points: Some(s.points),
            spacing: Some(s.spacing),
            eps_re: Some(f.eps_re),
            eps_im: Some(f.eps_im),
            q_r: Some(f.q_r),
            q_l: Some(f.q_l),
            q_c: Some(f.q_c),
            nu: Some(f.nu),
            tolerance: Some(f.tolerance),
            series: Some(s.series),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || parse_f64(key, value);
        match key {
            "variable" => {
                self.variable = Some(SweptVariable::parse(value).ok_or_else(|| {
                    CliError::Config(format!("variable must be `qR`, `im_chi` or `qL`, got `{value}`"))
                })?)
            }
            "lo" => self.lo = Some(num()?),
            "hi" => self.hi = Some(num()?),
            "points" => {
                self.points = Some(
                    value.parse().map_err(|_| CliError::Config(format!("points: `{value}` is not a count")))?,
                )
            }
            "spacing" => {
                self.spacing = Some(match value {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    _ => return Err(CliError::Config(format!("spacing must be `linear` or `log`, got `{value}`"))),
                })
            }
            "eps_re" => self.eps_re = Some(num()?),
            "eps_im" => self.eps_im = Some(num()?),
            "q_r" => self.q_r = Some(num()?),
            "q_l" => self.q_l = Some(num()?),
            "q_c" => self.q_c = Some(num()?),
            "nu" => self.nu = Some(num()?),
            "tolerance" => self.tolerance = Some(num()?),
            "series" => {
                self.series = Some(
                    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Series::parse_item).collect::<Result<_>>()?,
                )
            }
            "preset" => return Err(CliError::Config("`preset` must come before every other key".into())),
            other => return Err(CliError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<SweepSpec> {
        let need = |name: &str| CliError::Config(format!("missing required key `{name}`"));
        let variable = self.variable.ok_or_else(|| need("variable"))?;
        let lo = self.lo.ok_or_else(|| need("lo"))?;
        let hi = self.hi.ok_or_else(|| need("hi"))?;
        // the swept parameter needs no fixed value
        let q_r = match (self.q_r, variable) {
            (Some(q), _) => q,
            (None, SweptVariable::QR) => lo,
            (None, _) => return Err(need("q_r")),
        };
        let spec = SweepSpec {
            variable,
            lo,
            hi,
            points: self.points.ok_or_else(|| need("points"))?,
            spacing: self.spacing.unwrap_or(Spacing::Linear),
            fixed: FixedParams {
                eps_re: self.eps_re.ok_or_else(|| need("eps_re"))?,
                eps_im: self.eps_im.unwrap_or(0.0),
                q_r,
                q_l: self.q_l.unwrap_or(0.0),
                q_c: self.q_c.unwrap_or(0.01),
                nu: self.nu.unwrap_or(DEFAULT_NU),
                tolerance: self.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            },
            series: self.series.ok_or_else(|| need("series"))?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Builds a sweep from ordered `(key, value)` pairs. A leading `preset` key
/// seeds every field; without it `variable`, `lo`, `hi`, `points`, `eps_re`,
/// `series` and (unless swept) `q_r` are required.
pub fn spec_from_pairs(pairs: &[(String, String)]) -> Result<SweepSpec> {
    let (mut draft, rest) = match pairs.first() {
        Some((k, v)) if k == "preset" => (Draft::from_spec(preset(v)?), &pairs[1..]),
        _ => (Draft::default(), pairs),
    };
    for (k, v) in rest {
        draft.set(k, v)?;
    }
    draft.finish()
}
