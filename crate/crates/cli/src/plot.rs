//! Gnuplot scripts for sweep tables.
//!
//! Line styles follow the figure conventions: solid for exact, dashed for
//! linear Born, dotted for the bulk reference. When a table holds both
//! orientations the dash type encodes orientation instead (solid radial,
//! dashed tangential) and colour separates the methods.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use locfield::born::Orientation;
use locfield::rates::Method;

use crate::config::{Series, SweptVariable};
use crate::error::{CliError, Result};
use crate::sweep::TRAILING_COLUMNS;

/// Output options for the generated script.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlotStyle {
    /// Gnuplot terminal, e.g. `pngcairo`; `None` keeps the default.
    pub terminal: Option<String>,
    /// Output file for the terminal.
    pub output: Option<String>,
}

const DASH_SOLID: u8 = 1;
const DASH_DASHED: u8 = 2;
const DASH_DOTTED: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    /// One-based CSV column.
    pub column: usize,
    pub title: String,
    pub dash: u8,
    pub color: usize,
}

/// Parsed table layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub variable: SweptVariable,
    pub series: Vec<Series>,
}

pub fn parse_header(columns: &[&str]) -> Result<Layout> {
    let (first, rest) =
        columns.split_first().ok_or_else(|| CliError::Format("empty header".into()))?;
    let variable = SweptVariable::parse(first)
        .ok_or_else(|| CliError::Format(format!("unknown swept column `{first}`")))?;
    let series: Vec<Series> = rest.iter().map_while(|name| Series::parse_column(name)).collect();
    let trailing = &rest[series.len()..];
    for (i, want) in TRAILING_COLUMNS.iter().enumerate() {
        match trailing.get(i) {
            Some(got) if got == want => {}
            Some(got) if TRAILING_COLUMNS.contains(got) => {
                return Err(CliError::Format(format!("expected column `{want}`, found `{got}`")))
            }
            Some(got) => return Err(CliError::Format(format!("unknown column `{got}`"))),
            None => return Err(CliError::Format(format!("missing column `{want}`"))),
        }
    }
    if trailing.len() > TRAILING_COLUMNS.len() {
        return Err(CliError::Format(format!("unexpected column `{}`", trailing[TRAILING_COLUMNS.len()])));
    }
    if series.is_empty() {
        return Err(CliError::Format("no rate columns".into()));
    }
    Ok(Layout { variable, series })
}

fn method_dash(m: Method) -> u8 {
    match m {
        Method::Exact => DASH_SOLID,
        Method::LinearBorn => DASH_DASHED,
        Method::WeakAbsorption => 4,
        Method::Uncorrected => 5,
    }
}

fn title(s: &Series) -> String {
    let mut t = format!("{} {}", s.method.label().replace('_', " "), s.orientation.label());
    if let Some(q) = s.q_c {
        t.push_str(&format!(", qC = {q}"));
    }
    if let Some(q) = s.q_l {
        t.push_str(&format!(", qL = {q}"));
    }
    t
}

/// Curves drawn for a layout. The bulk reference is omitted for position
/// sweeps, where it is a constant of no interest.
pub fn curves(layout: &Layout) -> Vec<Curve> {
    let by_orientation = layout.series.iter().any(|s| s.orientation == Orientation::Tangential)
        && layout.series.iter().any(|s| s.orientation == Orientation::Radial);
    let mut colors: Vec<(Method, Option<f64>, Option<f64>)> = Vec::new();
    let mut out: Vec<Curve> = layout
        .series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let key = if by_orientation { (s.method, s.q_c, s.q_l) } else { (s.method, s.q_c, None) };
            let color = match colors.iter().position(|k| *k == key) {
                Some(c) => c + 1,
                None => {
                    colors.push(key);
                    colors.len()
                }
            };
            let dash = match (by_orientation, s.orientation) {
                (true, Orientation::Radial) => DASH_SOLID,
                (true, Orientation::Tangential) => DASH_DASHED,
                (false, _) => method_dash(s.method),
            };
            Curve { column: i + 2, title: title(s), dash, color }
        })
        .collect();
    if layout.variable != SweptVariable::QL {
        out.push(Curve { column: layout.series.len() + 2, title: "bulk".into(), dash: DASH_DOTTED, color: 8 });
    }
    out
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Script text for an already parsed layout.
pub fn script_for(layout: &Layout, data_path: &str, style: &PlotStyle) -> String {
    let mut s = String::new();
    if let Some(t) = &style.terminal {
        s.push_str(&format!("set terminal {t}\n"));
    }
    if let Some(o) = &style.output {
        s.push_str(&format!("set output {}\n", quote(o)));
    }
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile missing 'NaN'\n");
    let xlabel = match layout.variable {
        SweptVariable::QR => "k_A R",
        SweptVariable::ImChi => "Im {/Symbol c}",
        SweptVariable::QL => "k_A l_A",
    };
    s.push_str(&format!("set xlabel {}\n", quote(xlabel)));
    s.push_str(&format!("set ylabel {}\n", quote("{/Symbol G}/{/Symbol G}_0")));
    if layout.variable == SweptVariable::ImChi {
        s.push_str("set logscale x\n");
        s.push_str("set format x '10^{%L}'\n");
    }
    s.push_str("set key outside right\n");
    let items: Vec<String> = curves(layout)
        .iter()
        .map(|c| {
            format!(
                "{} skip 1 using 1:{} with lines dashtype {} linecolor {} title {}",
                quote(data_path),
                c.column,
                c.dash,
                c.color,
                quote(&c.title)
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&items.join(", \\\n     "));
    s.push('\n');
    s
}

/// Reads the header of a sweep CSV and returns a gnuplot script plotting it.
pub fn emit_plot_script(csv_path: &Path, style: &PlotStyle) -> Result<String> {
    let mut line = String::new();
    BufReader::new(File::open(csv_path)?).read_line(&mut line)?;
    let header = line.trim_end_matches(['\n', '\r']);
    if header.contains('"') {
        return Err(CliError::Format("quoted header fields are not produced by sweeps".into()));
    }
    let columns: Vec<&str> = header.split(',').collect();
    let layout = parse_header(&columns)?;
    Ok(script_for(&layout, &csv_path.to_string_lossy(), style))
}
