use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use locfield::born::{Orientation, DEFAULT_NU, DEFAULT_TOLERANCE};
use locfield::rates::{bulk_reference, compute, gamma0_si, permittivity, AtomParams, Geometry, Method, RateRequest};
use locfield_cli::config::{parse_override, parse_pairs};
use locfield_cli::sweep::format_float;
use locfield_cli::{emit_plot_script, run_sweep, spec_from_pairs, CliError, PlotStyle, Result};

#[derive(Parser, Debug)]
#[command(name = "locfield", version, about = "Local-field corrected decay rates in dielectric spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a parameter sweep and write it as CSV.
    Sweep {
        /// Built-in preset (fig3a, fig3b, fig4, fig5a, fig5b, fig6a, fig6b).
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Flat `key = value` config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Extra `key=value` settings applied after the preset or file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a single configuration and print the rate breakdown.
    Compute {
        #[arg(long, allow_negative_numbers = true)]
        eps_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps_im: f64,
        /// Sphere radius `k_A R`; omit for an unbounded host.
        #[arg(long)]
        qr: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        qc: f64,
        #[arg(long, default_value_t = 0.0)]
        ql: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = OrientationArg::Radial)]
        orientation: OrientationArg,
        #[arg(long, default_value_t = DEFAULT_NU)]
        nu: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Transition wavelength in metres, for the SI free-space rate.
        #[arg(long, requires = "dipole")]
        wavelength: Option<f64>,
        /// Transition dipole moment in C·m, for the SI free-space rate.
        #[arg(long, requires = "wavelength")]
        dipole: Option<f64>,
    },
    /// Print a gnuplot script for a sweep CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        /// Write the script here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        terminal: Option<String>,
        /// Image file named in the script's `set output`.
        #[arg(long)]
        image: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Exact,
    LinearBorn,
    WeakAbsorption,
    Uncorrected,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::LinearBorn => Method::LinearBorn,
            MethodArg::WeakAbsorption => Method::WeakAbsorption,
            MethodArg::Uncorrected => Method::Uncorrected,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Radial,
    Tangential,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Radial => Orientation::Radial,
            OrientationArg::Tangential => Orientation::Tangential,
        }
    }
}

fn sweep(preset: Option<String>, config: Option<PathBuf>, overrides: &[String], out: &Path) -> Result<()> {
    let mut pairs = match (preset, config) {
        (Some(name), None) => vec![("preset".to_string(), name)],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_pairs(&text)?
        }
        (None, None) => return Err(CliError::Config("give --preset or --config".into())),
        (Some(_), Some(_)) => unreachable!("clap rejects --preset with --config"),
    };
    for o in overrides {
        pairs.push(parse_override(o)?);
    }
    let spec = spec_from_pairs(&pairs)?;
    let started = std::time::Instant::now();
    let summary = run_sweep(&spec, out)?;
    log::info!("{} rows written to {} in {:.2?}", summary.rows, out.display(), started.elapsed());
    if summary.failed_rows > 0 {
        return Err(CliError::PointErrors { failed: summary.failed_rows, total: summary.rows });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep { preset, config, overrides, out } => sweep(preset, config, &overrides, &out),
        Command::Compute { eps_re, eps_im, qr, qc, ql, method, orientation, nu, tolerance, wavelength, dipole } => {
            let eps = permittivity(eps_re, eps_im)?;
            let geometry = match qr {
                Some(q_r) => Geometry::Sphere { q_r, q_l: ql },
                None if ql == 0.0 => Geometry::Bulk,
                None => return Err(CliError::Config("--ql needs --qr".into())),
            };
            let mut req = RateRequest::new(geometry, eps, qc, orientation.into(), method.into());
            req.nu = nu;
            req.tolerance = tolerance;
            let report = compute(&req)?;
            let b = report.breakdown;
            let v = report.validity;
            println!("method={}", req.method.label());
            println!("total_ratio={}", format_float(b.total_ratio));
            println!("gamma_c_ratio={}", format_float(b.gamma_c_ratio));
            println!("gamma_b_ratio={}", format_float(b.gamma_b_ratio));
            println!("bulk={}", format_float(bulk_reference(&eps, qc)?));
            if let Some(s) = v.size_value {
                println!("size_value={}", format_float(s));
            }
            println!("size_ok={}", v.size_ok);
            println!("absorption_value={}", format_float(v.absorption_value));
            println!("absorption_ok={}", v.absorption_ok);
            if let Some(c) = report.condition_value {
                println!("condition_value={}", format_float(c));
            }
            if let (Some(lambda), Some(d)) = (wavelength, dipole) {
                let g0 = gamma0_si(&AtomParams::from_wavelength(lambda, Some(d))?)?;
                println!("gamma0_si={}", format_float(g0));
                println!("gamma_si={}", format_float(g0 * b.total_ratio));
            }
            Ok(())
        }
        Command::Plot { csv, out, terminal, image } => {
            let script = emit_plot_script(&csv, &PlotStyle { terminal, output: image })?;
            match out {
                Some(path) => std::fs::write(path, script)?,
                None => print!("{script}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("locfield: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
