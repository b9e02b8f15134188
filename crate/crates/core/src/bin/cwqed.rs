//! Command-line front end: LDOS scans, cavity-parameter sweeps, and
//! single-photon source figure-of-merit sweeps, emitted as plot-ready CSV.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cwqed::config::RunConfig;
use cwqed::error::Error;
use cwqed::pipeline::FomMethod;
use cwqed::sweep::{
    self, default_reflectivity_grid, default_transmittivity_grid, SweepParameter, SweepSpec,
};

#[derive(Parser)]
#[command(name = "cwqed", version, about = "Cavity-waveguide QED single-photon source simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Key-value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset: fig1b|fig1c|fig1d|fig2|fig3-short|fig3-long.
    #[arg(long)]
    preset: Option<String>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Numeric,
    Analytic,
    Both,
}

impl From<MethodArg> for FomMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Numeric => FomMethod::Numeric,
            MethodArg::Analytic => FomMethod::Analytic,
            MethodArg::Both => FomMethod::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    R,
    T,
    L,
}

#[derive(Subcommand)]
enum Command {
    /// Guided-mode LDOS over a frequency window around the resonance.
    Ldos {
        #[command(flatten)]
        common: ConfigArgs,
        /// Half-width of the scan in free spectral ranges.
        #[arg(long, default_value_t = 2.0)]
        span_fsr: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Emit the frequency column as (ω − ω_c)/FSR instead of μeV.
        #[arg(long)]
        fsr_units: bool,
    },
    /// Effective cavity parameters (Γ_B, L_c, κ, g) vs mirror reflectivity.
    Params {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0.99)]
        r_max: f64,
        /// Comma-separated cavity lengths in μm (defaults to the preset's).
        #[arg(long)]
        lengths: Option<String>,
    },
    /// Figures of merit vs front-mirror transmittivity (perfect back mirror).
    Fom {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 60)]
        points: usize,
    },
    /// Generic sweep over r, T or L.
    Sweep {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        points: usize,
        /// Logarithmic grid spacing.
        #[arg(long)]
        log: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn load_config(common: &ConfigArgs) -> Result<RunConfig, Error> {
    match (&common.config, &common.preset) {
        (Some(path), None) => RunConfig::from_file(path),
        (None, Some(name)) => RunConfig::preset(name),
        (Some(path), Some(name)) => {
            let mut cfg = RunConfig::preset(name)?;
            let file = RunConfig::from_file(path)?;
            cfg.structure = file.structure;
            cfg.phonons = file.phonons;
            cfg.n_max = file.n_max;
            Ok(cfg)
        }
        (None, None) => Err(Error::Config(
            "one of --config or --preset is required".into(),
        )),
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) => Ok(Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn make_grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>, Error> {
    if points < 2 || !(max > min) {
        return Err(Error::Config(
            "grid needs at least 2 points and max > min".into(),
        ));
    }
    if log && min <= 0.0 {
        return Err(Error::Config("log grid requires min > 0".into()));
    }
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            if log {
                10f64.powf(min.log10() + t * (max.log10() - min.log10()))
            } else {
                min + t * (max - min)
            }
        })
        .collect())
}

fn run(cli: Cli) -> Result<usize, Error> {
    match cli.command {
        Command::Ldos {
            common,
            span_fsr,
            points,
            fsr_units,
        } => {
            let cfg = load_config(&common)?;
            if points < 2 {
                return Err(Error::Config("ldos needs at least 2 points".into()));
            }
            let fsr = cfg.structure.fsr();
            let lo = cfg.structure.omega_c - span_fsr * fsr;
            let hi = cfg.structure.omega_c + span_fsr * fsr;
            let scan = sweep::run_ldos_scan(&cfg, lo, hi, points)?;
            let mut out = open_output(&common.out)?;
            sweep::write_ldos_csv(&mut out, &cfg, &scan, fsr_units)?;
            Ok(0)
        }
        Command::Params {
            common,
            points,
            r_max,
            lengths,
        } => {
            let cfg = load_config(&common)?;
            if points == 0 {
                return Err(Error::Config("params needs a nonempty grid".into()));
            }
            if !(0.0..1.0).contains(&r_max) {
                return Err(Error::Config("r_max must lie in [0, 1)".into()));
            }
            let lengths: Vec<f64> = match (&lengths, common.preset.as_deref()) {
                (Some(list), _) => list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad length {s:?}")))
                    })
                    .collect::<Result<_, _>>()?,
                (None, Some("fig2")) => vec![1.0, 4.0],
                (None, _) => vec![cfg.structure.length_um],
            };
            let grid = default_reflectivity_grid(points, r_max);
            let rows = sweep::run_params_sweep(&cfg, &lengths, &grid)?;
            let mut out = open_output(&common.out)?;
            sweep::write_params_csv(&mut out, &cfg, &rows)?;
            Ok(0)
        }
        Command::Fom {
            common,
            method,
            workers,
            points,
        } => {
            let cfg = load_config(&common)?;
            if points == 0 {
                return Err(Error::Config("fom needs a nonempty grid".into()));
            }
            let spec = SweepSpec {
                parameter: SweepParameter::Transmittivity,
                grid: default_transmittivity_grid(points),
                config: cfg.clone(),
                method: method.into(),
                workers: workers.max(1),
            };
            let outcomes = sweep::run_fom_sweep(&spec)?;
            let mut out = open_output(&common.out)?;
            let failures = sweep::write_fom_csv(&mut out, &cfg, &outcomes)?;
            Ok(failures)
        }
        Command::Sweep {
            common,
            param,
            min,
            max,
            points,
            log,
            method,
            workers,
        } => {
            let cfg = load_config(&common)?;
            let grid = make_grid(min, max, points, log)?;
            match param {
                ParamArg::R => {
                    for &r in &grid {
                        if !(0.0..1.0).contains(&r) {
                            return Err(Error::Config(format!("r = {r} outside [0, 1)")));
                        }
                    }
                    let rows =
                        sweep::run_params_sweep(&cfg, &[cfg.structure.length_um], &grid)?;
                    let mut out = open_output(&common.out)?;
                    sweep::write_params_csv(&mut out, &cfg, &rows)?;
                    Ok(0)
                }
                ParamArg::T | ParamArg::L => {
                    let spec = SweepSpec {
                        parameter: if matches!(param, ParamArg::T) {
                            SweepParameter::Transmittivity
                        } else {
                            SweepParameter::Length
                        },
                        grid,
                        config: cfg.clone(),
                        method: method.into(),
                        workers: workers.max(1),
                    };
                    let outcomes = sweep::run_fom_sweep(&spec)?;
                    let mut out = open_output(&common.out)?;
                    let failures = sweep::write_fom_csv(&mut out, &cfg, &outcomes)?;
                    Ok(failures)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("cwqed: {failures} sweep point(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("cwqed: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
